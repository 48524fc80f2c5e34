#include "qcor/net.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qcor/util.hpp"

namespace qcor {

namespace {

// rows of the final linear layer: V plus one advantage per action when dueling
int head_rows(const ParamNet& net) {
  return net.dueling ? net.output_dim() + 1 : net.output_dim();
}

int layer_rows(const ParamNet& net, std::size_t layer) {
  if (layer + 2 == net.layer_sizes.size()) return head_rows(net);
  return net.layer_sizes[layer + 1];
}

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw numeric_error(std::string("non-finite ") + what);
  }
}

}  // namespace

ParamNet ParamNet::create(std::vector<int> layer_sizes, bool dueling, Rng& rng) {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("ParamNet: need at least input and output dims");
  }
  for (int s : layer_sizes) {
    if (s <= 0) throw std::invalid_argument("ParamNet: layer sizes must be positive");
  }
  ParamNet net;
  net.layer_sizes = std::move(layer_sizes);
  net.dueling = dueling;
  const std::size_t n_layers = net.layer_sizes.size() - 1;
  net.weights.resize(n_layers);
  net.biases.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int fan_in = net.layer_sizes[l];
    const int rows = layer_rows(net, l);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    net.weights[l].resize(static_cast<std::size_t>(rows) * fan_in);
    net.biases[l].resize(rows);
    for (double& w : net.weights[l]) w = rng.uniform(-bound, bound);
    for (double& b : net.biases[l]) b = rng.uniform(-bound, bound);
  }
  return net;
}

std::size_t ParamNet::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += weights[l].size() + biases[l].size();
  }
  return n;
}

VecD ParamNet::forward(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != input_dim()) {
    throw std::invalid_argument("forward: input length does not match input dim");
  }
  VecD act(input.begin(), input.end());
  VecD next;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int rows = layer_rows(*this, l);
    next.assign(rows, 0.0);
    const double* w = weights[l].data();
    for (int r = 0; r < rows; ++r) {
      double sum = biases[l][r];
      const double* wr = w + static_cast<std::size_t>(r) * fan_in;
      for (int c = 0; c < fan_in; ++c) sum += wr[c] * act[c];
      next[r] = sum;
    }
    const bool hidden = l + 1 < weights.size();
    if (hidden) {
      for (double& v : next) v = v > 0.0 ? v : 0.0;
    }
    act.swap(next);
  }
  if (dueling) {
    const int n_actions = output_dim();
    double mean_adv = 0.0;
    for (int a = 0; a < n_actions; ++a) mean_adv += act[1 + a];
    mean_adv /= n_actions;
    VecD q(n_actions);
    for (int a = 0; a < n_actions; ++a) q[a] = act[0] + act[1 + a] - mean_adv;
    act.swap(q);
  }
  check_finite(act, "network output");
  return act;
}

VecD ParamNet::grad(std::span<const double> input, std::span<const double> cotangent) const {
  if (static_cast<int>(input.size()) != input_dim()) {
    throw std::invalid_argument("grad: input length does not match input dim");
  }
  if (static_cast<int>(cotangent.size()) != output_dim()) {
    throw std::invalid_argument("grad: cotangent length does not match output dim");
  }
  const std::size_t n_layers = weights.size();

  // forward pass, keeping post-activation values of every layer
  std::vector<VecD> acts(n_layers + 1);
  acts[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int fan_in = layer_sizes[l];
    const int rows = layer_rows(*this, l);
    acts[l + 1].assign(rows, 0.0);
    const double* w = weights[l].data();
    for (int r = 0; r < rows; ++r) {
      double sum = biases[l][r];
      const double* wr = w + static_cast<std::size_t>(r) * fan_in;
      for (int c = 0; c < fan_in; ++c) sum += wr[c] * acts[l][c];
      acts[l + 1][r] = sum;
    }
    if (l + 1 < n_layers) {
      for (double& v : acts[l + 1]) v = v > 0.0 ? v : 0.0;
    }
  }

  // cotangent on the final pre-outputs
  VecD delta;
  if (dueling) {
    const int n_actions = output_dim();
    double csum = 0.0;
    for (double c : cotangent) csum += c;
    delta.assign(1 + n_actions, 0.0);
    delta[0] = csum;  // dQ/dV = 1 for every action
    for (int a = 0; a < n_actions; ++a) {
      delta[1 + a] = cotangent[a] - csum / n_actions;  // dQ_a/dA_b = [a==b] - 1/|A|
    }
  } else {
    delta.assign(cotangent.begin(), cotangent.end());
  }

  VecD flat(param_count(), 0.0);
  // parameter offsets per layer in flatten order
  std::vector<std::size_t> offsets(n_layers);
  std::size_t off = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    offsets[l] = off;
    off += weights[l].size() + biases[l].size();
  }

  for (std::size_t li = n_layers; li-- > 0;) {
    const int fan_in = layer_sizes[li];
    const int rows = layer_rows(*this, li);
    double* gw = flat.data() + offsets[li];
    double* gb = gw + weights[li].size();
    const VecD& a_in = acts[li];
    for (int r = 0; r < rows; ++r) {
      const double d = delta[r];
      gb[r] = d;
      double* gwr = gw + static_cast<std::size_t>(r) * fan_in;
      for (int c = 0; c < fan_in; ++c) gwr[c] = d * a_in[c];
    }
    if (li == 0) break;
    // propagate to previous layer through the ReLU mask
    VecD prev(fan_in, 0.0);
    const double* w = weights[li].data();
    for (int r = 0; r < rows; ++r) {
      const double d = delta[r];
      const double* wr = w + static_cast<std::size_t>(r) * fan_in;
      for (int c = 0; c < fan_in; ++c) prev[c] += d * wr[c];
    }
    for (int c = 0; c < fan_in; ++c) {
      if (acts[li][c] <= 0.0) prev[c] = 0.0;
    }
    delta.swap(prev);
  }
  return flat;
}

VecD ParamNet::flatten_params() const {
  VecD flat;
  flat.reserve(param_count());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.insert(flat.end(), weights[l].begin(), weights[l].end());
    flat.insert(flat.end(), biases[l].begin(), biases[l].end());
  }
  return flat;
}

void ParamNet::unflatten_params(std::span<const double> flat) {
  if (flat.size() != param_count()) {
    throw std::invalid_argument("unflatten_params: length mismatch");
  }
  std::size_t off = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (double& w : weights[l]) w = flat[off++];
    for (double& b : biases[l]) b = flat[off++];
  }
}

void ParamNet::save(std::ostream& out) const {
  out << "qcornet 1\n";
  out << "layers " << layer_sizes.size();
  for (int s : layer_sizes) out << ' ' << s;
  out << '\n';
  out << "dueling " << (dueling ? 1 : 0) << '\n';
  const VecD flat = flatten_params();
  out << "params " << flat.size() << '\n';
  for (std::size_t i = 0; i < flat.size(); ++i) {
    out << format_double(flat[i]);
    out << (((i + 1) % 8 == 0 || i + 1 == flat.size()) ? '\n' : ' ');
  }
  out << "end\n";
}

ParamNet ParamNet::load(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "qcornet" || version != 1) {
    throw std::runtime_error("unrecognized network file header");
  }
  std::string key;
  std::size_t n_sizes = 0;
  in >> key >> n_sizes;
  if (key != "layers" || n_sizes < 2) throw std::runtime_error("bad layers field");
  std::vector<int> sizes(n_sizes);
  for (auto& s : sizes) in >> s;
  int dueling_flag = 0;
  in >> key >> dueling_flag;
  if (key != "dueling") throw std::runtime_error("bad dueling field");
  std::size_t n_params = 0;
  in >> key >> n_params;
  if (key != "params") throw std::runtime_error("bad params field");

  Rng dummy(0);
  ParamNet net = ParamNet::create(sizes, dueling_flag != 0, dummy);
  if (net.param_count() != n_params) throw std::runtime_error("parameter count mismatch");
  VecD flat(n_params);
  for (auto& v : flat) {
    std::string tok;
    in >> tok;
    if (!in) throw std::runtime_error("truncated network file");
    v = std::strtod(tok.c_str(), nullptr);
  }
  in >> key;
  if (key != "end") throw std::runtime_error("missing end marker");
  net.unflatten_params(flat);
  return net;
}

void save_net_file(const ParamNet& net, const std::filesystem::path& path) {
  std::ostringstream ss;
  net.save(ss);
  write_text_file(path, ss.str());
}

ParamNet load_net_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file: " + path.string());
  return ParamNet::load(in);
}

AdamState AdamState::create(std::size_t n_params, double learning_rate) {
  AdamState s;
  s.m.assign(n_params, 0.0);
  s.v.assign(n_params, 0.0);
  s.learning_rate = learning_rate;
  return s;
}

void adam_step(VecD& params, std::span<const double> grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam_step: length mismatch");
  }
  for (double g : grads) {
    if (!std::isfinite(g)) throw numeric_error("adam_step: non-finite gradient");
  }
  state.step += 1;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    const double mhat = state.m[i] / correction1;
    const double vhat = state.v[i] / correction2;
    params[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
  }
}

}  // namespace qcor
