#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "qcor/rng.hpp"

namespace qcor {

using VecD = std::vector<double>;

/// Fully connected value network with rectified-linear hidden layers and an
/// identity output. All math is double precision.
///
/// With `dueling` the final linear layer produces 1 + output_dim pre-outputs:
/// a scalar state value V followed by one advantage per action, combined as
///   Q(a) = V + A(a) - mean_a A(a).
///
/// Immutable during forward/grad; mutation (adam_step, unflatten_params) must
/// be externally serialized.
struct ParamNet {
  std::vector<int> layer_sizes;  ///< input dim, hidden dims..., output dim
  bool dueling = false;
  std::vector<VecD> weights;  ///< per layer, row-major, fan_out x fan_in
  std::vector<VecD> biases;   ///< per layer, fan_out

  /// Parameters drawn uniformly from [-1/sqrt(fan_in), +1/sqrt(fan_in)].
  static ParamNet create(std::vector<int> layer_sizes, bool dueling, Rng& rng);

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  std::size_t layer_count() const { return weights.size(); }
  std::size_t param_count() const;

  /// Q-values for every action. Deterministic for fixed parameters and input.
  VecD forward(std::span<const double> input) const;

  /// Gradient of cotangent . output with respect to the flattened parameter
  /// vector (same ordering as flatten_params).
  VecD grad(std::span<const double> input, std::span<const double> cotangent) const;

  /// Flatten order: layer 0 weights row-major, layer 0 biases, layer 1 ...
  VecD flatten_params() const;
  void unflatten_params(std::span<const double> flat);

  /// Versioned text format, decimal-with-full-precision; round-trips
  /// bit-exactly.
  void save(std::ostream& out) const;
  static ParamNet load(std::istream& in);
};

void save_net_file(const ParamNet& net, const std::filesystem::path& path);
ParamNet load_net_file(const std::filesystem::path& path);

/// Adam optimizer moments for one parameter vector.
struct AdamState {
  VecD m;  ///< first moment
  VecD v;  ///< second moment
  long step = 0;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState create(std::size_t n_params, double learning_rate);
};

/// Bias-corrected Adam update, in place. Increments state.step by exactly 1.
/// Throws numeric_error on non-finite gradients.
void adam_step(VecD& params, std::span<const double> grads, AdamState& state);

}  // namespace qcor
