#include "qcor/replay.hpp"

#include <cmath>
#include <stdexcept>

namespace qcor {

ReplayBuffer::ReplayBuffer(std::size_t capacity, double alpha, double beta)
    : capacity_(capacity), alpha_(alpha), beta_(beta) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  if (alpha < 0.0) throw std::invalid_argument("ReplayBuffer: alpha must be >= 0");
  entries_.resize(capacity);
  priorities_.assign(capacity, 0.0);
  leaves_ = 1;
  while (leaves_ < capacity) leaves_ *= 2;
  tree_.assign(2 * leaves_, 0.0);
}

void ReplayBuffer::set_priority(std::size_t index, double priority) {
  priorities_[index] = priority;
  double value = std::pow(priority, alpha_);
  std::size_t node = leaves_ + index;
  tree_[node] = value;
  for (node /= 2; node >= 1; node /= 2) {
    tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
  }
}

std::size_t ReplayBuffer::push(Experience exp) {
  const std::size_t index = head_;
  entries_[index] = std::move(exp);
  set_priority(index, max_priority_);
  head_ = (head_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
  return index;
}

ReplayBuffer::Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (size_ == 0) throw std::logic_error("ReplayBuffer::sample: buffer is empty");
  const double total = tree_[1];
  if (!(total > 0.0)) throw std::logic_error("ReplayBuffer::sample: zero total priority");

  Batch batch;
  batch.indices.reserve(batch_size);
  batch.weights.reserve(batch_size);
  const double n = static_cast<double>(size_);
  double max_weight = 0.0;
  for (std::size_t k = 0; k < batch_size; ++k) {
    double u = rng.uniform() * total;
    std::size_t node = 1;
    while (node < leaves_) {
      const double left = tree_[2 * node];
      if (u < left) {
        node = 2 * node;
      } else {
        u -= left;
        node = 2 * node + 1;
      }
    }
    std::size_t index = node - leaves_;
    if (index >= size_) index = size_ - 1;  // guard against float rounding
    const double prob = tree_[leaves_ + index] / total;
    const double weight = std::pow(n * prob, -beta_);
    batch.indices.push_back(index);
    batch.weights.push_back(weight);
    if (weight > max_weight) max_weight = weight;
  }
  for (double& w : batch.weights) w /= max_weight;
  return batch;
}

void ReplayBuffer::update_priorities(std::span<const std::size_t> indices,
                                     std::span<const double> td_errors) {
  if (indices.size() != td_errors.size()) {
    throw std::invalid_argument("update_priorities: length mismatch");
  }
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t index = indices[k];
    if (index >= size_) throw std::invalid_argument("update_priorities: index out of range");
    const double priority = std::fabs(td_errors[k]) + kPriorityFloor;
    set_priority(index, priority);
    if (priority > max_priority_) max_priority_ = priority;
  }
}

const Experience& ReplayBuffer::at(std::size_t index) const {
  if (index >= size_) throw std::invalid_argument("ReplayBuffer::at: index out of range");
  return entries_[index];
}

double ReplayBuffer::priority(std::size_t index) const {
  if (index >= size_) throw std::invalid_argument("ReplayBuffer::priority: index out of range");
  return priorities_[index];
}

}  // namespace qcor
