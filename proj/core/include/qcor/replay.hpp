#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qcor/env.hpp"
#include "qcor/rng.hpp"

namespace qcor {

/// Prioritized experience replay (uniform when alpha = 0).
///
/// Entries are stored in a fixed-capacity ring; the oldest entry is evicted
/// first. Entry i is sampled with probability p_i^alpha / sum_j p_j^alpha,
/// with replacement, and carries the importance weight
/// (N * P(i))^(-beta) normalized by the largest weight in the batch.
/// New entries receive the largest priority seen so far (1.0 on an empty
/// buffer); updated priorities are |td_error| + floor.
class ReplayBuffer {
 public:
  static constexpr double kPriorityFloor = 1e-6;

  ReplayBuffer(std::size_t capacity, double alpha, double beta);

  /// Stores the experience and returns the slot index it occupies.
  std::size_t push(Experience exp);

  struct Batch {
    std::vector<std::size_t> indices;
    std::vector<double> weights;
  };

  /// Sampling mutates only the rng. Throws std::logic_error on empty buffer.
  Batch sample(std::size_t batch_size, Rng& rng) const;

  void update_priorities(std::span<const std::size_t> indices,
                         std::span<const double> td_errors);

  const Experience& at(std::size_t index) const;
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  double priority(std::size_t index) const;
  double max_priority_seen() const { return max_priority_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

 private:
  void set_priority(std::size_t index, double priority);

  std::size_t capacity_;
  double alpha_;
  double beta_;
  double max_priority_ = 1.0;
  std::size_t size_ = 0;
  std::size_t head_ = 0;  // next slot to write
  std::vector<Experience> entries_;
  std::vector<double> priorities_;  // raw priorities
  // binary sum tree over p^alpha, leaves_ is the smallest power of two >= capacity
  std::size_t leaves_;
  std::vector<double> tree_;
};

}  // namespace qcor
