#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qsopt/env.hpp"
#include "qsopt/random.hpp"

namespace qsopt {

struct Transition {
  Observation state;
  std::uint32_t action = 0;
  double reward = 0.0;
  Observation next;
  /// Valid actions in `next`; the bootstrap argmax is restricted to them.
  std::vector<std::uint8_t> next_mask;
  bool done = false;
  bool entangling = false;
};

/// Ring buffer of transitions with action-type prioritized sampling:
/// entangling transitions carry `entangling_weight`, the rest weight 1.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, double entangling_weight);

  void push(Transition t);
  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  /// i-th oldest stored transition.
  const Transition& at(std::size_t i) const;
  /// Total transitions ever pushed.
  std::uint64_t pushed() const noexcept { return pushed_; }

  /// `count` distinct logical indices (0 = oldest), weighted sampling without
  /// replacement (Efraimidis-Spirakis keys). Throws TrainingError if count > size().
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  double entangling_weight_;
  std::vector<Transition> items_;
  std::size_t head_ = 0;  // physical slot of the oldest item once full
  std::uint64_t pushed_ = 0;
};

}  // namespace qsopt
