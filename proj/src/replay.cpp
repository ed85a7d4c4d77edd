#include "qsopt/replay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "qsopt/error.hpp"

namespace qsopt {

ReplayBuffer::ReplayBuffer(std::size_t capacity, double entangling_weight)
    : capacity_(capacity), entangling_weight_(entangling_weight) {
  if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
  if (!(entangling_weight_ > 0.0) || !std::isfinite(entangling_weight_)) {
    throw ConfigError("entangling priority weight must be positive");
  }
  items_.reserve(capacity_);
}

void ReplayBuffer::push(Transition t) {
  ++pushed_;
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
    return;
  }
  items_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw TrainingError("replay index out of range");
  return items_[(head_ + i) % items_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t count, Rng& rng) const {
  if (count > items_.size()) {
    throw TrainingError("replay holds " + std::to_string(items_.size()) + " transitions, " + std::to_string(count) +
                        " requested");
  }
  // Key log(u) / w with u in (0, 1]; the largest `count` keys win.
  std::vector<std::pair<double, std::size_t>> keys(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const double w = at(i).entangling ? entangling_weight_ : 1.0;
    keys[i] = {std::log(1.0 - rng.uniform()) / w, i};
  }
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(count), keys.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = keys[i].second;
  return out;
}

}  // namespace qsopt
