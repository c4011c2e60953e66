#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace hawkes_ls {

/// Dense p x p array of arbitrary values indexed by a component pair (k, l),
/// row-major. Holds per-pair curves and kernels.
template <class T>
class PairMatrix {
 public:
  PairMatrix() = default;
  PairMatrix(std::size_t p, T fill) : p_(p), data_(p * p, std::move(fill)) {}

  std::size_t dim() const noexcept { return p_; }
  T& operator()(std::size_t k, std::size_t l) { return data_[k * p_ + l]; }
  const T& operator()(std::size_t k, std::size_t l) const { return data_[k * p_ + l]; }

  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  friend bool operator==(const PairMatrix&, const PairMatrix&) = default;

 private:
  std::size_t p_ = 0;
  std::vector<T> data_;
};

}  // namespace hawkes_ls
