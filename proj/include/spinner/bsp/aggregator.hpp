#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace spinner::bsp {

enum class AggregatorMode {
  /// Value is the sum of the contributions made in the previous superstep.
  reset,
  /// Contributions accumulate onto the value across supersteps.
  persistent,
};

/// Sharded sum aggregator over a fixed-width vector of T.
///
/// Each worker writes only its own partial row during a superstep. At the
/// barrier the engine merges partial rows in worker order, so the merged value
/// depends only on the worker count (and for integers, not even on that).
template <typename T>
class Aggregator {
  static_assert(std::is_arithmetic_v<T>);

 public:
  Aggregator(std::string name, std::size_t width, std::size_t workers, AggregatorMode mode)
      : name_(std::move(name)),
        width_(width),
        workers_(workers),
        mode_(mode),
        value_(width, T{}),
        partials_(width * workers, T{}) {}

  const std::string& name() const { return name_; }
  std::size_t width() const { return width_; }
  AggregatorMode mode() const { return mode_; }

  /// Value merged at the last barrier.
  std::span<const T> value() const { return value_; }
  T value(std::size_t slot) const { return value_[slot]; }

  void add(std::size_t worker, std::size_t slot, T delta) { partials_[worker * width_ + slot] += delta; }
  std::span<T> partial(std::size_t worker) { return {partials_.data() + worker * width_, width_}; }

  void merge() {
    if (mode_ == AggregatorMode::reset) std::fill(value_.begin(), value_.end(), T{});
    for (std::size_t w = 0; w < workers_; ++w) {
      const T* row = partials_.data() + w * width_;
      for (std::size_t s = 0; s < width_; ++s) value_[s] += row[s];
    }
    std::fill(partials_.begin(), partials_.end(), T{});
  }

  /// Overrides the merged value; only valid from the master hook.
  void assign(std::span<const T> value) { std::copy(value.begin(), value.end(), value_.begin()); }

 private:
  std::string name_;
  std::size_t width_;
  std::size_t workers_;
  AggregatorMode mode_;
  std::vector<T> value_;
  std::vector<T> partials_;
};

template <typename T>
struct AggregatorHandle {
  std::size_t index = 0;
};

/// Named aggregators owned by an engine run. Values are int64, uint64 (sums
/// wrap modulo 2^64, which keeps them exact and order independent) or double.
class AggregatorRegistry {
 public:
  explicit AggregatorRegistry(std::size_t workers) : workers_(workers) {}

  template <typename T>
  AggregatorHandle<T> add(std::string name, std::size_t width, AggregatorMode mode) {
    auto& list = storage<T>();
    list.emplace_back(std::move(name), width, workers_, mode);
    return {list.size() - 1};
  }

  template <typename T>
  Aggregator<T>& get(AggregatorHandle<T> h) {
    return storage<T>()[h.index];
  }
  template <typename T>
  const Aggregator<T>& get(AggregatorHandle<T> h) const {
    return const_cast<AggregatorRegistry*>(this)->storage<T>()[h.index];
  }

  void merge_all() {
    for (auto& a : integers_) a.merge();
    for (auto& a : hashes_) a.merge();
    for (auto& a : reals_) a.merge();
  }

  std::size_t workers() const { return workers_; }

 private:
  template <typename T>
  std::vector<Aggregator<T>>& storage() {
    if constexpr (std::is_floating_point_v<T>) {
      static_assert(std::is_same_v<T, double>, "real aggregators are double");
      return reals_;
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      return hashes_;
    } else {
      static_assert(std::is_same_v<T, std::int64_t>, "integer aggregators are int64 or uint64");
      return integers_;
    }
  }

  std::size_t workers_;
  std::vector<Aggregator<std::int64_t>> integers_;
  std::vector<Aggregator<std::uint64_t>> hashes_;
  std::vector<Aggregator<double>> reals_;
};

}  // namespace spinner::bsp
