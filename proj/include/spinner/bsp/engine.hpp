#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

#include "spinner/bsp/aggregator.hpp"
#include "spinner/rng.hpp"
#include "spinner/types.hpp"

namespace spinner::bsp {

template <typename Message>
struct Envelope {
  VertexIndex source;
  Message payload;
};

struct VertexRange {
  VertexIndex begin = 0;
  VertexIndex end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(VertexIndex v) const { return v >= begin && v < end; }
};

struct EngineOptions {
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  /// Backstop on the number of supersteps; reaching it ends the run with
  /// `capped` set.
  std::size_t max_supersteps = 1'000'000;
};

struct EngineStats {
  std::size_t supersteps = 0;
  bool capped = false;
  /// Wall time of each superstep including message delivery, seconds.
  std::vector<double> superstep_seconds;
};

template <typename Program>
class Engine;

/// Per-worker view handed to vertex compute. Lives for one superstep.
template <typename Program>
class WorkerContext {
 public:
  using Message = typename Program::Message;
  using Scratch = typename Program::WorkerScratch;

  std::size_t worker() const { return worker_; }
  std::size_t superstep() const { return superstep_; }
  VertexRange range() const { return range_; }
  Rng& rng() { return rng_; }
  Scratch& scratch() { return *scratch_; }

  /// Messages delivered to `v` at the start of this superstep. `v` must be
  /// owned by this worker.
  std::span<const Envelope<Message>> inbox(VertexIndex v) const {
    const std::size_t local = v - range_.begin;
    return {inbox_->data() + (*inbox_offsets_)[local], inbox_->data() + (*inbox_offsets_)[local + 1]};
  }

  /// Queues a message; it becomes visible to `to` in the next superstep.
  void send(VertexIndex from, VertexIndex to, const Message& message) {
    (*outbox_)[engine_->owner(to)].push_back({to, {from, message}});
  }

  template <typename T>
  void aggregate(AggregatorHandle<T> handle, std::size_t slot, T delta) {
    aggregators_->get(handle).add(worker_, slot, delta);
  }

  /// Value merged at the previous barrier. Constant during the superstep.
  template <typename T>
  std::span<const T> aggregated(AggregatorHandle<T> handle) const {
    return aggregators_->get(handle).value();
  }

 private:
  friend class Engine<Program>;

  struct Routed {
    VertexIndex target;
    Envelope<Message> envelope;
  };

  WorkerContext(Engine<Program>* engine, std::size_t worker, std::size_t superstep, VertexRange range,
                Rng rng, Scratch* scratch, AggregatorRegistry* aggregators,
                const std::vector<Envelope<Message>>* inbox,
                const std::vector<std::size_t>* inbox_offsets, std::vector<std::vector<Routed>>* outbox)
      : engine_(engine),
        worker_(worker),
        superstep_(superstep),
        range_(range),
        rng_(rng),
        scratch_(scratch),
        aggregators_(aggregators),
        inbox_(inbox),
        inbox_offsets_(inbox_offsets),
        outbox_(outbox) {}

  Engine<Program>* engine_;
  std::size_t worker_;
  std::size_t superstep_;
  VertexRange range_;
  Rng rng_;
  Scratch* scratch_;
  AggregatorRegistry* aggregators_;
  const std::vector<Envelope<Message>>* inbox_;
  const std::vector<std::size_t>* inbox_offsets_;
  std::vector<std::vector<Routed>>* outbox_;
};

/// Single-threaded view handed to the master hook at each barrier, after
/// aggregators have been merged.
class MasterContext {
 public:
  MasterContext(std::size_t superstep, AggregatorRegistry& aggregators, double superstep_seconds)
      : superstep_(superstep), aggregators_(aggregators), seconds_(superstep_seconds) {}

  std::size_t superstep() const { return superstep_; }
  double superstep_seconds() const { return seconds_; }

  template <typename T>
  std::span<const T> aggregated(AggregatorHandle<T> handle) const {
    return aggregators_.get(handle).value();
  }
  template <typename T>
  void assign(AggregatorHandle<T> handle, std::span<const T> value) {
    aggregators_.get(handle).assign(value);
  }

 private:
  std::size_t superstep_;
  AggregatorRegistry& aggregators_;
  double seconds_;
};

/// Embedded Pregel-style superstep loop.
///
/// Vertices [0, num_vertices) are split into contiguous ranges, one per
/// worker. Each superstep every worker calls `Program::begin_superstep` once
/// and then `Program::compute` for each owned vertex in index order. Messages
/// sent during superstep s are delivered at the start of s + 1. Aggregators are
/// merged at the barrier, then `Program::master` decides whether to continue.
///
/// A Program provides:
///   using Message = ...;        // trivially copyable
///   using WorkerScratch = ...;  // one per worker, persists across supersteps
///   void register_aggregators(AggregatorRegistry&);
///   void begin_superstep(WorkerContext<Program>&);
///   void compute(WorkerContext<Program>&, VertexIndex);
///   bool master(MasterContext&);  // false halts
///
/// The RNG handed to a worker is derived from (seed, worker, superstep), so a
/// run is reproducible for a fixed worker count.
template <typename Program>
class Engine {
 public:
  using Message = typename Program::Message;
  using Scratch = typename Program::WorkerScratch;
  using Context = WorkerContext<Program>;
  using Routed = typename Context::Routed;

  static_assert(std::is_trivially_copyable_v<Message>);

  Engine(std::size_t num_vertices, EngineOptions options)
      : options_(options), num_vertices_(num_vertices), aggregators_(std::max<std::size_t>(1, options.workers)) {
    if (options_.workers == 0) options_.workers = 1;
    const std::size_t w = options_.workers;
    begins_.resize(w + 1);
    for (std::size_t i = 0; i <= w; ++i) {
      begins_[i] = static_cast<VertexIndex>((static_cast<Uint128>(num_vertices) * i) / w);
    }
    scratch_.resize(w);
    inbox_.resize(w);
    inbox_offsets_.resize(w);
    sending_.assign(w, std::vector<std::vector<Routed>>(w));
    delivered_.assign(w, std::vector<std::vector<Routed>>(w));
  }

  std::size_t workers() const { return options_.workers; }
  VertexRange range(std::size_t worker) const { return {begins_[worker], begins_[worker + 1]}; }
  AggregatorRegistry& aggregators() { return aggregators_; }
  Scratch& scratch(std::size_t worker) { return scratch_[worker]; }

  std::size_t owner(VertexIndex v) const {
    if (options_.workers == 1) return 0;
    auto it = std::upper_bound(begins_.begin(), begins_.end(), v);
    return static_cast<std::size_t>(it - begins_.begin()) - 1;
  }

  EngineStats run(Program& program) {
    program.register_aggregators(aggregators_);
    EngineStats stats;
    for (std::size_t superstep = 0;; ++superstep) {
      if (superstep >= options_.max_supersteps) {
        stats.capped = true;
        break;
      }
      const auto start = std::chrono::steady_clock::now();
      run_workers([&](std::size_t w) { run_worker(program, w, superstep); });

      std::swap(sending_, delivered_);
      aggregators_.merge_all();
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      stats.superstep_seconds.push_back(seconds);
      ++stats.supersteps;

      MasterContext master(superstep, aggregators_, seconds);
      if (!program.master(master)) break;
    }
    return stats;
  }

 private:
  __extension__ using Uint128 = unsigned __int128;

  template <typename Fn>
  void run_workers(Fn&& fn) {
    const std::size_t w = options_.workers;
    if (w == 1) {
      fn(0);
      return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto guarded = [&](std::size_t worker) {
      try {
        fn(worker);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    };
    {
      std::vector<std::jthread> threads;
      threads.reserve(w - 1);
      for (std::size_t i = 1; i < w; ++i) threads.emplace_back(guarded, i);
      guarded(0);
    }
    if (failure) std::rethrow_exception(failure);
  }

  void deliver(std::size_t worker) {
    const VertexRange r = range(worker);
    auto& offsets = inbox_offsets_[worker];
    auto& inbox = inbox_[worker];
    offsets.assign(r.size() + 1, 0);
    std::size_t total = 0;
    for (std::size_t src = 0; src < options_.workers; ++src) {
      for (const Routed& m : delivered_[src][worker]) ++offsets[m.target - r.begin + 1];
      total += delivered_[src][worker].size();
    }
    for (std::size_t i = 0; i < r.size(); ++i) offsets[i + 1] += offsets[i];
    inbox.resize(total);
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t src = 0; src < options_.workers; ++src) {
      auto& queue = delivered_[src][worker];
      for (const Routed& m : queue) inbox[cursor[m.target - r.begin]++] = m.envelope;
      queue.clear();
    }
  }

  void run_worker(Program& program, std::size_t worker, std::size_t superstep) {
    deliver(worker);
    const VertexRange r = range(worker);
    Context ctx(this, worker, superstep, r, Rng(options_.seed, worker, superstep), &scratch_[worker],
                &aggregators_, &inbox_[worker], &inbox_offsets_[worker], &sending_[worker]);
    program.begin_superstep(ctx);
    for (VertexIndex v = r.begin; v < r.end; ++v) program.compute(ctx, v);
  }

  EngineOptions options_;
  std::size_t num_vertices_;
  std::vector<VertexIndex> begins_;
  AggregatorRegistry aggregators_;
  std::vector<Scratch> scratch_;
  std::vector<std::vector<Envelope<Message>>> inbox_;
  std::vector<std::vector<std::size_t>> inbox_offsets_;
  // [source worker][destination worker]
  std::vector<std::vector<std::vector<Routed>>> sending_;
  std::vector<std::vector<std::vector<Routed>>> delivered_;
};

}  // namespace spinner::bsp
