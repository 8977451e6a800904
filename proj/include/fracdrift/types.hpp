#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace fracdrift {

// Hurst index restricted to the long-memory regime ]1/2, 1[.
// Everything downstream (Young sums, the |u-v|^{2H-2} correction kernel,
// the h(T) schedules) assumes this range; construction rejects the rest.
class HurstIndex {
 public:
  explicit HurstIndex(double value);
  double value() const { return value_; }

 private:
  double value_;
};

// Uniform grid t_i = i * dt, i = 0..n, with n * dt = horizon.
struct TimeGrid {
  TimeGrid(double horizon_, std::size_t n_steps);

  double horizon;
  std::size_t n;

  double dt() const { return horizon / static_cast<double>(n); }
  double time(std::size_t i) const {
    return horizon * static_cast<double>(i) / static_cast<double>(n);
  }
  bool operator==(const TimeGrid& other) const {
    return horizon == other.horizon && n == other.n;
  }
  bool operator!=(const TimeGrid& other) const { return !(*this == other); }
};

// Sampled process values on a uniform grid; values[i] = X(t_i).
struct Path {
  Path(TimeGrid grid_, std::vector<double> values_);

  TimeGrid grid;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double front() const { return values.front(); }
  double back() const { return values.back(); }

  // First n_steps steps of this path as a path on [0, n_steps * dt].
  Path prefix(std::size_t n_steps) const;
};

// (base_seed, stream_id) fully determines a noise realization; distinct
// stream ids give independent streams, so replication r can use stream r
// and Monte Carlo sweeps stay order-independent.
struct SeedSpec {
  std::uint64_t base_seed = 0;
  std::uint64_t stream_id = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic Gaussian stream. Box-Muller on top of mt19937_64 so the
// byte-for-byte output does not depend on the standard library's
// normal_distribution implementation.
class Rng {
 public:
  explicit Rng(SeedSpec seed);

  std::uint64_t raw() { return engine_(); }
  double uniform();   // (0, 1)
  double gaussian();  // N(0, 1)

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fracdrift
