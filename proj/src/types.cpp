#include "fracdrift/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracdrift {

HurstIndex::HurstIndex(double value) : value_(value) {
  if (!(value > 0.5) || !(value < 1.0)) {
    throw std::invalid_argument("HurstIndex: H must lie in ]1/2, 1[, got " +
                                std::to_string(value));
  }
}

TimeGrid::TimeGrid(double horizon_, std::size_t n_steps)
    : horizon(horizon_), n(n_steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("TimeGrid: horizon must be positive");
  }
  if (n < 2) {
    throw std::invalid_argument("TimeGrid: need at least 2 steps");
  }
}

Path::Path(TimeGrid grid_, std::vector<double> values_)
    : grid(grid_), values(std::move(values_)) {
  if (values.size() != grid.n + 1) {
    throw std::invalid_argument("Path: expected " + std::to_string(grid.n + 1) +
                                " values, got " + std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("Path: non-finite value");
    }
  }
}

Path Path::prefix(std::size_t n_steps) const {
  if (n_steps > grid.n) {
    throw std::invalid_argument("Path::prefix: longer than the path");
  }
  TimeGrid sub(grid.dt() * static_cast<double>(n_steps), n_steps);
  return Path(sub, std::vector<double>(values.begin(),
                                       values.begin() + static_cast<long>(n_steps) + 1));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(SeedSpec seed)
    : engine_(splitmix64(splitmix64(seed.base_seed) ^
                         splitmix64(seed.stream_id + 0x5851f42d4c957f2dULL))) {}

double Rng::uniform() {
  // 53-bit mantissa, shifted into (0, 1) so log() below never sees 0.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

}  // namespace fracdrift
