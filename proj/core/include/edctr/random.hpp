#pragma once

#include <cstdint>
#include <random>

namespace edctr {

/// Independent, reproducible random streams keyed by (seed, stream).
///
/// The conversions to real and bounded integers are written out here instead
/// of using <random> distributions, whose output is implementation-defined.
class Rng {
 public:
  enum Stream : std::uint32_t {
    kSensorDeployment = 1,
    kRelayPlacement = 2,
    kClusterHeadElection = 3,
    kChannelLoss = 4,
  };

  Rng(std::uint64_t seed, std::uint32_t stream);

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  std::mt19937_64 engine_;
};

}  // namespace edctr
