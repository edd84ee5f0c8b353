#pragma once

#include <cmath>
#include <cstdint>

namespace divctl {

/// Counter-based RNG with per-stream substreams derived from (seed, stream).
/// Each output is a stateless mix of (key, counter), so streams are
/// reproducible independently of thread scheduling and evaluation order.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(mix(seed ^ 0x9E3779B97F4A7C15ULL) ^
                   mix(stream + 0xBF58476D1CE4E5B9ULL))) {}

    std::uint64_t next_u64() {
        return mix(key_ + (++ctr_) * 0x9E3779B97F4A7C15ULL);
    }

    /// Uniform on (0, 1].
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; pairs are cached.
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925287 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace divctl
