#pragma once

#include <cmath>

namespace divctl {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;

/// Standard normal density.
inline double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

/// Standard normal distribution function, erfc-based so both tails stay
/// accurate far beyond |z| = 6.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

/// Upper tail P(Z > z).
inline double norm_sf(double z) { return 0.5 * std::erfc(z * M_SQRT1_2); }

}  // namespace divctl
