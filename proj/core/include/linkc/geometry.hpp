#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

namespace linkc {

/// A point of the plane, identified with a complex number.
using PlanePoint = std::complex<double>;

inline constexpr PlanePoint kI{0.0, 1.0};

inline bool is_finite(PlanePoint z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Closed disc {z : |z - center| <= radius}.
struct Disc {
  PlanePoint center{};
  double radius = 0.0;

  bool contains(PlanePoint z, double slack = 1e-9) const {
    return std::abs(z - center) <= radius + slack * (1.0 + radius);
  }
};

/// Radius used for the "whole plane" domains of constants and projections.
inline constexpr double kPlaneSentinelRadius = 1e12;

/// Product of closed discs, one per input vertex.
struct Domain {
  std::vector<Disc> discs;

  std::size_t arity() const { return discs.size(); }

  bool contains(std::span<const PlanePoint> point, double slack = 1e-9) const {
    if (point.size() != discs.size()) return false;
    for (std::size_t i = 0; i < discs.size(); ++i) {
      if (!discs[i].contains(point[i], slack)) return false;
    }
    return true;
  }

  std::vector<PlanePoint> center() const {
    std::vector<PlanePoint> c;
    c.reserve(discs.size());
    for (const auto& d : discs) c.push_back(d.center);
    return c;
  }
};

/// Formats z as a complex literal accepted by the expression parser ("1.5-2i").
std::string format_complex(PlanePoint z);

/// Always prints both parts ("0+0.5i"), rounded to `digits` significant
/// digits; a part smaller than |z| * 10^-digits prints as 0.
std::string format_complex_rounded(PlanePoint z, int digits = 12);

/// Parses a complex literal such as "2", "-3i", "0.5+0.5i", "1e-3-2i".
/// Throws std::invalid_argument on malformed text.
PlanePoint parse_complex(const std::string& text);

}  // namespace linkc
