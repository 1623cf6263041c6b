#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "linkc/geometry.hpp"

namespace linkc::testing {

/// Uniform point in a disc, optionally shrunk to its interior.
inline PlanePoint sample_disc(const Disc& d, std::mt19937_64& rng, double shrink = 1.0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return d.center + shrink * d.radius * std::sqrt(unit(rng)) * std::polar(1.0, 2.0 * std::numbers::pi * unit(rng));
}

inline std::vector<PlanePoint> sample_domain(const Domain& dom, std::mt19937_64& rng, double shrink = 1.0) {
  std::vector<PlanePoint> z;
  for (const auto& d : dom.discs) z.push_back(sample_disc(d, rng, shrink));
  return z;
}

}  // namespace linkc::testing
