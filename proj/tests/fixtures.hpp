#pragma once

#include "latmin/lattice_core.hpp"

namespace fixtures {

using latmin::Rational;

// (Z, |.|)
inline latmin::NormedModule line() { return latmin::make_normed_module(1, latmin::polymax_norm({{Rational(1)}})); }

// (Z^2, Euclidean)
inline latmin::NormedModule disk() {
  return latmin::make_normed_module(2, latmin::ellipsoid_norm(latmin::identity_matrix(2)));
}

// (Z^2, max(|x|/4, |y|))
inline latmin::NormedModule box4() {
  return latmin::make_normed_module(
      2, latmin::polymax_norm({{Rational(1, 4), Rational(0)}, {Rational(0), Rational(1)}}));
}

}  // namespace fixtures
