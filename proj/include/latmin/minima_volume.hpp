#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latmin/enumeration.hpp"
#include "latmin/lattice_core.hpp"
#include "latmin/log_value.hpp"

namespace latmin {

struct MinimaReport {
  std::vector<NormValue> lambdas;  // exact, nondecreasing
  std::vector<LogValue> mus;       // mu_i = -log(lambda_i), nonincreasing
  std::vector<IntVector> witnesses;

  LogValue sum_mus() const;
  /// sum_i max(mu_i, 0), with signs decided exactly.
  LogValue sum_positive_mus() const;
};

/// Classical minima by exhaustive enumeration of growing balls. Equal-norm
/// candidates are ordered by their sign-normalized representative (first
/// nonzero coordinate positive), lexicographically largest first, so the
/// standard basis comes out as e_1, e_2, ...
MinimaReport successive_minima(const NormedModule& module, const EnumerationOptions& options = {});

enum class VolumeMethod { ExactEllipsoid, ExactParallelepiped, ExactPolygon, MonteCarlo };

const char* volume_method_name(VolumeMethod m);

struct VolumeReport {
  double value = 0.0;
  VolumeMethod method = VolumeMethod::ExactEllipsoid;
  double stderr_value = 0.0;
  std::optional<LogValue> exact_log;  // log(volume), present iff exact
  std::uint64_t samples = 0;

  bool exact() const { return method != VolumeMethod::MonteCarlo; }
};

struct VolumeOptions {
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool force_monte_carlo = false;
};

/// log V(r), V(r) = pi^(r/2) / Gamma(r/2 + 1), as an exact LogValue.
LogValue log_unit_ball_volume(std::size_t r);

/// Volume of B(M) = {x : ||x|| <= 1}.
VolumeReport ball_volume(const NormedModule& module, const VolumeOptions& options = {});

/// True when ball_volume has an exact method for this norm.
bool has_exact_volume(const NormedModule& module);

struct EulerCharacteristic {
  double value = 0.0;
  double stderr_value = 0.0;
  std::optional<LogValue> exact;
  VolumeMethod method = VolumeMethod::ExactEllipsoid;
};

/// chi = log vol(B(M)) (the covolume of Z^r is 1).
EulerCharacteristic euler_characteristic(const NormedModule& module,
                                         const VolumeOptions& options = {});

/// Exact area of {x in R^2 : |<a_j, x>| <= 1 for all j}.
Rational polygon_area(const RationalMatrix& functionals);

}  // namespace latmin
