#pragma once

// Range shift of the KM peak for a single dispersive point target.
//
// Along the range line through the target the KM image behaves like
//   a(y) = sum_m rho_m exp(2i k_m y sin(theta)) = exp(2i kappa0 Y) A(Y),
//   A(Y) = sum_m rho_m exp(i (-1 + 2 (m-1)/(M-1)) Y),
// with the scaled range variable Y = (2 pi B / c) y sin(theta).
//
// Summation by parts against the Dirichlet-type kernels
//   Psi_r(Y) = sin((M - r) Y / (M-1)) / sin(Y / (M-1))
// writes A in terms of the backward differences
//   drho_m = rho_m - rho_{m-1} (rho_0 = 0),
// and a quadratic expansion of |A|^2 about Y = 0 gives the shift estimate
//   Y_hat = -3 (M-1) alpha1 / alpha2.
//
// All index arguments are zero-based: m = 0..M-1, r = 0..M-1.

#include <complex>
#include <span>
#include <vector>

#include "dispersar/scene.hpp"

namespace dispersar {

struct ShiftProblem {
  std::vector<complex> rho;
  double sin_theta = 0.0;
  double bandwidth = 0.0;   // Hz
  double wave_speed = 0.0;  // m/s
  double k0 = 0.0;          // central wavenumber, rad/m

  static ShiftProblem from(const AcquisitionGeometry& geometry, std::vector<complex> rho);
  static ShiftProblem from(const AcquisitionGeometry& geometry, const ReflectivitySpectrum& spectrum);

  void validate() const;
  int size() const noexcept { return static_cast<int>(rho.size()); }

  /// Meters of range per unit of Y: c / (2 pi B sin(theta)).
  double range_per_unit_y() const;
  /// Phase prefactor rate: a(y(Y)) = exp(2i kappa0 Y) A(Y).
  double kappa0() const;
};

/// Psi_r^M(Y); the removable singularities at Y = j pi (M-1) are evaluated
/// by their limit. Requires 0 <= r <= M-1.
double psi(int r, int M, double Y);

complex a_direct(std::span<const complex> rho, double Y);
complex a_sbp(std::span<const complex> rho, double Y);

/// drho_m = rho_m - rho_{m-1}, rho_{-1} = 0.
std::vector<complex> backward_differences(std::span<const complex> rho);

/// The three sums of the |A(Y)|^2 expansion: `diagonal` and `cosine` are even
/// in Y, `sine` is odd.
struct AbsASquaredTerms {
  double diagonal = 0.0;
  double cosine = 0.0;
  double sine = 0.0;

  double total() const noexcept { return diagonal + cosine + sine; }
};

AbsASquaredTerms abs_a_squared_terms(std::span<const complex> rho, double Y);
double abs_a_squared_expansion(std::span<const complex> rho, double Y);

struct RangeShiftEstimate {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double Y_hat = 0.0;  // scaled
  double y_hat = 0.0;  // meters along range
};

/// Throws DegenerateSpectrumError when alpha2 vanishes.
RangeShiftEstimate range_shift_estimate(const ShiftProblem& problem);

struct ArgmaxResult {
  double Y = 0.0;
  double value = 0.0;      // |A(Y)|^2
  bool at_boundary = false;  // maximum sits on the window edge; widen it
};

/// Dense scan of |A_direct(Y)|^2 over [Y_lo, Y_hi] with `samples` points
/// (>= 100), refined by golden-section search to |dY| <= 1e-8.
ArgmaxResult numeric_argmax(const ShiftProblem& problem, double Y_lo, double Y_hi,
                            int samples = 2001);

struct ShiftSweepRow {
  double k0_alpha = 0.0;
  double Y_numeric = 0.0;
  double Y_estimate = 0.0;
  double y_numeric_k0 = 0.0;   // range shift in 1/k0 units
  double y_estimate_k0 = 0.0;
  bool at_boundary = false;
};

/// Estimate vs brute-force argmax for spheres of index n_rel over k0_alphas.
std::vector<ShiftSweepRow> range_shift_sweep(const AcquisitionGeometry& geometry, double n_rel,
                                             std::span<const double> k0_alphas, double Y_lo,
                                             double Y_hi, int samples = 2001);

}  // namespace dispersar
