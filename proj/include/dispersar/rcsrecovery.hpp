#pragma once

// Radar cross-section recovery from KM-predicted target locations.
//
// Single target: phi_m = (1/N) sum_n d_mn (4 pi |x_n - y|)^2 exp(-2i k_m |x_n - y|)
// recovers rho(omega_m) up to a range-shift phase, so 4 pi |phi_m|^2 estimates
// the RCS.
//
// Q targets: phi_m(y_p) = sum_q a~_pq(omega_m) rho~_q(omega_m), with
//   a~_pq = (1/N) sum_n |x_n - y_p|^2 / |x_n - y_q|^2 exp(2i k_m (|x_n - y_q| - |x_n - y_p|)),
// solved per frequency for rho~_q; sigma_q = 4 pi |rho~_q|^2.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dispersar/imaging.hpp"
#include "dispersar/scene.hpp"

namespace dispersar {

struct RcsSpectrum {
  std::vector<double> omega;  // rad/s
  std::vector<double> sigma;  // m^2, >= 0
  std::optional<double> geometric_cross_section;  // pi a^2 when the sphere is known

  /// sigma / (pi a^2); empty when no sphere is attached.
  std::vector<double> normalized() const;
  /// Mean of the normalized spectrum over the band.
  double band_average_normalized() const;
};

std::vector<complex> phi(const DataMatrix& data, const AcquisitionGeometry& geometry,
                         const Vec3& predicted);

/// sigma_m = 4 pi |values_m|^2 on the given grid.
RcsSpectrum rcs_single(std::span<const double> omega, std::span<const complex> values);

struct MultiSystem {
  std::vector<Eigen::MatrixXcd> matrices;  // one Q x Q matrix per frequency
  std::vector<Eigen::VectorXcd> rhs;       // phi_m(y_p), p = 0..Q-1
};

/// Throws DomainError for an empty or repeated location list.
MultiSystem multi_system(const DataMatrix& data, const AcquisitionGeometry& geometry,
                         std::span<const Vec3> predicted);

struct MultiSolution {
  std::vector<std::vector<complex>> rho;  // [q][m]
  std::vector<double> condition;          // 2-norm condition number per frequency
  bool ill_conditioned = false;           // some condition number > 1e8
};

inline constexpr double kIllConditionedThreshold = 1e8;

/// Dense per-frequency solve. Throws SingularSystemError for an exactly
/// singular (or non-finite) system.
MultiSolution solve_multi(const MultiSystem& systems);

std::vector<RcsSpectrum> rcs_multi(const MultiSolution& solution, std::span<const double> omega);

/// sigma(omega) ~ c0 + c1 (omega - omega_ref) + c2 (omega - omega_ref)^2.
struct QuadraticFit {
  double omega_ref = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  double operator()(double omega) const noexcept {
    const double t = omega - omega_ref;
    return c0 + t * (c1 + t * c2);
  }
};

/// Least-squares quadratic in (omega - omega_ref); needs >= 3 samples.
QuadraticFit fit_quadratic(const RcsSpectrum& spectrum, double omega_ref);

/// Fitted quadratic evaluated on the input grid, clamped at 0 from below.
RcsSpectrum quadratic_smooth(const RcsSpectrum& spectrum, double omega_ref);

struct RecoveryOptions {
  double peak_threshold = 0.5;     // on the normalized overview image
  std::optional<int> num_targets;  // keep the strongest Q peaks when set
  double zoom_side = 0.0;          // m; 0 selects 50 / k0
  int zoom_pixels = 101;
  double epsilon = 1e-4;
  bool smoothing = true;
  int threads = 1;
};

struct RecoveredTarget {
  Peak overview_peak;
  Peak zoom_peak;
  Vec3 location;                   // predicted location in meters
  std::vector<complex> rho_tilde;  // per frequency
  RcsSpectrum rcs;
  std::optional<RcsSpectrum> smoothed;
  std::optional<QuadraticFit> fit;
};

struct RecoveryReport {
  std::vector<RecoveredTarget> targets;
  std::vector<double> condition;  // per frequency
  bool ill_conditioned = false;
};

/// KM over the overview grid, tunable KM zooms around each peak, the
/// per-frequency linear solve and the RCS of every target.
RecoveryReport recover_procedure(const DataMatrix& data, const AcquisitionGeometry& geometry,
                                 const GridSpec& overview, const RecoveryOptions& options);

}  // namespace dispersar
