#pragma once

// Scalar plane-wave scattering by a homogeneous dielectric sphere and the
// frequency dependent reflectivity / radar cross-section derived from it.
//
// Exterior field:  U_i + U_s,  U_s = sum_n a_n h_n^(1)(k0 R) P_n(cos g)
// Interior field:  U_int = sum_n b_n j_n(k1 R) P_n(cos g),  k1 = n_rel k0
// Incident field:  exp(i k0 R cos g) = sum_n (2n+1) i^n j_n(k0 R) P_n(cos g)
//
// Continuity of the field and its radial derivative at R = radius decouples
// per order n into a 2x2 system which is solved in closed form.

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace dispersar {

using complex = std::complex<double>;

inline constexpr int kDefaultTruncationOrder = 32;

struct SphereSpec {
  double radius = 0.0;  // meters
  double n_rel = 1.0;   // relative refractive index (interior / exterior)
  int n_max = kDefaultTruncationOrder;

  void validate() const;

  /// Sphere whose size parameter at wavenumber k0 equals k0_alpha.
  static SphereSpec from_size_parameter(double k0_alpha, double n_rel, double k0,
                                        int n_max = kDefaultTruncationOrder);
};

/// Complex reflectivity sampled on an increasing angular-frequency grid.
/// Values carry units of length (they are scattering amplitudes).
struct ReflectivitySpectrum {
  std::vector<double> omega;    // rad/s, strictly increasing
  std::vector<complex> values;  // meters

  std::size_t size() const noexcept { return values.size(); }
  void validate() const;

  /// Frequency-independent reflectivity rho on the given grid.
  static ReflectivitySpectrum flat(std::span<const double> omega, complex rho);
};

struct ExpansionCoefficients {
  std::vector<complex> a;  // scattered field, n = 0..n_max
  std::vector<complex> b;  // interior field, n = 0..n_max
};

/// Incident plane-wave coefficient (2n+1) i^n.
complex incident_coefficient(int n);

ExpansionCoefficients expansion_coefficients(const SphereSpec& sphere, double k0);

/// Largest relative mismatch of the two continuity conditions at R = radius,
/// each normalized by the magnitude of its largest term.
double boundary_residual(const SphereSpec& sphere, double k0, const ExpansionCoefficients& coeffs);

/// f(i, -i) = (1/k0) sum_n (-1)^n i^(-n-1) a_n.
complex backscatter_amplitude(std::span<const complex> a, double k0);

ReflectivitySpectrum reflectivity_spectrum(const SphereSpec& sphere, std::span<const double> omega,
                                           double wave_speed);

/// sigma = 4 pi |f|^2 (m^2).
double rcs(complex amplitude);
std::vector<double> rcs(const ReflectivitySpectrum& spectrum);

/// Geometric cross-section pi radius^2. Throws DomainError for radius <= 0.
double geometric_cross_section(double radius);
double normalized_rcs(complex amplitude, double radius);

}  // namespace dispersar
