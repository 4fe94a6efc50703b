#include "dispersar/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "dispersar/errors.hpp"
#include "dispersar/specfun.hpp"

namespace dispersar {

namespace {

complex i_pow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {0.0, 1.0};
    case 2:
      return {-1.0, 0.0};
    default:
      return {0.0, -1.0};
  }
}

// Values and derivatives of one radial function family at orders 0..n_max.
template <typename T>
struct RadialTable {
  std::vector<T> value;
  std::vector<T> derivative;
};

template <typename T>
RadialTable<T> with_derivatives(const std::vector<T>& f, int n_max, double x) {
  RadialTable<T> t;
  t.value.assign(f.begin(), f.begin() + n_max + 1);
  t.derivative.resize(static_cast<std::size_t>(n_max) + 1);
  t.derivative[0] = -f[1];
  for (int n = 1; n <= n_max; ++n) {
    t.derivative[n] = specfun::sph_derivative(f[n - 1], f[n], n, x);
  }
  return t;
}

struct BoundaryTables {
  RadialTable<double> j_out;   // j_n(k0 a)
  RadialTable<complex> h_out;  // h_n(k0 a)
  RadialTable<double> j_in;    // j_n(k1 a)
};

BoundaryTables boundary_tables(const SphereSpec& sphere, double k0) {
  const double x0 = k0 * sphere.radius;
  const double x1 = x0 * sphere.n_rel;
  const int n = sphere.n_max;
  return {with_derivatives(specfun::spherical_bessel_j_all(n + 1, x0), n, x0),
          with_derivatives(specfun::spherical_hankel_h1_all(n + 1, x0), n, x0),
          with_derivatives(specfun::spherical_bessel_j_all(n + 1, x1), n, x1)};
}

}  // namespace

void SphereSpec::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw DomainError("sphere radius must be positive, got " + std::to_string(radius));
  }
  if (!(n_rel > 0.0) || !std::isfinite(n_rel)) {
    throw DomainError("relative refractive index must be positive, got " + std::to_string(n_rel));
  }
  if (n_max < 1) {
    throw DomainError("truncation order must be >= 1, got " + std::to_string(n_max));
  }
}

SphereSpec SphereSpec::from_size_parameter(double k0_alpha, double n_rel, double k0, int n_max) {
  if (!(k0 > 0.0)) {
    throw DomainError("wavenumber must be positive");
  }
  SphereSpec s{k0_alpha / k0, n_rel, n_max};
  s.validate();
  return s;
}

void ReflectivitySpectrum::validate() const {
  if (omega.size() != values.size()) {
    throw DomainError("reflectivity spectrum: " + std::to_string(omega.size()) +
                      " frequencies but " + std::to_string(values.size()) + " values");
  }
  for (std::size_t m = 1; m < omega.size(); ++m) {
    if (!(omega[m] > omega[m - 1])) {
      throw DomainError("reflectivity spectrum: frequencies must be strictly increasing");
    }
  }
}

ReflectivitySpectrum ReflectivitySpectrum::flat(std::span<const double> omega, complex rho) {
  ReflectivitySpectrum s{{omega.begin(), omega.end()}, std::vector<complex>(omega.size(), rho)};
  s.validate();
  return s;
}

complex incident_coefficient(int n) { return static_cast<double>(2 * n + 1) * i_pow(n); }

ExpansionCoefficients expansion_coefficients(const SphereSpec& sphere, double k0) {
  sphere.validate();
  if (!(k0 > 0.0)) {
    throw DomainError("expansion_coefficients: wavenumber must be positive");
  }
  const double k1 = k0 * sphere.n_rel;
  const auto t = boundary_tables(sphere, k0);

  ExpansionCoefficients out;
  out.a.resize(static_cast<std::size_t>(sphere.n_max) + 1);
  out.b.resize(out.a.size());
  for (int n = 0; n <= sphere.n_max; ++n) {
    const double jo = t.j_out.value[n], djo = t.j_out.derivative[n];
    const complex ho = t.h_out.value[n], dho = t.h_out.derivative[n];
    const double ji = t.j_in.value[n], dji = t.j_in.derivative[n];
    const complex c = incident_coefficient(n);

    // [ h    -j_in      ] [a]   [ -c j      ]
    // [ k0 h' -k1 j_in' ] [b] = [ -c k0 j'  ]
    const complex det = k0 * ji * dho - k1 * ho * dji;
    if (det == complex{} || !std::isfinite(det.real()) || !std::isfinite(det.imag())) {
      std::ostringstream msg;
      msg << "expansion_coefficients: singular boundary system at n = " << n
          << " (k0 a = " << k0 * sphere.radius << ", k1 a = " << k1 * sphere.radius << ")";
      throw SingularSystemError(msg.str());
    }
    out.a[n] = c * (k1 * jo * dji - k0 * ji * djo) / det;
    out.b[n] = c * k0 * (jo * dho - ho * djo) / det;
  }
  return out;
}

double boundary_residual(const SphereSpec& sphere, double k0, const ExpansionCoefficients& coeffs) {
  const double k1 = k0 * sphere.n_rel;
  const auto t = boundary_tables(sphere, k0);
  double worst = 0.0;
  for (int n = 0; n <= sphere.n_max; ++n) {
    const complex c = incident_coefficient(n);
    const complex incident = c * t.j_out.value[n];
    const complex scattered = coeffs.a[n] * t.h_out.value[n];
    const complex interior = coeffs.b[n] * t.j_in.value[n];
    const double scale1 = std::max({std::abs(incident), std::abs(scattered), std::abs(interior)});
    if (scale1 > 0.0) {
      worst = std::max(worst, std::abs(incident + scattered - interior) / scale1);
    }

    const complex d_incident = k0 * c * t.j_out.derivative[n];
    const complex d_scattered = k0 * coeffs.a[n] * t.h_out.derivative[n];
    const complex d_interior = k1 * coeffs.b[n] * t.j_in.derivative[n];
    const double scale2 =
        std::max({std::abs(d_incident), std::abs(d_scattered), std::abs(d_interior)});
    if (scale2 > 0.0) {
      worst = std::max(worst, std::abs(d_incident + d_scattered - d_interior) / scale2);
    }
  }
  return worst;
}

complex backscatter_amplitude(std::span<const complex> a, double k0) {
  if (a.empty()) {
    throw DomainError("backscatter_amplitude: empty coefficient list");
  }
  complex sum{};
  for (std::size_t n = 0; n < a.size(); ++n) {
    const int order = static_cast<int>(n);
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    sum += sign * i_pow(-order - 1) * a[n];
  }
  return sum / k0;
}

ReflectivitySpectrum reflectivity_spectrum(const SphereSpec& sphere, std::span<const double> omega,
                                           double wave_speed) {
  if (!(wave_speed > 0.0)) {
    throw DomainError("reflectivity_spectrum: wave speed must be positive");
  }
  ReflectivitySpectrum out;
  out.omega.assign(omega.begin(), omega.end());
  out.values.reserve(omega.size());
  for (double w : omega) {
    if (!(w > 0.0)) {
      throw DomainError("reflectivity_spectrum: frequencies must be positive");
    }
    const double k0 = w / wave_speed;
    out.values.push_back(backscatter_amplitude(expansion_coefficients(sphere, k0).a, k0));
  }
  out.validate();
  return out;
}

double rcs(complex amplitude) { return 4.0 * std::numbers::pi * std::norm(amplitude); }

std::vector<double> rcs(const ReflectivitySpectrum& spectrum) {
  std::vector<double> out;
  out.reserve(spectrum.size());
  for (const auto& v : spectrum.values) {
    out.push_back(rcs(v));
  }
  return out;
}

double geometric_cross_section(double radius) {
  if (!(radius > 0.0)) {
    throw DomainError("geometric cross-section needs a positive radius");
  }
  return std::numbers::pi * radius * radius;
}

double normalized_rcs(complex amplitude, double radius) {
  return rcs(amplitude) / geometric_cross_section(radius);
}

}  // namespace dispersar
