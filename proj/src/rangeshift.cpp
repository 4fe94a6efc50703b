#include "dispersar/rangeshift.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "dispersar/errors.hpp"

namespace dispersar {

namespace {

// Exponent factor (-1 + 2 m / (M-1)) for zero-based m.
double frequency_offset(int m, int M) { return -1.0 + 2.0 * m / (M - 1); }

std::vector<double> psi_table(int M, double Y) {
  std::vector<double> t(static_cast<std::size_t>(M));
  for (int r = 0; r < M; ++r) {
    t[r] = psi(r, M, Y);
  }
  return t;
}

// Extended-precision kernel for the |A|^2 sums, whose terms cancel heavily.
long double psi_extended(int r, int M, double Y) {
  const int K = M - r;
  const long double s = static_cast<long double>(Y) / (M - 1);
  const long double pi = std::numbers::pi_v<long double>;
  const long double j = std::nearbyint(s / pi);
  const long double delta = s - j * pi;
  const long long parity = static_cast<long long>(j) * (K - 1);
  const long double sign = (parity % 2 == 0) ? 1.0L : -1.0L;
  if (delta == 0.0L) {
    return sign * K;
  }
  return sign * std::sin(K * delta) / std::sin(delta);
}

void require_size(std::span<const complex> rho) {
  if (rho.size() < 2) {
    throw DomainError("range shift: need at least two frequencies");
  }
}

}  // namespace

ShiftProblem ShiftProblem::from(const AcquisitionGeometry& geometry, std::vector<complex> rho) {
  ShiftProblem p{std::move(rho), geometry.sin_theta(), geometry.bandwidth(), geometry.wave_speed(),
                 geometry.central_wavenumber()};
  p.validate();
  return p;
}

ShiftProblem ShiftProblem::from(const AcquisitionGeometry& geometry,
                                const ReflectivitySpectrum& spectrum) {
  return from(geometry, spectrum.values);
}

void ShiftProblem::validate() const {
  if (rho.size() < 2) {
    throw DomainError("shift problem: need M >= 2 reflectivity samples");
  }
  if (!(sin_theta > 0.0 && sin_theta < 1.0)) {
    throw DomainError("shift problem: sin(theta) must lie in (0, 1)");
  }
  if (!(bandwidth > 0.0) || !(wave_speed > 0.0)) {
    throw DomainError("shift problem: bandwidth and wave speed must be positive");
  }
}

double ShiftProblem::range_per_unit_y() const {
  return wave_speed / (2.0 * std::numbers::pi * bandwidth * sin_theta);
}

double ShiftProblem::kappa0() const {
  return k0 * wave_speed / (2.0 * std::numbers::pi * bandwidth);
}

double psi(int r, int M, double Y) {
  if (M < 2 || r < 0 || r > M - 1) {
    throw DomainError(fmt::format("psi: need 0 <= r <= M-1 and M >= 2 (r = {}, M = {})", r, M));
  }
  const int K = M - r;
  const double s = Y / (M - 1);
  const double j = std::nearbyint(s / std::numbers::pi);
  const double delta = s - j * std::numbers::pi;
  // sin(K s) / sin(s) = (-1)^(j (K-1)) sin(K delta) / sin(delta)
  const long long parity = static_cast<long long>(j) * (K - 1);
  const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
  if (delta == 0.0) {
    return sign * K;
  }
  return sign * std::sin(K * delta) / std::sin(delta);
}

complex a_direct(std::span<const complex> rho, double Y) {
  require_size(rho);
  const int M = static_cast<int>(rho.size());
  complex sum{};
  for (int m = 0; m < M; ++m) {
    sum += rho[m] * std::polar(1.0, frequency_offset(m, M) * Y);
  }
  return sum;
}

std::vector<complex> backward_differences(std::span<const complex> rho) {
  std::vector<complex> d(rho.size());
  for (std::size_t m = 0; m < rho.size(); ++m) {
    d[m] = (m == 0) ? rho[0] : rho[m] - rho[m - 1];
  }
  return d;
}

complex a_sbp(std::span<const complex> rho, double Y) {
  require_size(rho);
  const int M = static_cast<int>(rho.size());
  const auto d = backward_differences(rho);
  const auto kernel = psi_table(M, Y);
  complex sum{};
  for (int m = 0; m < M; ++m) {
    sum += d[m] * std::polar(kernel[m], m * Y / (M - 1));
  }
  return sum;
}

AbsASquaredTerms abs_a_squared_terms(std::span<const complex> rho, double Y) {
  require_size(rho);
  const int M = static_cast<int>(rho.size());
  using ld = long double;
  std::vector<ld> re(static_cast<std::size_t>(M));
  std::vector<ld> im(static_cast<std::size_t>(M));
  std::vector<ld> kernel(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    re[m] = static_cast<ld>(rho[m].real()) - (m > 0 ? static_cast<ld>(rho[m - 1].real()) : 0.0L);
    im[m] = static_cast<ld>(rho[m].imag()) - (m > 0 ? static_cast<ld>(rho[m - 1].imag()) : 0.0L);
    kernel[m] = psi_extended(m, M, Y);
  }

  ld diagonal = 0.0L;
  ld cosine = 0.0L;
  ld sine = 0.0L;
  for (int m = 0; m < M; ++m) {
    diagonal += (re[m] * re[m] + im[m] * im[m]) * kernel[m] * kernel[m];
  }
  for (int m = 0; m < M - 1; ++m) {
    for (int r = m + 1; r < M; ++r) {
      // conj(d_m) d_r
      const ld zr = re[m] * re[r] + im[m] * im[r];
      const ld zi = re[m] * im[r] - im[m] * re[r];
      const ld arg = static_cast<ld>(r - m) * Y / (M - 1);
      const ld weight = kernel[m] * kernel[r];
      cosine += 2.0L * zr * std::cos(arg) * weight;
      sine -= 2.0L * zi * std::sin(arg) * weight;
    }
  }
  return {static_cast<double>(diagonal), static_cast<double>(cosine), static_cast<double>(sine)};
}

double abs_a_squared_expansion(std::span<const complex> rho, double Y) {
  return abs_a_squared_terms(rho, Y).total();
}

RangeShiftEstimate range_shift_estimate(const ShiftProblem& problem) {
  problem.validate();
  const int M = problem.size();
  const auto d = backward_differences(problem.rho);

  // K_m = M - m (zero-based) is the value of Psi_m at Y = 0. Expanding each
  // Psi to second order, Psi_m ~ K_m - K_m (K_m^2 - 1) s^2 / 6 with
  // s = Y / (M-1), the quadratic model of |A|^2 is
  //   C - 2 alpha1 s - alpha2 s^2 / 3.
  RangeShiftEstimate est;
  for (int m = 0; m < M; ++m) {
    const double K = M - m;
    est.alpha2 += std::norm(d[m]) * (K * K * K * K - K * K);
  }
  for (int m = 0; m < M - 1; ++m) {
    for (int r = m + 1; r < M; ++r) {
      const complex z = std::conj(d[m]) * d[r];
      const double Km = M - m;
      const double Kr = M - r;
      const double gap = r - m;
      est.alpha1 += z.imag() * gap * Km * Kr;
      est.alpha2 += z.real() * Km * Kr * (3.0 * gap * gap + Km * Km + Kr * Kr - 2.0);
    }
  }
  if (est.alpha2 == 0.0 || !std::isfinite(est.alpha2)) {
    throw DegenerateSpectrumError("range_shift_estimate: alpha2 vanishes (degenerate spectrum)");
  }
  est.Y_hat = -3.0 * (M - 1) * est.alpha1 / est.alpha2;
  est.y_hat = est.Y_hat * problem.range_per_unit_y();
  return est;
}

ArgmaxResult numeric_argmax(const ShiftProblem& problem, double Y_lo, double Y_hi, int samples) {
  problem.validate();
  if (samples < 100) {
    throw DomainError("numeric_argmax: need at least 100 samples");
  }
  if (!(Y_hi > Y_lo)) {
    throw DomainError("numeric_argmax: empty window");
  }
  const auto f = [&](double Y) { return std::norm(a_direct(problem.rho, Y)); };
  const double step = (Y_hi - Y_lo) / (samples - 1);

  int best = 0;
  double best_value = f(Y_lo);
  for (int i = 1; i < samples; ++i) {
    const double v = f(Y_lo + i * step);
    if (v > best_value) {
      best = i;
      best_value = v;
    }
  }
  if (best == 0 || best == samples - 1) {
    return {Y_lo + best * step, best_value, true};
  }

  // Golden-section search on the bracketing cells.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = Y_lo + (best - 1) * step;
  double b = Y_lo + (best + 1) * step;
  double c = b - inv_phi * (b - a);
  double e = a + inv_phi * (b - a);
  double fc = f(c);
  double fe = f(e);
  while (b - a > 1e-8) {
    if (fc > fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + inv_phi * (b - a);
      fe = f(e);
    }
  }
  const double Y = 0.5 * (a + b);
  return {Y, f(Y), false};
}

std::vector<ShiftSweepRow> range_shift_sweep(const AcquisitionGeometry& geometry, double n_rel,
                                             std::span<const double> k0_alphas, double Y_lo,
                                             double Y_hi, int samples) {
  const double k0 = geometry.central_wavenumber();
  std::vector<ShiftSweepRow> rows;
  rows.reserve(k0_alphas.size());
  for (double ka : k0_alphas) {
    const auto sphere = SphereSpec::from_size_parameter(ka, n_rel, k0);
    const auto spectrum = reflectivity_spectrum(sphere, geometry.omegas(), geometry.wave_speed());
    const auto problem = ShiftProblem::from(geometry, spectrum);
    const auto numeric = numeric_argmax(problem, Y_lo, Y_hi, samples);
    const auto estimate = range_shift_estimate(problem);
    const double scale = problem.range_per_unit_y() * k0;
    rows.push_back({ka, numeric.Y, estimate.Y_hat, numeric.Y * scale, estimate.Y_hat * scale,
                    numeric.at_boundary});
  }
  return rows;
}

}  // namespace dispersar
