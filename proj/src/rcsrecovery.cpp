#include "dispersar/rcsrecovery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "dispersar/errors.hpp"

namespace dispersar {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

void check_dimensions(const DataMatrix& data, const AcquisitionGeometry& geometry) {
  if (data.rows() != geometry.num_frequencies() || data.cols() != geometry.num_positions()) {
    throw DomainError(fmt::format("data is {}x{} but geometry expects {}x{}", data.rows(),
                                  data.cols(), geometry.num_frequencies(),
                                  geometry.num_positions()));
  }
}

std::vector<double> ranges_to(const AcquisitionGeometry& geometry, const Vec3& point) {
  std::vector<double> r;
  r.reserve(geometry.platforms().size());
  for (const auto& x : geometry.platforms()) {
    r.push_back(distance(x, point));
  }
  return r;
}

}  // namespace

std::vector<double> RcsSpectrum::normalized() const {
  if (!geometric_cross_section) {
    return {};
  }
  std::vector<double> out;
  out.reserve(sigma.size());
  for (double s : sigma) {
    out.push_back(s / *geometric_cross_section);
  }
  return out;
}

double RcsSpectrum::band_average_normalized() const {
  const auto values = geometric_cross_section ? normalized() : sigma;
  if (values.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  return sum / static_cast<double>(values.size());
}

std::vector<complex> phi(const DataMatrix& data, const AcquisitionGeometry& geometry,
                         const Vec3& predicted) {
  check_dimensions(data, geometry);
  const int M = data.rows();
  const int N = data.cols();
  const auto r = ranges_to(geometry, predicted);
  std::vector<complex> out(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    const double two_k = 2.0 * geometry.wavenumber(m);
    complex acc{};
    for (int n = 0; n < N; ++n) {
      const double spreading = (kFourPi * r[n]) * (kFourPi * r[n]);
      acc += data(m, n) * std::polar(spreading, -two_k * r[n]);
    }
    out[m] = acc / static_cast<double>(N);
  }
  return out;
}

RcsSpectrum rcs_single(std::span<const double> omega, std::span<const complex> values) {
  if (omega.size() != values.size()) {
    throw DomainError("rcs_single: frequency grid and values differ in length");
  }
  RcsSpectrum out;
  out.omega.assign(omega.begin(), omega.end());
  out.sigma.reserve(values.size());
  for (const auto& v : values) {
    out.sigma.push_back(rcs(v));
  }
  return out;
}

MultiSystem multi_system(const DataMatrix& data, const AcquisitionGeometry& geometry,
                         std::span<const Vec3> predicted) {
  check_dimensions(data, geometry);
  const int Q = static_cast<int>(predicted.size());
  if (Q < 1) {
    throw DomainError("multi_system: need at least one predicted location");
  }
  for (int p = 0; p < Q; ++p) {
    for (int q = p + 1; q < Q; ++q) {
      if (distance(predicted[p], predicted[q]) == 0.0) {
        throw DomainError(fmt::format("multi_system: predicted locations {} and {} coincide", p, q));
      }
    }
  }

  const int M = data.rows();
  const int N = data.cols();
  std::vector<std::vector<double>> r;
  r.reserve(static_cast<std::size_t>(Q));
  for (const auto& y : predicted) {
    r.push_back(ranges_to(geometry, y));
  }

  MultiSystem sys;
  sys.matrices.assign(static_cast<std::size_t>(M), Eigen::MatrixXcd::Identity(Q, Q));
  sys.rhs.assign(static_cast<std::size_t>(M), Eigen::VectorXcd::Zero(Q));
  for (int p = 0; p < Q; ++p) {
    const auto phi_p = phi(data, geometry, predicted[p]);
    for (int m = 0; m < M; ++m) {
      sys.rhs[m](p) = phi_p[m];
    }
  }
  for (int m = 0; m < M; ++m) {
    const double two_k = 2.0 * geometry.wavenumber(m);
    auto& A = sys.matrices[m];
    for (int p = 0; p < Q; ++p) {
      for (int q = 0; q < Q; ++q) {
        if (p == q) {
          continue;
        }
        complex acc{};
        for (int n = 0; n < N; ++n) {
          const double ratio = (r[p][n] * r[p][n]) / (r[q][n] * r[q][n]);
          acc += std::polar(ratio, two_k * (r[q][n] - r[p][n]));
        }
        A(p, q) = acc / static_cast<double>(N);
      }
    }
  }
  return sys;
}

MultiSolution solve_multi(const MultiSystem& systems) {
  if (systems.matrices.size() != systems.rhs.size() || systems.matrices.empty()) {
    throw DomainError("solve_multi: malformed system list");
  }
  const auto M = systems.matrices.size();
  const auto Q = systems.matrices.front().rows();

  MultiSolution out;
  out.rho.assign(static_cast<std::size_t>(Q), std::vector<complex>(M));
  out.condition.resize(M);
  for (std::size_t m = 0; m < M; ++m) {
    const auto& A = systems.matrices[m];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0.0) || !std::isfinite(smax)) {
      throw SingularSystemError(fmt::format("solve_multi: singular system at frequency index {}", m));
    }
    out.condition[m] = smax / smin;
    out.ill_conditioned = out.ill_conditioned || out.condition[m] > kIllConditionedThreshold;

    const Eigen::VectorXcd x = A.colPivHouseholderQr().solve(systems.rhs[m]);
    for (Eigen::Index q = 0; q < Q; ++q) {
      out.rho[static_cast<std::size_t>(q)][m] = x(q);
    }
  }
  return out;
}

std::vector<RcsSpectrum> rcs_multi(const MultiSolution& solution, std::span<const double> omega) {
  std::vector<RcsSpectrum> out;
  out.reserve(solution.rho.size());
  for (const auto& rho_q : solution.rho) {
    out.push_back(rcs_single(omega, rho_q));
  }
  return out;
}

QuadraticFit fit_quadratic(const RcsSpectrum& spectrum, double omega_ref) {
  const auto M = static_cast<Eigen::Index>(spectrum.sigma.size());
  if (M < 3 || spectrum.omega.size() != spectrum.sigma.size()) {
    throw DomainError("quadratic smoothing needs at least 3 samples on a matching grid");
  }
  double scale = 0.0;
  for (double w : spectrum.omega) {
    scale = std::max(scale, std::abs(w - omega_ref));
  }
  if (scale == 0.0) {
    scale = 1.0;
  }

  // Fit in t = (omega - omega_ref) / scale to keep the Vandermonde matrix
  // well conditioned, then undo the scaling.
  Eigen::MatrixXd V(M, 3);
  Eigen::VectorXd y(M);
  for (Eigen::Index i = 0; i < M; ++i) {
    const double t = (spectrum.omega[static_cast<std::size_t>(i)] - omega_ref) / scale;
    V(i, 0) = 1.0;
    V(i, 1) = t;
    V(i, 2) = t * t;
    y(i) = spectrum.sigma[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d beta = V.colPivHouseholderQr().solve(y);
  return {omega_ref, beta(0), beta(1) / scale, beta(2) / (scale * scale)};
}

RcsSpectrum quadratic_smooth(const RcsSpectrum& spectrum, double omega_ref) {
  const auto fit = fit_quadratic(spectrum, omega_ref);
  RcsSpectrum out = spectrum;
  for (std::size_t i = 0; i < out.sigma.size(); ++i) {
    out.sigma[i] = std::max(0.0, fit(out.omega[i]));
  }
  return out;
}

RecoveryReport recover_procedure(const DataMatrix& data, const AcquisitionGeometry& geometry,
                                 const GridSpec& overview, const RecoveryOptions& options) {
  // Step 1: KM over the imaging region.
  const auto image = normalize_image(km_image(data, geometry, overview, options.threads));
  auto peaks = find_peaks(image, options.peak_threshold);
  if (peaks.empty()) {
    throw NoTargetsFoundError(
        fmt::format("no image peak above threshold {}", options.peak_threshold));
  }
  if (options.num_targets) {
    const auto wanted = static_cast<std::size_t>(*options.num_targets);
    if (peaks.size() < wanted) {
      throw NoTargetsFoundError(fmt::format("found {} peaks above threshold {}, expected {}",
                                            peaks.size(), options.peak_threshold, wanted));
    }
    peaks.resize(wanted);
  }

  // Step 2: tunable KM in a sub-region around each peak.
  const double side =
      options.zoom_side > 0.0 ? options.zoom_side : 50.0 / geometry.central_wavenumber();
  RecoveryReport report;
  std::vector<Vec3> locations;
  for (const auto& p : peaks) {
    const auto zoom = subregion_zoom(data, geometry, p.x, p.y, side, options.zoom_pixels,
                                     options.epsilon, options.threads);
    const auto zp = locate_peak(zoom);
    RecoveredTarget t;
    t.overview_peak = p;
    t.zoom_peak = zp;
    t.location = {zp.x, zp.y, 0.0};
    locations.push_back(t.location);
    report.targets.push_back(std::move(t));
  }

  // Steps 3 and 4: per-frequency linear solve and RCS.
  const auto solution = solve_multi(multi_system(data, geometry, locations));
  report.condition = solution.condition;
  report.ill_conditioned = solution.ill_conditioned;
  const auto spectra = rcs_multi(solution, geometry.omegas());
  for (std::size_t q = 0; q < report.targets.size(); ++q) {
    auto& t = report.targets[q];
    t.rho_tilde = solution.rho[q];
    t.rcs = spectra[q];
    if (options.smoothing && geometry.num_frequencies() >= 3) {
      t.fit = fit_quadratic(t.rcs, geometry.central_omega());
      t.smoothed = quadratic_smooth(t.rcs, geometry.central_omega());
    }
  }
  return report;
}

}  // namespace dispersar
