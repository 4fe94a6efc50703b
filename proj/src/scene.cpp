#include "dispersar/scene.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "dispersar/errors.hpp"

namespace dispersar {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(fmt::format("geometry: {} must be positive, got {}", name, v));
  }
}

}  // namespace

AcquisitionGeometry::AcquisitionGeometry(const GeometryParams& params) : params_(params) {
  require_positive(params.range_offset, "range offset R");
  require_positive(params.height, "height H");
  require_positive(params.aperture, "aperture a");
  require_positive(params.center_frequency, "center frequency");
  require_positive(params.bandwidth, "bandwidth B");
  require_positive(params.wave_speed, "wave speed c");
  if (params.num_positions < 2) {
    throw DomainError("geometry: need at least 2 platform positions");
  }
  if (params.num_frequencies < 2) {
    throw DomainError("geometry: need at least 2 frequencies");
  }

  slant_range_ = std::hypot(params.height, params.range_offset);

  const int M = params.num_frequencies;
  const double k0 = central_wavenumber();
  const double dk = 2.0 * std::numbers::pi * params.bandwidth / params.wave_speed;
  wavenumbers_.resize(static_cast<std::size_t>(M));
  omegas_.resize(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    const double k = k0 + dk * (-0.5 + static_cast<double>(m) / (M - 1));
    wavenumbers_[m] = k;
    omegas_[m] = params.wave_speed * k;
  }
  if (!(wavenumbers_.front() > 0.0)) {
    throw DomainError("geometry: bandwidth exceeds twice the center frequency");
  }

  const int N = params.num_positions;
  platforms_.resize(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) {
    const double xi = -params.aperture / 2.0 + params.aperture * static_cast<double>(n) / (N - 1);
    platforms_[n] = {xi, params.range_offset, params.height};
  }
  // Pin the endpoints so xi_1 = -a/2 and xi_N = +a/2 exactly.
  platforms_.front().x = -params.aperture / 2.0;
  platforms_.back().x = params.aperture / 2.0;
}

double AcquisitionGeometry::central_omega() const noexcept {
  return 2.0 * std::numbers::pi * params_.center_frequency;
}

double AcquisitionGeometry::central_wavenumber() const noexcept {
  return central_omega() / params_.wave_speed;
}

double AcquisitionGeometry::central_wavelength() const noexcept {
  return 2.0 * std::numbers::pi / central_wavenumber();
}

Vec3 AcquisitionGeometry::from_k0_units(double x_k0, double y_k0) const {
  const double k0 = central_wavenumber();
  return {x_k0 / k0, y_k0 / k0, 0.0};
}

std::uint64_t AcquisitionGeometry::hash() const {
  const auto canonical =
      fmt::format("R={:.17g};H={:.17g};a={:.17g};N={};M={};f0={:.17g};B={:.17g};c={:.17g}",
                  params_.range_offset, params_.height, params_.aperture, params_.num_positions,
                  params_.num_frequencies, params_.center_frequency, params_.bandwidth,
                  params_.wave_speed);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string AcquisitionGeometry::hash_hex() const { return fmt::format("{:016x}", hash()); }

GeometryParams gotcha_params() { return GeometryParams{}; }

AcquisitionGeometry make_gotcha_geometry() { return AcquisitionGeometry(gotcha_params()); }

Target make_sphere_target(const AcquisitionGeometry& geometry, const Vec3& position,
                          const SphereSpec& sphere) {
  return {position, reflectivity_spectrum(sphere, geometry.omegas(), geometry.wave_speed()), sphere};
}

void validate_targets(const AcquisitionGeometry& geometry, const TargetSet& targets) {
  if (targets.empty()) {
    throw DomainError("target set is empty");
  }
  const auto omegas = geometry.omegas();
  for (std::size_t q = 0; q < targets.size(); ++q) {
    const auto& t = targets[q];
    if (t.position.z != 0.0) {
      throw DomainError(fmt::format("target {}: must lie in the z = 0 plane", q));
    }
    t.reflectivity.validate();
    if (t.reflectivity.size() != omegas.size()) {
      throw DomainError(fmt::format("target {}: spectrum has {} samples, geometry has {}", q,
                                    t.reflectivity.size(), omegas.size()));
    }
    for (std::size_t m = 0; m < omegas.size(); ++m) {
      if (std::abs(t.reflectivity.omega[m] - omegas[m]) > 1e-9 * omegas[m]) {
        throw DomainError(fmt::format("target {}: spectrum not on the geometry frequency grid", q));
      }
    }
  }
}

DataMatrix::DataMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) {
    throw DomainError("data matrix dimensions must be nonnegative");
  }
  values_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), complex{});
}

double DataMatrix::frobenius_norm_squared() const {
  double s = 0.0;
  for (const auto& v : values_) {
    s += std::norm(v);
  }
  return s;
}

DataMatrix synthesize_data(const AcquisitionGeometry& geometry, const TargetSet& targets) {
  validate_targets(geometry, targets);
  const int M = geometry.num_frequencies();
  const int N = geometry.num_positions();
  DataMatrix d(M, N);
  for (const auto& target : targets) {
    for (int n = 0; n < N; ++n) {
      const double r = distance(geometry.platform(n), target.position);
      if (r == 0.0) {
        throw DomainError("synthesize_data: target coincides with a platform position");
      }
      const double spreading = 1.0 / ((kFourPi * r) * (kFourPi * r));
      for (int m = 0; m < M; ++m) {
        const double phase = 2.0 * geometry.wavenumber(m) * r;
        d(m, n) += target.reflectivity.values[m] * std::polar(spreading, phase);
      }
    }
  }
  return d;
}

DataMatrix add_noise(const DataMatrix& data, double snr_db, std::uint64_t seed) {
  const double signal = data.frobenius_norm_squared();
  if (!(signal > 0.0)) {
    throw DomainError("add_noise: data matrix is identically zero");
  }
  if (!std::isfinite(signal) || !std::isfinite(snr_db)) {
    throw DomainError("add_noise: non-finite data or SNR");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<complex> w(data.values().size());
  double noise = 0.0;
  for (auto& v : w) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v = {re, im};
    noise += std::norm(v);
  }

  const double scale = std::sqrt(signal / (noise * std::pow(10.0, snr_db / 10.0)));
  DataMatrix out = data;
  auto values = out.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] += scale * w[i];
  }
  out.snr_db = snr_db;
  out.seed = seed;
  return out;
}

double measured_snr_db(const DataMatrix& clean, const DataMatrix& noisy) {
  if (clean.rows() != noisy.rows() || clean.cols() != noisy.cols()) {
    throw DomainError("measured_snr_db: dimension mismatch");
  }
  double noise = 0.0;
  const auto a = clean.values();
  const auto b = noisy.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    noise += std::norm(b[i] - a[i]);
  }
  return 10.0 * std::log10(clean.frobenius_norm_squared() / noise);
}

}  // namespace dispersar
