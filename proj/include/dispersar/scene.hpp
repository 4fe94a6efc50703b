#pragma once

// Acquisition geometry, dispersive point targets and forward synthesis of
// frequency-domain SAR measurements d_mn.
//
// Coordinates are SI meters with the origin at the center of the imaging
// region; the imaging plane is z = 0, the platform flies along x at
// (xi_n, R, H). Range is +y, cross-range is x.

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dispersar/scattering.hpp"

namespace dispersar {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct GeometryParams {
  double range_offset = 3550.0;    // R, m
  double height = 7300.0;          // H, m
  double aperture = 130.0;         // a, m
  int num_positions = 32;          // N
  int num_frequencies = 25;        // M
  double center_frequency = 9.6e9; // f0 = omega0 / 2 pi, Hz
  double bandwidth = 6.22e8;       // B, Hz
  double wave_speed = 3.0e8;       // c, m/s
};

class AcquisitionGeometry {
 public:
  explicit AcquisitionGeometry(const GeometryParams& params);

  const GeometryParams& params() const noexcept { return params_; }
  int num_positions() const noexcept { return params_.num_positions; }
  int num_frequencies() const noexcept { return params_.num_frequencies; }
  double wave_speed() const noexcept { return params_.wave_speed; }
  double bandwidth() const noexcept { return params_.bandwidth; }

  /// L = sqrt(H^2 + R^2).
  double slant_range() const noexcept { return slant_range_; }
  double sin_theta() const noexcept { return params_.range_offset / slant_range_; }
  double cos_theta() const noexcept { return params_.height / slant_range_; }

  double central_omega() const noexcept;
  double central_wavenumber() const noexcept;
  double central_wavelength() const noexcept;

  /// Zero-based accessors: m in [0, M), n in [0, N).
  double wavenumber(int m) const { return wavenumbers_.at(static_cast<std::size_t>(m)); }
  double omega(int m) const { return omegas_.at(static_cast<std::size_t>(m)); }
  const Vec3& platform(int n) const { return platforms_.at(static_cast<std::size_t>(n)); }

  std::span<const double> wavenumbers() const noexcept { return wavenumbers_; }
  std::span<const double> omegas() const noexcept { return omegas_; }
  std::span<const Vec3> platforms() const noexcept { return platforms_; }

  /// Position in meters from coordinates scaled by the central wavenumber.
  Vec3 from_k0_units(double x_k0, double y_k0) const;
  double to_k0_units(double meters) const noexcept { return meters * central_wavenumber(); }

  /// FNV-1a hash of the defining parameters, printed in data file headers.
  std::uint64_t hash() const;
  std::string hash_hex() const;

 private:
  GeometryParams params_;
  double slant_range_ = 0.0;
  std::vector<double> wavenumbers_;
  std::vector<double> omegas_;
  std::vector<Vec3> platforms_;
};

/// Parameters of the GOTCHA-like X-band configuration used throughout.
GeometryParams gotcha_params();
AcquisitionGeometry make_gotcha_geometry();

struct Target {
  Vec3 position;                     // z must be 0
  ReflectivitySpectrum reflectivity; // on the geometry's omega grid
  std::optional<SphereSpec> sphere;  // set when generated from a sphere
};

/// Target whose reflectivity is the backscatter amplitude of `sphere`.
Target make_sphere_target(const AcquisitionGeometry& geometry, const Vec3& position,
                          const SphereSpec& sphere);

using TargetSet = std::vector<Target>;

/// Throws DomainError when the set is empty, a target is off the z = 0 plane,
/// or a spectrum is not sampled on the geometry's frequency grid.
void validate_targets(const AcquisitionGeometry& geometry, const TargetSet& targets);

/// Complex M x N measurement matrix, row m = frequency, column n = position.
class DataMatrix {
 public:
  DataMatrix() = default;
  DataMatrix(int rows, int cols);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  complex& operator()(int m, int n) { return values_[index(m, n)]; }
  const complex& operator()(int m, int n) const { return values_[index(m, n)]; }

  std::span<const complex> values() const noexcept { return values_; }
  std::span<complex> values() noexcept { return values_; }

  double frobenius_norm_squared() const;

  std::optional<double> snr_db;
  std::optional<std::uint64_t> seed;

 private:
  std::size_t index(int m, int n) const {
    return static_cast<std::size_t>(m) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(n);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<complex> values_;
};

/// d_mn = sum_q rho_q(omega_m) exp(2i k_m |x_n - y_q|) / (4 pi |x_n - y_q|)^2.
DataMatrix synthesize_data(const AcquisitionGeometry& geometry, const TargetSet& targets);

/// Adds circular complex Gaussian noise W drawn from mt19937_64(seed), scaled
/// so that 10 log10(|D|_F^2 / |W|_F^2) equals snr_db for this realization.
DataMatrix add_noise(const DataMatrix& data, double snr_db, std::uint64_t seed);

/// 10 log10(|clean|_F^2 / |noisy - clean|_F^2).
double measured_snr_db(const DataMatrix& clean, const DataMatrix& noisy);

}  // namespace dispersar
