#pragma once

// File formats. All CSV numbers are written in shortest round-trip form, so
// identical inputs give byte-identical files.
//
//   reflectivity:  omega_rad_s,re_rho,im_rho
//   data matrix:   # geometry_hash=<16 hex>[,snr_db=<v>,seed=<s>]
//                  m,n,re,im            (m, n one-based)
//   image:         x_k0,y_k0,value      (row-major, y outer)
//   rcs:           omega_rad_s,sigma_m2,sigma_normalized,sigma_smoothed
//                  [,sigma_true_m2,rel_error]
//   shift sweep:   k0_alpha,Y_numeric,Y_estimate,y_numeric_k0units,y_estimate_k0units

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>

#include "dispersar/imaging.hpp"
#include "dispersar/rangeshift.hpp"
#include "dispersar/rcsrecovery.hpp"
#include "dispersar/scattering.hpp"
#include "dispersar/scene.hpp"

namespace dispersar::io {

namespace fs = std::filesystem;

void write_reflectivity_csv(std::ostream& out, const ReflectivitySpectrum& spectrum);
ReflectivitySpectrum read_reflectivity_csv(std::istream& in);
void write_reflectivity_csv(const fs::path& path, const ReflectivitySpectrum& spectrum);
ReflectivitySpectrum read_reflectivity_csv(const fs::path& path);

void write_data_csv(std::ostream& out, const DataMatrix& data, const AcquisitionGeometry& geometry);
/// Reads a data matrix; when `geometry` is given the header hash and the
/// dimensions must match it (ConfigError otherwise).
DataMatrix read_data_csv(std::istream& in, const AcquisitionGeometry* geometry = nullptr);
void write_data_csv(const fs::path& path, const DataMatrix& data, const AcquisitionGeometry& geometry);
DataMatrix read_data_csv(const fs::path& path, const AcquisitionGeometry* geometry = nullptr);

void write_image_csv(std::ostream& out, const RealImage& image, double k0);
void write_image_csv(const fs::path& path, const RealImage& image, double k0);

/// 8-bit grayscale PNG, value v in [0, 1] mapped to round(255 v); the top
/// row of the raster is the largest range coordinate.
void write_image_png(const fs::path& path, const RealImage& image);

struct RcsTruth {
  std::vector<double> sigma;  // m^2
};

void write_rcs_csv(std::ostream& out, const RcsSpectrum& raw, const RcsSpectrum* smoothed,
                   const RcsTruth* truth = nullptr);
void write_rcs_csv(const fs::path& path, const RcsSpectrum& raw, const RcsSpectrum* smoothed,
                   const RcsTruth* truth = nullptr);

void write_shift_sweep_csv(std::ostream& out, std::span<const ShiftSweepRow> rows);
void write_shift_sweep_csv(const fs::path& path, std::span<const ShiftSweepRow> rows);

/// Writes `text` to `path`, creating parent directories.
void write_text(const fs::path& path, std::string_view text);

}  // namespace dispersar::io
