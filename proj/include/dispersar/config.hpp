#pragma once

// Experiment configuration (JSON). Coordinates may be given in units of
// 1/k0 (keys x_k0, y_k0) or in meters ("units": "m", keys x, y).
//
// {
//   "geometry": {"R": 3550, "H": 7300, "a": 130, "N": 32, "M": 25,
//                "f0_hz": 9.6e9, "B_hz": 6.22e8, "c": 3e8},
//   "targets": [{"x_k0": 273.713, "y_k0": -346.167,
//                "sphere": {"k0_alpha": 1.4, "n_rel": 1.4}}],
//   "noise": {"snr_db": 3.73, "seed": 7},
//   "imaging": {...}, "analysis": {...}, "output_dir": "out"
// }

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dispersar/imaging.hpp"
#include "dispersar/rcsrecovery.hpp"
#include "dispersar/scene.hpp"

namespace dispersar {

struct SphereConfig {
  std::optional<double> k0_alpha;  // exactly one of k0_alpha, radius
  std::optional<double> radius;    // m
  double n_rel = 1.0;
  int n_max = 32;
};

struct TargetConfig {
  bool si_units = false;  // false: x, y are in 1/k0 units
  double x = 0.0;
  double y = 0.0;
  // Exactly one reflectivity source.
  std::optional<SphereConfig> sphere;
  std::optional<complex> flat_reflectivity;
  std::optional<std::string> reflectivity_csv;  // relative to the config file
};

struct NoiseConfig {
  double snr_db = 0.0;
  std::uint64_t seed = 0;
};

struct ImagingConfig {
  double center_x_k0 = 0.0;
  double center_y_k0 = 0.0;
  double size_k0 = 500.0;
  int pixels = 201;
  std::optional<std::pair<double, double>> zoom_center_k0;  // default: overview peaks
  double zoom_size_k0 = 20.0;
  int zoom_pixels = 101;
  double epsilon = 1e-4;
  double peak_threshold = 0.5;
};

struct RangeShiftConfig {
  double n_rel = 1.4;
  double k0_alpha_min = 0.1;
  double k0_alpha_max = 3.0;
  double k0_alpha_step = 0.1;
  double window_lo = -2.0;
  double window_hi = 2.0;
  int samples = 2001;
  bool km_pipeline = false;  // also measure the shift on noiseless KM zooms

  std::vector<double> k0_alphas() const;
};

struct RcsConfig {
  std::optional<int> num_targets;
  bool smoothing = true;
  double zoom_size_k0 = 50.0;
};

struct AnalysisConfig {
  RangeShiftConfig rangeshift;
  RcsConfig rcs;
};

struct ExperimentConfig {
  GeometryParams geometry;
  std::vector<TargetConfig> targets;
  std::optional<NoiseConfig> noise;
  ImagingConfig imaging;
  AnalysisConfig analysis;
  std::string output_dir = "out";
  std::filesystem::path base_dir;  // directory of the config file, not serialized

  /// Throws ConfigError carrying the offending field path.
  void validate() const;
};

/// Parses and validates. Throws ConfigError("<field path>", message).
ExperimentConfig parse_config(std::string_view json_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON text; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& config);

/// Builds the target set on the geometry's frequency grid.
TargetSet build_targets(const ExperimentConfig& config, const AcquisitionGeometry& geometry);

/// Overview imaging grid in meters.
GridSpec overview_grid(const ExperimentConfig& config, const AcquisitionGeometry& geometry);

}  // namespace dispersar
