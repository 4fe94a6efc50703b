#include <chrono>
#include <cmath>
#include <ostream>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "dispersar/cli.hpp"
#include "dispersar/errors.hpp"
#include "dispersar/imaging.hpp"
#include "dispersar/io.hpp"
#include "dispersar/rangeshift.hpp"
#include "dispersar/rcsrecovery.hpp"

namespace dispersar::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

AcquisitionGeometry make_geometry(const ExperimentConfig& config) {
  try {
    return AcquisitionGeometry(config.geometry);
  } catch (const DomainError& e) {
    throw ConfigError("geometry", e.what());
  }
}

DataMatrix obtain_data(const CommandOptions& options, const ExperimentConfig& config,
                       const AcquisitionGeometry& geometry, const TargetSet& targets) {
  if (options.data_path) {
    return io::read_data_csv(*options.data_path, &geometry);
  }
  auto data = synthesize_data(geometry, targets);
  if (config.noise) {
    data = add_noise(data, config.noise->snr_db, config.noise->seed);
  }
  return data;
}

json location_json(const Vec3& p, double k0) {
  return {{"x_k0", p.x * k0}, {"y_k0", p.y * k0}, {"x_m", p.x}, {"y_m", p.y}};
}

json peak_json(const Peak& p, double k0) {
  auto j = location_json({p.x, p.y, 0.0}, k0);
  j["row"] = p.row;
  j["col"] = p.col;
  j["value"] = p.value;
  return j;
}

void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

void write_metadata(const fs::path& dir, const std::string& command, const CommandOptions& options,
                    const ExperimentConfig& config) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  json j;
  j["command"] = command;
  j["timestamp_utc"] = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
  j["config_path"] = options.config_path.string();
  j["data_path"] = options.data_path ? options.data_path->string() : std::string("(synthesized)");
  j["threads"] = options.threads;
  j["config"] = json::parse(serialize_config(config));
  write_json(dir / "run_metadata.json", j);
}

void print_peak(std::ostream& log, const std::string& label, const Peak& p, double k0) {
  fmt::print(log, "{}: (x, y) = ({:.3f}, {:.3f})/k0 = ({:.4f}, {:.4f}) m, value {:.4g}\n", label,
             p.x * k0, p.y * k0, p.x, p.y, p.value);
}

std::optional<double> target_gcs(const Target& t) {
  if (t.sphere) {
    return geometric_cross_section(t.sphere->radius);
  }
  return std::nullopt;
}

std::size_t nearest_target(const TargetSet& targets, const Vec3& p) {
  std::size_t best = 0;
  for (std::size_t q = 1; q < targets.size(); ++q) {
    if (distance(targets[q].position, p) < distance(targets[best].position, p)) {
      best = q;
    }
  }
  return best;
}

json fit_json(const QuadraticFit& f) {
  return {{"omega_ref", f.omega_ref}, {"c0", f.c0}, {"c1", f.c1}, {"c2", f.c2}};
}

double max_relative_error(const RcsSpectrum& est, const std::vector<double>& truth) {
  double worst = 0.0;
  for (std::size_t m = 0; m < truth.size(); ++m) {
    worst = std::max(worst, std::abs(est.sigma[m] - truth[m]) / truth[m]);
  }
  return worst;
}

}  // namespace

ExperimentConfig resolve_config(const CommandOptions& options) {
  auto config = load_config(options.config_path);
  if (options.seed && config.noise) {
    config.noise->seed = *options.seed;
  }
  if (options.threads < 0) {
    throw ConfigError("--threads", "must be nonnegative");
  }
  return config;
}

fs::path output_directory(const CommandOptions& options, const ExperimentConfig& config) {
  return options.out_dir ? *options.out_dir : fs::path(config.output_dir);
}

void cmd_synthesize(const CommandOptions& options, std::ostream& log) {
  const auto config = resolve_config(options);
  const auto geometry = make_geometry(config);
  const auto targets = build_targets(config, geometry);
  auto data = synthesize_data(geometry, targets);
  if (config.noise) {
    data = add_noise(data, config.noise->snr_db, config.noise->seed);
  }
  const auto dir = output_directory(options, config);
  io::write_data_csv(dir / "data.csv", data, geometry);
  for (std::size_t q = 0; q < targets.size(); ++q) {
    io::write_reflectivity_csv(dir / fmt::format("reflectivity_target{}.csv", q),
                               targets[q].reflectivity);
  }
  write_metadata(dir, "synthesize", options, config);
  fmt::print(log, "wrote {}x{} data matrix for {} target(s) to {}\n", data.rows(), data.cols(),
             targets.size(), (dir / "data.csv").string());
  fmt::print(log, "geometry hash {}\n", geometry.hash_hex());
}

void cmd_image(const CommandOptions& options, std::ostream& log) {
  const auto config = resolve_config(options);
  const auto geometry = make_geometry(config);
  const auto targets = build_targets(config, geometry);
  const auto data = obtain_data(options, config, geometry, targets);
  const double k0 = geometry.central_wavenumber();

  const auto image = normalize_image(km_image(data, geometry, overview_grid(config, geometry), options.threads));
  const auto peaks = find_peaks(image, config.imaging.peak_threshold);

  const auto dir = output_directory(options, config);
  io::write_image_csv(dir / "overview.csv", image, k0);
  io::write_image_png(dir / "overview.png", image);
  json report;
  report["grid"] = {{"pixels", image.grid.nx}, {"size_k0", config.imaging.size_k0}};
  report["peaks"] = json::array();
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    report["peaks"].push_back(peak_json(peaks[i], k0));
    print_peak(log, fmt::format("peak {}", i), peaks[i], k0);
  }
  write_json(dir / "overview_peaks.json", report);
  write_metadata(dir, "image", options, config);
}

void cmd_zoom(const CommandOptions& options, std::ostream& log) {
  const auto config = resolve_config(options);
  const auto geometry = make_geometry(config);
  const auto targets = build_targets(config, geometry);
  const auto data = obtain_data(options, config, geometry, targets);
  const double k0 = geometry.central_wavenumber();
  const auto& im = config.imaging;

  std::vector<std::pair<double, double>> centers;
  if (im.zoom_center_k0) {
    centers.emplace_back(im.zoom_center_k0->first / k0, im.zoom_center_k0->second / k0);
  } else {
    const auto overview =
        normalize_image(km_image(data, geometry, overview_grid(config, geometry), options.threads));
    auto peaks = find_peaks(overview, im.peak_threshold);
    if (config.analysis.rcs.num_targets &&
        peaks.size() > static_cast<std::size_t>(*config.analysis.rcs.num_targets)) {
      peaks.resize(static_cast<std::size_t>(*config.analysis.rcs.num_targets));
    }
    for (const auto& p : peaks) {
      centers.emplace_back(p.x, p.y);
    }
  }

  const auto dir = output_directory(options, config);
  json report;
  report["epsilon"] = im.epsilon;
  report["size_k0"] = im.zoom_size_k0;
  report["pixels"] = im.zoom_pixels;
  report["zooms"] = json::array();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const auto [cx, cy] = centers[i];
    const auto zoom = subregion_zoom(data, geometry, cx, cy, im.zoom_size_k0 / k0, im.zoom_pixels,
                                     im.epsilon, options.threads);
    const auto peak = locate_peak(zoom);
    io::write_image_csv(dir / fmt::format("zoom{}.csv", i), zoom, k0);
    io::write_image_png(dir / fmt::format("zoom{}.png", i), zoom);
    json z;
    z["center"] = location_json({cx, cy, 0.0}, k0);
    z["peak"] = peak_json(peak, k0);
    report["zooms"].push_back(z);
    print_peak(log, fmt::format("zoom {} peak", i), peak, k0);
  }
  write_json(dir / "zoom_peaks.json", report);
  write_metadata(dir, "zoom", options, config);
}

void cmd_rangeshift(const CommandOptions& options, std::ostream& log) {
  const auto config = resolve_config(options);
  const auto geometry = make_geometry(config);
  const auto& rs = config.analysis.rangeshift;
  const auto k0_alphas = rs.k0_alphas();
  const double k0 = geometry.central_wavenumber();

  const auto rows =
      range_shift_sweep(geometry, rs.n_rel, k0_alphas, rs.window_lo, rs.window_hi, rs.samples);
  const auto dir = output_directory(options, config);
  io::write_shift_sweep_csv(dir / "rangeshift_sweep.csv", rows);
  for (const auto& r : rows) {
    fmt::print(log, "k0a = {:.2f}: y_numeric = {:+.4f}/k0, y_estimate = {:+.4f}/k0{}\n",
               r.k0_alpha, r.y_numeric_k0, r.y_estimate_k0,
               r.at_boundary ? "  (argmax on window boundary)" : "");
  }

  // Normalized RCS at the central frequency over the same sizes.
  {
    std::string csv = "k0_alpha,sigma_normalized\n";
    const double omega0 = geometry.central_omega();
    for (double ka : k0_alphas) {
      const auto sphere = SphereSpec::from_size_parameter(ka, rs.n_rel, k0);
      const auto f = reflectivity_spectrum(sphere, std::span<const double>(&omega0, 1),
                                           geometry.wave_speed());
      csv += fmt::format("{},{}\n", ka, normalized_rcs(f.values[0], sphere.radius));
    }
    io::write_text(dir / "rcs_vs_size.csv", csv);
  }

  if (rs.km_pipeline) {
    // Noiseless single target at the scene center, peak of a fine KM zoom.
    std::string csv = "k0_alpha,y_km_k0units,y_estimate_k0units\n";
    const double side = 40.0 / k0;
    const int pixels = 161;
    for (std::size_t i = 0; i < k0_alphas.size(); ++i) {
      const auto sphere = SphereSpec::from_size_parameter(k0_alphas[i], rs.n_rel, k0);
      const TargetSet single{make_sphere_target(geometry, {0.0, 0.0, 0.0}, sphere)};
      const auto data = synthesize_data(geometry, single);
      const auto zoom = normalize_image(
          km_image(data, geometry, GridSpec::square(0.0, 0.0, side, pixels), options.threads));
      const auto peak = locate_peak(zoom);
      csv += fmt::format("{},{},{}\n", k0_alphas[i], peak.y * k0, rows[i].y_estimate_k0);
    }
    io::write_text(dir / "rangeshift_km.csv", csv);
  }
  write_metadata(dir, "rangeshift", options, config);
}

void cmd_rcs(const CommandOptions& options, std::ostream& log) {
  const auto config = resolve_config(options);
  const auto geometry = make_geometry(config);
  const auto targets = build_targets(config, geometry);
  const auto data = obtain_data(options, config, geometry, targets);
  const double k0 = geometry.central_wavenumber();
  const auto& im = config.imaging;

  const auto overview =
      normalize_image(km_image(data, geometry, overview_grid(config, geometry), options.threads));
  const auto coarse = locate_peak(overview);
  const double cx = im.zoom_center_k0 ? im.zoom_center_k0->first / k0 : coarse.x;
  const double cy = im.zoom_center_k0 ? im.zoom_center_k0->second / k0 : coarse.y;
  const auto zoom = subregion_zoom(data, geometry, cx, cy, im.zoom_size_k0 / k0, im.zoom_pixels,
                                   im.epsilon, options.threads);
  const auto peak = locate_peak(zoom);
  const Vec3 predicted{peak.x, peak.y, 0.0};

  auto raw = rcs_single(geometry.omegas(), phi(data, geometry, predicted));
  const auto& truth_target = targets[nearest_target(targets, predicted)];
  raw.geometric_cross_section = target_gcs(truth_target);
  std::optional<RcsSpectrum> smoothed;
  std::optional<QuadraticFit> fit;
  if (config.analysis.rcs.smoothing && geometry.num_frequencies() >= 3) {
    fit = fit_quadratic(raw, geometry.central_omega());
    smoothed = quadratic_smooth(raw, geometry.central_omega());
  }
  const io::RcsTruth truth{rcs(truth_target.reflectivity)};

  const auto dir = output_directory(options, config);
  io::write_rcs_csv(dir / "rcs.csv", raw, smoothed ? &*smoothed : nullptr, &truth);

  const double err = max_relative_error(raw, truth.sigma);
  json report;
  report["predicted"] = location_json(predicted, k0);
  report["true"] = location_json(truth_target.position, k0);
  report["range_shift_k0"] = (predicted.y - truth_target.position.y) * k0;
  report["max_relative_error"] = err;
  if (raw.geometric_cross_section) {
    report["band_average_normalized"] = raw.band_average_normalized();
  }
  if (fit) {
    report["smoothing"] = fit_json(*fit);
  }
  write_json(dir / "rcs_report.json", report);
  write_metadata(dir, "rcs", options, config);

  print_peak(log, "predicted location", peak, k0);
  fmt::print(log, "range shift {:+.3f}/k0, max relative RCS error {:.3e}\n",
             report["range_shift_k0"].get<double>(), err);
}

void cmd_multircs(const CommandOptions& options, std::ostream& log) {
  const auto config = resolve_config(options);
  const auto geometry = make_geometry(config);
  const auto targets = build_targets(config, geometry);
  const auto data = obtain_data(options, config, geometry, targets);
  const double k0 = geometry.central_wavenumber();
  const double lambda0 = geometry.central_wavelength();

  RecoveryOptions ro;
  ro.peak_threshold = config.imaging.peak_threshold;
  ro.num_targets = config.analysis.rcs.num_targets;
  ro.zoom_side = config.analysis.rcs.zoom_size_k0 / k0;
  ro.zoom_pixels = config.imaging.zoom_pixels;
  ro.epsilon = config.imaging.epsilon;
  ro.smoothing = config.analysis.rcs.smoothing;
  ro.threads = options.threads;
  auto report = recover_procedure(data, geometry, overview_grid(config, geometry), ro);

  const auto dir = output_directory(options, config);
  json j;
  j["targets"] = json::array();
  for (std::size_t q = 0; q < report.targets.size(); ++q) {
    auto& t = report.targets[q];
    const auto& truth_target = targets[nearest_target(targets, t.location)];
    t.rcs.geometric_cross_section = target_gcs(truth_target);
    if (t.smoothed) {
      t.smoothed->geometric_cross_section = t.rcs.geometric_cross_section;
    }
    const io::RcsTruth truth{rcs(truth_target.reflectivity)};
    io::write_rcs_csv(dir / fmt::format("rcs_target{}.csv", q), t.rcs,
                      t.smoothed ? &*t.smoothed : nullptr, &truth);

    json jt;
    jt["predicted"] = location_json(t.location, k0);
    jt["nearest_true"] = location_json(truth_target.position, k0);
    jt["error_wavelengths"] = distance(t.location, truth_target.position) / lambda0;
    jt["overview_peak_value"] = t.overview_peak.value;
    if (t.rcs.geometric_cross_section) {
      jt["band_average_normalized"] = t.rcs.band_average_normalized();
      if (t.smoothed) {
        jt["band_average_normalized_smoothed"] = t.smoothed->band_average_normalized();
      }
      RcsSpectrum true_spectrum{t.rcs.omega, truth.sigma, t.rcs.geometric_cross_section};
      jt["band_average_normalized_true"] = true_spectrum.band_average_normalized();
    }
    if (t.fit) {
      jt["smoothing"] = fit_json(*t.fit);
    }
    j["targets"].push_back(jt);
    fmt::print(log, "target {}: ({:.3f}, {:.3f})/k0, {:.2f} wavelengths from nearest truth\n", q,
               t.location.x * k0, t.location.y * k0, jt["error_wavelengths"].get<double>());
  }
  double cmin = report.condition.front();
  double cmax = cmin;
  double csum = 0.0;
  for (double c : report.condition) {
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
    csum += c;
  }
  j["condition"] = {{"min", cmin},
                    {"max", cmax},
                    {"mean", csum / static_cast<double>(report.condition.size())},
                    {"ill_conditioned", report.ill_conditioned},
                    {"per_frequency", report.condition}};
  write_json(dir / "multircs_report.json", j);
  write_metadata(dir, "multircs", options, config);
  fmt::print(log, "condition numbers in [{:.3g}, {:.3g}]{}\n", cmin, cmax,
             report.ill_conditioned ? " (ill-conditioned)" : "");
}

}  // namespace dispersar::cli
