#include "dispersar/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "dispersar/errors.hpp"
#include "dispersar/io.hpp"

namespace dispersar {

namespace {

using json = nlohmann::ordered_json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void reject_unknown(const json& obj, const std::string& path, std::set<std::string> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError(join(path, key), "unknown field");
    }
  }
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) {
    throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  }
  return j;
}

double get_number(const json& obj, const std::string& path, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError(join(path, key), "missing required field");
  }
  if (!it->is_number()) {
    throw ConfigError(join(path, key), "expected a number");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw ConfigError(join(path, key), "must be finite");
  }
  return v;
}

void read_number(const json& obj, const std::string& path, const std::string& key, double& out) {
  if (obj.contains(key)) {
    out = get_number(obj, path, key);
  }
}

int get_int(const json& obj, const std::string& path, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError(join(path, key), "missing required field");
  }
  if (!it->is_number_integer()) {
    throw ConfigError(join(path, key), "expected an integer");
  }
  return it->get<int>();
}

void read_int(const json& obj, const std::string& path, const std::string& key, int& out) {
  if (obj.contains(key)) {
    out = get_int(obj, path, key);
  }
}

void read_bool(const json& obj, const std::string& path, const std::string& key, bool& out) {
  if (obj.contains(key)) {
    if (!obj.at(key).is_boolean()) {
      throw ConfigError(join(path, key), "expected true or false");
    }
    out = obj.at(key).get<bool>();
  }
}

std::pair<double, double> get_pair(const json& obj, const std::string& path, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(join(path, key), "expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) {
    throw ConfigError(path, message);
  }
}

GeometryParams parse_geometry(const json& j) {
  const std::string path = "geometry";
  require_object(j, path);
  reject_unknown(j, path, {"R", "H", "a", "N", "M", "f0_hz", "B_hz", "c"});
  GeometryParams g;
  read_number(j, path, "R", g.range_offset);
  read_number(j, path, "H", g.height);
  read_number(j, path, "a", g.aperture);
  read_int(j, path, "N", g.num_positions);
  read_int(j, path, "M", g.num_frequencies);
  read_number(j, path, "f0_hz", g.center_frequency);
  read_number(j, path, "B_hz", g.bandwidth);
  read_number(j, path, "c", g.wave_speed);
  return g;
}

SphereConfig parse_sphere(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"k0_alpha", "radius", "n_rel", "n_max"});
  SphereConfig s;
  if (j.contains("k0_alpha")) {
    s.k0_alpha = get_number(j, path, "k0_alpha");
  }
  if (j.contains("radius")) {
    s.radius = get_number(j, path, "radius");
  }
  s.n_rel = get_number(j, path, "n_rel");
  read_int(j, path, "n_max", s.n_max);
  return s;
}

TargetConfig parse_target(const json& j, const std::string& path) {
  require_object(j, path);
  TargetConfig t;
  if (j.contains("units")) {
    const auto& u = j.at("units");
    require(u.is_string() && (u == "m" || u == "k0"), join(path, "units"), "expected \"m\" or \"k0\"");
    t.si_units = (u == "m");
  }
  if (t.si_units) {
    reject_unknown(j, path, {"units", "x", "y", "sphere", "flat_reflectivity", "reflectivity_csv"});
    t.x = get_number(j, path, "x");
    t.y = get_number(j, path, "y");
  } else {
    reject_unknown(j, path,
                   {"units", "x_k0", "y_k0", "sphere", "flat_reflectivity", "reflectivity_csv"});
    t.x = get_number(j, path, "x_k0");
    t.y = get_number(j, path, "y_k0");
  }
  if (j.contains("sphere")) {
    t.sphere = parse_sphere(j.at("sphere"), join(path, "sphere"));
  }
  if (j.contains("flat_reflectivity")) {
    const std::string fp = join(path, "flat_reflectivity");
    const auto& f = require_object(j.at("flat_reflectivity"), fp);
    reject_unknown(f, fp, {"re", "im"});
    t.flat_reflectivity = complex(get_number(f, fp, "re"), get_number(f, fp, "im"));
  }
  if (j.contains("reflectivity_csv")) {
    require(j.at("reflectivity_csv").is_string(), join(path, "reflectivity_csv"), "expected a path");
    t.reflectivity_csv = j.at("reflectivity_csv").get<std::string>();
  }
  return t;
}

NoiseConfig parse_noise(const json& j) {
  const std::string path = "noise";
  require_object(j, path);
  reject_unknown(j, path, {"snr_db", "seed"});
  NoiseConfig n;
  n.snr_db = get_number(j, path, "snr_db");
  if (!j.contains("seed")) {
    throw ConfigError("noise.seed", "missing required field (noise requested without a seed)");
  }
  const auto& s = j.at("seed");
  require(s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0),
          "noise.seed", "expected a nonnegative integer");
  n.seed = s.get<std::uint64_t>();
  return n;
}

ImagingConfig parse_imaging(const json& j) {
  const std::string path = "imaging";
  require_object(j, path);
  reject_unknown(j, path,
                 {"center_k0", "size_k0", "pixels", "zoom_center_k0", "zoom_size_k0", "zoom_pixels",
                  "epsilon", "peak_threshold"});
  ImagingConfig im;
  if (j.contains("center_k0")) {
    std::tie(im.center_x_k0, im.center_y_k0) = get_pair(j, path, "center_k0");
  }
  read_number(j, path, "size_k0", im.size_k0);
  read_int(j, path, "pixels", im.pixels);
  if (j.contains("zoom_center_k0")) {
    im.zoom_center_k0 = get_pair(j, path, "zoom_center_k0");
  }
  read_number(j, path, "zoom_size_k0", im.zoom_size_k0);
  read_int(j, path, "zoom_pixels", im.zoom_pixels);
  read_number(j, path, "epsilon", im.epsilon);
  read_number(j, path, "peak_threshold", im.peak_threshold);
  return im;
}

AnalysisConfig parse_analysis(const json& j) {
  const std::string path = "analysis";
  require_object(j, path);
  reject_unknown(j, path, {"rangeshift", "rcs"});
  AnalysisConfig a;
  if (j.contains("rangeshift")) {
    const std::string p = "analysis.rangeshift";
    const auto& r = require_object(j.at("rangeshift"), p);
    reject_unknown(r, p,
                   {"n_rel", "k0_alpha_min", "k0_alpha_max", "k0_alpha_step", "window", "samples",
                    "km_pipeline"});
    auto& rs = a.rangeshift;
    read_number(r, p, "n_rel", rs.n_rel);
    read_number(r, p, "k0_alpha_min", rs.k0_alpha_min);
    read_number(r, p, "k0_alpha_max", rs.k0_alpha_max);
    read_number(r, p, "k0_alpha_step", rs.k0_alpha_step);
    if (r.contains("window")) {
      std::tie(rs.window_lo, rs.window_hi) = get_pair(r, p, "window");
    }
    read_int(r, p, "samples", rs.samples);
    read_bool(r, p, "km_pipeline", rs.km_pipeline);
  }
  if (j.contains("rcs")) {
    const std::string p = "analysis.rcs";
    const auto& r = require_object(j.at("rcs"), p);
    reject_unknown(r, p, {"num_targets", "smoothing", "zoom_size_k0"});
    if (r.contains("num_targets")) {
      a.rcs.num_targets = get_int(r, p, "num_targets");
    }
    read_bool(r, p, "smoothing", a.rcs.smoothing);
    read_number(r, p, "zoom_size_k0", a.rcs.zoom_size_k0);
  }
  return a;
}

}  // namespace

std::vector<double> RangeShiftConfig::k0_alphas() const {
  std::vector<double> out;
  const auto count =
      static_cast<int>(std::floor((k0_alpha_max - k0_alpha_min) / k0_alpha_step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) {
    // Rounded to 12 digits so a 0.1 step yields 0.3 and not 0.30000000000000004.
    out.push_back(std::round((k0_alpha_min + i * k0_alpha_step) * 1e12) / 1e12);
  }
  return out;
}

void ExperimentConfig::validate() const {
  const auto& g = geometry;
  require(g.range_offset > 0.0, "geometry.R", "must be positive");
  require(g.height > 0.0, "geometry.H", "must be positive");
  require(g.aperture > 0.0, "geometry.a", "must be positive");
  require(g.num_positions >= 2, "geometry.N", "must be at least 2");
  require(g.num_frequencies >= 2, "geometry.M", "must be at least 2");
  require(g.center_frequency > 0.0, "geometry.f0_hz", "must be positive");
  require(g.bandwidth > 0.0, "geometry.B_hz", "must be positive");
  require(g.bandwidth < 2.0 * g.center_frequency, "geometry.B_hz",
          "band must stay above zero frequency (B < 2 f0)");
  require(g.wave_speed > 0.0, "geometry.c", "must be positive");

  require(!targets.empty(), "targets", "at least one target is required");
  for (std::size_t q = 0; q < targets.size(); ++q) {
    const auto& t = targets[q];
    const std::string path = fmt::format("targets[{}]", q);
    const int sources = int(t.sphere.has_value()) + int(t.flat_reflectivity.has_value()) +
                        int(t.reflectivity_csv.has_value());
    require(sources == 1, path,
            "exactly one of sphere, flat_reflectivity, reflectivity_csv is required");
    if (t.sphere) {
      const auto& s = *t.sphere;
      const std::string sp = path + ".sphere";
      require(s.k0_alpha.has_value() != s.radius.has_value(), sp,
              "exactly one of k0_alpha and radius is required");
      if (s.k0_alpha) {
        require(*s.k0_alpha > 0.0, sp + ".k0_alpha", "must be positive");
      }
      if (s.radius) {
        require(*s.radius > 0.0, sp + ".radius", "must be positive");
      }
      require(s.n_rel > 0.0, sp + ".n_rel", "must be positive");
      require(s.n_max >= 1 && s.n_max <= 400, sp + ".n_max", "must lie in [1, 400]");
    }
    for (std::size_t p = 0; p < q; ++p) {
      if (targets[p].x == t.x && targets[p].y == t.y && targets[p].si_units == t.si_units) {
        throw ConfigError(path, fmt::format("coincides with targets[{}]", p));
      }
    }
  }

  if (noise) {
    require(std::isfinite(noise->snr_db), "noise.snr_db", "must be finite");
  }

  const auto& im = imaging;
  require(im.size_k0 > 0.0, "imaging.size_k0", "must be positive");
  require(im.pixels >= 2, "imaging.pixels", "must be at least 2");
  require(im.zoom_size_k0 > 0.0, "imaging.zoom_size_k0", "must be positive");
  require(im.zoom_pixels >= 2, "imaging.zoom_pixels", "must be at least 2");
  require(im.epsilon > 0.0 && im.epsilon <= 1.0, "imaging.epsilon", "must lie in (0, 1]");
  require(im.peak_threshold > 0.0 && im.peak_threshold <= 1.0, "imaging.peak_threshold",
          "must lie in (0, 1]");

  const auto& rs = analysis.rangeshift;
  require(rs.n_rel > 0.0, "analysis.rangeshift.n_rel", "must be positive");
  require(rs.k0_alpha_min > 0.0, "analysis.rangeshift.k0_alpha_min", "must be positive");
  require(rs.k0_alpha_max >= rs.k0_alpha_min, "analysis.rangeshift.k0_alpha_max",
          "must not be below k0_alpha_min");
  require(rs.k0_alpha_step > 0.0, "analysis.rangeshift.k0_alpha_step", "must be positive");
  require(rs.window_hi > rs.window_lo, "analysis.rangeshift.window", "expected [lo, hi] with lo < hi");
  require(rs.samples >= 100, "analysis.rangeshift.samples", "must be at least 100");

  const auto& rc = analysis.rcs;
  if (rc.num_targets) {
    require(*rc.num_targets >= 1, "analysis.rcs.num_targets", "must be at least 1");
  }
  require(rc.zoom_size_k0 > 0.0, "analysis.rcs.zoom_size_k0", "must be positive");
  require(!output_dir.empty(), "output_dir", "must not be empty");
}

ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  require_object(j, "");
  reject_unknown(j, "", {"geometry", "targets", "noise", "imaging", "analysis", "output_dir"});

  ExperimentConfig c;
  c.base_dir = base_dir;
  if (j.contains("geometry")) {
    c.geometry = parse_geometry(j.at("geometry"));
  }
  if (!j.contains("targets") || !j.at("targets").is_array()) {
    throw ConfigError("targets", "expected an array of targets");
  }
  for (std::size_t q = 0; q < j.at("targets").size(); ++q) {
    c.targets.push_back(parse_target(j.at("targets")[q], fmt::format("targets[{}]", q)));
  }
  if (j.contains("noise") && !j.at("noise").is_null()) {
    c.noise = parse_noise(j.at("noise"));
  }
  if (j.contains("imaging")) {
    c.imaging = parse_imaging(j.at("imaging"));
  }
  if (j.contains("analysis")) {
    c.analysis = parse_analysis(j.at("analysis"));
  }
  if (j.contains("output_dir")) {
    require(j.at("output_dir").is_string(), "output_dir", "expected a string");
    c.output_dir = j.at("output_dir").get<std::string>();
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(path.string(), "cannot open config file");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  const auto& g = c.geometry;
  j["geometry"] = {{"R", g.range_offset},     {"H", g.height},
                   {"a", g.aperture},         {"N", g.num_positions},
                   {"M", g.num_frequencies},  {"f0_hz", g.center_frequency},
                   {"B_hz", g.bandwidth},     {"c", g.wave_speed}};
  j["targets"] = json::array();
  for (const auto& t : c.targets) {
    json jt;
    if (t.si_units) {
      jt["units"] = "m";
      jt["x"] = t.x;
      jt["y"] = t.y;
    } else {
      jt["x_k0"] = t.x;
      jt["y_k0"] = t.y;
    }
    if (t.sphere) {
      json s;
      if (t.sphere->k0_alpha) {
        s["k0_alpha"] = *t.sphere->k0_alpha;
      }
      if (t.sphere->radius) {
        s["radius"] = *t.sphere->radius;
      }
      s["n_rel"] = t.sphere->n_rel;
      s["n_max"] = t.sphere->n_max;
      jt["sphere"] = s;
    }
    if (t.flat_reflectivity) {
      jt["flat_reflectivity"] = {{"re", t.flat_reflectivity->real()},
                                 {"im", t.flat_reflectivity->imag()}};
    }
    if (t.reflectivity_csv) {
      jt["reflectivity_csv"] = *t.reflectivity_csv;
    }
    j["targets"].push_back(jt);
  }
  if (c.noise) {
    j["noise"] = {{"snr_db", c.noise->snr_db}, {"seed", c.noise->seed}};
  }
  const auto& im = c.imaging;
  j["imaging"] = {{"center_k0", {im.center_x_k0, im.center_y_k0}},
                  {"size_k0", im.size_k0},
                  {"pixels", im.pixels}};
  if (im.zoom_center_k0) {
    j["imaging"]["zoom_center_k0"] = {im.zoom_center_k0->first, im.zoom_center_k0->second};
  }
  j["imaging"]["zoom_size_k0"] = im.zoom_size_k0;
  j["imaging"]["zoom_pixels"] = im.zoom_pixels;
  j["imaging"]["epsilon"] = im.epsilon;
  j["imaging"]["peak_threshold"] = im.peak_threshold;

  const auto& rs = c.analysis.rangeshift;
  j["analysis"]["rangeshift"] = {{"n_rel", rs.n_rel},
                                 {"k0_alpha_min", rs.k0_alpha_min},
                                 {"k0_alpha_max", rs.k0_alpha_max},
                                 {"k0_alpha_step", rs.k0_alpha_step},
                                 {"window", {rs.window_lo, rs.window_hi}},
                                 {"samples", rs.samples},
                                 {"km_pipeline", rs.km_pipeline}};
  json rcs;
  if (c.analysis.rcs.num_targets) {
    rcs["num_targets"] = *c.analysis.rcs.num_targets;
  }
  rcs["smoothing"] = c.analysis.rcs.smoothing;
  rcs["zoom_size_k0"] = c.analysis.rcs.zoom_size_k0;
  j["analysis"]["rcs"] = rcs;
  j["output_dir"] = c.output_dir;
  return j.dump(2) + "\n";
}

TargetSet build_targets(const ExperimentConfig& config, const AcquisitionGeometry& geometry) {
  const double k0 = geometry.central_wavenumber();
  TargetSet set;
  for (std::size_t q = 0; q < config.targets.size(); ++q) {
    const auto& t = config.targets[q];
    const std::string path = fmt::format("targets[{}]", q);
    const Vec3 position = t.si_units ? Vec3{t.x, t.y, 0.0} : geometry.from_k0_units(t.x, t.y);
    if (t.sphere) {
      const double radius = t.sphere->radius ? *t.sphere->radius : *t.sphere->k0_alpha / k0;
      set.push_back(make_sphere_target(geometry, position,
                                       SphereSpec{radius, t.sphere->n_rel, t.sphere->n_max}));
    } else if (t.flat_reflectivity) {
      set.push_back({position, ReflectivitySpectrum::flat(geometry.omegas(), *t.flat_reflectivity),
                     std::nullopt});
    } else {
      const auto file = config.base_dir / *t.reflectivity_csv;
      ReflectivitySpectrum spectrum;
      try {
        spectrum = io::read_reflectivity_csv(file);
      } catch (const ConfigError& e) {
        throw ConfigError(path + ".reflectivity_csv", e.what());
      } catch (const DomainError& e) {
        throw ConfigError(path + ".reflectivity_csv", e.what());
      }
      set.push_back({position, std::move(spectrum), std::nullopt});
    }
  }
  try {
    validate_targets(geometry, set);
  } catch (const DomainError& e) {
    throw ConfigError("targets", e.what());
  }
  return set;
}

GridSpec overview_grid(const ExperimentConfig& config, const AcquisitionGeometry& geometry) {
  const double k0 = geometry.central_wavenumber();
  const auto& im = config.imaging;
  return GridSpec::square(im.center_x_k0 / k0, im.center_y_k0 / k0, im.size_k0 / k0, im.pixels);
}

}  // namespace dispersar
