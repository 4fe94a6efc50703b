#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dispersar/config.hpp"
#include "dispersar/errors.hpp"
#include "dispersar/io.hpp"

using namespace dispersar;
namespace fs = std::filesystem;

namespace {

const char* kGeometry =
    R"("geometry": {"R": 3550, "H": 7300, "a": 130, "N": 32, "M": 25, "f0_hz": 9.6e9, "B_hz": 6.22e8, "c": 3e8})";

std::string config_with(const std::string& rest) {
  return std::string("{") + kGeometry + "," + rest + "}";
}

std::string error_path(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

std::string fmt_si(double x, double y) {
  std::ostringstream os;
  os.precision(17);
  os << R"("targets": [{"units": "m", "x": )" << x << R"(, "y": )" << y
     << R"(, "flat_reflectivity": {"re": 1, "im": 0}}])";
  return os.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "dispersar_unit";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("config round trip is idempotent") {
  const std::string text = config_with(R"(
    "targets": [{"x_k0": 1.5, "y_k0": -2.0, "sphere": {"k0_alpha": 1.4, "n_rel": 1.4}},
                {"units": "m", "x": 3.0, "y": 4.0, "flat_reflectivity": {"re": 0.1, "im": -0.2}}],
    "noise": {"snr_db": 3.73, "seed": 7},
    "imaging": {"center_k0": [1, 2], "zoom_center_k0": [3, 4], "epsilon": 0.001},
    "analysis": {"rangeshift": {"window": [-3, 3], "km_pipeline": true}, "rcs": {"num_targets": 2}},
    "output_dir": "somewhere")");
  const auto c1 = parse_config(text);
  const auto s1 = serialize_config(c1);
  const auto c2 = parse_config(s1);
  const auto s2 = serialize_config(c2);
  CHECK(s1 == s2);
  CHECK(c2.targets.size() == 2);
  CHECK(c2.targets[1].si_units);
  CHECK(c2.noise->seed == 7);
  CHECK(c2.imaging.zoom_center_k0->second == 4.0);
  CHECK(c2.analysis.rangeshift.window_lo == -3.0);
  CHECK(*c2.analysis.rcs.num_targets == 2);
  CHECK(c2.output_dir == "somewhere");
}

TEST_CASE("shipped configs parse and round trip") {
  const fs::path dir = fs::path(DISPERSAR_SOURCE_DIR) / "configs";
  int count = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") {
      continue;
    }
    CAPTURE(entry.path().string());
    const auto c = load_config(entry.path());
    CHECK(serialize_config(parse_config(serialize_config(c))) == serialize_config(c));
    ++count;
  }
  CHECK(count >= 6);
}

TEST_CASE("config errors carry field paths") {
  CHECK(error_path(config_with(R"("targets": [{"x_k0": 0, "y_k0": 0, "sphere": {"k0_alpha": 1, "n_rel": 1.4}}],
                                  "noise": {"snr_db": 3})")) == "noise.seed");
  CHECK(error_path(config_with(R"("targets": [{"x_k0": 0, "y_k0": 0, "sphere": {"k0_alpha": 1, "n_rel": 1.4}}],
                                  "bogus": 1)")) == "bogus");
  const auto p = error_path(config_with(
      R"("targets": [{"x_k0": 0, "y_k0": 0, "sphere": {"k0_alpha": 1, "n_rel": 1.4, "colour": "red"}}])"));
  CHECK(p.find("targets") != std::string::npos);
  CHECK(p.find("colour") != std::string::npos);
  CHECK(error_path(config_with(R"("targets": [{"x_k0": 0, "y_k0": 0}])")).find("targets") !=
        std::string::npos);
  CHECK(error_path(config_with(R"("targets": [{"x_k0": 0, "y_k0": 0, "sphere": {"k0_alpha": -1, "n_rel": 1.4}}])"))
            .find("k0_alpha") != std::string::npos);
  CHECK(error_path(config_with(R"("targets": [{"x_k0": 0, "y_k0": 0, "sphere": {"k0_alpha": 1, "n_rel": 1.4, "n_max": 0}}])"))
            .find("n_max") != std::string::npos);
  CHECK(error_path(config_with(R"("targets": [], "imaging": {"epsilon": 2})")) != "<no error>");
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(load_config(scratch("does_not_exist.json")), ConfigError);
}

TEST_CASE("targets in SI and k0 units land at the same place") {
  const auto c = parse_config(config_with(R"(
    "targets": [{"x_k0": 20, "y_k0": -10, "flat_reflectivity": {"re": 1, "im": 0}}])"));
  const AcquisitionGeometry g(c.geometry);
  const double k0 = g.central_wavenumber();
  const auto ts = build_targets(c, g);
  const auto c_si = parse_config(config_with(fmt_si(20.0 / k0, -10.0 / k0)));
  const auto ts_si = build_targets(c_si, g);
  CHECK(ts[0].position.x == doctest::Approx(ts_si[0].position.x).epsilon(1e-14));
  CHECK(ts[0].position.y == doctest::Approx(ts_si[0].position.y).epsilon(1e-14));
}

TEST_CASE("sphere targets from radius or size parameter") {
  const auto c = parse_config(config_with(R"(
    "targets": [{"x_k0": 0, "y_k0": 0, "sphere": {"k0_alpha": 1.0, "n_rel": 1.4}},
                {"x_k0": 50, "y_k0": 0, "sphere": {"radius": 0.005, "n_rel": 1.4}}])"));
  const AcquisitionGeometry g(c.geometry);
  const auto ts = build_targets(c, g);
  REQUIRE(ts.size() == 2);
  REQUIRE(ts[0].sphere.has_value());
  CHECK(ts[0].sphere->radius * g.central_wavenumber() == doctest::Approx(1.0));
  CHECK(ts[1].sphere->radius == 0.005);
  CHECK(ts[0].reflectivity.size() == 25);
  CHECK(overview_grid(c, g).nx == 201);
}

TEST_CASE("reflectivity CSV round trip and use from a config") {
  const auto g = make_gotcha_geometry();
  const auto s = reflectivity_spectrum(SphereSpec::from_size_parameter(1.2, 1.4, g.central_wavenumber()),
                                       g.omegas(), g.wave_speed());
  const auto path = scratch("rho.csv");
  io::write_reflectivity_csv(path, s);
  const auto back = io::read_reflectivity_csv(path);
  REQUIRE(back.size() == s.size());
  for (std::size_t m = 0; m < s.size(); ++m) {
    CHECK(back.omega[m] == s.omega[m]);
    CHECK(back.values[m] == s.values[m]);
  }

  const auto c = parse_config(
      config_with(R"("targets": [{"x_k0": 0, "y_k0": 0, "reflectivity_csv": "rho.csv"}])"),
      path.parent_path());
  const auto ts = build_targets(c, g);
  CHECK(ts[0].reflectivity.values == s.values);

  std::istringstream bad("omega,re,im\n1,2,3\n");
  CHECK_THROWS_AS(io::read_reflectivity_csv(bad), ConfigError);
}

TEST_CASE("data CSV round trip, hash and dimension checks") {
  const auto g = make_gotcha_geometry();
  const auto s = SphereSpec::from_size_parameter(1.0, 1.4, g.central_wavenumber());
  const auto d = add_noise(synthesize_data(g, {make_sphere_target(g, g.from_k0_units(5, 5), s)}),
                           10.0, 99);
  std::stringstream buf;
  io::write_data_csv(buf, d, g);
  const std::string text = buf.str();
  CHECK(text.rfind("# geometry_hash=" + g.hash_hex(), 0) == 0);

  std::istringstream in(text);
  const auto back = io::read_data_csv(in, &g);
  REQUIRE(back.rows() == d.rows());
  REQUIRE(back.cols() == d.cols());
  for (std::size_t i = 0; i < d.values().size(); ++i) {
    CHECK(back.values()[i] == d.values()[i]);
  }
  CHECK(*back.seed == 99);
  CHECK(*back.snr_db == doctest::Approx(10.0));

  auto other_params = gotcha_params();
  other_params.aperture = 120.0;
  const AcquisitionGeometry other(other_params);
  std::istringstream in2(text);
  CHECK_THROWS_AS(io::read_data_csv(in2, &other), ConfigError);

  auto small_params = gotcha_params();
  small_params.num_positions = 8;
  const AcquisitionGeometry small(small_params);
  std::istringstream in3(text);
  CHECK_THROWS_AS(io::read_data_csv(in3, &small), ConfigError);

  std::istringstream truncated("m,n,re,im\n1,1,0,0\n1,2,0,0\n2,1,0,0\n");
  CHECK_THROWS_AS(io::read_data_csv(truncated), ConfigError);
  std::istringstream garbage("m,n,re,im\n1,1,abc,0\n");
  CHECK_THROWS_AS(io::read_data_csv(garbage), ConfigError);
}

TEST_CASE("image outputs") {
  RealImage img(GridSpec::square(0.0, 0.0, 2.0, 3));
  for (std::size_t i = 0; i < img.values.size(); ++i) {
    img.values[i] = static_cast<double>(i) / 8.0;
  }
  std::ostringstream csv;
  io::write_image_csv(csv, img, 2.0);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "x_k0,y_k0,value");
  std::getline(lines, line);
  CHECK(line == "-2,-2,0");
  int count = 0;
  while (std::getline(lines, line)) {
    ++count;
  }
  CHECK(count == 8);

  const auto png = scratch("img/out.png");
  fs::remove_all(png.parent_path());
  io::write_image_png(png, img);
  std::ifstream f(png, std::ios::binary);
  char sig[8];
  f.read(sig, 8);
  CHECK(std::string(sig + 1, 3) == "PNG");
}

TEST_CASE("rcs CSV columns") {
  RcsSpectrum s;
  s.omega = {1.0, 2.0, 3.0};
  s.sigma = {1.0, 2.0, 4.0};
  std::ostringstream plain;
  io::write_rcs_csv(plain, s, nullptr);
  CHECK(plain.str().rfind("omega_rad_s,sigma_m2,sigma_normalized,sigma_smoothed\n1,1,nan,nan\n", 0) == 0);

  s.geometric_cross_section = 2.0;
  const io::RcsTruth truth{{1.0, 1.0, 4.0}};
  std::ostringstream full;
  io::write_rcs_csv(full, s, &s, &truth);
  std::istringstream lines(full.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "omega_rad_s,sigma_m2,sigma_normalized,sigma_smoothed,sigma_true_m2,rel_error");
  std::getline(lines, line);
  std::getline(lines, line);
  CHECK(line == "2,2,1,2,1,1");
}
