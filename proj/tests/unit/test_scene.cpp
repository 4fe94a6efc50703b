#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dispersar/errors.hpp"
#include "dispersar/scene.hpp"

using namespace dispersar;

namespace {

Target flat_target(const AcquisitionGeometry& g, Vec3 p, complex rho) {
  return {p, ReflectivitySpectrum::flat(g.omegas(), rho), std::nullopt};
}

}  // namespace

TEST_CASE("GOTCHA geometry") {
  const auto g = make_gotcha_geometry();
  CHECK(g.num_frequencies() == 25);
  CHECK(g.num_positions() == 32);
  CHECK(std::round(g.slant_range() / 10.0) * 10.0 == 8120.0);
  CHECK(g.central_wavelength() == doctest::Approx(0.03125).epsilon(1e-14));
  CHECK(std::floor(g.central_wavelength() * 1e4) / 1e2 == doctest::Approx(3.12));
  CHECK(g.platform(0).x == -65.0);
  CHECK(g.platform(31).x == 65.0);
  CHECK(g.platform(7).y == 3550.0);
  CHECK(g.platform(7).z == 7300.0);
  CHECK(g.sin_theta() * g.sin_theta() + g.cos_theta() * g.cos_theta() == doctest::Approx(1.0).epsilon(1e-15));
  for (int m = 1; m < 25; ++m) {
    CHECK(g.wavenumber(m) > g.wavenumber(m - 1));
    CHECK(g.omega(m) == doctest::Approx(g.wave_speed() * g.wavenumber(m)).epsilon(1e-15));
  }
  const double dk = 2.0 * std::numbers::pi * 6.22e8 / 3e8;
  CHECK(g.wavenumber(0) == doctest::Approx(g.central_wavenumber() - dk / 2).epsilon(1e-14));
  CHECK(g.wavenumber(24) == doctest::Approx(g.central_wavenumber() + dk / 2).epsilon(1e-14));
  CHECK(g.wavenumber(12) == doctest::Approx(g.central_wavenumber()).epsilon(1e-15));
}

TEST_CASE("geometry validation and hashing") {
  auto p = gotcha_params();
  p.num_positions = 1;
  CHECK_THROWS_AS(AcquisitionGeometry{p}, DomainError);
  p = gotcha_params();
  p.bandwidth = -1.0;
  CHECK_THROWS_AS(AcquisitionGeometry{p}, DomainError);
  p = gotcha_params();
  p.bandwidth = 3.0 * p.center_frequency;
  CHECK_THROWS_AS(AcquisitionGeometry{p}, DomainError);

  const auto a = make_gotcha_geometry();
  const auto b = make_gotcha_geometry();
  CHECK(a.hash() == b.hash());
  CHECK(a.hash_hex().size() == 16);
  p = gotcha_params();
  p.aperture = 131.0;
  CHECK(AcquisitionGeometry{p}.hash() != a.hash());
}

TEST_CASE("k0 unit conversion") {
  const auto g = make_gotcha_geometry();
  const Vec3 y = g.from_k0_units(273.713, -346.167);
  CHECK(g.to_k0_units(y.x) == doctest::Approx(273.713).epsilon(1e-14));
  CHECK(g.to_k0_units(y.y) == doctest::Approx(-346.167).epsilon(1e-14));
  CHECK(y.z == 0.0);
}

TEST_CASE("single target data model") {
  const auto g = make_gotcha_geometry();
  const Vec3 y0 = g.from_k0_units(273.713, -346.167);
  const auto s = SphereSpec::from_size_parameter(1.4, 1.4, g.central_wavenumber());
  const TargetSet set{make_sphere_target(g, y0, s)};
  const auto d = synthesize_data(g, set);
  REQUIRE(d.rows() == 25);
  REQUIRE(d.cols() == 32);
  for (int m = 0; m < 25; ++m) {
    for (int n = 0; n < 32; ++n) {
      const double r = distance(g.platform(n), y0);
      const complex rho = set[0].reflectivity.values[m];
      const double spread = (4.0 * std::numbers::pi * r) * (4.0 * std::numbers::pi * r);
      CHECK(std::abs(d(m, n)) == doctest::Approx(std::abs(rho) / spread).epsilon(1e-12));
      const double phase = std::arg(d(m, n) * std::conj(rho));
      const double expect = std::remainder(2.0 * g.omega(m) * r / g.wave_speed(), 2.0 * std::numbers::pi);
      CHECK(std::abs(std::remainder(phase - expect, 2.0 * std::numbers::pi)) < 1e-9);
    }
  }
}

TEST_CASE("superposition and distance decay") {
  const auto g = make_gotcha_geometry();
  const auto t1 = flat_target(g, {1.0, 2.0, 0.0}, {1.0, 0.5});
  const auto t2 = flat_target(g, {-0.5, -1.0, 0.0}, {0.2, -0.3});
  const auto d1 = synthesize_data(g, {t1});
  const auto d2 = synthesize_data(g, {t2});
  const auto d12 = synthesize_data(g, {t1, t2});
  for (std::size_t i = 0; i < d12.values().size(); ++i) {
    CHECK(std::abs(d12.values()[i] - (d1.values()[i] + d2.values()[i])) < 1e-15 * std::abs(d12.values()[i]) + 1e-30);
  }

  // Two in-plane targets at distances L and 2L from platform 5.
  const Vec3 xn = g.platform(5);
  const double L = g.slant_range();
  const Vec3 near{xn.x, 0.0, 0.0};
  const Vec3 far{xn.x, xn.y - std::sqrt(4.0 * L * L - xn.z * xn.z), 0.0};
  CHECK(distance(xn, far) == doctest::Approx(2.0 * distance(xn, near)).epsilon(1e-14));
  const auto dn = synthesize_data(g, {flat_target(g, near, {0.7, 0.1})});
  const auto df = synthesize_data(g, {flat_target(g, far, {0.7, 0.1})});
  for (int m = 0; m < g.num_frequencies(); ++m) {
    CHECK(std::abs(df(m, 5)) / std::abs(dn(m, 5)) == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("target validation") {
  const auto g = make_gotcha_geometry();
  CHECK_THROWS_AS(validate_targets(g, {}), DomainError);
  CHECK_THROWS_AS(validate_targets(g, {flat_target(g, {0.0, 0.0, 1.0}, 1.0)}), DomainError);
  std::vector<double> w(g.omegas().begin(), g.omegas().end());
  w.pop_back();
  Target short_target{{0.0, 0.0, 0.0}, ReflectivitySpectrum::flat(w, 1.0), std::nullopt};
  CHECK_THROWS_AS(validate_targets(g, {short_target}), DomainError);
}

TEST_CASE("noise injection") {
  const auto g = make_gotcha_geometry();
  const auto clean = synthesize_data(g, {flat_target(g, {0.3, -0.2, 0.0}, {0.01, 0.02})});
  for (double snr : {3.73, 12.84, 22.84, 40.0, -5.0}) {
    const auto noisy = add_noise(clean, snr, 42);
    CHECK(std::abs(measured_snr_db(clean, noisy) - snr) < 1e-12);
    CHECK(noisy.snr_db == snr);
    CHECK(noisy.seed == std::optional<std::uint64_t>(42));
  }
  const auto a = add_noise(clean, 3.73, 7);
  const auto b = add_noise(clean, 3.73, 7);
  const auto c = add_noise(clean, 3.73, 8);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
  CHECK_THROWS_AS(add_noise(DataMatrix(25, 32), 3.0, 1), DomainError);
}

TEST_CASE("data matrix basics") {
  DataMatrix d(2, 3);
  d(1, 2) = {3.0, 4.0};
  CHECK(d.frobenius_norm_squared() == 25.0);
  CHECK(d.values()[5] == complex(3.0, 4.0));
  CHECK_THROWS_AS(DataMatrix(-1, 2), DomainError);
}
