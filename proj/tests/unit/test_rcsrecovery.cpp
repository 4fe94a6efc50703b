#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dispersar/errors.hpp"
#include "dispersar/rcsrecovery.hpp"

using namespace dispersar;

namespace {

Target sphere_at(const AcquisitionGeometry& g, double x_k0, double y_k0, double ka, double n_rel) {
  const auto s = SphereSpec::from_size_parameter(ka, n_rel, g.central_wavenumber());
  return make_sphere_target(g, g.from_k0_units(x_k0, y_k0), s);
}

double max_rel_error(std::span<const complex> got, std::span<const complex> want) {
  double e = 0.0;
  for (std::size_t m = 0; m < want.size(); ++m) {
    e = std::max(e, std::abs(got[m] - want[m]) / std::abs(want[m]));
  }
  return e;
}

TargetSet three_targets(const AcquisitionGeometry& g, double scale = 1.0) {
  return {sphere_at(g, 140.882 * scale, 40.252 * scale, 0.8, 1.8),
          sphere_at(g, -40.252 * scale, -140.882 * scale, 1.2, 1.4),
          sphere_at(g, -161.008 * scale, 161.008 * scale, 1.8, 1.4)};
}

}  // namespace

TEST_CASE("phi recovers the reflectivity at the true location") {
  const auto g = make_gotcha_geometry();
  const auto t = sphere_at(g, 273.713, -346.167, 1.4, 1.4);
  const auto d = synthesize_data(g, {t});
  const auto p = phi(d, g, t.position);
  CHECK(max_rel_error(p, t.reflectivity.values) < 1e-12);

  const auto flat = Target{g.from_k0_units(-80.0, 15.0),
                           ReflectivitySpectrum::flat(g.omegas(), complex(0.2, -0.1)), std::nullopt};
  const auto pf = phi(synthesize_data(g, {flat}), g, flat.position);
  CHECK(max_rel_error(pf, flat.reflectivity.values) < 1e-12);
}

TEST_CASE("phi of zero data is zero") {
  const auto g = make_gotcha_geometry();
  const DataMatrix zero(g.num_frequencies(), g.num_positions());
  for (const auto& v : phi(zero, g, g.from_k0_units(1.0, 2.0))) {
    CHECK(v == complex{});
  }
  CHECK_THROWS_AS(phi(DataMatrix(3, 3), g, Vec3{}), DomainError);
}

TEST_CASE("RCS from phi is insensitive to a range offset of a few wavelengths") {
  const auto g = make_gotcha_geometry();
  const auto t = sphere_at(g, 0.0, 0.0, 1.0, 1.4);
  const auto d = synthesize_data(g, {t});
  const auto truth = rcs(t.reflectivity);
  const double lambda = g.central_wavelength();
  for (double shift : {0.1, 0.5, 1.0, 2.5, 5.0, -5.0}) {
    const auto s = rcs_single(g.omegas(), phi(d, g, {0.0, shift * lambda, 0.0}));
    double e = 0.0;
    for (std::size_t m = 0; m < truth.size(); ++m) {
      e = std::max(e, std::abs(s.sigma[m] - truth[m]) / truth[m]);
    }
    CAPTURE(shift);
    CHECK(e <= 1e-2);
  }
}

TEST_CASE("single-location system reduces to phi") {
  const auto g = make_gotcha_geometry();
  const auto t = sphere_at(g, 10.0, -20.0, 0.9, 1.4);
  const auto d = synthesize_data(g, {t});
  const Vec3 loc = t.position;
  const auto sys = multi_system(d, g, std::span<const Vec3>(&loc, 1));
  const auto sol = solve_multi(sys);
  const auto p = phi(d, g, loc);
  for (int m = 0; m < g.num_frequencies(); ++m) {
    CHECK(sys.matrices[m].rows() == 1);
    CHECK(sys.matrices[m](0, 0) == complex(1.0, 0.0));
    CHECK(sol.rho[0][m] == p[m]);
    CHECK(sol.condition[m] == doctest::Approx(1.0));
  }
}

TEST_CASE("multi-target matrix structure") {
  const auto g = make_gotcha_geometry();
  const auto ts = three_targets(g);
  const auto d = synthesize_data(g, ts);
  std::vector<Vec3> locs;
  for (const auto& t : ts) {
    locs.push_back(t.position);
  }
  const auto sys = multi_system(d, g, locs);
  for (const auto& A : sys.matrices) {
    for (int p = 0; p < 3; ++p) {
      CHECK(A(p, p) == complex(1.0, 0.0));
      for (int q = 0; q < 3; ++q) {
        if (p != q) {
          CHECK(std::abs(A(p, q)) < 1.0);
        }
      }
    }
  }
  const auto sol = solve_multi(sys);
  CHECK_FALSE(sol.ill_conditioned);
  for (double c : sol.condition) {
    CHECK(c >= 1.0);
    CHECK(c < 100.0);
  }
  for (int q = 0; q < 3; ++q) {
    CHECK(max_rel_error(sol.rho[q], ts[q].reflectivity.values) < 1e-8);
  }
}

TEST_CASE("two well-separated targets are recovered exactly") {
  const auto g = make_gotcha_geometry();
  const TargetSet ts{sphere_at(g, -150.0, 30.0, 1.0, 1.4), sphere_at(g, 170.0, -60.0, 2.0, 1.4)};
  const auto d = synthesize_data(g, ts);
  const std::vector<Vec3> locs{ts[0].position, ts[1].position};
  const auto sol = solve_multi(multi_system(d, g, locs));
  const auto spectra = rcs_multi(sol, g.omegas());
  for (int q = 0; q < 2; ++q) {
    const auto truth = rcs(ts[q].reflectivity);
    for (std::size_t m = 0; m < truth.size(); ++m) {
      CHECK(std::abs(spectra[q].sigma[m] - truth[m]) <= 1e-2 * truth[m]);
    }
  }
}

TEST_CASE("solution is equivariant under a global phase") {
  const auto g = make_gotcha_geometry();
  const auto ts = three_targets(g);
  auto d = synthesize_data(g, ts);
  std::vector<Vec3> locs;
  for (const auto& t : ts) {
    locs.push_back({t.position.x + 1e-3, t.position.y - 2e-3, 0.0});
  }
  const auto a = solve_multi(multi_system(d, g, locs));
  const complex w = std::polar(1.0, 1.1);
  for (auto& v : d.values()) {
    v *= w;
  }
  const auto b = solve_multi(multi_system(d, g, locs));
  for (int q = 0; q < 3; ++q) {
    for (int m = 0; m < g.num_frequencies(); ++m) {
      CHECK(std::abs(b.rho[q][m] - w * a.rho[q][m]) <= 1e-12 * std::abs(a.rho[q][m]));
    }
  }
}

TEST_CASE("repeated or empty locations are rejected") {
  const auto g = make_gotcha_geometry();
  const auto d = synthesize_data(g, {sphere_at(g, 0.0, 0.0, 1.0, 1.4)});
  const std::vector<Vec3> same{g.from_k0_units(1.0, 1.0), g.from_k0_units(1.0, 1.0)};
  CHECK_THROWS_AS(multi_system(d, g, same), DomainError);
  CHECK_THROWS_AS(multi_system(d, g, std::span<const Vec3>{}), DomainError);
}

TEST_CASE("quadratic smoothing") {
  RcsSpectrum s;
  for (int i = 0; i < 25; ++i) {
    const double w = 6.0e10 + 1.6e8 * i;
    s.omega.push_back(w);
    const double t = w - 6.2e10;
    s.sigma.push_back(3.0e-4 + 2.0e-15 * t - 1.5e-24 * t * t);
  }
  const auto fit = fit_quadratic(s, 6.2e10);
  CHECK(fit.c0 == doctest::Approx(3.0e-4).epsilon(1e-9));
  CHECK(fit.c1 == doctest::Approx(2.0e-15).epsilon(1e-7));
  CHECK(fit.c2 == doctest::Approx(-1.5e-24).epsilon(1e-7));
  const auto sm = quadratic_smooth(s, 6.2e10);
  for (std::size_t i = 0; i < s.sigma.size(); ++i) {
    CHECK(sm.sigma[i] == doctest::Approx(s.sigma[i]).epsilon(1e-9));
  }

  RcsSpectrum c = s;
  std::fill(c.sigma.begin(), c.sigma.end(), 0.25);
  for (double v : quadratic_smooth(c, 6.2e10).sigma) {
    CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
  }

  RcsSpectrum neg = s;
  for (std::size_t i = 0; i < neg.sigma.size(); ++i) {
    neg.sigma[i] = -1e-3 + 1e-4 * static_cast<double>(i);
  }
  for (double v : quadratic_smooth(neg, 6.2e10).sigma) {
    CHECK(v >= 0.0);
  }

  RcsSpectrum tiny;
  tiny.omega = {1.0, 2.0};
  tiny.sigma = {1.0, 2.0};
  CHECK_THROWS_AS(fit_quadratic(tiny, 1.5), DomainError);
}

TEST_CASE("band average and normalization") {
  RcsSpectrum s;
  s.omega = {1.0, 2.0, 3.0};
  s.sigma = {1.0, 2.0, 6.0};
  CHECK(s.normalized().empty());
  CHECK(s.band_average_normalized() == doctest::Approx(3.0));
  s.geometric_cross_section = 2.0;
  CHECK(s.normalized() == std::vector<double>{0.5, 1.0, 3.0});
  CHECK(s.band_average_normalized() == doctest::Approx(1.5));
}

TEST_CASE("full procedure on a single noiseless target") {
  const auto g = make_gotcha_geometry();
  const auto t = sphere_at(g, 273.713, -346.167, 1.0, 1.4);
  const auto d = synthesize_data(g, {t});
  const double k0 = g.central_wavenumber();
  const auto overview = GridSpec::square(t.position.x, t.position.y, 500.0 / k0, 101);
  RecoveryOptions opt;
  opt.num_targets = 1;
  const auto report = recover_procedure(d, g, overview, opt);
  REQUIRE(report.targets.size() == 1);
  const auto& r = report.targets[0];
  const auto direct = phi(d, g, r.location);
  for (int m = 0; m < g.num_frequencies(); ++m) {
    CHECK(std::abs(r.rho_tilde[m] - direct[m]) <= 1e-12 * std::abs(direct[m]));
  }
  CHECK(std::abs(r.location.x - t.position.x) * k0 < 1.0);
  CHECK(r.location.y < t.position.y);  // pulled toward the radar side by dispersion
  CHECK(r.smoothed.has_value());
  CHECK(r.fit.has_value());

  const auto truth = rcs(t.reflectivity);
  for (std::size_t m = 0; m < truth.size(); ++m) {
    CHECK(std::abs(r.rcs.sigma[m] - truth[m]) <= 0.05 * truth[m]);
  }
}

TEST_CASE("procedure errors") {
  const auto g = make_gotcha_geometry();
  const auto d = synthesize_data(g, {sphere_at(g, 0.0, 0.0, 1.0, 1.4)});
  const auto overview = GridSpec::square(0.0, 0.0, 200.0 / g.central_wavenumber(), 41);
  RecoveryOptions opt;
  opt.num_targets = 3;
  CHECK_THROWS_AS(recover_procedure(d, g, overview, opt), NoTargetsFoundError);
  opt.num_targets.reset();
  opt.peak_threshold = 1.5;
  CHECK_THROWS_AS(recover_procedure(d, g, overview, opt), NoTargetsFoundError);
}

TEST_CASE("multi-target recovery improves with separation") {
  const auto g = make_gotcha_geometry();
  const double k0 = g.central_wavenumber();
  const double lambda = g.central_wavelength();
  for (double scale : {2.0, 4.0}) {
    const auto ts = three_targets(g, scale);
    const auto d = synthesize_data(g, ts);
    const auto overview = GridSpec::square(0.0, 0.0, 500.0 * scale / k0, 161);
    RecoveryOptions opt;
    opt.num_targets = 3;
    const auto report = recover_procedure(d, g, overview, opt);
    REQUIRE(report.targets.size() == 3);
    std::vector<bool> used(3, false);
    for (const auto& r : report.targets) {
      int best = -1;
      double best_d = 1e300;
      for (int q = 0; q < 3; ++q) {
        const double dist = distance(r.location, ts[q].position);
        if (!used[q] && dist < best_d) {
          best_d = dist;
          best = q;
        }
      }
      REQUIRE(best >= 0);
      used[best] = true;
      CAPTURE(scale);
      CHECK(best_d <= 3.0 * lambda);
      const double want = [&] {
        RcsSpectrum s = rcs_single(g.omegas(), ts[best].reflectivity.values);
        return s.band_average_normalized();
      }();
      CHECK(r.rcs.band_average_normalized() == doctest::Approx(want).epsilon(0.1));
    }
  }
}
