#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dispersar/config.hpp"
#include "dispersar/errors.hpp"
#include "dispersar/imaging.hpp"
#include "dispersar/rangeshift.hpp"
#include "dispersar/rcsrecovery.hpp"
#include "dispersar/scattering.hpp"
#include "dispersar/scene.hpp"
#include "dispersar/specfun.hpp"

namespace py = pybind11;
using namespace dispersar;

namespace {

template <typename T>
py::array_t<T> image_array(const ImageGrid<T>& image) {
  py::array_t<T> out({image.grid.ny, image.grid.nx});
  auto view = out.template mutable_unchecked<2>();
  for (int r = 0; r < image.grid.ny; ++r) {
    for (int c = 0; c < image.grid.nx; ++c) {
      view(r, c) = image.at(r, c);
    }
  }
  return out;
}

RealImage real_image(const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                     const GridSpec& grid) {
  if (a.ndim() != 2 || a.shape(0) != grid.ny || a.shape(1) != grid.nx) {
    throw py::value_error("image shape does not match the grid (ny, nx)");
  }
  RealImage img(grid);
  std::copy(a.data(), a.data() + grid.size(), img.values.begin());
  return img;
}

DataMatrix data_matrix(const py::array_t<complex, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) {
    throw py::value_error("data must be a 2-D complex array of shape (M, N)");
  }
  DataMatrix d(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), d.values().begin());
  return d;
}

py::array_t<complex> data_array(const DataMatrix& d) {
  py::array_t<complex> out({d.rows(), d.cols()});
  std::copy(d.values().begin(), d.values().end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dispersive-target SAR simulation, Kirchhoff migration imaging and RCS recovery.";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<SingularSystemError>(m, "SingularSystemError", numerical.ptr());
  py::register_exception<ZeroImageError>(m, "ZeroImageError", numerical.ptr());
  py::register_exception<DegenerateSpectrumError>(m, "DegenerateSpectrumError", numerical.ptr());
  py::register_exception<NoTargetsFoundError>(m, "NoTargetsFoundError", numerical.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  // special functions
  m.def("spherical_bessel_j", &specfun::spherical_bessel_j, py::arg("n"), py::arg("x"));
  m.def("spherical_bessel_y", &specfun::spherical_bessel_y, py::arg("n"), py::arg("x"));
  m.def("spherical_hankel_h1", &specfun::spherical_hankel_h1, py::arg("n"), py::arg("x"));
  m.def("legendre_p", &specfun::legendre_p, py::arg("n"), py::arg("t"));

  // scattering
  py::class_<SphereSpec>(m, "SphereSpec")
      .def(py::init([](double radius, double n_rel, int n_max) {
             SphereSpec s{radius, n_rel, n_max};
             s.validate();
             return s;
           }),
           py::arg("radius"), py::arg("n_rel"), py::arg("n_max") = kDefaultTruncationOrder)
      .def_static("from_size_parameter", &SphereSpec::from_size_parameter, py::arg("k0_alpha"),
                  py::arg("n_rel"), py::arg("k0"), py::arg("n_max") = kDefaultTruncationOrder)
      .def_readwrite("radius", &SphereSpec::radius)
      .def_readwrite("n_rel", &SphereSpec::n_rel)
      .def_readwrite("n_max", &SphereSpec::n_max)
      .def("__repr__", [](const SphereSpec& s) {
        return "SphereSpec(radius=" + std::to_string(s.radius) + ", n_rel=" + std::to_string(s.n_rel) +
               ", n_max=" + std::to_string(s.n_max) + ")";
      });

  m.def(
      "expansion_coefficients",
      [](const SphereSpec& s, double k0) {
        const auto c = expansion_coefficients(s, k0);
        return py::make_tuple(c.a, c.b);
      },
      py::arg("sphere"), py::arg("k0"), "Scattered and interior coefficients (a_n, b_n).");
  m.def(
      "boundary_residual",
      [](const SphereSpec& s, double k0) { return boundary_residual(s, k0, expansion_coefficients(s, k0)); },
      py::arg("sphere"), py::arg("k0"));
  m.def(
      "backscatter_amplitude",
      [](const SphereSpec& s, double k0) { return backscatter_amplitude(expansion_coefficients(s, k0).a, k0); },
      py::arg("sphere"), py::arg("k0"));
  m.def(
      "reflectivity",
      [](const SphereSpec& s, const std::vector<double>& omega, double c) {
        return reflectivity_spectrum(s, omega, c).values;
      },
      py::arg("sphere"), py::arg("omega"), py::arg("c") = 3.0e8);
  m.def("rcs", py::overload_cast<complex>(&rcs), py::arg("amplitude"));
  m.def("normalized_rcs", &normalized_rcs, py::arg("amplitude"), py::arg("radius"));

  // scene
  py::class_<GeometryParams>(m, "GeometryParams")
      .def(py::init<>())
      .def_readwrite("R", &GeometryParams::range_offset)
      .def_readwrite("H", &GeometryParams::height)
      .def_readwrite("a", &GeometryParams::aperture)
      .def_readwrite("N", &GeometryParams::num_positions)
      .def_readwrite("M", &GeometryParams::num_frequencies)
      .def_readwrite("f0_hz", &GeometryParams::center_frequency)
      .def_readwrite("B_hz", &GeometryParams::bandwidth)
      .def_readwrite("c", &GeometryParams::wave_speed);

  py::class_<AcquisitionGeometry>(m, "Geometry")
      .def(py::init<const GeometryParams&>(), py::arg("params") = GeometryParams{})
      .def_property_readonly("k0", &AcquisitionGeometry::central_wavenumber)
      .def_property_readonly("omega0", &AcquisitionGeometry::central_omega)
      .def_property_readonly("wavelength", &AcquisitionGeometry::central_wavelength)
      .def_property_readonly("slant_range", &AcquisitionGeometry::slant_range)
      .def_property_readonly("sin_theta", &AcquisitionGeometry::sin_theta)
      .def_property_readonly("omegas", [](const AcquisitionGeometry& g) {
        return std::vector<double>(g.omegas().begin(), g.omegas().end());
      })
      .def_property_readonly("wavenumbers", [](const AcquisitionGeometry& g) {
        return std::vector<double>(g.wavenumbers().begin(), g.wavenumbers().end());
      })
      .def_property_readonly("platforms", [](const AcquisitionGeometry& g) {
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& p : g.platforms()) {
          out.emplace_back(p.x, p.y, p.z);
        }
        return out;
      })
      .def("hash_hex", &AcquisitionGeometry::hash_hex);

  m.def(
      "synthesize",
      [](const AcquisitionGeometry& g, const std::vector<std::pair<double, double>>& positions,
         const std::vector<std::vector<complex>>& reflectivities) {
        if (positions.size() != reflectivities.size()) {
          throw py::value_error("positions and reflectivities differ in length");
        }
        TargetSet targets;
        for (std::size_t q = 0; q < positions.size(); ++q) {
          ReflectivitySpectrum s{std::vector<double>(g.omegas().begin(), g.omegas().end()),
                                 reflectivities[q]};
          targets.push_back({{positions[q].first, positions[q].second, 0.0}, s, std::nullopt});
        }
        return data_array(synthesize_data(g, targets));
      },
      py::arg("geometry"), py::arg("positions"), py::arg("reflectivities"),
      "Data matrix (M, N) for point targets at (x, y) meters with given reflectivity spectra.");
  m.def(
      "add_noise",
      [](const py::array_t<complex, py::array::c_style | py::array::forcecast>& d, double snr_db,
         std::uint64_t seed) { return data_array(add_noise(data_matrix(d), snr_db, seed)); },
      py::arg("data"), py::arg("snr_db"), py::arg("seed"));

  // imaging
  py::class_<GridSpec>(m, "GridSpec")
      .def_static("square", &GridSpec::square, py::arg("center_x"), py::arg("center_y"),
                  py::arg("side"), py::arg("pixels"))
      .def_readonly("nx", &GridSpec::nx)
      .def_readonly("ny", &GridSpec::ny)
      .def("x", &GridSpec::x)
      .def("y", &GridSpec::y);

  py::class_<Peak>(m, "Peak")
      .def_readonly("row", &Peak::row)
      .def_readonly("col", &Peak::col)
      .def_readonly("x", &Peak::x)
      .def_readonly("y", &Peak::y)
      .def_readonly("value", &Peak::value);

  m.def(
      "km_image",
      [](const py::array_t<complex, py::array::c_style | py::array::forcecast>& d,
         const AcquisitionGeometry& g, const GridSpec& grid, int threads) {
        const auto data = data_matrix(d);
        ComplexImage img;
        {
          py::gil_scoped_release release;
          img = km_image(data, g, grid, threads);
        }
        return image_array(img);
      },
      py::arg("data"), py::arg("geometry"), py::arg("grid"), py::arg("threads") = 1);
  m.def(
      "normalized_km_image",
      [](const py::array_t<complex, py::array::c_style | py::array::forcecast>& d,
         const AcquisitionGeometry& g, const GridSpec& grid, int threads) {
        return image_array(normalize_image(km_image(data_matrix(d), g, grid, threads)));
      },
      py::arg("data"), py::arg("geometry"), py::arg("grid"), py::arg("threads") = 1);
  m.def(
      "tunable_km",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a, double eps) {
        py::array_t<double> out(a.request().shape);
        for (py::ssize_t i = 0; i < a.size(); ++i) {
          out.mutable_data()[i] = tunable_km(a.data()[i], eps);
        }
        return out;
      },
      py::arg("normalized"), py::arg("epsilon"));
  m.def(
      "locate_peak",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a, const GridSpec& grid) {
        return locate_peak(real_image(a, grid));
      },
      py::arg("image"), py::arg("grid"));
  m.def(
      "find_peaks",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a, const GridSpec& grid,
         double threshold) { return find_peaks(real_image(a, grid), threshold); },
      py::arg("image"), py::arg("grid"), py::arg("threshold") = 0.5);

  // range shift
  m.def("psi", &psi, py::arg("r"), py::arg("M"), py::arg("Y"));
  m.def("a_direct", [](const std::vector<complex>& rho, double Y) { return a_direct(rho, Y); },
        py::arg("rho"), py::arg("Y"));
  m.def("a_sbp", [](const std::vector<complex>& rho, double Y) { return a_sbp(rho, Y); },
        py::arg("rho"), py::arg("Y"));
  m.def("abs_a_squared_expansion",
        [](const std::vector<complex>& rho, double Y) { return abs_a_squared_expansion(rho, Y); },
        py::arg("rho"), py::arg("Y"));
  m.def(
      "range_shift_estimate",
      [](const AcquisitionGeometry& g, std::vector<complex> rho) {
        const auto e = range_shift_estimate(ShiftProblem::from(g, std::move(rho)));
        return py::dict(py::arg("alpha1") = e.alpha1, py::arg("alpha2") = e.alpha2,
                        py::arg("Y_hat") = e.Y_hat, py::arg("y_hat") = e.y_hat);
      },
      py::arg("geometry"), py::arg("rho"));
  m.def(
      "numeric_argmax",
      [](const AcquisitionGeometry& g, std::vector<complex> rho, double lo, double hi, int samples) {
        const auto r = numeric_argmax(ShiftProblem::from(g, std::move(rho)), lo, hi, samples);
        return py::make_tuple(r.Y, r.value, r.at_boundary);
      },
      py::arg("geometry"), py::arg("rho"), py::arg("lo") = -2.0, py::arg("hi") = 2.0,
      py::arg("samples") = 2001);

  // rcs recovery
  m.def(
      "phi",
      [](const py::array_t<complex, py::array::c_style | py::array::forcecast>& d,
         const AcquisitionGeometry& g, double x, double y) { return phi(data_matrix(d), g, {x, y, 0.0}); },
      py::arg("data"), py::arg("geometry"), py::arg("x"), py::arg("y"));
  m.def(
      "rcs_multi",
      [](const py::array_t<complex, py::array::c_style | py::array::forcecast>& d,
         const AcquisitionGeometry& g, const std::vector<std::pair<double, double>>& locations) {
        std::vector<Vec3> pts;
        for (const auto& [x, y] : locations) {
          pts.push_back({x, y, 0.0});
        }
        const auto sol = solve_multi(multi_system(data_matrix(d), g, pts));
        std::vector<std::vector<double>> sigma;
        for (const auto& s : rcs_multi(sol, g.omegas())) {
          sigma.push_back(s.sigma);
        }
        return py::make_tuple(sigma, sol.condition);
      },
      py::arg("data"), py::arg("geometry"), py::arg("locations"),
      "Per-target RCS spectra and per-frequency condition numbers.");

  // configuration
  m.def(
      "load_config",
      [](const std::string& path) { return serialize_config(load_config(path)); },
      py::arg("path"), "Validated configuration, returned as canonical JSON text.");
  m.def(
      "canonicalize_config",
      [](const std::string& text) { return serialize_config(parse_config(text)); },
      py::arg("text"));
}
