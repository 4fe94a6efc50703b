#include "dispersar/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <png.h>

#include "dispersar/errors.hpp"

namespace dispersar::io {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) {
      field.pop_back();
    }
    fields.push_back(field);
  }
  return fields;
}

double to_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) {
      throw std::invalid_argument(s);
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("line {}", line_no), fmt::format("not a number: '{}'", s));
  }
}

std::ofstream open_for_write(const fs::path& path) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  return out;
}

std::ifstream open_for_read(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(path.string(), "cannot open file");
  }
  return in;
}

std::string number_or_nan(const std::vector<double>& v, std::size_t i) {
  return i < v.size() ? fmt::format("{}", v[i]) : std::string("nan");
}

}  // namespace

void write_reflectivity_csv(std::ostream& out, const ReflectivitySpectrum& spectrum) {
  spectrum.validate();
  out << "omega_rad_s,re_rho,im_rho\n";
  for (std::size_t m = 0; m < spectrum.size(); ++m) {
    fmt::print(out, "{},{},{}\n", spectrum.omega[m], spectrum.values[m].real(),
               spectrum.values[m].imag());
  }
}

ReflectivitySpectrum read_reflectivity_csv(std::istream& in) {
  ReflectivitySpectrum s;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (split(line) != std::vector<std::string>{"omega_rad_s", "re_rho", "im_rho"}) {
        throw ConfigError("reflectivity csv", "expected header omega_rad_s,re_rho,im_rho");
      }
      continue;
    }
    const auto f = split(line);
    if (f.size() != 3) {
      throw ConfigError(fmt::format("line {}", line_no), "expected 3 columns");
    }
    s.omega.push_back(to_double(f[0], line_no));
    s.values.emplace_back(to_double(f[1], line_no), to_double(f[2], line_no));
  }
  s.validate();
  return s;
}

void write_reflectivity_csv(const fs::path& path, const ReflectivitySpectrum& spectrum) {
  auto out = open_for_write(path);
  write_reflectivity_csv(out, spectrum);
}

ReflectivitySpectrum read_reflectivity_csv(const fs::path& path) {
  auto in = open_for_read(path);
  return read_reflectivity_csv(in);
}

void write_data_csv(std::ostream& out, const DataMatrix& data, const AcquisitionGeometry& geometry) {
  out << "# geometry_hash=" << geometry.hash_hex();
  if (data.snr_db) {
    fmt::print(out, ",snr_db={}", *data.snr_db);
  }
  if (data.seed) {
    fmt::print(out, ",seed={}", *data.seed);
  }
  out << "\nm,n,re,im\n";
  for (int m = 0; m < data.rows(); ++m) {
    for (int n = 0; n < data.cols(); ++n) {
      fmt::print(out, "{},{},{},{}\n", m + 1, n + 1, data(m, n).real(), data(m, n).imag());
    }
  }
}

DataMatrix read_data_csv(std::istream& in, const AcquisitionGeometry* geometry) {
  struct Entry {
    int m, n;
    complex v;
  };
  std::vector<Entry> entries;
  std::optional<std::string> hash;
  std::optional<double> snr_db;
  std::optional<std::uint64_t> seed;
  int rows = 0;
  int cols = 0;

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    if (line[0] == '#') {
      for (const auto& kv : split(line.substr(1))) {
        const auto key_start = kv.find_first_not_of(' ');
        const auto eq = kv.find('=');
        if (eq == std::string::npos || key_start == std::string::npos) {
          continue;
        }
        const auto key = kv.substr(key_start, eq - key_start);
        const auto value = kv.substr(eq + 1);
        if (key == "geometry_hash") {
          hash = value;
        } else if (key == "snr_db") {
          snr_db = to_double(value, line_no);
        } else if (key == "seed") {
          seed = std::stoull(value);
        }
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (split(line) != std::vector<std::string>{"m", "n", "re", "im"}) {
        throw ConfigError("data csv", "expected header m,n,re,im");
      }
      continue;
    }
    const auto f = split(line);
    if (f.size() != 4) {
      throw ConfigError(fmt::format("data csv line {}", line_no), "expected 4 columns");
    }
    Entry e{static_cast<int>(to_double(f[0], line_no)), static_cast<int>(to_double(f[1], line_no)),
            {to_double(f[2], line_no), to_double(f[3], line_no)}};
    if (e.m < 1 || e.n < 1) {
      throw ConfigError(fmt::format("data csv line {}", line_no), "indices are one-based");
    }
    rows = std::max(rows, e.m);
    cols = std::max(cols, e.n);
    entries.push_back(e);
  }

  if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) != entries.size()) {
    throw ConfigError("data csv", "matrix entries are incomplete or duplicated");
  }
  if (geometry) {
    if (rows != geometry->num_frequencies() || cols != geometry->num_positions()) {
      throw ConfigError("data", fmt::format("data is {}x{} but geometry expects {}x{}", rows, cols,
                                            geometry->num_frequencies(),
                                            geometry->num_positions()));
    }
    if (hash && *hash != geometry->hash_hex()) {
      throw ConfigError("data", fmt::format("geometry hash {} does not match configuration ({})",
                                            *hash, geometry->hash_hex()));
    }
  }

  DataMatrix d(rows, cols);
  for (const auto& e : entries) {
    d(e.m - 1, e.n - 1) = e.v;
  }
  d.snr_db = snr_db;
  d.seed = seed;
  return d;
}

void write_data_csv(const fs::path& path, const DataMatrix& data, const AcquisitionGeometry& geometry) {
  auto out = open_for_write(path);
  write_data_csv(out, data, geometry);
}

DataMatrix read_data_csv(const fs::path& path, const AcquisitionGeometry* geometry) {
  auto in = open_for_read(path);
  return read_data_csv(in, geometry);
}

void write_image_csv(std::ostream& out, const RealImage& image, double k0) {
  out << "x_k0,y_k0,value\n";
  for (int row = 0; row < image.grid.ny; ++row) {
    const double y = image.grid.y(row) * k0;
    for (int col = 0; col < image.grid.nx; ++col) {
      fmt::print(out, "{},{},{}\n", image.grid.x(col) * k0, y, image.at(row, col));
    }
  }
}

void write_image_csv(const fs::path& path, const RealImage& image, double k0) {
  auto out = open_for_write(path);
  write_image_csv(out, image, k0);
}

void write_image_png(const fs::path& path, const RealImage& image) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  const auto width = static_cast<png_uint_32>(image.grid.nx);
  const auto height = static_cast<png_uint_32>(image.grid.ny);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_byte> raster(static_cast<std::size_t>(width));
  for (int row = image.grid.ny - 1; row >= 0; --row) {
    for (int col = 0; col < image.grid.nx; ++col) {
      const double v = std::clamp(image.at(row, col), 0.0, 1.0);
      raster[static_cast<std::size_t>(col)] = static_cast<png_byte>(std::lround(255.0 * v));
    }
    png_write_row(png, raster.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_rcs_csv(std::ostream& out, const RcsSpectrum& raw, const RcsSpectrum* smoothed,
                   const RcsTruth* truth) {
  const auto normalized = raw.normalized();
  out << "omega_rad_s,sigma_m2,sigma_normalized,sigma_smoothed";
  if (truth) {
    out << ",sigma_true_m2,rel_error";
  }
  out << '\n';
  for (std::size_t m = 0; m < raw.sigma.size(); ++m) {
    fmt::print(out, "{},{},{},{}", raw.omega[m], raw.sigma[m], number_or_nan(normalized, m),
               smoothed ? number_or_nan(smoothed->sigma, m) : std::string("nan"));
    if (truth) {
      const double t = truth->sigma.at(m);
      fmt::print(out, ",{},{}", t, std::abs(raw.sigma[m] - t) / t);
    }
    out << '\n';
  }
}

void write_rcs_csv(const fs::path& path, const RcsSpectrum& raw, const RcsSpectrum* smoothed,
                   const RcsTruth* truth) {
  auto out = open_for_write(path);
  write_rcs_csv(out, raw, smoothed, truth);
}

void write_shift_sweep_csv(std::ostream& out, std::span<const ShiftSweepRow> rows) {
  out << "k0_alpha,Y_numeric,Y_estimate,y_numeric_k0units,y_estimate_k0units\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{},{},{}\n", r.k0_alpha, r.Y_numeric, r.Y_estimate, r.y_numeric_k0,
               r.y_estimate_k0);
  }
}

void write_shift_sweep_csv(const fs::path& path, std::span<const ShiftSweepRow> rows) {
  auto out = open_for_write(path);
  write_shift_sweep_csv(out, rows);
}

void write_text(const fs::path& path, std::string_view text) {
  auto out = open_for_write(path);
  out << text;
}

}  // namespace dispersar::io
