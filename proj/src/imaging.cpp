#include "dispersar/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "dispersar/errors.hpp"

namespace dispersar {

namespace {

void check_dimensions(const DataMatrix& data, const AcquisitionGeometry& geometry) {
  if (data.rows() != geometry.num_frequencies() || data.cols() != geometry.num_positions()) {
    throw DomainError(fmt::format("data is {}x{} but geometry expects {}x{}", data.rows(),
                                  data.cols(), geometry.num_frequencies(),
                                  geometry.num_positions()));
  }
}

// Sum over m then n of d_mn exp(-2i k_m r_n) for one pixel.
complex backproject(const DataMatrix& data, std::span<const double> wavenumbers,
                    std::span<const double> ranges) {
  const int M = data.rows();
  const int N = data.cols();
  complex acc{};
  for (int m = 0; m < M; ++m) {
    const double two_k = 2.0 * wavenumbers[m];
    const complex* row = &data(m, 0);
    for (int n = 0; n < N; ++n) {
      const double phase = two_k * ranges[n];
      acc += row[n] * complex(std::cos(phase), -std::sin(phase));
    }
  }
  return acc;
}

int resolve_threads(int threads) {
  if (threads > 0) {
    return threads;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

GridSpec GridSpec::square(double center_x, double center_y, double side, int pixels) {
  GridSpec g{center_x, center_y, side, side, pixels, pixels};
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (nx < 2 || ny < 2) {
    throw DomainError(fmt::format("image grid needs at least 2x2 pixels, got {}x{}", nx, ny));
  }
  if (!(width > 0.0) || !(height > 0.0)) {
    throw DomainError("image grid extents must be positive");
  }
}

ComplexImage km_image(const DataMatrix& data, const AcquisitionGeometry& geometry,
                      const GridSpec& grid, int threads) {
  check_dimensions(data, geometry);
  grid.validate();
  ComplexImage image(grid);
  const auto platforms = geometry.platforms();
  const auto wavenumbers = geometry.wavenumbers();

  auto work = [&](int first_row, int stride) {
    std::vector<double> ranges(platforms.size());
    for (int row = first_row; row < grid.ny; row += stride) {
      const double y = grid.y(row);
      for (int col = 0; col < grid.nx; ++col) {
        const Vec3 p{grid.x(col), y, 0.0};
        for (std::size_t n = 0; n < platforms.size(); ++n) {
          ranges[n] = distance(platforms[n], p);
        }
        image.at(row, col) = backproject(data, wavenumbers, ranges);
      }
    }
  };

  const int workers = std::min(resolve_threads(threads), grid.ny);
  if (workers <= 1) {
    work(0, 1);
    return image;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back(work, t, workers);
  }
  pool.clear();
  return image;
}

complex km_value(const DataMatrix& data, const AcquisitionGeometry& geometry, const Vec3& point) {
  check_dimensions(data, geometry);
  const auto platforms = geometry.platforms();
  std::vector<double> ranges(platforms.size());
  for (std::size_t n = 0; n < platforms.size(); ++n) {
    ranges[n] = distance(platforms[n], point);
  }
  return backproject(data, geometry.wavenumbers(), ranges);
}

RealImage normalize_image(const ComplexImage& image) {
  RealImage out(image.grid);
  double peak = 0.0;
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    out.values[i] = std::abs(image.values[i]);
    peak = std::max(peak, out.values[i]);
  }
  if (!(peak > 0.0)) {
    throw ZeroImageError("normalize_image: image is identically zero");
  }
  for (auto& v : out.values) {
    v /= peak;
  }
  return out;
}

double tunable_km(double normalized_value, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw DomainError(fmt::format("tunable_km: epsilon must lie in (0, 1], got {}", epsilon));
  }
  if (!(normalized_value >= 0.0 && normalized_value <= 1.0)) {
    throw DomainError(fmt::format("tunable_km: pixel value {} outside [0, 1]", normalized_value));
  }
  return epsilon / (1.0 - (1.0 - epsilon) * normalized_value);
}

RealImage tunable_km(const RealImage& normalized, double epsilon) {
  RealImage out(normalized.grid);
  for (std::size_t i = 0; i < normalized.values.size(); ++i) {
    out.values[i] = tunable_km(normalized.values[i], epsilon);
  }
  return out;
}

Peak locate_peak(const RealImage& image) {
  if (image.values.empty()) {
    throw DomainError("locate_peak: empty image");
  }
  // First strict maximum in row-major order is the lexicographically smallest.
  std::size_t best = 0;
  for (std::size_t i = 1; i < image.values.size(); ++i) {
    if (image.values[i] > image.values[best]) {
      best = i;
    }
  }
  const int row = static_cast<int>(best / static_cast<std::size_t>(image.grid.nx));
  const int col = static_cast<int>(best % static_cast<std::size_t>(image.grid.nx));
  return {row, col, image.grid.x(col), image.grid.y(row), image.values[best]};
}

std::vector<Peak> find_peaks(const RealImage& image, double threshold) {
  const int nx = image.grid.nx;
  const int ny = image.grid.ny;
  std::vector<int> label(image.values.size(), -1);
  std::vector<Peak> peaks;
  std::vector<std::pair<int, int>> stack;

  for (int row = 0; row < ny; ++row) {
    for (int col = 0; col < nx; ++col) {
      const std::size_t idx = static_cast<std::size_t>(row) * nx + col;
      if (label[idx] >= 0 || image.values[idx] < threshold) {
        continue;
      }
      const int id = static_cast<int>(peaks.size());
      Peak best{row, col, image.grid.x(col), image.grid.y(row), image.values[idx]};
      label[idx] = id;
      stack.assign(1, {row, col});
      while (!stack.empty()) {
        const auto [r, c] = stack.back();
        stack.pop_back();
        const double v = image.at(r, c);
        if (v > best.value || (v == best.value && std::pair(r, c) < std::pair(best.row, best.col))) {
          best = {r, c, image.grid.x(c), image.grid.y(r), v};
        }
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = r + dr;
            const int cc = c + dc;
            if (rr < 0 || rr >= ny || cc < 0 || cc >= nx) {
              continue;
            }
            const std::size_t j = static_cast<std::size_t>(rr) * nx + cc;
            if (label[j] < 0 && image.values[j] >= threshold) {
              label[j] = id;
              stack.emplace_back(rr, cc);
            }
          }
        }
      }
      peaks.push_back(best);
    }
  }

  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.value != b.value) {
      return a.value > b.value;
    }
    return std::pair(a.row, a.col) < std::pair(b.row, b.col);
  });
  return peaks;
}

RealImage subregion_zoom(const DataMatrix& data, const AcquisitionGeometry& geometry,
                         double center_x, double center_y, double side, int pixels,
                         double epsilon, int threads) {
  const auto grid = GridSpec::square(center_x, center_y, side, pixels);
  return tunable_km(normalize_image(km_image(data, geometry, grid, threads)), epsilon);
}

}  // namespace dispersar
