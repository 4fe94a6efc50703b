#pragma once

// Kirchhoff migration (KM) imaging, normalization, the tunable KM sharpening
// map and peak localization.

#include <complex>
#include <optional>
#include <vector>

#include "dispersar/scene.hpp"

namespace dispersar {

/// Uniform rectangular pixel grid in the z = 0 plane. Row index runs along
/// range (y), column index along cross-range (x); both include their
/// endpoints, so spacing is extent / (pixels - 1).
struct GridSpec {
  double center_x = 0.0;
  double center_y = 0.0;
  double width = 0.0;   // cross-range extent, m
  double height = 0.0;  // range extent, m
  int nx = 0;
  int ny = 0;

  static GridSpec square(double center_x, double center_y, double side, int pixels);

  void validate() const;
  double x(int col) const noexcept { return center_x - width / 2.0 + col * dx(); }
  double y(int row) const noexcept { return center_y - height / 2.0 + row * dy(); }
  double dx() const noexcept { return width / (nx - 1); }
  double dy() const noexcept { return height / (ny - 1); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
};

template <typename T>
struct ImageGrid {
  GridSpec grid;
  std::vector<T> values;  // row-major, values[row * nx + col]

  ImageGrid() = default;
  explicit ImageGrid(const GridSpec& g) : grid(g), values(g.size()) {}

  T& at(int row, int col) { return values[static_cast<std::size_t>(row) * grid.nx + col]; }
  const T& at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * grid.nx + col];
  }
};

using ComplexImage = ImageGrid<complex>;
using RealImage = ImageGrid<double>;

struct Peak {
  int row = 0;
  int col = 0;
  double x = 0.0;  // m
  double y = 0.0;  // m
  double value = 0.0;
};

/// I(y) = sum_m sum_n d_mn exp(-2i k_m |x_n - y|). Pixels are distributed
/// over `threads` workers (0 = hardware concurrency); each pixel is reduced
/// in a fixed m-then-n order so results do not depend on the thread count.
ComplexImage km_image(const DataMatrix& data, const AcquisitionGeometry& geometry,
                      const GridSpec& grid, int threads = 1);

/// KM imaging function at a single point.
complex km_value(const DataMatrix& data, const AcquisitionGeometry& geometry, const Vec3& point);

/// |I| / max |I|. Throws ZeroImageError for an identically zero image.
RealImage normalize_image(const ComplexImage& image);

/// eps / (1 - (1 - eps) I) pixelwise, 0 < eps <= 1, input in [0, 1].
RealImage tunable_km(const RealImage& normalized, double epsilon);
double tunable_km(double normalized_value, double epsilon);

/// Grid maximum; ties go to the smallest (row, col).
Peak locate_peak(const RealImage& image);

/// One peak per 8-connected component of pixels with value >= threshold,
/// sorted by decreasing value (ties by (row, col)).
std::vector<Peak> find_peaks(const RealImage& image, double threshold);

/// KM recomputed on a side x side sub-region around `center`, normalized to
/// its own maximum and passed through tunable_km(epsilon).
RealImage subregion_zoom(const DataMatrix& data, const AcquisitionGeometry& geometry,
                         double center_x, double center_y, double side, int pixels,
                         double epsilon, int threads = 1);

}  // namespace dispersar
