#pragma once

#include <string>
#include <vector>

namespace msd {

// 2-D scalar field on a pixel lattice, row-major, with grid spacing h.
// 1xN and Nx1 grids are legal (TV degenerates to 1-D differences).
struct ImageGrid {
  int width = 0;
  int height = 0;
  double spacing = 1.0;
  std::vector<double> v;

  ImageGrid() = default;
  ImageGrid(int w, int h, double value = 0.0, double spacing_ = 1.0)
      : width(w), height(h), spacing(spacing_), v(static_cast<std::size_t>(w) * h, value) {}

  double& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const { return v.size(); }
  bool same_shape(const ImageGrid& o) const {
    return width == o.width && height == o.height && spacing == o.spacing;
  }
  bool all_finite() const;

  // L2 and L1 norms with the grid measure h^2 per pixel.
  double l2_norm() const;
  double l1_norm() const;
  double l2_inner(const ImageGrid& o) const;
};

ImageGrid operator+(const ImageGrid& a, const ImageGrid& b);
ImageGrid operator-(const ImageGrid& a, const ImageGrid& b);
ImageGrid operator*(double s, const ImageGrid& a);

// PGM (P2/P5, maxval <= 65535). Values are mapped to [0,1] on load and
// clamped + quantized on save. Parse errors carry the byte offset.
ImageGrid load_pgm(const std::string& path);
void save_pgm(const ImageGrid& g, const std::string& path, int maxval = 255, bool binary = true);

// CSV: one row of comma-separated reals per image row; lossless round-trip.
ImageGrid load_csv_image(const std::string& path, double spacing = 1.0);
void save_csv_image(const ImageGrid& g, const std::string& path);

} // namespace msd
