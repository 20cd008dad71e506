#include "msd/tv.hpp"

#include <cmath>

namespace msd {

double tv_seminorm_raw(std::span<const double> u, int width, int height, double h) {
  double s = 0.0;
  for (int y = 0; y < height; ++y) {
    const double* row = u.data() + static_cast<std::size_t>(y) * width;
    const double* next = row + width;
    for (int x = 0; x < width; ++x) {
      const double dx = (x + 1 < width) ? row[x + 1] - row[x] : 0.0;
      const double dy = (y + 1 < height) ? next[x] - row[x] : 0.0;
      s += std::sqrt(dx * dx + dy * dy);
    }
  }
  return s * h;
}

double tv_smoothed_raw(std::span<const double> u, int width, int height, double h, double eps) {
  if (eps <= 0.0) return tv_seminorm_raw(u, width, height, h);
  double s = 0.0;
  const double e2 = eps * eps;
  for (int y = 0; y < height; ++y) {
    const double* row = u.data() + static_cast<std::size_t>(y) * width;
    const double* next = row + width;
    for (int x = 0; x < width; ++x) {
      const double dx = (x + 1 < width) ? row[x + 1] - row[x] : 0.0;
      const double dy = (y + 1 < height) ? next[x] - row[x] : 0.0;
      s += std::sqrt(dx * dx + dy * dy + e2) - eps;
    }
  }
  return s * h;
}

void tv_smoothed_gradient_raw(std::span<const double> u, int width, int height, double h,
                              double eps, std::span<double> grad_out) {
  const double e2 = eps * eps;
  for (double& g : grad_out) g = 0.0;
  auto idx = [width](int x, int y) { return static_cast<std::size_t>(y) * width + x; };
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double uc = u[idx(x, y)];
      const double dx = (x + 1 < width) ? u[idx(x + 1, y)] - uc : 0.0;
      const double dy = (y + 1 < height) ? u[idx(x, y + 1)] - uc : 0.0;
      const double m = std::sqrt(dx * dx + dy * dy + e2);
      if (m == 0.0) continue;
      const double gx = h * dx / m;
      const double gy = h * dy / m;
      if (x + 1 < width) {
        grad_out[idx(x + 1, y)] += gx;
        grad_out[idx(x, y)] -= gx;
      }
      if (y + 1 < height) {
        grad_out[idx(x, y + 1)] += gy;
        grad_out[idx(x, y)] -= gy;
      }
    }
  }
}

double tv_seminorm(const ImageGrid& u) {
  return tv_seminorm_raw(u.v, u.width, u.height, u.spacing);
}

double tv_value(const ImageGrid& u, const TvRegularizer& reg) {
  const double semi = tv_seminorm(u);
  if (reg.kind == TvKind::Seminorm) return semi;
  return u.l1_norm() + semi;
}

void tv_grad(const ImageGrid& u, std::vector<double>& px, std::vector<double>& py) {
  const int w = u.width, hgt = u.height;
  px.assign(u.size(), 0.0);
  py.assign(u.size(), 0.0);
  for (int y = 0; y < hgt; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w) px[i] = u.v[i + 1] - u.v[i];
      if (y + 1 < hgt) py[i] = u.v[i + w] - u.v[i];
    }
  }
}

void tv_div(std::span<const double> px, std::span<const double> py, int width, int height,
            std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(width) * height, 0.0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      double d = px[i] + py[i];
      if (x > 0) d -= px[i - 1];
      if (y > 0) d -= py[i - width];
      out[i] = d;
    }
  }
}

} // namespace msd
