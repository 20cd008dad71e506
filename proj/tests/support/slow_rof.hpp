#pragma once

// Independent slow oracle for the seminorm ROF problem: the plain
// (non-accelerated) fixed-point dual projection with its own grad/div code.
// Kept free of any library solver internals on purpose.

#include <cmath>
#include <vector>

#include "msd/image.hpp"

namespace msd_test {

struct SlowRof {
  msd::ImageGrid u;
  double gap = 0.0;
};

inline SlowRof slow_rof_seminorm(const msd::ImageGrid& f, double lambda, double gap_target,
                                 long max_iter) {
  const int w = f.width, h = f.height;
  const double c = 1.0 / (2.0 * lambda * f.spacing);
  std::vector<double> px(f.size(), 0.0), py(f.size(), 0.0);
  auto idx = [&](int x, int y) { return static_cast<std::size_t>(y) * w + x; };

  msd::ImageGrid u = f;
  const double tau = 0.125;
  SlowRof out;
  for (long it = 0; it < max_iter; ++it) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double d = px[idx(x, y)] + py[idx(x, y)];
        if (x > 0) d -= px[idx(x - 1, y)];
        if (y > 0) d -= py[idx(x, y - 1)];
        u.v[idx(x, y)] = f.v[idx(x, y)] + c * d;
      }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double gx = x + 1 < w ? u.v[idx(x + 1, y)] - u.v[idx(x, y)] : 0.0;
        const double gy = y + 1 < h ? u.v[idx(x, y + 1)] - u.v[idx(x, y)] : 0.0;
        const double m = 1.0 + (tau / c) * std::sqrt(gx * gx + gy * gy);
        px[idx(x, y)] = (px[idx(x, y)] + (tau / c) * gx) / m;
        py[idx(x, y)] = (py[idx(x, y)] + (tau / c) * gy) / m;
      }
    if (it % 64 == 0 || it + 1 == max_iter) {
      double g = 0.0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double gx = x + 1 < w ? u.v[idx(x + 1, y)] - u.v[idx(x, y)] : 0.0;
          const double gy = y + 1 < h ? u.v[idx(x, y + 1)] - u.v[idx(x, y)] : 0.0;
          g += std::sqrt(gx * gx + gy * gy) - gx * px[idx(x, y)] - gy * py[idx(x, y)];
        }
      g *= f.spacing;
      out.gap = g;
      if (g <= gap_target) break;
    }
  }
  out.u = u;
  return out;
}

// Dense symmetric Jacobi eigensolver; oracle for operator norms and
// positive-semidefiniteness checks.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n) {
  auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-26) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(at(p, q)) < 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
        const double t =
            (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = at(i, i);
  return eig;
}

} // namespace msd_test
