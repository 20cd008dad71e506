#pragma once

#include <span>
#include <vector>

#include "msd/image.hpp"

namespace msd {

enum class TvKind { Seminorm, FullNorm };

struct TvRegularizer {
  TvKind kind = TvKind::Seminorm;
  // 0 = exact value (used by the dual solver); > 0 only for the
  // gradient-based optimizers, and never for reported values.
  double epsilon_smoothing = 0.0;
};

// Isotropic forward-difference total variation with replicate boundary
// (differences across the far edge are zero):
//   TV(u) = h * sum_cells sqrt(dx^2 + dy^2).
// This exact stencil is shared by the image and conductivity modules so
// that solvers and test oracles agree on the objective bit for bit.
double tv_seminorm_raw(std::span<const double> u, int width, int height, double h);

// Smoothed variant sum sqrt(dx^2 + dy^2 + eps^2)*h - eps*h per cell, and its
// gradient; used inside gradient-based inner solvers only.
double tv_smoothed_raw(std::span<const double> u, int width, int height, double h, double eps);
void tv_smoothed_gradient_raw(std::span<const double> u, int width, int height, double h,
                              double eps, std::span<double> grad_out);

double tv_seminorm(const ImageGrid& u);

// Value of the configured regularizer: Seminorm or L1 + Seminorm.
double tv_value(const ImageGrid& u, const TvRegularizer& reg);

// Forward-difference gradient field and its negative adjoint (divergence).
// px/py are per-pixel with the convention px(last column) = py(last row) = 0.
void tv_grad(const ImageGrid& u, std::vector<double>& px, std::vector<double>& py);
void tv_div(std::span<const double> px, std::span<const double> py, int width, int height,
            std::vector<double>& out);

} // namespace msd
