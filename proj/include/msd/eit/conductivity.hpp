#pragma once

#include <string>
#include <vector>

#include "msd/tv.hpp"

namespace msd::eit {

// Scalar conductivity on an M x M cell grid over the unit square, with the
// ellipticity box [a_ell, b_ell]. Increment fields reuse the same container
// with the box ignored; only partial sums are box-constrained.
struct ConductivityField {
  int m = 0;
  double a_ell = 0.0;
  double b_ell = 0.0;
  std::vector<double> s; // per-cell, row-major

  ConductivityField() = default;
  ConductivityField(int m_, double a, double b, double value)
      : m(m_), a_ell(a), b_ell(b), s(static_cast<std::size_t>(m_) * m_, value) {}

  double h() const { return 1.0 / m; }
  double& at(int x, int y) { return s[static_cast<std::size_t>(y) * m + x]; }
  double at(int x, int y) const { return s[static_cast<std::size_t>(y) * m + x]; }
  bool within_box() const;
};

double tv_conductivity(const ConductivityField& f, TvKind kind);

struct Inclusion {
  std::string shape;          // "rect" or "disk"
  std::vector<double> params; // rect: x0,y0,x1,y1; disk: cx,cy,r (unit coords)
  double value = 0.0;
};

struct PhantomSpec {
  int m = 16;
  double background = 1.0;
  double a_ell = 0.5;
  double b_ell = 4.0;
  std::vector<Inclusion> inclusions;
};

// Deterministic field from a phantom description; cell membership is
// tested at cell centers.
// Out-of-box values are an error.
ConductivityField make_phantom(const PhantomSpec& spec);

PhantomSpec parse_phantom_json(const std::string& text);

} // namespace msd::eit
