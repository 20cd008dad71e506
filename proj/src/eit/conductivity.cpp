#include "msd/eit/conductivity.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace msd::eit {

bool ConductivityField::within_box() const {
  for (double v : s)
    if (!(v >= a_ell && v <= b_ell)) return false;
  return true;
}

double tv_conductivity(const ConductivityField& f, TvKind kind) {
  const double semi = tv_seminorm_raw(f.s, f.m, f.m, f.h());
  if (kind == TvKind::Seminorm) return semi;
  double l1 = 0.0;
  for (double v : f.s) l1 += std::abs(v);
  return l1 * f.h() * f.h() + semi;
}

ConductivityField make_phantom(const PhantomSpec& spec) {
  if (spec.m <= 0) throw std::invalid_argument("phantom: mesh size must be positive");
  if (!(spec.a_ell > 0.0 && spec.a_ell <= spec.b_ell))
    throw std::invalid_argument("phantom: need 0 < a_ell <= b_ell");
  auto check = [&](double v) {
    if (!(v >= spec.a_ell && v <= spec.b_ell))
      throw std::invalid_argument("phantom: value outside the ellipticity box");
  };
  check(spec.background);
  ConductivityField f(spec.m, spec.a_ell, spec.b_ell, spec.background);
  for (const auto& inc : spec.inclusions) {
    check(inc.value);
    for (int y = 0; y < spec.m; ++y) {
      for (int x = 0; x < spec.m; ++x) {
        const double cx = (x + 0.5) / spec.m;
        const double cy = (y + 0.5) / spec.m;
        bool in = false;
        if (inc.shape == "rect") {
          if (inc.params.size() != 4) throw std::invalid_argument("phantom: rect needs 4 params");
          in = cx >= inc.params[0] && cy >= inc.params[1] && cx <= inc.params[2] &&
               cy <= inc.params[3];
        } else if (inc.shape == "disk") {
          if (inc.params.size() != 3) throw std::invalid_argument("phantom: disk needs 3 params");
          const double dx = cx - inc.params[0], dy = cy - inc.params[1];
          in = dx * dx + dy * dy <= inc.params[2] * inc.params[2];
        } else {
          throw std::invalid_argument("phantom: unknown shape " + inc.shape);
        }
        if (in) f.at(x, y) = inc.value;
      }
    }
  }
  return f;
}

PhantomSpec parse_phantom_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  PhantomSpec spec;
  if (j.contains("m")) spec.m = j.at("m").get<int>();
  spec.background = j.at("background").get<double>();
  const auto& bounds = j.at("bounds");
  spec.a_ell = bounds.at(0).get<double>();
  spec.b_ell = bounds.at(1).get<double>();
  if (j.contains("inclusions")) {
    for (const auto& ji : j.at("inclusions")) {
      Inclusion inc;
      inc.shape = ji.at("shape").get<std::string>();
      inc.params = ji.at("params").get<std::vector<double>>();
      inc.value = ji.at("value").get<double>();
      spec.inclusions.push_back(std::move(inc));
    }
  }
  return spec;
}

} // namespace msd::eit
