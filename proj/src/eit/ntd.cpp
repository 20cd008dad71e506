#include "msd/eit/ntd.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace msd::eit {

namespace {

std::uint64_t hash_patterns(const std::vector<std::vector<double>>& ps) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  for (const auto& p : ps) {
    mix(p.size());
    for (double x : p) {
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(x));
      std::memcpy(&bits, &x, sizeof(bits));
      mix(bits);
    }
  }
  return h;
}

} // namespace

CurrentBasis make_trig_basis(const FemGrid& grid, int k) {
  if (k < 1 || k > grid.n_boundary() - 1)
    throw std::invalid_argument("make_trig_basis: k out of range for this mesh");
  const int nb = grid.n_boundary();
  std::vector<std::vector<double>> raw;
  const double total = 4.0;
  for (int j = 1; raw.size() < static_cast<std::size_t>(k); ++j) {
    std::vector<double> cosj(nb), sinj(nb);
    for (int i = 0; i < nb; ++i) {
      const double t = 2.0 * 3.14159265358979323846 * j * grid.boundary_arclength(i) / total;
      cosj[i] = std::cos(t);
      sinj[i] = std::sin(t);
    }
    raw.push_back(std::move(cosj));
    if (raw.size() < static_cast<std::size_t>(k)) raw.push_back(std::move(sinj));
  }

  // project out the constant, then modified Gram-Schmidt in the boundary
  // mass inner product
  const std::vector<double> ones(nb, 1.0);
  const double ones_sq = grid.boundary_inner(ones, ones);
  CurrentBasis basis;
  basis.mesh_m = grid.m();
  for (auto& g : raw) {
    const double mean = grid.boundary_inner(g, ones) / ones_sq;
    for (double& x : g) x -= mean;
    for (const auto& q : basis.patterns) {
      const double c = grid.boundary_inner(g, q);
      for (int i = 0; i < nb; ++i) g[i] -= c * q[i];
    }
    const double nrm = std::sqrt(grid.boundary_inner(g, g));
    if (!(nrm > 1e-12))
      throw std::runtime_error("make_trig_basis: degenerate pattern (k too large for mesh?)");
    for (double& x : g) x /= nrm;
    basis.patterns.push_back(std::move(g));
  }
  basis.k = k;
  basis.id = hash_patterns(basis.patterns);
  return basis;
}

NtdAssembly ntd_assemble(const FemGrid& grid, const ConductivityField& sigma,
                         const CurrentBasis& basis, double rel_tol, int threads) {
  if (basis.mesh_m != grid.m()) throw std::invalid_argument("ntd_assemble: basis/mesh mismatch");
  const int k = basis.k;
  NtdAssembly out;
  out.n.k = k;
  out.n.mesh_m = grid.m();
  out.n.basis_id = basis.id;
  out.n.a.assign(static_cast<std::size_t>(k) * k, 0.0);
  out.nodal_solutions.resize(k);

  std::vector<std::vector<double>> traces(k);
  int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min(nthreads, k));
  {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    std::vector<std::string> errors(k);
    auto work = [&]() {
      for (;;) {
        const int j = next.fetch_add(1);
        if (j >= k) return;
        try {
          NeumannSolution sol = solve_neumann(grid, sigma, basis.patterns[j], rel_tol);
          out.nodal_solutions[j] = std::move(sol.interior);
          traces[j] = std::move(sol.boundary_trace);
        } catch (const std::exception& ex) {
          errors[j] = ex.what();
        }
      }
    };
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
      if (!e.empty()) throw std::runtime_error("ntd_assemble: " + e);
  }
  // deterministic ordered assembly
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      out.n.at(i, j) = grid.boundary_inner(basis.patterns[i], traces[j]);
  return out;
}

double sym_operator_norm(const std::vector<double>& a, int k, double rel_tol, int max_iter) {
  if (static_cast<int>(a.size()) != k * k)
    throw std::invalid_argument("sym_operator_norm: bad shape");
  double maxabs = 0.0;
  for (double v : a) maxabs = std::max(maxabs, std::abs(v));
  if (maxabs == 0.0) return 0.0;

  std::vector<double> v(k), av(k);
  for (int i = 0; i < k; ++i) v[i] = 1.0 + 1e-3 * i; // deterministic start
  auto normalize = [&](std::vector<double>& x) {
    double n = 0.0;
    for (double t : x) n += t * t;
    n = std::sqrt(n);
    if (n > 0.0)
      for (double& t : x) t /= n;
    return n;
  };
  normalize(v);
  double prev = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    for (int i = 0; i < k; ++i) {
      double s = 0.0;
      for (int j = 0; j < k; ++j) s += a[static_cast<std::size_t>(i) * k + j] * v[j];
      av[i] = s;
    }
    const double n = normalize(av);
    if (n == 0.0) return 0.0; // v fell in the null space; a == 0 handled above
    v.swap(av);
    if (it > 4 && std::abs(n - prev) <= rel_tol * n) return n;
    prev = n;
  }
  return prev;
}

SymEigen sym_eigen(std::vector<double> a, int k) {
  if (static_cast<int>(a.size()) != k * k) throw std::invalid_argument("sym_eigen: bad shape");
  std::vector<double> v(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) v[static_cast<std::size_t>(i) * k + i] = 1.0;
  auto at = [&](std::vector<double>& m, int i, int j) -> double& {
    return m[static_cast<std::size_t>(i) * k + j];
  };
  for (int sweep = 0; sweep < 128; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) off += at(a, i, j) * at(a, i, j);
    if (off < 1e-28) break;
    for (int p = 0; p < k; ++p) {
      for (int q = p + 1; q < k; ++q) {
        if (std::abs(at(a, p, q)) < 1e-300) continue;
        const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * at(a, p, q));
        const double t =
            (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int i = 0; i < k; ++i) {
          const double aip = at(a, i, p), aiq = at(a, i, q);
          at(a, i, p) = c * aip - s * aiq;
          at(a, i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < k; ++i) {
          const double api = at(a, p, i), aqi = at(a, q, i);
          at(a, p, i) = c * api - s * aqi;
          at(a, q, i) = s * api + c * aqi;
        }
        // eigvec rows transform like the columns
        for (int i = 0; i < k; ++i) {
          const double vpi = at(v, p, i), vqi = at(v, q, i);
          at(v, p, i) = c * vpi - s * vqi;
          at(v, q, i) = s * vpi + c * vqi;
        }
      }
    }
  }
  SymEigen out;
  out.values.resize(k);
  for (int i = 0; i < k; ++i) out.values[i] = a[static_cast<std::size_t>(i) * k + i];
  out.vectors = std::move(v);
  return out;
}

double ntd_distance(const NtDMatrix& n1, const NtDMatrix& n2, NtdMetric metric) {
  if (n1.k != n2.k || n1.mesh_m != n2.mesh_m || n1.basis_id != n2.basis_id)
    throw std::invalid_argument("ntd_distance: basis mismatch");
  std::vector<double> d(n1.a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = n1.a[i] - n2.a[i];
  if (metric == NtdMetric::HilbertSchmidt) {
    double s = 0.0;
    for (double v : d) s += v * v;
    return std::sqrt(s);
  }
  return sym_operator_norm(d, n1.k, 1e-12);
}

NtDMatrix add_noise(const NtDMatrix& n, double eta, std::uint64_t seed, NtdMetric metric) {
  if (eta < 0.0) throw std::invalid_argument("add_noise: eta must be >= 0");
  if (eta == 0.0) return n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  NtDMatrix g = n;
  for (int i = 0; i < n.k; ++i) {
    for (int j = i; j < n.k; ++j) {
      const double v = gauss(rng);
      g.at(i, j) = v;
      g.at(j, i) = v;
    }
  }
  NtDMatrix zero = n;
  std::fill(zero.a.begin(), zero.a.end(), 0.0);
  const double gn = ntd_distance(g, zero, metric);
  NtDMatrix out = n;
  const double scale = eta / gn;
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += scale * g.a[i];
  return out;
}

} // namespace msd::eit
