// Command-line front end: image decomposition, EIT reconstruction, the
// circle-shift registration toy, counterexample replays and schedule
// diagnostics. Every run writes a manifest.json echoing the resolved
// configuration, the schedule regime and the artifact list; identical
// configurations and seeds produce byte-identical numeric outputs.
//
// Exit codes: 0 ok, 2 configuration error, 3 solver failure,
// 4 precision budget exceeded.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "msd/circle_shift.hpp"
#include "msd/counterexample/l2.hpp"
#include "msd/counterexample/planar.hpp"
#include "msd/eit/reconstruct.hpp"
#include "msd/group.hpp"
#include "msd/image.hpp"
#include "msd/io_util.hpp"
#include "msd/tnv.hpp"
#include "msd/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitPrecision = 4;

struct PrecisionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat "key = value" config files with '#' comments. Entries are spliced in
// as flags right after the subcommand token, so explicit command-line flags
// (parsed later) take precedence.
std::vector<std::string> splice_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      config_path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
  }
  if (config_path.empty()) return args;
  std::vector<std::string> extra;
  std::stringstream ss(msd::read_text_file(config_path));
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto notspace = line.find_first_not_of(" \t\r");
    if (notspace == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key/value");
    extra.push_back("--" + key);
    extra.push_back(value);
  }
  // insert after the (sub)command tokens, before explicit flags
  std::size_t insert_at = 0;
  while (insert_at < args.size() && args[insert_at].rfind("--", 0) != 0) ++insert_at;
  args.insert(args.begin() + insert_at, extra.begin(), extra.end());
  return args;
}

// "key=value,key=value" schedule strings, as used by reconstruct-eit and
// check-schedule.
msd::ScaleSchedule parse_schedule_string(const std::string& text, msd::ScaleSchedule base) {
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("schedule", "expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const double value = std::stod(item.substr(eq + 1));
    if (key == "lambda0") base.lambda0 = value;
    else if (key == "growth") base.lambda_growth = value;
    else if (key == "a0") base.a0 = value;
    else if (key == "decay") base.a_decay = value;
    else if (key == "alpha") base.alpha = value;
    else if (key == "beta") base.beta = value;
    else if (key == "gamma") base.gamma = value;
    else if (key == "scales") base.n_max = static_cast<int>(value);
    else throw CLI::ValidationError("schedule", "unknown key '" + key + "'");
  }
  return base;
}

// "1e2:1e6:log10" or a comma list of values.
std::vector<double> parse_lambda_spec(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    std::string lo_s, hi_s, mode;
    std::getline(ss, lo_s, ':');
    std::getline(ss, hi_s, ':');
    std::getline(ss, mode, ':');
    const double lo = std::stod(lo_s), hi = std::stod(hi_s);
    if (mode != "log10") throw CLI::ValidationError("lambdas", "only log10 ladders supported");
    for (double v = lo; v <= hi * (1.0 + 1e-12); v *= 10.0) out.push_back(v);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

struct Manifest {
  std::string command;
  ordered_json config = ordered_json::object();
  std::string regime;
  std::vector<std::string> artifacts;

  void write(const fs::path& dir) const {
    ordered_json j;
    j["command"] = command;
    j["config"] = config;
    if (!regime.empty()) j["regime"] = regime;
    j["artifacts"] = artifacts;
    msd::write_text_file((dir / "manifest.json").string(), j.dump(2) + "\n");
  }
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CLI::ValidationError("out-dir", "cannot create " + dir.string());
}

ordered_json schedule_json(const msd::ScaleSchedule& s) { return msd::schedule_to_json(s); }

// ---------------------------------------------------------------- images

int cmd_decompose_image(const std::string& input, double lambda0, double growth, int scales,
                        const std::string& reg_name, double tol, int max_iter,
                        const std::string& out_dir, const std::string& emit) {
  if (!fs::exists(input)) {
    std::cerr << "error: input file does not exist: " << input << "\n";
    return kExitConfig;
  }
  msd::ImageGrid f;
  if (input.size() >= 4 && input.substr(input.size() - 4) == ".csv")
    f = msd::load_csv_image(input);
  else
    f = msd::load_pgm(input);

  msd::TvRegularizer reg;
  if (reg_name == "seminorm") reg.kind = msd::TvKind::Seminorm;
  else if (reg_name == "fullnorm") reg.kind = msd::TvKind::FullNorm;
  else throw CLI::ValidationError("reg", "expected seminorm or fullnorm");

  msd::ScaleSchedule s;
  s.lambda0 = lambda0;
  s.lambda_growth = growth;
  s.a0 = 0.0;
  s.alpha = 2.0;
  s.beta = 1.0;
  s.n_max = scales;

  msd::TnvOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;

  const bool emit_pgm = emit.find("pgm") != std::string::npos;
  const bool emit_csv = emit.find("csv") != std::string::npos;
  const bool emit_json = emit.find("json") != std::string::npos;

  ensure_dir(out_dir);
  auto run = msd::tnv_decompose(f, s, reg, opt);

  Manifest man;
  man.command = "decompose-image";
  man.config["input"] = input;
  man.config["schedule"] = schedule_json(s);
  man.config["reg"] = reg_name;
  man.config["tol"] = tol;
  man.config["max_iter"] = max_iter;
  man.config["emit"] = emit;
  man.regime = msd::to_string(run.trace.regime);

  const auto residuals = msd::tnv_residuals(f, run.trace);
  char name[64];
  for (std::size_t n = 0; n < run.trace.size(); ++n) {
    if (emit_pgm) {
      std::snprintf(name, sizeof(name), "u_%02zu.pgm", n);
      msd::save_pgm(run.trace.increments[n], (fs::path(out_dir) / name).string());
      man.artifacts.push_back(name);
      std::snprintf(name, sizeof(name), "v_%02zu.pgm", n);
      msd::save_pgm(residuals[n], (fs::path(out_dir) / name).string());
      man.artifacts.push_back(name);
    }
    if (emit_csv) {
      std::snprintf(name, sizeof(name), "u_%02zu.csv", n);
      msd::save_csv_image(run.trace.increments[n], (fs::path(out_dir) / name).string());
      man.artifacts.push_back(name);
    }
  }
  if (emit_json) {
    msd::write_text_file((fs::path(out_dir) / "trace.json").string(),
                         msd::trace_to_json(run.trace).dump(2) + "\n");
    man.artifacts.push_back("trace.json");
  }
  if (emit_csv) {
    msd::trace_to_csv(run.trace, (fs::path(out_dir) / "trace.csv").string());
    man.artifacts.push_back("trace.csv");
  }
  {
    const auto rows = msd::energy_identity_report(f, run.trace, reg);
    msd::CsvWriter csv((fs::path(out_dir) / "energy.csv").string());
    csv.row({"n", "residual_l2", "layer_l2", "layer_reg", "step_gap", "cumulative_gap"});
    for (const auto& r : rows)
      csv.row({std::to_string(r.n), msd::fmt_double(r.residual_l2), msd::fmt_double(r.layer_l2),
               msd::fmt_double(r.layer_reg), msd::fmt_double(r.step_gap),
               msd::fmt_double(r.cumulative_gap)});
    man.artifacts.push_back("energy.csv");
  }
  man.write(out_dir);

  if (!run.ok()) {
    std::cerr << "solver failure at scale " << run.error->scale << ": " << run.error->message
              << "\n";
    return kExitSolver;
  }
  std::cout << "decomposed " << run.trace.size() << " scales; final residual "
            << run.trace.fidelity.back() << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------- eit

int cmd_reconstruct_eit(const std::string& phantom_path, int mesh, int currents, double noise,
                        std::uint64_t seed, const std::string& schedule_str,
                        const std::string& metric_name, const std::string& reg_name, double tol,
                        int pg_iters, int threads, const std::string& out_dir) {
  if (!fs::exists(phantom_path)) {
    std::cerr << "error: phantom file does not exist: " << phantom_path << "\n";
    return kExitConfig;
  }
  msd::eit::PhantomSpec spec = msd::eit::parse_phantom_json(msd::read_text_file(phantom_path));
  spec.m = mesh;
  const msd::eit::ConductivityField truth = msd::eit::make_phantom(spec);

  msd::eit::ReconstructConfig cfg;
  cfg.mesh_m = mesh;
  cfg.currents = currents;
  cfg.a_ell = spec.a_ell;
  cfg.b_ell = spec.b_ell;
  cfg.max_pg_iters = pg_iters;
  cfg.threads = threads;
  if (metric_name == "spectral") cfg.metric = msd::eit::NtdMetric::Spectral;
  else if (metric_name == "hs") cfg.metric = msd::eit::NtdMetric::HilbertSchmidt;
  else throw CLI::ValidationError("metric", "expected spectral or hs");
  if (reg_name == "seminorm") cfg.reg_kind = msd::TvKind::Seminorm;
  else if (reg_name == "fullnorm") cfg.reg_kind = msd::TvKind::FullNorm;
  else throw CLI::ValidationError("reg", "expected seminorm or fullnorm");

  msd::ScaleSchedule base;
  base.lambda0 = 4.0;
  base.lambda_growth = 8.0;
  base.a0 = 1.0;
  base.a_decay = 2.0;
  base.alpha = 2.0;
  base.beta = 1.0;
  base.gamma = 1.0;
  base.n_max = 5;
  const msd::ScaleSchedule s = parse_schedule_string(schedule_str, base);

  ensure_dir(out_dir);
  msd::eit::FemGrid grid(mesh);
  msd::eit::CurrentBasis basis = msd::eit::make_trig_basis(grid, currents);
  msd::eit::NtDMatrix nhat = msd::eit::ntd_matrix(grid, truth, basis, cfg.fem_rel_tol);
  nhat = msd::eit::add_noise(nhat, noise, seed, cfg.metric);

  auto summary = msd::eit::reconstruct_multiscale(nhat, s, cfg, tol);
  if (!summary.warning.empty()) std::cerr << "warning: " << summary.warning << "\n";

  Manifest man;
  man.command = "reconstruct-eit";
  man.config["phantom"] = phantom_path;
  man.config["mesh"] = mesh;
  man.config["currents"] = currents;
  man.config["noise"] = noise;
  man.config["seed"] = seed;
  man.config["schedule"] = schedule_json(s);
  man.config["metric"] = metric_name;
  man.config["reg"] = reg_name;
  man.config["tol"] = tol;
  man.config["pg_iters"] = pg_iters;
  man.regime = msd::to_string(msd::classify_schedule(s));

  auto save_field_csv = [&](const msd::eit::ConductivityField& f, const std::string& nm) {
    msd::CsvWriter csv((fs::path(out_dir) / nm).string());
    for (int y = 0; y < f.m; ++y) {
      std::vector<std::string> row;
      for (int x = 0; x < f.m; ++x) row.push_back(msd::fmt_double(f.at(x, y)));
      csv.row(row);
    }
    man.artifacts.push_back(nm);
  };
  auto save_matrix_csv = [&](const msd::eit::NtDMatrix& n, const std::string& nm) {
    msd::CsvWriter csv((fs::path(out_dir) / nm).string());
    for (int i = 0; i < n.k; ++i) {
      std::vector<std::string> row;
      for (int j = 0; j < n.k; ++j) row.push_back(msd::fmt_double(n.at(i, j)));
      csv.row(row);
    }
    man.artifacts.push_back(nm);
  };

  save_field_csv(truth, "sigma_true.csv");
  save_matrix_csv(nhat, "ntd_hat.csv");
  char name[64];
  const auto& t = summary.run.trace;
  for (std::size_t n = 0; n < t.size(); ++n) {
    std::snprintf(name, sizeof(name), "sigma_%02zu.csv", n);
    save_field_csv(t.partial_sums[n], name);
  }
  if (t.size() > 0) {
    msd::eit::EitProblem problem(nhat, cfg);
    save_matrix_csv(msd::eit::ntd_matrix(problem.grid, t.partial_sums.back(), problem.basis,
                                         cfg.fem_rel_tol),
                    "ntd_final.csv");
  }
  msd::write_text_file((fs::path(out_dir) / "trace.json").string(),
                       msd::trace_to_json(t).dump(2) + "\n");
  man.artifacts.push_back("trace.json");
  msd::trace_to_csv(t, (fs::path(out_dir) / "trace.csv").string());
  man.artifacts.push_back("trace.csv");
  man.write(out_dir);

  if (!summary.run.ok()) {
    std::cerr << "solver failure at scale " << summary.run.error->scale << ": "
              << summary.run.error->message << "\n";
    return kExitSolver;
  }
  std::cout << "reconstructed " << t.size() << " scales; final fidelity " << t.fidelity.back()
            << "\n";
  return kExitOk;
}

// ----------------------------------------------------------- registration

int cmd_register_shift(const std::string& i0_path, const std::string& i1_path,
                       const std::string& schedule_str, const std::string& out_dir) {
  if (!fs::exists(i0_path) || !fs::exists(i1_path)) {
    std::cerr << "error: signal file missing\n";
    return kExitConfig;
  }
  msd::CircleShiftProblem g(msd::load_signal_csv(i0_path), msd::load_signal_csv(i1_path));

  msd::ScaleSchedule base;
  base.lambda0 = 1.0;
  base.lambda_growth = 8.0;
  base.a0 = 1.0;
  base.a_decay = 2.0;
  base.alpha = 2.0;
  base.beta = 1.0;
  base.gamma = 1.0;
  base.n_max = 7;
  const msd::ScaleSchedule s = parse_schedule_string(schedule_str, base);

  ensure_dir(out_dir);
  auto solver = msd::CircleShiftSolver::for_schedule(s);
  auto run = msd::run_group_multiscale(g, s, solver, 1e-10);

  Manifest man;
  man.command = "register-shift";
  man.config["i0"] = i0_path;
  man.config["i1"] = i1_path;
  man.config["schedule"] = schedule_json(s);
  man.regime = msd::to_string(run.trace.regime);

  ordered_json j;
  j["schedule"] = schedule_json(s);
  j["regime"] = msd::to_string(run.trace.regime);
  j["group"] = "circle-shift";
  j["period"] = g.period;
  ordered_json rows = ordered_json::array();
  for (std::size_t n = 0; n < run.trace.size(); ++n) {
    ordered_json r;
    r["n"] = n;
    r["increment"] = run.trace.increments[n];
    r["composed"] = run.trace.compositions[n];
    r["fidelity"] = run.trace.fidelity[n];
    r["dist_increment"] = run.trace.dist_increment[n];
    r["dist_sum"] = run.trace.dist_sum[n];
    r["augmented"] = run.trace.augmented[n];
    r["safeguard_used"] = run.trace.inner_reports[n].safeguard_used;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  msd::write_text_file((fs::path(out_dir) / "trace.json").string(), j.dump(2) + "\n");
  man.artifacts.push_back("trace.json");

  msd::CsvWriter csv((fs::path(out_dir) / "trace.csv").string());
  csv.row({"n", "increment", "composed", "fidelity", "dist_increment", "dist_sum"});
  for (std::size_t n = 0; n < run.trace.size(); ++n)
    csv.row({std::to_string(n), msd::fmt_double(run.trace.increments[n]),
             msd::fmt_double(run.trace.compositions[n]), msd::fmt_double(run.trace.fidelity[n]),
             msd::fmt_double(run.trace.dist_increment[n]),
             msd::fmt_double(run.trace.dist_sum[n])});
  man.artifacts.push_back("trace.csv");
  man.write(out_dir);

  if (!run.ok()) {
    std::cerr << "solver failure at scale " << run.error->scale << ": " << run.error->message
              << "\n";
    return kExitSolver;
  }
  std::cout << "registered shift " << run.trace.compositions.back() << " (period " << g.period
            << "), fidelity " << run.trace.fidelity.back() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------- counterexample

int cmd_counterexample_planar(double b, double c, int steps, double eps, int nbar, bool radial,
                              int grid_angular, int grid_radial, int threads,
                              const std::string& out_path) {
  msd::planarcx::PlanarConfig cfg;
  cfg.b = b;
  cfg.c = c;
  cfg.epsilon = eps;
  cfg.nbar = nbar;
  cfg.n_steps = steps;
  cfg.grid_angular = grid_angular;
  cfg.grid_radial = grid_radial;
  cfg.threads = threads;
  cfg.validate();

  const fs::path out(out_path);
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  auto run = msd::planarcx::run_planar_counterexample(cfg, radial);

  ordered_json j;
  j["variant"] = radial ? "radial" : "full";
  j["b"] = b;
  j["c"] = c;
  j["epsilon"] = eps;
  j["nbar"] = nbar;
  j["steps_requested"] = steps;
  j["aborted"] = run.aborted;
  if (run.aborted) j["abort_reason"] = run.abort_reason;
  j["last_trusted_scale"] = run.last_trusted_scale;
  ordered_json rows = ordered_json::array();
  for (const auto& st : run.steps) {
    ordered_json r;
    r["n"] = st.n;
    r["radius"] = st.radius;
    r["theta"] = st.theta;
    r["theta_label_quarter_turns"] = st.theta_label;
    r["fidelity_gap"] = st.fidelity_gap;
    rows.push_back(std::move(r));
  }
  j["trajectory"] = std::move(rows);
  msd::write_text_file(out.string(), j.dump(2) + "\n");

  fs::path csv_path = out;
  csv_path.replace_extension(".csv");
  msd::CsvWriter csv(csv_path.string());
  csv.row({"n", "radius", "theta", "theta_label_quarter_turns", "fidelity_gap"});
  for (const auto& st : run.steps)
    csv.row({std::to_string(st.n), msd::fmt_double(st.radius), msd::fmt_double(st.theta),
             std::to_string(st.theta_label), msd::fmt_double(st.fidelity_gap)});

  Manifest man;
  man.command = "run-counterexample planar";
  man.config["b"] = b;
  man.config["c"] = c;
  man.config["epsilon"] = eps;
  man.config["nbar"] = nbar;
  man.config["steps"] = steps;
  man.config["radial"] = radial;
  man.config["grid_angular"] = grid_angular;
  man.config["grid_radial"] = grid_radial;
  man.artifacts.push_back(out.filename().string());
  man.artifacts.push_back(csv_path.filename().string());
  man.write(out.has_parent_path() ? out.parent_path() : fs::path("."));

  for (const auto& st : run.steps)
    std::cout << "n=" << st.n << " radius=" << st.radius << " theta=" << st.theta << "\n";
  if (run.aborted) {
    std::cerr << "precision budget: " << run.abort_reason << " (last trusted scale "
              << run.last_trusted_scale << ")\n";
    return kExitPrecision;
  }
  return kExitOk;
}

int cmd_counterexample_l2(int version, int dim, const std::string& lambda_spec,
                          const std::string& out_path) {
  msd::l2cx::L2Config cfg;
  cfg.dimension = dim;
  std::vector<double> lambdas;
  if (!lambda_spec.empty()) lambdas = parse_lambda_spec(lambda_spec);

  const fs::path out(out_path);
  if (out.has_parent_path()) ensure_dir(out.parent_path());

  ordered_json j;
  j["version"] = version;
  j["dimension"] = dim;
  fs::path csv_path = out;
  csv_path.replace_extension(".csv");

  if (version == 2) {
    auto study = msd::l2cx::run_l2_v2(cfg, lambdas);
    j["b_norm"] = study.b_norm;
    j["C"] = study.C;
    j["C1"] = study.C1;
    j["lambda_bar"] = study.lambda_bar;
    ordered_json rows = ordered_json::array();
    msd::CsvWriter csv(csv_path.string());
    csv.row({"lambda", "first_coord", "closed_form", "norm_sigma", "outside_branch"});
    for (const auto& r : study.rows) {
      ordered_json o;
      o["lambda"] = r.lambda;
      o["first_coord"] = r.first_coord;
      o["closed_form"] = r.closed_form;
      o["norm_sigma"] = r.norm_sigma;
      o["outside_branch"] = r.outside_branch;
      rows.push_back(std::move(o));
      csv.row({msd::fmt_double(r.lambda), msd::fmt_double(r.first_coord),
               msd::fmt_double(r.closed_form), msd::fmt_double(r.norm_sigma),
               r.outside_branch ? "1" : "0"});
    }
    j["rows"] = std::move(rows);
  } else if (version == 1) {
    auto study = msd::l2cx::run_l2_v1(cfg, lambdas);
    j["b_norm"] = study.b_norm;
    j["C"] = study.C;
    j["C1"] = study.C1;
    j["r0"] = cfg.r0;
    ordered_json rows = ordered_json::array();
    msd::CsvWriter csv(csv_path.string());
    csv.row({"lambda", "active_index", "norm_sigma", "in_A2", "untrusted"});
    for (const auto& r : study.rows) {
      ordered_json o;
      o["lambda"] = r.lambda;
      o["active_index"] = r.active_index;
      o["norm_sigma"] = r.norm_sigma;
      o["in_A2"] = r.in_A2;
      o["untrusted"] = r.untrusted;
      rows.push_back(std::move(o));
      csv.row({msd::fmt_double(r.lambda), std::to_string(r.active_index),
               msd::fmt_double(r.norm_sigma), r.in_A2 ? "1" : "0", r.untrusted ? "1" : "0"});
    }
    j["rows"] = std::move(rows);
  } else {
    throw CLI::ValidationError("version", "expected 1 or 2");
  }
  msd::write_text_file(out.string(), j.dump(2) + "\n");

  Manifest man;
  man.command = "run-counterexample l2";
  man.config["version"] = version;
  man.config["dimension"] = dim;
  man.config["lambdas"] = lambda_spec.empty() ? "default" : lambda_spec;
  man.artifacts.push_back(out.filename().string());
  man.artifacts.push_back(csv_path.filename().string());
  man.write(out.has_parent_path() ? out.parent_path() : fs::path("."));
  std::cout << "wrote " << out.string() << "\n";
  return kExitOk;
}

int cmd_check_schedule(const std::string& schedule_str) {
  msd::ScaleSchedule base;
  const msd::ScaleSchedule s = parse_schedule_string(schedule_str, base);
  const msd::ScheduleRegime regime = msd::classify_schedule(s);
  std::cout << msd::to_string(regime) << "\n";
  const auto ratios = msd::evaluate_ratios(s, 64);
  std::cout << "n,2^(beta n)/lambda_n";
  if (!ratios.tight_ratio.empty()) std::cout << ",2^(beta n)/(lambda_n a_n)";
  std::cout << "\n";
  for (int n = 0; n <= 64; n += (n < 8 ? 1 : 8)) {
    std::cout << n << "," << ratios.lambda_ratio[n];
    if (!ratios.tight_ratio.empty()) std::cout << "," << ratios.tight_ratio[n];
    std::cout << "\n";
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical multiscale decomposition experiments"};
  app.require_subcommand(1);
  // config-file entries are spliced in before explicit flags; the last
  // occurrence wins, which realizes flags-over-config precedence
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  int threads = 0;
  std::uint64_t seed = 0;
  app.add_option("--threads", threads, "worker thread cap (0 = hardware)");
  app.add_option("--seed", seed, "seed for randomized inputs");

  // decompose-image
  auto* di = app.add_subcommand("decompose-image", "hierarchical (BV, L2) image decomposition");
  std::string di_input, di_reg = "seminorm", di_out = "out", di_emit = "json,csv,pgm";
  double di_lambda0 = 0.05, di_growth = 2.0, di_tol = 1e-8;
  int di_scales = 12, di_maxiter = 200000;
  di->add_option("--input", di_input, "input image (.pgm or .csv)")->required();
  di->add_option("--lambda0", di_lambda0, "initial scale weight");
  di->add_option("--growth", di_growth, "lambda growth factor");
  di->add_option("--scales", di_scales, "last scale index");
  di->add_option("--reg", di_reg, "seminorm|fullnorm");
  di->add_option("--tol", di_tol, "inner duality-gap tolerance");
  di->add_option("--max-iter", di_maxiter, "inner iteration cap");
  di->add_option("--out-dir", di_out, "output directory");
  di->add_option("--emit", di_emit, "comma set of json,csv,pgm");

  // reconstruct-eit
  auto* re = app.add_subcommand("reconstruct-eit", "multiscale NtD conductivity reconstruction");
  std::string re_phantom, re_schedule, re_metric = "spectral", re_reg = "seminorm",
              re_out = "out";
  int re_mesh = 16, re_currents = 8, re_pg = 60;
  double re_noise = 0.0, re_tol = 1e-9;
  re->add_option("--phantom", re_phantom, "phantom spec (json)")->required();
  re->add_option("--mesh", re_mesh, "cells per side");
  re->add_option("--currents", re_currents, "number of boundary current patterns");
  re->add_option("--noise", re_noise, "noise level eta on the data");
  re->add_option("--schedule", re_schedule, "lambda0=..,growth=..,a0=..,decay=..,scales=..");
  re->add_option("--metric", re_metric, "spectral|hs");
  re->add_option("--reg", re_reg, "seminorm|fullnorm");
  re->add_option("--tol", re_tol, "inner relative-decrease tolerance");
  re->add_option("--pg-iters", re_pg, "projected-gradient iteration cap per scale");
  re->add_option("--out-dir", re_out, "output directory");

  // register-shift
  auto* rs = app.add_subcommand("register-shift", "circle-shift registration toy");
  std::string rs_i0, rs_i1, rs_schedule, rs_out = "out";
  rs->add_option("--i0", rs_i0, "reference signal csv")->required();
  rs->add_option("--i1", rs_i1, "target signal csv")->required();
  rs->add_option("--schedule", rs_schedule, "schedule string");
  rs->add_option("--out-dir", rs_out, "output directory");

  // run-counterexample
  auto* ce = app.add_subcommand("run-counterexample", "appendix counterexample replays");
  ce->require_subcommand(1);
  auto* cep = ce->add_subcommand("planar", "planar rotating counterexample");
  double cep_b = 90.0, cep_c = 9.0, cep_eps = 1.0;
  int cep_steps = 8, cep_nbar = 1, cep_ga = 4096, cep_gr = 4096;
  bool cep_radial = false;
  std::string cep_out = "trace.json";
  cep->add_option("--b", cep_b, "lambda growth base");
  cep->add_option("--c", cep_c, "a_n decay base");
  cep->add_option("--steps", cep_steps, "last scale index");
  cep->add_option("--eps", cep_eps, "inner-branch curvature");
  cep->add_option("--nbar", cep_nbar, "first modified annulus");
  cep->add_flag("--radial", cep_radial, "use the radial profile instead of the full N");
  cep->add_option("--grid-angular", cep_ga, "oracle angular samples");
  cep->add_option("--grid-radial", cep_gr, "oracle radial samples");
  cep->add_option("--out", cep_out, "output json path");

  auto* cel = ce->add_subcommand("l2", "single-step l2 examples");
  int cel_version = 2, cel_dim = 64;
  std::string cel_lambdas, cel_out = "l2.json";
  cel->add_option("--version", cel_version, "1 or 2");
  cel->add_option("--dim", cel_dim, "truncation dimension");
  cel->add_option("--lambdas", cel_lambdas, "a:b:log10 ladder or comma list");
  cel->add_option("--out", cel_out, "output json path");

  // check-schedule
  auto* cs = app.add_subcommand("check-schedule", "classify a parameter schedule");
  std::string cs_spec;
  cs->add_option("spec", cs_spec, "growth=..,a0=..,decay=..,beta=..")->required();

  for (CLI::App* sub : {di, re, rs, cep, cel, cs}) sub->fallthrough();
  ce->fallthrough();

  try {
    std::vector<std::string> args = splice_config_args(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*di)
      return cmd_decompose_image(di_input, di_lambda0, di_growth, di_scales, di_reg, di_tol,
                                 di_maxiter, di_out, di_emit);
    if (*re)
      return cmd_reconstruct_eit(re_phantom, re_mesh, re_currents, re_noise, seed, re_schedule,
                                 re_metric, re_reg, re_tol, re_pg, threads, re_out);
    if (*rs) return cmd_register_shift(rs_i0, rs_i1, rs_schedule, rs_out);
    if (*ce) {
      if (*cep)
        return cmd_counterexample_planar(cep_b, cep_c, cep_steps, cep_eps, cep_nbar, cep_radial,
                                         cep_ga, cep_gr, threads, cep_out);
      if (*cel) return cmd_counterexample_l2(cel_version, cel_dim, cel_lambdas, cel_out);
    }
    if (*cs) return cmd_check_schedule(cs_spec);
  } catch (const CLI::Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PrecisionFailure& e) {
    std::cerr << "precision budget exceeded: " << e.what() << "\n";
    return kExitPrecision;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitConfig;
}
