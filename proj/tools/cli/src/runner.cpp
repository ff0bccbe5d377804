#include "kolmo_cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "kolmo/error.hpp"
#include "kolmo/fpk.hpp"
#include "kolmo/meanfield.hpp"
#include "kolmo/oscillation.hpp"
#include "kolmo/poisson.hpp"
#include "kolmo/stability.hpp"
#include "kolmo_cli/output.hpp"

namespace kolmo::cli {

namespace fs = std::filesystem;

bool RunReport::checks_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

Json RunReport::to_json() const {
  Json j;
  j["command"] = command;
  j["tool_version"] = version;
  j["config_digest"] = config_digest;
  j["exit_code"] = exit_code;
  Json stage_list = Json::array();
  for (const auto& s : stages) stage_list.push_back({{"stage", s.name}, {"wall_seconds", s.seconds}});
  j["stages"] = stage_list;
  j["manifest"] = manifest;
  Json check_list = Json::array();
  for (const auto& c : checks) check_list.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = check_list;
  j["summary"] = summary;
  if (!error_kind.empty()) j["error"] = {{"kind", error_kind}, {"message", error_message}};
  return j;
}

namespace {

using Clock = std::chrono::steady_clock;

class Context {
 public:
  Context(const ExperimentConfig& cfg, const RunOptions& opt, RunReport& report)
      : cfg(cfg), opt(opt), report(report) {}

  template <class F>
  auto stage(const std::string& name, F&& f) {
    const auto t0 = Clock::now();
    struct Record {
      Context* self;
      std::string name;
      Clock::time_point t0;
      ~Record() {
        self->report.stages.push_back(
            {name, std::chrono::duration<double>(Clock::now() - t0).count()});
      }
    } record{this, name, t0};
    return f();
  }

  fs::path file(const std::string& name) {
    report.manifest.push_back(name);
    return opt.out / name;
  }
  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows) {
    write_csv(opt.out / name, header, rows);
    report.manifest.push_back(name);
  }
  void json(const std::string& name, const Json& j) {
    write_text(opt.out / name, j.dump(2) + "\n");
    report.manifest.push_back(name);
  }
  bool plots() const { return cfg.tree.contains("output") ? cfg.tree.at("output").value("plots", true) : true; }
  void check(const std::string& name, bool pass, const std::string& detail) {
    report.checks.push_back({name, pass, detail});
  }
  fpk::SolveOptions solve_options() const {
    fpk::SolveOptions s;
    s.strict = opt.strict || cfg.strict();
    return s;
  }

  const ExperimentConfig& cfg;
  const RunOptions& opt;
  RunReport& report;
};

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::vector<double> numbers(const Json& run, const std::string& key, std::vector<double> fallback) {
  return run.contains(key) ? run.at(key).get<std::vector<double>>() : fallback;
}

std::vector<std::string> coordinate_header(int d) {
  return d == 1 ? std::vector<std::string>{"x"} : std::vector<std::string>{"x1", "x2"};
}

std::vector<double> coordinates(const Point& x, int d) {
  return d == 1 ? std::vector<double>{x[0]} : std::vector<double>{x[0], x[1]};
}

// ---------------------------------------------------------------- dini

void run_dini(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const ScalarField f = cfg.field();
  const auto radii = numbers(cfg.run(), "radii", coeffs::log_spaced(1e-3, 0.5, 16));
  const double t0 = cfg.run_number("t0", 0.5);
  const coeffs::SamplingSpec sampling = cfg.sampling();
  coeffs::OscillationModulus m = ctx.stage("oscillation", [&] {
    return coeffs::dini_mean_oscillation(f, radii, sampling, t0);
  });
  m.dini = ctx.stage("dini-integral", [&] { return coeffs::dini_integral(m); });

  std::vector<std::vector<double>> rows;
  bool nonneg = true;
  for (std::size_t i = 0; i < m.radii.size(); ++i) {
    rows.push_back({m.radii[i], m.omega[i], m.stderr_estimate[i]});
    nonneg = nonneg && m.omega[i] >= 0.0;
  }
  ctx.csv("omega.csv", {"r", "omega", "stderr"}, rows);
  Json verdict{{"field", f.description()},
               {"smoothness", f.smoothness().to_string()},
               {"t0", t0},
               {"seed", sampling.seed},
               {"box", {sampling.box.lo, sampling.box.hi}},
               {"centers", sampling.centers},
               {"points_per_ball", sampling.points_per_ball},
               {"value", number_or_null(m.dini->value)},
               {"finite", m.dini->finite},
               {"tail_model", coeffs::to_string(m.dini->tail_model)},
               {"exponent", m.dini->exponent},
               {"tail", number_or_null(m.dini->tail)},
               {"body", m.dini->body},
               {"search_region", "sampled box only; no global supremum is claimed"}};
  ctx.json("dini.json", verdict);
  ctx.report.summary = {{"finite", m.dini->finite}, {"value", number_or_null(m.dini->value)}};
  ctx.check("omega-nonnegative", nonneg, "omega(r) >= 0 at every sampled radius");
  if (ctx.plots()) {
    write_line_svg(ctx.file("omega.svg"), "mean oscillation", {{"omega", m.radii, m.omega}}, true, true);
  }
}

// ---------------------------------------------------------------- solve

fpk::GridDensity solve_density(Context& ctx, const DiffusionMatrixField& a, const DriftField& b,
                               const fpk::GridSpec& grid, bool exact) {
  return ctx.stage("solve", [&] {
    if (exact) return fpk::solve_exact_1d(a.entry(0, 0), b, grid, {}, ctx.solve_options());
    return fpk::solve_grid(a, b, grid, ctx.solve_options());
  });
}

void run_solve(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const fpk::GridSpec grid = cfg.grid();
  const auto a = cfg.diffusion();
  const auto b = cfg.drift();
  const std::string method = cfg.run().value("method", std::string("grid"));
  if (method == "exact" && grid.dimension() != 1) {
    throw ValidationError("run.method", "the exact solver is one-dimensional");
  }
  const bool exact = method == "exact";
  const fpk::GridDensity rho = solve_density(ctx, a, b, grid, exact);
  const int d = grid.dimension();

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    auto row = coordinates(rho.center(i), d);
    row.push_back(rho[i]);
    rows.push_back(std::move(row));
  }
  auto header = coordinate_header(d);
  header.push_back("rho");
  ctx.csv("density.csv", header, rows);

  Json moments = Json::object();
  for (double k : numbers(cfg.run(), "moments", {1.0, 2.0, 4.0})) moments[format_number(k)] = fpk::moment(rho, k);
  const auto& diag = rho.diagnostics();
  Json report{{"method", diag.method},
              {"grid", {{"dimension", d}, {"radius", grid.radius()}, {"cells", grid.cells()}}},
              {"mass", rho.mass()},
              {"moments", moments},
              {"boundary_mass_fraction", diag.boundary_mass_fraction},
              {"residual", diag.residual},
              {"residual_history", diag.residual_history},
              {"clipped_mass", diag.clipped_mass}};
  const double hr = cfg.run_number("harnack_radius", 1.0);
  try {
    report["harnack_ratio"] = {{"radius", hr}, {"ratio", fpk::harnack_ratio(rho, hr)}};
  } catch (const DegenerateDensityError& e) {
    report["harnack_ratio"] = {{"radius", hr}, {"ratio", nullptr}, {"error", e.what()}};
  }
  if (cfg.run_flag("refine", false) && !exact) {
    const auto fine = ctx.stage("refined-solve", [&] { return fpk::solve_grid(a, b, grid.refined(), ctx.solve_options()); });
    report["discretization_error"] = fpk::discretization_error(rho, fine);
  }
  ctx.json("solve.json", report);
  ctx.report.summary = {{"mass", rho.mass()}, {"boundary_mass_fraction", diag.boundary_mass_fraction}};
  ctx.check("mass-one", std::abs(rho.mass() - 1.0) <= 1e-8, "total mass equals 1 within 1e-8");
  ctx.check("boundary-mass", diag.boundary_mass_fraction < fpk::kBoundaryMassLimit,
            "boundary cells hold less than 1e-4 of the mass");
  ctx.check("clipped-mass", diag.clipped_mass <= fpk::kClippedMassLimit,
            "negative values clipped hold at most 1e-6 of the mass");
  if (ctx.plots()) {
    if (d == 1) {
      std::vector<double> xs;
      for (std::size_t i = 0; i < rho.size(); ++i) xs.push_back(rho.center(i)[0]);
      write_line_svg(ctx.file("density.svg"), "stationary density", {{"rho", xs, rho.values()}}, false, false);
    } else {
      write_heat_svg(ctx.file("density.svg"), "stationary density", grid.cells(), rho.values());
    }
  }
}

// ---------------------------------------------------------------- poisson

void run_poisson(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const fpk::GridSpec grid = cfg.grid();
  const int d = grid.dimension();
  const auto a = cfg.diffusion();
  const auto b = cfg.drift();
  const std::string method = cfg.run().value("method", std::string(d == 1 ? "quadrature" : "grid"));
  if (method != "grid" && d != 1) throw ValidationError("run.method", "the quadrature solver is one-dimensional");
  const bool quadrature = method != "grid";
  const fpk::GridDensity rho = solve_density(ctx, a, b, grid, quadrature);

  std::optional<double> s;
  if (cfg.run().contains("s")) s = cfg.run_number("s", 0.0);
  const poisson::PoissonProblem prob{.a = a,
                                     .b = b,
                                     .psi = cfg.psi(),
                                     .rho = rho,
                                     .k = cfg.run_number("k", 1.0),
                                     .p = cfg.run_number("p", 0.0),
                                     .s = s,
                                     .center = true,
                                     .normalization_radius = 0.0};
  const poisson::PoissonSolution sol = ctx.stage("poisson", [&] {
    return quadrature ? poisson::solve_poisson_1d(prob) : poisson::solve_poisson_grid(prob);
  });
  const auto radii = numbers(cfg.run(), "radii", {grid.radius() / 2, grid.radius()});
  const poisson::BoundReport bounds = poisson::verify_growth_bounds(sol, prob, radii);

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < sol.u.size(); ++i) {
    auto row = coordinates(grid.center(i), d);
    row.push_back(sol.u[i]);
    row.push_back(sol.du[i][0]);
    if (d == 2) row.push_back(sol.du[i][1]);
    row.push_back(sol.residual[i]);
    rows.push_back(std::move(row));
  }
  auto header = coordinate_header(d);
  header.push_back("u");
  if (d == 1) {
    header.push_back("du");
  } else {
    header.push_back("du1");
    header.push_back("du2");
  }
  header.push_back("residual");
  ctx.csv("poisson.csv", header, rows);

  Json per_radius = Json::array();
  for (const auto& q : bounds.per_radius) {
    per_radius.push_back({{"radius", q.radius}, {"G0", q.g0}, {"G1", q.g1}, {"H", q.h_integral},
                          {"Psi", q.psi_bound}, {"G0_over_Psi", q.q0}, {"G1_over_Psi", q.q1},
                          {"H_over_Psi", q.qh}});
  }
  Json j{{"method", sol.method},
         {"k", prob.k},
         {"p", sol.p},
         {"s", sol.s},
         {"G0", bounds.g0},
         {"G1", bounds.g1},
         {"H", bounds.h_integral},
         {"Psi", bounds.psi_bound},
         {"G0_over_Psi", bounds.q0},
         {"G1_over_Psi", bounds.q1},
         {"H_over_Psi", bounds.qh},
         {"quotients", per_radius},
         {"psi_mean", sol.psi_mean},
         {"projection", sol.projection},
         {"max_interior_residual", sol.max_interior_residual},
         {"normalization_radius", sol.normalization_radius}};
  if (sol.lyapunov) {
    j["M0"] = sol.lyapunov->m0;
    j["R0"] = sol.lyapunov->r0;
  }
  ctx.json("poisson.json", j);
  ctx.report.summary = {{"G0_over_Psi", bounds.q0}, {"G1_over_Psi", bounds.q1}, {"H_over_Psi", bounds.qh}};
  const bool finite = std::isfinite(bounds.g0) && std::isfinite(bounds.g1) && std::isfinite(bounds.h_integral);
  ctx.check("bounds-finite", finite, "G0, G1 and H are finite");
  if (ctx.plots() && d == 1) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < sol.u.size(); ++i) xs.push_back(grid.center(i)[0]);
    write_line_svg(ctx.file("poisson.svg"), "Poisson solution u", {{"u", xs, sol.u}}, false, false);
  }
}

// ---------------------------------------------------------------- stability

stability::PairFamily pair_family(const ExperimentConfig& cfg) {
  const int d = cfg.dimension();
  if (cfg.model().contains("family")) {
    const std::string name = cfg.model().at("family").get<std::string>();
    return name == "ou-drift" ? stability::ou_drift_family(d) : stability::ou_diffusion_family(d);
  }
  return [&cfg](double delta) {
    const ParameterMap mu{{"delta", delta}};
    const ParameterMap sigma{{"delta", 0.0}};
    return stability::CoefficientPair{cfg.diffusion(mu), cfg.drift(mu), cfg.diffusion(sigma), cfg.drift(sigma)};
  };
}

void run_stability(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const fpk::GridSpec grid = cfg.grid();
  const auto deltas = numbers(cfg.run(), "deltas", {1e-3, 3e-3, 1e-2, 3e-2, 1e-1});
  stability::SweepOptions options;
  options.r = cfg.run_number("r", 2.0);
  options.k = cfg.run_number("k", 1.0);
  options.solve = ctx.solve_options();
  const auto result = ctx.stage("sweep", [&] {
    return stability::stability_sweep(pair_family(cfg), deltas, grid, options);
  });
  std::vector<std::vector<double>> rows;
  std::vector<double> xs, lhs, rhs;
  bool nonneg = true;
  for (const auto& r : result.reports) {
    rows.push_back({r.delta, r.lhs, r.rhs_diffusion, r.rhs_drift, r.c_hat});
    xs.push_back(r.delta);
    lhs.push_back(r.lhs);
    rhs.push_back(r.rhs_diffusion + r.rhs_drift);
    nonneg = nonneg && r.lhs >= 0 && r.rhs_diffusion >= 0 && r.rhs_drift >= 0;
  }
  ctx.csv("stability.csv", {"delta", "lhs", "rhs_diffusion", "rhs_drift", "c_hat"}, rows);
  Json j{{"k", options.k},
         {"r", options.r},
         {"r_conjugate", options.r / (options.r - 1.0)},
         {"slope", result.slope},
         {"fit_residual", result.fit_residual},
         {"fitted_points", result.fitted_points},
         {"c_hat_max", result.c_hat_max},
         {"c_hat_min", result.c_hat_min},
         {"c_hat_kind", "empirical ratio, not a proven bound"},
         {"matrix_norm", "frobenius"}};
  ctx.json("stability.json", j);
  ctx.report.summary = {{"slope", result.slope}, {"c_hat_max", result.c_hat_max}, {"c_hat_min", result.c_hat_min}};
  for (const auto& r : result.reports) {
    ctx.report.summary["reports"].push_back({{"delta", r.delta}, {"lhs", r.lhs}, {"c_hat", r.c_hat}});
  }
  ctx.check("reports-nonnegative", nonneg, "every LHS and RHS term is >= 0");
  if (ctx.plots()) {
    write_line_svg(ctx.file("stability.svg"), "weighted L1 gap against delta",
                   {{"lhs", xs, lhs}, {"rhs", xs, rhs}}, true, true);
  }
}

// ---------------------------------------------------------------- meanfield

meanfield::MeanFieldModel meanfield_model(const ExperimentConfig& cfg) {
  const Json& k = cfg.model().at("kernel");
  meanfield::MeanFieldModel m{.a0 = cfg.diffusion(),
                              .b0 = cfg.drift(),
                              .kernel = cfg.kernel(),
                              .epsilon = cfg.run_number("epsilon", 0.05),
                              .lipschitz_n = k.value("lipschitz_n", 1.0),
                              .lipschitz_m = k.value("lipschitz_m", 0.0),
                              .k = cfg.run_number("k", 1.0),
                              .grid = cfg.grid(),
                              .exact_1d = true,
                              .solve = {}};
  m.exact_1d = cfg.run().value("method", std::string("exact")) != "grid";
  return m;
}

void run_meanfield(Context& ctx) {
  const auto& cfg = ctx.cfg;
  meanfield::MeanFieldModel model = meanfield_model(cfg);
  model.solve = ctx.solve_options();
  const fpk::GridSpec grid = model.grid;
  ctx.stage("kernel-validation", [&] { model.kernel.validate(Box{grid.dimension(), -grid.radius(), grid.radius()}); return 0; });
  const double tol = cfg.run_number("tolerance", 1e-10);
  const int max_iter = static_cast<int>(cfg.run_number("max_iter", 50));
  const auto means = numbers(cfg.run(), "start_means", {-0.5, 0.5});
  const auto starts = meanfield::gaussian_probe_family(grid, means, {1.0});

  std::vector<meanfield::FixedPointTrace> traces;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    traces.push_back(ctx.stage("iterate", [&] { return meanfield::iterate(model, starts[s], tol, max_iter); }));
    std::vector<std::vector<double>> rows;
    const auto& t = traces.back();
    for (std::size_t i = 0; i < t.gaps.size(); ++i) {
      rows.push_back({static_cast<double>(i + 1), t.gaps[i], i == 0 ? std::nan("") : t.factors[i - 1]});
    }
    ctx.csv(s == 0 ? "meanfield.csv" : "meanfield_start_" + std::to_string(s) + ".csv",
            {"iteration", "gap", "contraction_factor"}, rows);
  }
  double diameter = 0.0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    for (std::size_t j = i + 1; j < traces.size(); ++j) {
      diameter = std::max(diameter, meanfield::pk_distance(traces[i].iterates.back(), traces[j].iterates.back(), model.k));
    }
  }
  const auto probes = meanfield::gaussian_probe_pairs(grid);
  const auto estimate = ctx.stage("contraction", [&] { return meanfield::contraction_estimate(model, probes); });
  const auto lipschitz = ctx.stage("lipschitz", [&] { return meanfield::lipschitz_check(model, probes); });
  Json threshold = nullptr;
  if (cfg.run_flag("threshold", grid.dimension() == 1)) {
    const auto t = ctx.stage("threshold", [&] { return meanfield::empirical_threshold(model, probes); });
    threshold = {{"reached", t.reached}, {"epsilon", t.epsilon}, {"factor_at_max", t.factor_at_max}};
  }
  bool converged = true;
  Json runs = Json::array();
  for (std::size_t s = 0; s < traces.size(); ++s) {
    converged = converged && traces[s].converged;
    runs.push_back({{"start_mean", means[s % means.size()]},
                    {"converged", traces[s].converged},
                    {"iterations", traces[s].gaps.size()},
                    {"final_gap", traces[s].gaps.empty() ? 0.0 : traces[s].gaps.back()}});
  }
  Json j{{"epsilon", model.epsilon},
         {"converged", converged},
         {"iterations", traces.empty() ? 0 : traces.front().gaps.size()},
         {"starts", runs},
         {"tolerance", tol},
         {"fixed_point_diameter", diameter},
         {"contraction_factor", estimate.factor},
         {"pair_factors", estimate.pair_factors},
         {"M_hat", estimate.moment_bound},
         {"C_hat", estimate.c_hat},
         {"bound_form", estimate.bound_form},
         {"lipschitz_ratio", lipschitz.max_ratio},
         {"lipschitz_bound", lipschitz.bound},
         {"empirical_epsilon_threshold", threshold}};
  ctx.json("meanfield.json", j);
  ctx.report.summary = {{"converged", converged}, {"contraction_factor", estimate.factor},
                        {"epsilon", model.epsilon}, {"M_hat", estimate.moment_bound}};
  ctx.check("converged", converged, "every start reached the gap tolerance");
  if (traces.size() > 1) {
    ctx.check("unique-fixed-point", diameter <= 10.0 * tol, "fixed points from all starts within 10 tol");
  }
  ctx.check("lipschitz", lipschitz.holds, "coefficient gaps within eps N (1 + |x|^m) dist");
  if (ctx.plots() && !traces.empty()) {
    std::vector<double> it;
    for (std::size_t i = 0; i < traces.front().gaps.size(); ++i) it.push_back(static_cast<double>(i + 1));
    write_line_svg(ctx.file("meanfield.svg"), "Picard gaps", {{"gap", it, traces.front().gaps}}, false, true);
  }
}

void dispatch(Context& ctx, const std::string& command) {
  if (command == "dini") return run_dini(ctx);
  if (command == "solve") return run_solve(ctx);
  if (command == "poisson") return run_poisson(ctx);
  if (command == "stability") return run_stability(ctx);
  if (command == "meanfield") return run_meanfield(ctx);
  throw ValidationError("command", "unknown command '" + command + "'");
}

void apply_seed(ExperimentConfig& config, const RunOptions& options) {
  if (options.seed) config.tree["run"]["seed"] = *options.seed;
}

void finish(RunReport& report, const RunOptions& options) {
  write_text(options.out / "run_report.json", report.to_json().dump(2) + "\n");
}

RunReport run_into(const ExperimentConfig& config, const RunOptions& options, const std::string& command) {
  RunReport report;
  report.command = command;
  report.config_digest = digest(config.tree);
  fs::create_directories(options.out);
  Context ctx(config, options, report);
  try {
    dispatch(ctx, command);
    report.exit_code = report.checks_pass() ? kExitOk : kExitCheckFailed;
  } catch (const ValidationError& e) {
    report.exit_code = kExitValidation;
    report.error_kind = "validation";
    report.error_message = e.what();
  } catch (const Error& e) {
    report.exit_code = kExitNumerical;
    report.error_kind = e.kind();
    report.error_message = e.what();
  }
  return report;
}

}  // namespace

RunReport run(ExperimentConfig config, const RunOptions& options) {
  apply_seed(config, options);
  RunReport report = run_into(config, options, config.command);
  finish(report, options);
  return report;
}

RunReport sweep(ExperimentConfig config, const RunOptions& options) {
  apply_seed(config, options);
  const Json& sw = config.tree.at("sweep");
  const std::string target = sw.at("target").get<std::string>();
  const std::string axis = sw.at("axis").get<std::string>();
  const auto values = sw.at("values").get<std::vector<double>>();
  const bool strict = options.strict || config.strict() || !sw.value("lenient", true);

  RunReport report;
  report.command = "sweep";
  report.config_digest = digest(config.tree);
  fs::create_directories(options.out);

  std::vector<RunReport> points(values.size());
  std::vector<std::string> invalid(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      Json tree = config.tree;
      tree.erase("sweep");
      tree["command"] = target;
      if (axis == "delta") {
        tree["run"]["deltas"] = Json::array({values[i]});
      } else if (axis == "epsilon") {
        tree["run"]["epsilon"] = values[i];
      } else {
        tree["model"]["params"][axis] = values[i];
      }
      RunOptions point = options;
      point.out = options.out / ("point_" + std::to_string(i));
      point.strict = strict;
      try {
        ExperimentConfig cfg = ExperimentConfig::parse(tree.dump(), target);
        points[i] = run_into(cfg, point, target);
      } catch (const ValidationError& e) {
        fs::create_directories(point.out);
        points[i].command = target;
        points[i].exit_code = kExitValidation;
        points[i].error_kind = "validation";
        points[i].error_message = e.what();
      }
      finish(points[i], point);
    }
  };
  const auto t0 = Clock::now();
  const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(values.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  report.stages.push_back({"points", std::chrono::duration<double>(Clock::now() - t0).count()});

  Json summary{{"target", target}, {"axis", axis}, {"values", values}};
  Json list = Json::array();
  Json failures = Json::array();
  int worst = kExitOk;
  std::vector<double> fx, fy;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const RunReport& p = points[i];
    const std::string dir = "point_" + std::to_string(i);
    for (const auto& f : p.manifest) report.manifest.push_back(dir + "/" + f);
    report.manifest.push_back(dir + "/run_report.json");
    Json entry{{"index", i}, {"value", values[i]}, {"exit_code", p.exit_code}, {"summary", p.summary}};
    if (p.exit_code != kExitOk) {
      entry["error"] = p.error_kind.empty() ? "checks failed" : p.error_kind + ": " + p.error_message;
      failures.push_back({{"index", i}, {"value", values[i]}, {"error", entry["error"]}});
      worst = std::max(worst, p.exit_code);
    }
    list.push_back(entry);
    if (p.exit_code == kExitOk || p.exit_code == kExitCheckFailed) {
      if (target == "stability" && axis == "delta" && p.summary.contains("reports") &&
          !p.summary["reports"].empty()) {
        const double lhs = p.summary["reports"][0]["lhs"].get<double>();
        if (values[i] > 0 && lhs > 0) {
          fx.push_back(std::log(values[i]));
          fy.push_back(std::log(lhs));
        }
      }
      if (target == "meanfield" && axis == "epsilon") {
        fx.push_back(values[i]);
        fy.push_back(p.summary.value("contraction_factor", 0.0));
      }
    }
  }
  summary["points"] = list;
  summary["failures"] = failures;
  if (target == "stability" && axis == "delta") {
    const auto fit = stability::least_squares(fx, fy);
    summary["slope"] = fx.size() >= 2 ? Json(fit.slope) : Json(nullptr);
    summary["fit_residual"] = fit.rms_residual;
  }
  if (target == "meanfield" && axis == "epsilon") {
    const auto fit = stability::least_squares(fx, fy);
    summary["factor_slope"] = fit.slope;
    summary["factor_r_squared"] = fit.r_squared;
  }
  write_text(options.out / "summary.json", summary.dump(2) + "\n");
  report.manifest.push_back("summary.json");
  report.summary = {{"points", values.size()}, {"failures", failures.size()}};
  report.checks.push_back({"points-succeeded", failures.empty(),
                           std::to_string(failures.size()) + " of " + std::to_string(values.size()) + " points failed"});
  if (strict) {
    report.exit_code = worst;
  } else {
    report.exit_code = kExitOk;
    report.checks.back().pass = true;  // lenient sweeps enumerate failures without failing
  }
  finish(report, options);
  return report;
}

}  // namespace kolmo::cli
