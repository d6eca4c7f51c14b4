#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "kaczmarz/analysis.hpp"
#include "kaczmarz/errors.hpp"
#include "kaczmarz/operators.hpp"
#include "kaczmarz/problems.hpp"
#include "kaczmarz/rng.hpp"
#include "kaczmarz/solvers.hpp"

namespace kaczmarz::cli {

namespace {

// Raised for flag combinations CLI11 cannot reject on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kSolvers = {"kt", "kaczmarz", "ekt", "ek"};
const std::vector<std::string> kControls = {"cyclic", "almost-cyclic", "mr", "random"};
const std::vector<std::string> kBounds = {"kt", "ack", "mrk", "ekt", "mrek", "acek", "rk", "rek"};
const std::vector<std::string> kStarts = {"zero", "random"};

struct GenerateArgs {
  std::size_t m = 0;
  std::size_t n = 0;
  std::optional<std::size_t> rank;
  double noise = 0.0;
  double cond = 10.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct RunArgs {
  std::string problem;
  std::string solver;
  std::string control = "cyclic";
  std::string col_control = "cyclic";
  std::optional<std::size_t> gamma;
  std::size_t iters = 0;
  std::uint64_t seed = 0;
  std::string x0 = "zero";
  std::string trace_out;
  // verify only
  std::string bound;
  std::size_t trials = 2000;
  std::string report;
  bool allow_inapplicable = false;
  // whether the flag appeared on the command line
  bool control_given = false;
  bool col_control_given = false;
  bool solver_given = false;
};

ControlKind make_control(const std::string& name, std::size_t window, std::uint64_t seed) {
  if (name == "cyclic") return CyclicControl{};
  if (name == "almost-cyclic") return AlmostCyclicControl{window, seed};
  if (name == "mr") return MaximalResidualControl{};
  return RandomControl{seed};
}

Vector initial_iterate(const RunArgs& args, std::size_t n) {
  Vector x0(n);
  if (args.x0 == "random") {
    SplitMix64 rng(derive_seed(args.seed, 2));
    for (double& e : x0) e = rng.normal();
  }
  return x0;
}

std::size_t thread_cap() {
  const char* raw = std::getenv("KACZMARZ_LAB_THREADS");
  if (!raw || !*raw) return 0;
  std::size_t value = 0;
  const std::string text(raw);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) {
    throw UsageError("KACZMARZ_LAB_THREADS must be a positive integer, got '" + text + "'");
  }
  return value;
}

std::string csv_number(double value) { return format_double(value); }

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const GenerateArgs& args, std::ostream& out) {
  const std::size_t rank = args.rank.value_or(std::min(args.m, args.n));
  const LeastSquaresProblem problem =
      generate_problem(args.m, args.n, rank, args.noise, args.cond, args.seed);
  save_problem(args.out, problem);
  const SvdResult d = svd(problem.a);
  out << "wrote " << args.out << ": " << args.m << "x" << args.n << " rank " << rank
      << ", sigma_max " << csv_number(d.singular_values[0]) << ", sigma_min "
      << csv_number(d.singular_values[d.numeric_rank - 1]) << ", |r| "
      << csv_number(norm(problem.r.span())) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// solve

void check_window(const std::string& control, std::size_t window, std::size_t count,
                  const char* what) {
  if (control == "almost-cyclic" && window < count) {
    throw UsageError("--gamma " + std::to_string(window) + " is shorter than the " +
                     std::to_string(count) + " " + what);
  }
}

IterateTrace run_solver(const LeastSquaresProblem& p, const RunArgs& args, const Vector& x0,
                        std::size_t window) {
  SolverConfig config;
  config.max_iterations = args.iters;
  if (args.solver == "kt") return solve_kt(p.a, p.bhat, x0, config);
  if (args.solver == "ekt") return solve_ekt(p.a, p.bhat, x0, config);
  check_window(args.control, window, p.a.rows(), "rows");
  config.row_control = make_control(args.control, window, args.seed);
  if (args.solver == "kaczmarz") return solve_kaczmarz(p.a, p.bhat, x0, config);
  check_window(args.col_control, window, p.a.cols(), "columns");
  config.column_control = make_control(args.col_control, window, derive_seed(args.seed, 1));
  return solve_extended_kaczmarz(p.a, p.bhat, x0, config);
}

void validate_solver_flags(const RunArgs& args) {
  const bool single = args.solver == "kaczmarz" || args.solver == "ek";
  if (!single && args.control_given) {
    throw UsageError("--control does not apply to solver " + args.solver);
  }
  if (args.solver != "ek" && args.col_control_given) {
    throw UsageError("--col-control only applies to solver ek");
  }
}

std::size_t default_window(const RunArgs& args, const LeastSquaresProblem& p) {
  return args.gamma.value_or(std::max(p.a.rows(), p.a.cols()));
}

int cmd_solve(RunArgs args, std::ostream& out) {
  validate_solver_flags(args);
  const LeastSquaresProblem p = load_problem(args.problem);
  const Vector x0 = initial_iterate(args, p.a.cols());
  const std::size_t window = default_window(args, p);
  const IterateTrace trace = run_solver(p, args, x0, window);

  const Vector xstar = reference_solution(p.a, p.bhat, x0);
  const std::vector<double> errors = error_trace(trace, xstar);
  std::optional<Vector> r;
  if (trace.is_extended()) r = subspace_projector(p.a, Subspace::kLeftNullSpace) * p.bhat;

  if (!args.trace_out.empty()) {
    std::ofstream csv(args.trace_out, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open " + args.trace_out + " for writing");
    csv << "k,row_index,col_index,err,err_sq,y_err\n";
    for (std::size_t k = 0; k < errors.size(); ++k) {
      csv << k << ',';
      if (k > 0 && !trace.row_indices.empty()) csv << trace.row_indices[k - 1] + 1;
      csv << ',';
      if (k > 0 && !trace.column_indices.empty()) csv << trace.column_indices[k - 1] + 1;
      csv << ',' << csv_number(errors[k]) << ',' << csv_number(errors[k] * errors[k]) << ',';
      if (r) csv << csv_number(norm((trace.y_iterates[k] - *r).span()));
      csv << '\n';
    }
    if (!csv) throw std::runtime_error("failed writing " + args.trace_out);
  }
  out << args.solver << ": " << trace.iterations << " iterations, final error "
      << csv_number(errors.back()) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct BoundPlan {
  std::string solver;
  std::vector<std::string> controls;  // admissible --control values; empty: none
};

BoundPlan plan_for(const std::string& bound) {
  if (bound == "kt") return {"kt", {}};
  if (bound == "ekt") return {"ekt", {}};
  if (bound == "ack") return {"kaczmarz", {"almost-cyclic", "cyclic"}};
  if (bound == "mrk") return {"kaczmarz", {"mr"}};
  if (bound == "rk") return {"kaczmarz", {"random"}};
  if (bound == "mrek") return {"ek", {"mr"}};
  if (bound == "acek") return {"ek", {"almost-cyclic", "cyclic"}};
  return {"ek", {"random"}};
}

nlohmann::json report_json(const BoundReport& report, std::size_t iterations) {
  nlohmann::json constants = nlohmann::json::object();
  for (const auto& [name, value] : report.constants) constants[name] = value;
  nlohmann::json j;
  j["bound_name"] = report.bound_name;
  j["satisfied"] = report.satisfied;
  j["applicable"] = report.applicable;
  j["worst_slack"] = report.worst_slack;
  j["constants"] = constants;
  j["classification"] = {{"verdict", verdict_name(report.classification.verdict)},
                         {"mu_or_delta", report.classification.rate},
                         {"window", report.classification.window}};
  j["iterations"] = iterations;
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

BoundReport verify_deterministic(const LeastSquaresProblem& p, RunArgs& args) {
  const Vector x0 = initial_iterate(args, p.a.cols());
  const Vector xstar = reference_solution(p.a, p.bhat, x0);
  const std::size_t m = p.a.rows();
  std::vector<std::size_t> sweep(m);
  std::iota(sweep.begin(), sweep.end(), 0);

  if (args.bound == "ack") {
    const std::size_t window = args.gamma.value_or(m);
    if (window < m) {
      throw UsageError("--gamma " + std::to_string(window) + " is shorter than the " +
                       std::to_string(m) + " rows");
    }
    const IterateTrace trace = run_solver(p, args, x0, window);
    return check_ack_bound(trace, p.a, xstar, window);
  }
  if (args.bound == "acek") {
    const std::size_t window = default_window(args, p);
    const IterateTrace trace = run_solver(p, args, x0, window);
    return check_acek_bound(trace, p.a, xstar, window);
  }
  const IterateTrace trace = run_solver(p, args, x0, default_window(args, p));
  if (args.bound == "kt") return check_kt_bound(trace, xstar, build_row_operators(p.a, sweep));
  if (args.bound == "mrk") return check_mrk_contraction(trace, xstar);
  if (args.bound == "ekt") {
    return check_ekt_bound(trace, xstar, build_row_operators(p.a, sweep),
                           build_column_operators(p.a));
  }
  return check_mrek_bound(trace, p.a, xstar);
}

int cmd_verify(RunArgs args, std::ostream& out) {
  const BoundPlan plan = plan_for(args.bound);
  if (args.solver_given && args.solver != plan.solver) {
    throw UsageError("bound " + args.bound + " needs solver " + plan.solver + ", not " + args.solver);
  }
  args.solver = plan.solver;
  const auto admissible = [&](const std::string& c) {
    return std::find(plan.controls.begin(), plan.controls.end(), c) != plan.controls.end();
  };
  if (plan.controls.empty()) {
    if (args.control_given || args.col_control_given) {
      throw UsageError("bound " + args.bound + " takes no control");
    }
  } else {
    if (!args.control_given) args.control = plan.controls.front();
    if (!admissible(args.control)) {
      throw UsageError("bound " + args.bound + " does not hold under control " + args.control);
    }
    if (plan.solver == "ek") {
      if (!args.col_control_given) args.col_control = plan.controls.front();
      if (!admissible(args.col_control)) {
        throw UsageError("bound " + args.bound + " does not hold under column control " +
                         args.col_control);
      }
    } else if (args.col_control_given) {
      throw UsageError("--col-control only applies to extended solvers");
    }
  }

  const LeastSquaresProblem p = load_problem(args.problem);
  BoundReport report;
  if (args.bound == "rk" || args.bound == "rek") {
    if (args.x0 != "zero") throw UsageError("expectation bounds start from --x0 zero");
    const std::size_t threads = thread_cap();
    const auto solver = args.bound == "rk" ? RandomizedSolver::kRandomKaczmarz
                                           : RandomizedSolver::kRandomExtendedKaczmarz;
    const MonteCarloEstimate estimate =
        monte_carlo_expected_error(p, solver, args.trials, args.iters, args.seed, threads);
    report = args.bound == "rk" ? check_rk_expectation_bound(p, estimate)
                                : check_rek_expectation_bound(p, estimate);
  } else {
    report = verify_deterministic(p, args);
  }

  const std::string text = report_json(report, args.iters).dump(2) + "\n";
  if (args.report.empty()) {
    out << text;
  } else {
    std::ofstream file(args.report, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + args.report + " for writing");
    file << text;
    out << args.bound << ": " << (report.applicable ? (report.satisfied ? "satisfied" : "VIOLATED")
                                                    : "inapplicable")
        << ", worst slack " << csv_number(report.worst_slack) << '\n';
  }
  if (report.satisfied) return kExitOk;
  if (!report.applicable && args.allow_inapplicable) return kExitOk;
  return kExitViolated;
}

void add_run_flags(CLI::App& cmd, RunArgs& args, std::size_t default_iters) {
  args.iters = default_iters;
  cmd.add_option("--problem", args.problem, "problem file (.kzp)")->required();
  cmd.add_option("--control", args.control, "row control")->check(CLI::IsMember(kControls));
  cmd.add_option("--col-control", args.col_control, "column control (ek only)")
      ->check(CLI::IsMember(kControls));
  cmd.add_option("--gamma", args.gamma, "almost-cyclic window length")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--iters", args.iters, "iteration count")->check(CLI::PositiveNumber);
  cmd.add_option("--seed", args.seed, "seed for random and almost-cyclic controls");
  cmd.add_option("--x0", args.x0, "initial iterate")->check(CLI::IsMember(kStarts));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kaczmarz-type solvers and their convergence bounds", "kaczmarz_lab"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "write a random test problem");
  generate->add_option("--m", gen.m, "rows")->required()->check(CLI::PositiveNumber);
  generate->add_option("--n", gen.n, "columns")->required()->check(CLI::PositiveNumber);
  generate->add_option("--rank", gen.rank, "rank (default min(m, n))")->check(CLI::PositiveNumber);
  generate->add_option("--noise", gen.noise, "|r| / |b|")->check(CLI::NonNegativeNumber);
  generate->add_option("--cond", gen.cond, "condition number sigma_1 / sigma_rank");
  generate->add_option("--seed", gen.seed, "seed");
  generate->add_option("--out", gen.out, "output path")->required();

  RunArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "run a solver and write its error trace");
  add_run_flags(*solve, solve_args, 100);
  solve->add_option("--solver", solve_args.solver, "kt | kaczmarz | ekt | ek")
      ->required()
      ->check(CLI::IsMember(kSolvers));
  solve->add_option("--trace-out", solve_args.trace_out, "CSV trace path");

  RunArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "replay a convergence bound");
  add_run_flags(*verify, verify_args, 200);
  verify->add_option("--bound", verify_args.bound, "kt | ack | mrk | ekt | mrek | acek | rk | rek")
      ->required()
      ->check(CLI::IsMember(kBounds));
  verify->add_option("--solver", verify_args.solver, "must match the bound")
      ->check(CLI::IsMember(kSolvers));
  verify->add_option("--trials", verify_args.trials, "Monte Carlo trials (rk, rek)")
      ->check(CLI::Range(std::size_t{100}, std::size_t{10'000'000}));
  verify->add_option("--report", verify_args.report, "JSON report path (default stdout)");
  verify->add_flag("--allow-inapplicable", verify_args.allow_inapplicable,
                   "exit 0 when the bound's hypotheses fail");

  std::vector<const char*> argv{"kaczmarz_lab"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  const auto mark = [](CLI::App* cmd, RunArgs& a) {
    a.control_given = cmd->count("--control") > 0;
    a.col_control_given = cmd->count("--col-control") > 0;
    a.solver_given = cmd->count("--solver") > 0;
  };

  try {
    if (generate->parsed()) return cmd_generate(gen, out);
    if (solve->parsed()) {
      mark(solve, solve_args);
      return cmd_solve(solve_args, out);
    }
    mark(verify, verify_args);
    return cmd_verify(verify_args, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    err << "bad problem file: " << e.what() << '\n';
  } catch (const InvalidInputError& e) {
    err << "invalid input: " << e.what() << '\n';
  } catch (const ContractError& e) {
    err << "contract error: " << e.what() << '\n';
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace kaczmarz::cli
