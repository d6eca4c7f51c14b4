#include "kaczmarz/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "kaczmarz/controls.hpp"
#include "kaczmarz/errors.hpp"
#include "kaczmarz/rng.hpp"

namespace kaczmarz {

Vector reference_solution(const DenseMatrix& a, const Vector& bhat, const Vector& x0) {
  if (bhat.size() != a.rows() || x0.size() != a.cols()) {
    throw InvalidInputError("reference_solution: dimension mismatch");
  }
  const FundamentalProjectors p = fundamental_projectors(a);
  return p.null_space * x0 + min_norm_solution(a, p.column_space * bhat);
}

std::vector<double> error_trace(const IterateTrace& trace, const Vector& xstar) {
  std::vector<double> errors;
  errors.reserve(trace.iterates.size());
  for (const Vector& x : trace.iterates) {
    if (x.size() != xstar.size()) throw InvalidInputError("error_trace: dimension mismatch");
    errors.push_back(norm((x - xstar).span()));
  }
  return errors;
}

WindowPosition window_position(std::size_t k, std::size_t window) {
  if (window == 0) throw InvalidInputError("window length must be positive");
  return {k / window, k % window};
}

// ---------------------------------------------------------------------------
// Rate classification

std::string verdict_name(RateVerdict verdict) {
  switch (verdict) {
    case RateVerdict::kLinear: return "Linear";
    case RateVerdict::kSublinear: return "Sublinear";
    case RateVerdict::kWindowedSublinear: return "WindowedSublinear";
    case RateVerdict::kSuperlinear: return "Superlinear";
    case RateVerdict::kInconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

namespace {

constexpr std::size_t kMinRatios = 6;

constexpr double kSteadyTailSlopeRatio = 0.85;

double mean_log(std::span<const double> ratios) {
  double sum = 0.0;
  for (double r : ratios) sum += std::log(r);
  return sum / static_cast<double>(ratios.size());
}

// Residual sum of squares of the least-squares line through (x_k, y_k).
double line_fit_residual(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  return sxx > 0.0 ? std::max(0.0, syy - sxy * sxy / sxx) : syy;
}

// Lag in [2, N/2] maximizing the normalized autocorrelation of d, the
// smallest one when several lags tie.
std::size_t autocorrelation_period(std::span<const double> d) {
  const std::size_t n = d.size();
  std::size_t best_lag = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t lag = 2; lag <= n / 2; ++lag) {
    double cross = 0.0, head = 0.0, tail = 0.0;
    for (std::size_t k = 0; k + lag < n; ++k) {
      cross += d[k] * d[k + lag];
      head += d[k] * d[k];
      tail += d[k + lag] * d[k + lag];
    }
    if (head == 0.0 || tail == 0.0) continue;
    const double corr = cross / std::sqrt(head * tail);
    if (corr > best + 1e-9) {
      best = corr;
      best_lag = lag;
    }
  }
  return best_lag;
}

// Drops are measured against the largest deficit 1 - Δ_k, so a window
// contraction of 0.9999 is detected as readily as one of 0.1.
bool detect_windowed(std::span<const double> ratios, double tolerance, RateClassification& out) {
  std::vector<double> deficit(ratios.size());
  double largest = 0.0;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    deficit[k] = 1.0 - ratios[k];
    largest = std::max(largest, std::abs(deficit[k]));
  }
  if (!(largest > 1e-14)) return false;

  std::vector<std::size_t> drops;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    if (std::abs(deficit[k]) > tolerance * largest) drops.push_back(k);
  }
  if (drops.size() < 2) return false;

  double mean_deficit = 0.0;
  for (std::size_t k : drops) mean_deficit += deficit[k];
  mean_deficit /= static_cast<double>(drops.size());
  if (!(mean_deficit > 0.0)) return false;
  for (std::size_t k : drops) {
    if (std::abs(deficit[k] - mean_deficit) > tolerance * mean_deficit) return false;
  }

  const std::size_t period = autocorrelation_period(deficit);
  if (period < 2) return false;
  for (std::size_t s = 1; s < drops.size(); ++s) {
    if (drops[s] - drops[s - 1] != period) return false;
  }
  if (drops.front() >= 2 * period) return false;
  if (ratios.size() - 1 - drops.back() >= period) return false;

  out.verdict = RateVerdict::kWindowedSublinear;
  out.rate = 1.0 - mean_deficit;
  out.window = period;
  return true;
}

}  // namespace

double line_fit_slope(std::span<const double> y) {
  const double mx = 0.5 * static_cast<double>(y.size() - 1);
  double my = 0.0;
  for (double v : y) my += v;
  my /= static_cast<double>(y.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    sxx += (k - mx) * (k - mx);
    sxy += (k - mx) * (y[k] - my);
  }
  return sxy / sxx;
}

RateClassification classify_rate(std::span<const double> epsilons, double tolerance,
                                 double relative_floor) {
  if (epsilons.size() < kMinClassifiedLength) {
    throw InvalidInputError("classify_rate needs at least " + std::to_string(kMinClassifiedLength) +
                            " values, got " + std::to_string(epsilons.size()));
  }
  for (double e : epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw InvalidInputError("classify_rate needs finite positive values");
    }
  }
  if (!(tolerance > 0.0 && tolerance < 0.5)) throw InvalidInputError("tolerance must lie in (0, 0.5)");

  const double floor = relative_floor * *std::max_element(epsilons.begin(), epsilons.end());
  std::size_t usable = 0;
  while (usable < epsilons.size() && epsilons[usable] >= floor) ++usable;

  RateClassification out;
  for (std::size_t k = 0; k + 1 < usable; ++k) out.ratios.push_back(epsilons[k + 1] / epsilons[k]);
  if (out.ratios.size() < kMinRatios) {
    // Too short for trend tests; only an exactly geometric collapse is called.
    if (out.ratios.size() >= 2 && usable < epsilons.size()) {
      bool constant = true;
      for (double r : out.ratios) constant &= std::abs(r / out.ratios.front() - 1.0) <= tolerance;
      if (constant && out.ratios.front() < 1.0) {
        out.verdict = RateVerdict::kLinear;
        out.rate = std::exp(mean_log(out.ratios));
      }
    }
    return out;
  }

  if (detect_windowed(out.ratios, tolerance, out)) return out;

  // The last half of the ratios, and the ε values spanning it.
  const std::span<const double> all(out.ratios);
  const std::span<const double> tail = all.subspan(all.size() / 2);
  const double slope = mean_log(tail);

  bool decreasing = tail.back() <= (1.0 - tolerance) * tail.front();
  for (std::size_t k = 1; k < tail.size(); ++k) decreasing &= tail[k] <= tail[k - 1];
  if (decreasing && tail.back() < tolerance) {
    out.verdict = RateVerdict::kSuperlinear;
    return out;
  }

  // log ε against k (geometric decay) versus against log(k + c) (power law,
  // best offset c = 1, 2, 4, ... up to a sixteenth of the length), over
  // everything above the floor.
  std::vector<double> log_eps, steps, log_steps(usable);
  for (std::size_t k = 0; k < usable; ++k) {
    log_eps.push_back(std::log(epsilons[k]));
    steps.push_back(static_cast<double>(k));
  }
  double power_residual = std::numeric_limits<double>::infinity();
  for (double c = 1.0; c <= std::max(1.0, usable / 16.0); c *= 2.0) {
    for (std::size_t k = 0; k < usable; ++k) log_steps[k] = std::log(static_cast<double>(k) + c);
    power_residual = std::min(power_residual, line_fit_residual(log_steps, log_eps));
  }
  // A power law's log-slope keeps shrinking: across the last two quarters it
  // falls to about (5 + 8c/N) / (7 + 8c/N) of its value. A geometric tail
  // keeps it, whatever came before.
  const std::span<const double> logs(log_eps);
  const std::size_t quarter = usable / 4;
  bool steady_tail = false;
  if (quarter >= 4) {
    const double third_slope = line_fit_slope(logs.subspan(usable - 2 * quarter, quarter));
    const double last_slope = line_fit_slope(logs.subspan(usable - quarter));
    steady_tail = third_slope < 0.0 && last_slope <= kSteadyTailSlopeRatio * third_slope;
  }
  if (slope < 0.0 && (steady_tail || line_fit_residual(steps, log_eps) <= power_residual)) {
    out.verdict = RateVerdict::kLinear;
    out.rate = std::exp(slope);
    return out;
  }

  // Decelerating decay, or stagnation with ratios near 1.
  if (slope < 0.0 || std::exp(slope) <= 1.0 + tolerance) {
    out.verdict = RateVerdict::kSublinear;
    out.rate = 1.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bound replay

double BoundReport::constant(const std::string& name) const {
  for (const auto& [key, value] : constants) {
    if (key == name) return value;
  }
  throw InvalidInputError("report has no constant '" + name + "'");
}

namespace {

void require_full_trace(const IterateTrace& trace, const Vector& xstar) {
  if (trace.iterates.size() != trace.iterations + 1) {
    throw ContractError("bound replay needs every iterate; run with record_trace = true");
  }
  if (trace.iterates.front().size() != xstar.size()) {
    throw ContractError("trace and reference solution have different dimensions");
  }
}

double problem_scale(const Vector& xstar, std::span<const double> observed) {
  return std::max({1.0, norm(xstar.span()), observed.empty() ? 0.0 : observed.front()});
}

// Bound sequences are closed-form, so there is no round-off to cut away;
// classify the prefix that stays in the normal range.
RateClassification classify_or_inconclusive(std::span<const double> sequence) {
  constexpr double kSmallest = std::numeric_limits<double>::min() * 0x1p52;
  std::size_t normal = 0;
  while (normal < sequence.size() && sequence[normal] >= kSmallest &&
         std::isfinite(sequence[normal])) {
    ++normal;
  }
  if (normal < kMinClassifiedLength) return {};
  return classify_rate(sequence.first(normal), kDefaultRateTolerance, 0.0);
}

// Measured errors can hit exactly zero; classify the positive prefix with the
// usual noise floor.
RateClassification classify_observed(std::span<const double> errors) {
  std::size_t positive = 0;
  while (positive < errors.size() && errors[positive] > 0.0 && std::isfinite(errors[positive])) {
    ++positive;
  }
  if (positive < kMinClassifiedLength) return {};
  return classify_rate(errors.first(positive));
}

void finalize(BoundReport& report, double absolute_floor) {
  report.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < report.observed.size(); ++k) {
    const double slack =
        report.bound[k] * (1.0 + kBoundRelativeSlack) + absolute_floor - report.observed[k];
    report.worst_slack = std::min(report.worst_slack, slack);
  }
  report.satisfied = report.applicable && report.worst_slack >= 0.0;
}

void mark_inapplicable(BoundReport& report, std::string note) {
  report.applicable = false;
  report.satisfied = false;
  report.note = std::move(note);
}

std::vector<double> squared(std::vector<double> values) {
  for (double& v : values) v *= v;
  return values;
}

}  // namespace

BoundReport check_kt_bound(const IterateTrace& trace, const Vector& xstar,
                           const IterationOperators& operators) {
  require_full_trace(trace, xstar);
  if (operators.q.rows() != xstar.size() || !operators.covers_all_rows ||
      operators.gamma.size() != operators.r.cols()) {
    throw ContractError("operators do not describe a full sweep of this problem");
  }
  for (std::size_t t = 0; t < operators.gamma.size(); ++t) {
    if (operators.gamma[t] != t) throw ContractError("KT operators must use the sweep order 0..m-1");
  }

  BoundReport report;
  report.bound_name = "kt";
  report.observed = error_trace(trace, xstar);
  const double rate = operators.q_tilde_norm;
  const double e0 = report.observed.front();
  for (std::size_t k = 0; k < report.observed.size(); ++k) {
    report.bound.push_back(std::pow(rate, static_cast<double>(k)) * e0);
  }
  report.constants = {{"q_tilde_norm", rate}, {"initial_error", e0}};
  report.classification = classify_or_inconclusive(report.bound);
  finalize(report, kRoundoffFloor * problem_scale(xstar, report.observed));
  return report;
}

BoundReport check_ack_bound(const IterateTrace& trace, const DenseMatrix& a, const Vector& xstar,
                            std::size_t window) {
  require_full_trace(trace, xstar);
  if (window < a.rows()) {
    throw ContractError("window " + std::to_string(window) + " cannot cover " +
                        std::to_string(a.rows()) + " rows");
  }
  if (trace.row_indices.size() != trace.iterations) {
    throw ContractError("trace has no row index history");
  }
  const std::size_t complete = trace.row_indices.size() / window;
  if (complete == 0) throw ContractError("trace is shorter than one window");

  const double delta = realized_window_contraction(
      a, std::span<const std::size_t>(trace.row_indices).first(complete * window), window);

  BoundReport report;
  report.bound_name = "ack";
  report.observed = error_trace(trace, xstar);
  double c = 0.0;
  for (std::size_t q = 0; q < std::min(window, report.observed.size()); ++q) {
    c = std::max(c, report.observed[q]);
  }
  for (std::size_t k = 0; k < report.observed.size(); ++k) {
    const WindowPosition pos = window_position(k, window);
    report.bound.push_back(c * std::pow(delta, static_cast<double>(pos.windows)));
  }
  report.constants = {{"C", c}, {"delta", delta}, {"window", static_cast<double>(window)}};
  report.classification = classify_or_inconclusive(report.bound);
  finalize(report, kRoundoffFloor * problem_scale(xstar, report.observed));
  return report;
}

BoundReport check_mrk_contraction(const IterateTrace& trace, const Vector& xstar) {
  require_full_trace(trace, xstar);
  BoundReport report;
  report.bound_name = "mrk";
  report.observed = error_trace(trace, xstar);
  const double scale = problem_scale(xstar, report.observed);
  const double floor = kRoundoffFloor * scale;

  // bound_k = previous error: monotone non-increase.
  double factor = 0.0;
  report.bound.push_back(report.observed.front());
  for (std::size_t k = 1; k < report.observed.size(); ++k) {
    report.bound.push_back(report.observed[k - 1]);
    if (report.observed[k - 1] > floor) {
      factor = std::max(factor, report.observed[k] / report.observed[k - 1]);
    }
  }
  report.constants = {{"factor", factor}};
  report.classification = classify_observed(report.observed);
  finalize(report, floor);
  if (factor > 1.0 - 1e-12) {
    report.satisfied = false;
    report.note = "no uniform contraction factor below 1";
  }
  return report;
}

BoundReport check_ekt_bound(const IterateTrace& trace, const Vector& xstar,
                            const IterationOperators& row_operators,
                            const IterationOperators& column_operators) {
  require_full_trace(trace, xstar);
  if (!trace.is_extended()) throw ContractError("EKT bound needs an extended trace");
  const Vector& bhat = trace.y_iterates.front();
  if (row_operators.q.rows() != xstar.size() || column_operators.q.rows() != bhat.size() ||
      row_operators.r.cols() != bhat.size()) {
    throw ContractError("operators do not match the trace dimensions");
  }

  BoundReport report;
  report.bound_name = "ekt";
  report.observed = error_trace(trace, xstar);
  const double delta = std::max(row_operators.q_tilde_norm, column_operators.q_tilde_norm);
  const double r_norm = spectral_norm(row_operators.r);
  const double bhat_norm = norm(bhat.span());
  const double e0 = report.observed.front();
  for (std::size_t k = 0; k < report.observed.size(); ++k) {
    const double dk = std::pow(delta, static_cast<double>(k));
    report.bound.push_back(dk * static_cast<double>(k + 1) * r_norm * bhat_norm + dk * e0);
  }
  report.constants = {{"delta", delta},
                      {"q_tilde_norm", row_operators.q_tilde_norm},
                      {"phi_tilde_norm", column_operators.q_tilde_norm},
                      {"r_norm", r_norm},
                      {"bhat_norm", bhat_norm},
                      {"initial_error", e0}};
  report.classification = classify_or_inconclusive(report.bound);
  finalize(report, kRoundoffFloor * problem_scale(xstar, report.observed));
  return report;
}

BoundReport check_mrek_bound(const IterateTrace& trace, const DenseMatrix& a, const Vector& xstar) {
  require_full_trace(trace, xstar);
  if (!trace.is_extended()) throw ContractError("MREK bound needs an extended trace");

  const std::vector<double> row_norms = row_squared_norms(a);
  const double big_m = *std::max_element(row_norms.begin(), row_norms.end());
  const double mu = *std::min_element(row_norms.begin(), row_norms.end());
  const double delta = smallest_nonzero_singular_value(a);
  const double n = static_cast<double>(a.cols());
  const double alpha = 1.0 - delta * delta / (n * big_m);
  const double beta = 1.0 - delta * delta / n;
  const double nu = std::max(alpha, beta);

  const Vector& y0 = trace.y_iterates.front();
  const Vector r = subspace_projector(a, Subspace::kLeftNullSpace) * y0;
  const double y0_gap = norm((y0 - r).span());
  const double c = (1.0 / mu) * (1.0 - 1.0 / n) * y0_gap * y0_gap;

  BoundReport report;
  report.bound_name = "mrek";
  const std::vector<double> errors = error_trace(trace, xstar);
  report.observed = squared(errors);
  const double e0_sq = report.observed.front();
  for (std::size_t k = 0; k < report.observed.size(); ++k) {
    report.bound.push_back(std::pow(nu, static_cast<double>(k)) *
                           (e0_sq + c * static_cast<double>(k)));
  }
  report.constants = {{"alpha", alpha}, {"beta", beta}, {"nu", nu},   {"C", c},
                      {"delta", delta}, {"M", big_m},   {"mu", mu}};
  const double floor = kRoundoffFloor * problem_scale(xstar, errors);
  if (!(alpha >= 0.0 && alpha < 1.0 && beta >= 0.0 && beta < 1.0)) {
    mark_inapplicable(report, "alpha or beta outside [0, 1)");
    finalize(report, floor * floor);
    return report;
  }
  report.classification = classify_or_inconclusive(report.bound);
  finalize(report, floor * floor);
  return report;
}

BoundReport check_acek_bound(const IterateTrace& trace, const DenseMatrix& a, const Vector& xstar,
                             std::size_t window) {
  require_full_trace(trace, xstar);
  if (!trace.is_extended()) throw ContractError("ACEK bound needs an extended trace");
  if (window < a.rows()) {
    throw ContractError("window " + std::to_string(window) + " cannot cover " +
                        std::to_string(a.rows()) + " rows");
  }
  if (trace.row_indices.size() != trace.iterations || trace.y_iterates.size() != trace.iterates.size()) {
    throw ContractError("trace lacks index history or y iterates");
  }
  const std::size_t complete = trace.row_indices.size() / window;
  if (complete == 0) throw ContractError("trace is shorter than one window");

  const double delta = realized_window_contraction(
      a, std::span<const std::size_t>(trace.row_indices).first(complete * window), window);

  // Envelope of the right-hand-side defect: G_q = max over steps l in window q
  // of ‖y^l - r‖ / min_i ‖A_i‖ (which dominates ‖γ_{i_l}‖).
  const std::vector<double> row_norms = row_squared_norms(a);
  const double min_row = std::sqrt(*std::min_element(row_norms.begin(), row_norms.end()));
  const Vector r = subspace_projector(a, Subspace::kLeftNullSpace) * trace.y_iterates.front();
  std::vector<double> window_max;
  for (std::size_t l = 0; l < trace.y_iterates.size(); ++l) {
    const std::size_t q = l / window;
    const double h = norm((trace.y_iterates[l] - r).span()) / min_row;
    if (window_max.size() <= q) window_max.push_back(0.0);
    window_max[q] = std::max(window_max[q], h);
  }
  const double big_m = window_max.front();
  double gamma = 0.0;
  if (big_m > 0.0) {
    for (std::size_t q = 1; q < window_max.size(); ++q) {
      gamma = std::max(gamma, std::pow(window_max[q] / big_m, 1.0 / static_cast<double>(q)));
    }
  }
  const double mu = std::max(delta, gamma);

  BoundReport report;
  report.bound_name = "acek";
  report.observed = error_trace(trace, xstar);
  double alpha = 0.0;
  for (std::size_t j = 0; j < std::min(window, report.observed.size()); ++j) {
    alpha = std::max(alpha, report.observed[j]);
  }
  const double gamma_sq = static_cast<double>(window) * static_cast<double>(window);
  report.constants = {{"delta", delta}, {"gamma", gamma}, {"mu", mu},
                      {"M", big_m},     {"alpha", alpha}, {"window", static_cast<double>(window)}};
  const double floor = kRoundoffFloor * problem_scale(xstar, report.observed);

  if (!(gamma < 1.0) || !(mu > 0.0)) {
    report.bound.assign(report.observed.size(), std::numeric_limits<double>::infinity());
    mark_inapplicable(report, !(gamma < 1.0) ? "y-defect decay is not geometric" : "degenerate mu = 0");
    finalize(report, floor);
    return report;
  }
  for (std::size_t k = 0; k < report.observed.size(); ++k) {
    const double q = static_cast<double>(window_position(k, window).windows);
    report.bound.push_back(std::pow(mu, q) * alpha + gamma_sq * big_m * std::pow(mu, q - 1.0));
  }
  report.classification = classify_or_inconclusive(report.bound);
  finalize(report, floor);
  return report;
}

// ---------------------------------------------------------------------------
// Monte Carlo

MonteCarloEstimate monte_carlo_expected_error(const LeastSquaresProblem& problem,
                                              RandomizedSolver solver, std::size_t trials,
                                              std::size_t k_max, std::uint64_t base_seed,
                                              std::size_t threads) {
  if (trials < 100) throw ContractError("Monte Carlo estimates need at least 100 trials");
  if (k_max == 0) throw ContractError("k_max must be at least 1");

  const std::size_t points = k_max + 1;
  std::vector<double> squared_errors(trials * points);
  const Vector x0(problem.a.cols());

  auto run_trial = [&](std::size_t t) {
    SolverConfig config;
    config.max_iterations = k_max;
    config.record_trace = false;
    config.reference = problem.x_ls;
    const std::uint64_t seed = base_seed + t;
    config.row_control = RandomControl{seed};
    IterateTrace trace;
    if (solver == RandomizedSolver::kRandomKaczmarz) {
      trace = solve_kaczmarz(problem.a, problem.bhat, x0, config);
    } else {
      config.column_control = RandomControl{derive_seed(seed, 1)};
      trace = solve_extended_kaczmarz(problem.a, problem.bhat, x0, config);
    }
    for (std::size_t k = 0; k < points; ++k) {
      squared_errors[t * points + k] = trace.errors[k] * trace.errors[k];
    }
  };

  std::size_t workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < trials; t = next++) run_trial(t);
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  MonteCarloEstimate estimate;
  estimate.trials = trials;
  estimate.mean_squared_error.assign(points, 0.0);
  estimate.standard_error.assign(points, 0.0);
  for (std::size_t k = 0; k < points; ++k) {
    double sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) sum += squared_errors[t * points + k];
    const double mean = sum / static_cast<double>(trials);
    double var = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double d = squared_errors[t * points + k] - mean;
      var += d * d;
    }
    var /= static_cast<double>(trials - 1);
    estimate.mean_squared_error[k] = mean;
    estimate.standard_error[k] = std::sqrt(var / static_cast<double>(trials));
  }
  return estimate;
}

BoundReport check_rk_expectation_bound(const LeastSquaresProblem& problem,
                                       const MonteCarloEstimate& estimate) {
  const SvdResult d = svd(problem.a);
  BoundReport report;
  report.bound_name = "rk";
  report.observed = estimate.mean_squared_error;
  const double xls_sq = squared_norm(problem.x_ls.span());
  const double floor = std::pow(kRoundoffFloor * std::max(1.0, std::sqrt(xls_sq)), 2);
  if (d.numeric_rank != problem.a.cols() || !problem.is_consistent()) {
    report.bound.assign(report.observed.size(), std::numeric_limits<double>::infinity());
    mark_inapplicable(report, "random Kaczmarz rate needs a consistent system of full column rank");
    finalize(report, floor);
    return report;
  }
  const double sigma_min = d.singular_values[d.numeric_rank - 1];
  const double big_m = frobenius_norm(problem.a) / sigma_min;
  const double rate = 1.0 - 1.0 / (big_m * big_m);
  std::vector<double> pure;
  for (std::size_t k = 0; k < report.observed.size(); ++k) {
    pure.push_back(std::pow(rate, static_cast<double>(k)) * xls_sq);
    report.bound.push_back(kExpectationSlack * pure.back());
  }
  report.constants = {{"M", big_m}, {"rate", rate}, {"slack", kExpectationSlack},
                      {"trials", static_cast<double>(estimate.trials)}};
  report.classification = classify_or_inconclusive(pure);
  finalize(report, floor);
  return report;
}

BoundReport check_rek_expectation_bound(const LeastSquaresProblem& problem,
                                        const MonteCarloEstimate& estimate) {
  const SvdResult d = svd(problem.a);
  const double sigma_1 = d.singular_values[0];
  const double sigma_rho = d.singular_values[d.numeric_rank - 1];
  const double k_hat = frobenius_norm(problem.a) / sigma_rho;
  const double kappa = sigma_1 / sigma_rho;
  const double rate = 1.0 - 1.0 / (k_hat * k_hat);
  const double xls_sq = squared_norm(problem.x_ls.span());

  BoundReport report;
  report.bound_name = "rek";
  report.observed = estimate.mean_squared_error;
  std::vector<double> pure;
  for (std::size_t k = 0; k < report.observed.size(); ++k) {
    pure.push_back(std::pow(rate, static_cast<double>(k / 2)) * (1.0 + 2.0 * kappa * kappa) * xls_sq);
    report.bound.push_back(kExpectationSlack * pure.back());
  }
  report.constants = {{"k_hat", k_hat}, {"kappa", kappa}, {"rate", rate},
                      {"slack", kExpectationSlack}, {"trials", static_cast<double>(estimate.trials)}};
  report.classification = classify_or_inconclusive(pure);
  finalize(report, std::pow(kRoundoffFloor * std::max(1.0, std::sqrt(xls_sq)), 2));
  return report;
}

}  // namespace kaczmarz
