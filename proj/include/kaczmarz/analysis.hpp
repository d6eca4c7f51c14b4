#pragma once

// Error traces, rate classification and replay of the proved convergence
// bounds for every solver family.
//
// Each check_* function replays a recorded trace against a closed-form bound
// sequence ε_k and returns a BoundReport. A report is satisfied when
//
//   observed_k ≤ bound_k · (1 + kBoundRelativeSlack) + round-off floor
//
// holds at every recorded k. The round-off floor is kRoundoffFloor times the
// problem scale max(1, ‖x*‖, observed_0) (squared for squared-error bounds),
// so errors sitting at machine precision never count as violations.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kaczmarz/linalg.hpp"
#include "kaczmarz/operators.hpp"
#include "kaczmarz/problems.hpp"
#include "kaczmarz/solvers.hpp"

namespace kaczmarz {

/// x* = P_N(A)(x0) + A⁺·P_R(A)(b̂): the (least-squares) solution the iterates
/// converge to from x0.
Vector reference_solution(const DenseMatrix& a, const Vector& bhat, const Vector& x0);

/// ‖x^k - x*‖ for every stored iterate.
std::vector<double> error_trace(const IterateTrace& trace, const Vector& xstar);

/// k = Γ·windows + offset with offset ∈ [0, Γ).
struct WindowPosition {
  std::size_t windows;
  std::size_t offset;
};

WindowPosition window_position(std::size_t k, std::size_t window);

// ---------------------------------------------------------------------------
// Rate classification

enum class RateVerdict { kLinear, kSublinear, kWindowedSublinear, kSuperlinear, kInconclusive };

std::string verdict_name(RateVerdict verdict);

struct RateClassification {
  RateVerdict verdict = RateVerdict::kInconclusive;
  /// μ for Linear, δ for WindowedSublinear, 1 for Sublinear, else 0.
  double rate = 0.0;
  /// Period of the ratio drops for WindowedSublinear, else 0.
  std::size_t window = 0;
  /// Δ_k = ε_{k+1}/ε_k over the part of the sequence above the noise floor.
  std::vector<double> ratios;
};

inline constexpr double kDefaultRateTolerance = 5e-2;
/// Entries below this fraction of max ε are treated as round-off and cut off.
inline constexpr double kRatioNoiseFloor = 1e-12;
inline constexpr std::size_t kMinClassifiedLength = 20;
/// Classifies the ratio sequence Δ_k = ε_{k+1}/ε_k of ε (all entries > 0,
/// length ≥ 20), after cutting ε at the first entry below the noise floor:
///
/// - WindowedSublinear(δ, p): with d_k = 1 - Δ_k, every |d_k| is at most
///   `tolerance`·max|d| except on an arithmetic progression of period p ≥ 2
///   (found by autocorrelation) where d_k lies within `tolerance` (relative)
///   of a common 1 - δ > 0. The first drop must come before 2p and the last
///   within p of the end.
/// - Superlinear: the tail ratios decrease monotonically, by at least a
///   factor 1 - `tolerance` overall, to below `tolerance`.
/// - Linear(μ): over the last half of the ratios the mean log-ratio log μ is
///   negative, and either the least-squares slope of log ε over the last
///   quarter is at least 0.85 of the slope over the quarter before it, or
///   over the whole sequence above the floor log ε is fitted at least as well
///   by a line in k as by a line in log(k + c) for every c = 1, 2, 4, ... up
///   to a sixteenth of the length. Power laws with an offset near half the
///   length or more are locally geometric and read as Linear.
/// - Sublinear: the tail still decays but follows the power law better, or
///   it stagnates with mean ratio at most 1 + `tolerance`.
/// - otherwise Inconclusive (growing sequences, or fewer than 6 ratios above
///   the floor). The exception is a sequence that falls through the floor
///   after 2 to 5 ratios that agree within `tolerance`: that is Linear.
///
/// Checks run in that order. Scale invariant. The bound checks classify their
/// closed-form bound sequences with no noise floor.
RateClassification classify_rate(std::span<const double> epsilons,
                                 double tolerance = kDefaultRateTolerance,
                                 double relative_floor = kRatioNoiseFloor);

// ---------------------------------------------------------------------------
// Bound replay

inline constexpr double kBoundRelativeSlack = 1e-8;
inline constexpr double kRoundoffFloor = 1e-12;
/// Multiplicative slack on Monte Carlo estimates of expectation bounds.
inline constexpr double kExpectationSlack = 1.1;

struct BoundReport {
  std::string bound_name;
  std::vector<double> observed;
  std::vector<double> bound;
  /// False when the bound's hypotheses fail on this instance; such a report
  /// is neither satisfied nor violated.
  bool applicable = true;
  bool satisfied = false;
  /// min_k (bound_k·(1 + slack) + floor - observed_k).
  double worst_slack = 0.0;
  std::vector<std::pair<std::string, double>> constants;
  /// Classification of the bound sequence (or of the errors, for MRK).
  RateClassification classification;
  std::string note;

  double constant(const std::string& name) const;
};

/// ‖x^k - x*‖ ≤ ‖Q̃‖₂^k ‖x^0 - x*‖ for a KT trace; `operators` must be the
/// full-sweep operators (γ = 0, ..., m-1).
BoundReport check_kt_bound(const IterateTrace& trace, const Vector& xstar,
                           const IterationOperators& operators);

/// ‖x^k - x*‖ ≤ C δ^{m_k}, k = Γ m_k + q_k, for a (almost) cyclic Kaczmarz
/// trace. δ is the worst ‖Q̃^γ‖₂ over the realized aligned windows and
/// C = max_{0 ≤ q < Γ} ‖x^q - x*‖.
BoundReport check_ack_bound(const IterateTrace& trace, const DenseMatrix& a, const Vector& xstar,
                            std::size_t window);

/// Maximal-residual Kaczmarz: errors never increase and admit a uniform
/// per-step contraction factor < 1 (reported as constant "factor").
BoundReport check_mrk_contraction(const IterateTrace& trace, const Vector& xstar);

/// ‖e^k‖ ≤ δ^k (k+1) ‖R‖₂ ‖b̂‖ + δ^k ‖e^0‖ with δ = max(‖Q̃‖₂, ‖Φ̃‖₂).
BoundReport check_ekt_bound(const IterateTrace& trace, const Vector& xstar,
                            const IterationOperators& row_operators,
                            const IterationOperators& column_operators);

/// ‖x^k - x*‖² ≤ ν^k (‖x^0 - x*‖² + C k) for MREK, with
/// α = 1 - δ²/(nM), β = 1 - δ²/n, ν = max(α, β),
/// C = (1/μ)(1 - 1/n)‖y^0 - r‖², M / μ the largest / smallest squared row
/// norm and δ the smallest nonzero singular value. Inapplicable unless
/// α, β ∈ [0, 1).
BoundReport check_mrek_bound(const IterateTrace& trace, const DenseMatrix& a, const Vector& xstar);

/// ‖x^k - x*‖ ≤ μ^{q_k} α + Γ² M μ^{q_k - 1} for ACEK with Δ = Γ:
/// δ from the realized row windows, (M, γ) the tightest envelope
/// G_q ≤ M γ^q of the per-window maxima G_q of ‖y^l - r‖ / min_i ‖A_i‖,
/// μ = max(δ, γ), α = max_{0 ≤ j < Γ} ‖x^j - x*‖.
BoundReport check_acek_bound(const IterateTrace& trace, const DenseMatrix& a, const Vector& xstar,
                             std::size_t window);

// ---------------------------------------------------------------------------
// Monte Carlo estimation for the randomized solvers

enum class RandomizedSolver { kRandomKaczmarz, kRandomExtendedKaczmarz };

struct MonteCarloEstimate {
  /// Sample mean of ‖x^k - x_ls‖², k = 0, ..., k_max.
  std::vector<double> mean_squared_error;
  std::vector<double> standard_error;
  std::size_t trials = 0;
};

/// Runs `trials` independent solves from x^0 = 0 on problem.bhat; trial t
/// uses seed base_seed + t (the column stream of REK a derived seed). Trials
/// run on up to `threads` workers (0: hardware concurrency) and are reduced
/// in trial order, so the result does not depend on the thread count.
MonteCarloEstimate monte_carlo_expected_error(const LeastSquaresProblem& problem,
                                              RandomizedSolver solver, std::size_t trials,
                                              std::size_t k_max, std::uint64_t base_seed,
                                              std::size_t threads = 0);

/// mean_k ≤ 1.1 (1 - 1/M²)^k ‖x_ls‖² with M = ‖A‖_F / σ_min. Inapplicable
/// unless the system is consistent with full column rank.
BoundReport check_rk_expectation_bound(const LeastSquaresProblem& problem,
                                       const MonteCarloEstimate& estimate);

/// mean_k ≤ 1.1 (1 - 1/k̂²)^{⌊k/2⌋} (1 + 2κ²) ‖x_ls‖² with k̂ = ‖A⁺‖₂‖A‖_F and
/// κ = σ₁/σ_ρ.
BoundReport check_rek_expectation_bound(const LeastSquaresProblem& problem,
                                        const MonteCarloEstimate& estimate);

}  // namespace kaczmarz
