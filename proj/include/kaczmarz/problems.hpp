#pragma once

// Test problems with known ground truth: b̂ = b + r with b ∈ R(A),
// r ∈ N(Aᵀ), and x_ls the minimal-norm (least-squares) solution.
//
// On-disk form (.kzp), one token stream per line:
//
//   kaczmarz-problem v1 <m> <n> <rank> <seed>
//   A:
//   <m lines of n numbers>
//   bhat:
//   <m numbers>
//   b:
//   <m numbers>
//   r:
//   <m numbers>
//   x_ls:
//   <n numbers>
//
// Numbers use the shortest decimal form that parses back to the same double.

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/linalg.hpp"

namespace kaczmarz {

struct LeastSquaresProblem {
  DenseMatrix a;
  Vector bhat;
  Vector b;
  Vector r;
  Vector x_ls;
  std::size_t rank;
  std::uint64_t seed;

  bool is_consistent() const { return norm(r.span()) == 0.0; }
  bool operator==(const LeastSquaresProblem&) const = default;
};

/// Thrown when noise is requested but N(Aᵀ) = {0} (rank = m).
class NoiseUnsupportedError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

/// A = U·diag(σ)·Vᵀ with random orthonormal U (m×rank), V (n×rank) and
/// σ₁ = 1 ≥ ... ≥ σ_rank = 1/condition_cap (log-uniform in between; a rank-1
/// matrix has σ₁ = 1 and ignores the cap).
/// b = A·x_true for Gaussian x_true; r has norm noise_ratio·‖b‖ and lies in
/// N(Aᵀ). Deterministic in `seed`.
LeastSquaresProblem generate_problem(std::size_t m, std::size_t n, std::size_t rank,
                                     double noise_ratio, double condition_cap, std::uint64_t seed);

void write_problem(std::ostream& out, const LeastSquaresProblem& problem);
LeastSquaresProblem read_problem(std::istream& in);

void save_problem(const std::filesystem::path& path, const LeastSquaresProblem& problem);
LeastSquaresProblem load_problem(const std::filesystem::path& path);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double value);

}  // namespace kaczmarz
