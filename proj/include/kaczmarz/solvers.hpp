#pragma once

// The solver families:
//
//   solve_kt                 full row sweep per iteration (Kaczmarz-Tanabe)
//   solve_kaczmarz           one projection per iteration under a row control
//                            (cyclic, almost cyclic, maximal residual, random)
//   solve_ekt                full column sweep then full row sweep with the
//                            corrected right-hand side (extended KT)
//   solve_extended_kaczmarz  one column projection then one row projection
//                            per iteration (REK, MREK, ACEK by control)

#include <cstddef>
#include <optional>
#include <vector>

#include "kaczmarz/controls.hpp"
#include "kaczmarz/linalg.hpp"

namespace kaczmarz {

struct SolverConfig {
  std::size_t max_iterations = 100;
  ControlKind row_control = CyclicControl{};
  /// Extended Kaczmarz only.
  ControlKind column_control = CyclicControl{};
  /// Keep every iterate; otherwise only x^0 and the final iterate (and the
  /// same for y^k, b^k) are stored. Indices and errors are always kept.
  bool record_trace = true;
  /// Stop once ‖x^{k+1} - x^k‖ ≤ stop_tolerance; 0 runs the full budget.
  double stop_tolerance = 0.0;
  /// When set, errors[k] = ‖x^k - reference‖ is recorded.
  std::optional<Vector> reference;
};

struct IterateTrace {
  std::vector<Vector> iterates;        // x^0, x^1, ...
  std::vector<Vector> y_iterates;      // extended solvers: y^0 = b̂, y^1, ...
  std::vector<Vector> rhs_iterates;    // extended solvers: b^k = b̂ - y^k
  std::vector<std::size_t> row_indices;     // i_k for single-projection solvers
  std::vector<std::size_t> column_indices;  // j_k for extended Kaczmarz
  std::vector<double> errors;          // only with SolverConfig::reference
  std::size_t iterations = 0;
  bool stopped_early = false;

  const Vector& final_iterate() const { return iterates.back(); }
  bool is_extended() const noexcept { return !y_iterates.empty(); }
};

IterateTrace solve_kt(const DenseMatrix& a, const Vector& b, const Vector& x0,
                      const SolverConfig& config);

IterateTrace solve_kaczmarz(const DenseMatrix& a, const Vector& b, const Vector& x0,
                            const SolverConfig& config);

IterateTrace solve_ekt(const DenseMatrix& a, const Vector& bhat, const Vector& x0,
                       const SolverConfig& config);

IterateTrace solve_extended_kaczmarz(const DenseMatrix& a, const Vector& bhat, const Vector& x0,
                                     const SolverConfig& config);

}  // namespace kaczmarz
