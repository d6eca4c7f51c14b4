#pragma once

// Iteration matrices of a Kaczmarz sweep over an index window γ.
//
// Sweeping the rows i_1, ..., i_Γ of γ (i_1 first) maps x to Q x + R b^γ,
// where b^γ = (b_{i_1}, ..., b_{i_Γ}). With Q̃ = Q·P_R((A^γ)ᵀ) one has
//
//   Q + R A^γ = I,   Q = P_N(A^γ) + Q̃,   ‖Q̃‖₂ < 1,
//
// and when γ covers every row, N(A^γ) = N(A). The column operators Φ and Φ̃
// are the same construction applied to Aᵀ (the system Aᵀy = 0).

#include <cstddef>
#include <span>
#include <vector>

#include "kaczmarz/linalg.hpp"

namespace kaczmarz {

struct IterationOperators {
  DenseMatrix q;        // d×d
  DenseMatrix r;        // d×Γ
  DenseMatrix q_tilde;  // d×d
  std::vector<std::size_t> gamma;
  double q_tilde_norm;
  /// Whether γ contains every row index of the matrix it was built from.
  bool covers_all_rows;
};

/// Operators for the row sweep over `gamma` (0-based row indices, applied in
/// the listed order). Throws for an empty window, an out-of-range index or a
/// zero row.
IterationOperators build_row_operators(const DenseMatrix& a, std::span<const std::size_t> gamma);

/// Φ (m×m), Φ̃ = Φ·P_R(A) for the column sweep 0, ..., n-1. The `r` member is
/// the right-hand-side map of Aᵀy = c and is not used by the solvers.
IterationOperators build_column_operators(const DenseMatrix& a);

/// Max of ‖Q̃^γ‖₂ over the distinct aligned windows γ = history[kΓ, (k+1)Γ).
/// Every window must be complete and cover all rows of `a`, otherwise a
/// ContractError is thrown. For column windows pass Aᵀ.
double realized_window_contraction(const DenseMatrix& a, std::span<const std::size_t> history,
                                   std::size_t window);

}  // namespace kaczmarz
