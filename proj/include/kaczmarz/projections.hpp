#pragma once

// Elementary projections: onto one equation's hyperplane, onto a row's or a
// column's orthogonal complement, and full row / column sweeps.
//
// Sweep order convention: row 0 is applied first and row m-1 last (likewise
// for columns). The iteration matrices in operators.hpp use the same order.

#include <span>

#include "kaczmarz/linalg.hpp"

namespace kaczmarz {

/// x - (⟨x, row⟩ - rhs) / ‖row‖² · row. Throws ZeroRowError for row = 0.
Vector project_hyperplane(std::span<const double> row, double rhs, const Vector& x);

/// x - ⟨x, row⟩ / ‖row‖² · row.
Vector project_row_null(std::span<const double> row, const Vector& x);

/// y - ⟨y, col⟩ / ‖col‖² · col. Throws ZeroColumnError for col = 0.
Vector project_column(std::span<const double> column, const Vector& y);

/// In-place hyperplane projection; the hot path of every solver.
void project_hyperplane_inplace(std::span<const double> row, double row_squared_norm, double rhs,
                                Vector& x);

/// One Kaczmarz-Tanabe sweep: rows 0, 1, ..., m-1 applied in turn.
Vector sweep_rows(const DenseMatrix& a, const Vector& b, const Vector& x);

/// One column sweep: columns 0, 1, ..., n-1 applied in turn (the map Φ).
Vector sweep_columns(const DenseMatrix& a, const Vector& y);

}  // namespace kaczmarz
