#pragma once

// Control sequences: the rule that picks which row (or column) the next
// projection uses. Indices are 0-based throughout the library.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kaczmarz/linalg.hpp"
#include "kaczmarz/rng.hpp"

namespace kaczmarz {

/// i_k = k mod m.
struct CyclicControl {};

/// Windows of `window` consecutive steps aligned at multiples of `window`;
/// each window is a shuffled permutation of all indices padded with uniform
/// extra picks, so every aligned window covers every index.
struct AlmostCyclicControl {
  std::size_t window;
  std::uint64_t seed = 0;
};

/// Greedy: largest |residual| (rows) or |⟨A^j, y⟩| (columns); ties go to the
/// smallest index.
struct MaximalResidualControl {};

/// Sample with probability ‖A_i‖² / ‖A‖²_F (rows) or ‖A^j‖² / ‖A‖²_F (columns).
struct RandomControl {
  std::uint64_t seed;
};

using ControlKind =
    std::variant<CyclicControl, AlmostCyclicControl, MaximalResidualControl, RandomControl>;

std::string control_name(const ControlKind& kind);

class ControlState {
 public:
  /// `index_count` is m for row controls and n for column controls.
  ControlState(ControlKind kind, std::size_t index_count);

  /// Picks i_k. `residual` (⟨A_i, x⟩ - b_i for all i) is required for the
  /// maximal-residual control and ignored otherwise.
  std::size_t next_row_index(const DenseMatrix& a, std::span<const double> residual = {});

  /// Picks j_k. `y` is the current column iterate; only the maximal-residual
  /// control reads it.
  std::size_t next_column_index(const DenseMatrix& a, const Vector& y);

  const ControlKind& kind() const noexcept { return kind_; }
  std::size_t index_count() const noexcept { return index_count_; }
  std::size_t step() const noexcept { return history_.size(); }
  const std::vector<std::size_t>& history() const noexcept { return history_; }

 private:
  std::size_t next_scheduled();
  std::size_t next_greedy(std::span<const double> scores);
  std::size_t next_sampled(std::span<const double> weights);
  std::size_t record(std::size_t index);

  ControlKind kind_;
  std::size_t index_count_;
  SplitMix64 rng_;
  std::vector<std::size_t> pending_window_;
  std::size_t window_position_ = 0;
  std::vector<std::size_t> history_;
};

/// Sampling distribution p_i = weights_i / Σ weights (squared row or column
/// norms). Throws if every weight is zero.
std::vector<double> sampling_distribution(std::span<const double> squared_norms);

/// True iff every complete window [kΓ, (k+1)Γ) of `history` contains every
/// index in {0, ..., m-1}. Throws for Γ < m, empty history, or an
/// out-of-range index.
bool verify_window_property(std::span<const std::size_t> history, std::size_t m,
                            std::size_t window);

}  // namespace kaczmarz
