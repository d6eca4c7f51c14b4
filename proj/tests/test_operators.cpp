#include <gtest/gtest.h>

#include <numeric>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/operators.hpp"
#include "oracles.hpp"

using namespace kaczmarz;

namespace {

std::vector<std::size_t> all_rows(std::size_t m) {
  std::vector<std::size_t> g(m);
  std::iota(g.begin(), g.end(), 0);
  return g;
}

DenseMatrix rows_of(const DenseMatrix& a, const std::vector<std::size_t>& gamma) {
  std::vector<Vector> rows;
  for (std::size_t i : gamma) rows.push_back(a.row(i));
  return DenseMatrix::from_rows(rows);
}

}  // namespace

TEST(RowOperators, MatchExplicitProducts) {
  SplitMix64 rng(1);
  for (int t = 0; t < 15; ++t) {
    const std::size_t m = 1 + rng.below(7), n = 1 + rng.below(7);
    const DenseMatrix a = oracle::random_matrix(rng, m, n);
    std::vector<std::size_t> gamma = all_rows(m);
    for (std::size_t extra = rng.below(3); extra > 0; --extra) gamma.push_back(rng.below(m));
    const IterationOperators ops = build_row_operators(a, gamma);
    const oracle::SweepOperators ref = oracle::sweep_operators(a, gamma);
    EXPECT_LT(oracle::max_abs_diff(ops.q, ref.q), 1e-12);
    EXPECT_LT(oracle::max_abs_diff(ops.r, ref.r), 1e-10);
    EXPECT_TRUE(ops.covers_all_rows);
    EXPECT_EQ(ops.gamma, gamma);
  }
}

TEST(RowOperators, IdentitiesHold) {
  SplitMix64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const std::size_t m = 2 + rng.below(8), n = 2 + rng.below(8);
    const std::size_t k = 1 + rng.below(std::min(m, n));
    const DenseMatrix a = oracle::random_rank(rng, m, n, k);
    std::vector<std::size_t> gamma = all_rows(m);
    gamma.push_back(rng.below(m));
    const IterationOperators ops = build_row_operators(a, gamma);
    const DenseMatrix ag = rows_of(a, gamma);

    // Q + R A^γ = I
    const DenseMatrix sum = ops.q + oracle::matmul(ops.r, ag);
    EXPECT_LT(oracle::max_abs_diff(sum, DenseMatrix::identity(n)), 1e-9);

    // Q = P_N(A) + Q̃ when γ covers all rows
    const DenseMatrix pn = subspace_projector(a, Subspace::kNullSpace);
    EXPECT_LT(oracle::max_abs_diff(ops.q, pn + ops.q_tilde), 1e-9);

    EXPECT_LT(ops.q_tilde_norm, 1.0);
    EXPECT_NEAR(ops.q_tilde_norm, oracle::power_norm(ops.q_tilde), 1e-6);
  }
}

TEST(RowOperators, PartialWindowDoesNotCoverAllRows) {
  const DenseMatrix a{{1, 0}, {0, 1}, {1, 1}};
  const std::vector<std::size_t> gamma{0, 2};
  const IterationOperators ops = build_row_operators(a, gamma);
  EXPECT_FALSE(ops.covers_all_rows);
  EXPECT_LT(ops.q_tilde_norm, 1.0);
}

TEST(RowOperators, OrthogonalRowsGiveZeroContraction) {
  const IterationOperators ops = build_row_operators(DenseMatrix::identity(3), all_rows(3));
  EXPECT_LT(ops.q_tilde_norm, 1e-15);
}

TEST(RowOperators, Errors) {
  const DenseMatrix a{{1, 0}, {0, 0}};
  EXPECT_THROW(build_row_operators(a, std::vector<std::size_t>{}), InvalidInputError);
  EXPECT_THROW(build_row_operators(a, std::vector<std::size_t>{0, 2}), InvalidInputError);
  EXPECT_THROW(build_row_operators(a, std::vector<std::size_t>{0, 1}), ZeroRowError);
}

TEST(ColumnOperators, MatchTransposeConstruction) {
  SplitMix64 rng(3);
  const DenseMatrix a = oracle::random_rank(rng, 6, 4, 3);
  const IterationOperators phi = build_column_operators(a);
  EXPECT_EQ(phi.q.rows(), 6u);
  const oracle::SweepOperators ref = oracle::sweep_operators(a.transpose(), all_rows(4));
  EXPECT_LT(oracle::max_abs_diff(phi.q, ref.q), 1e-12);

  const DenseMatrix pln = subspace_projector(a, Subspace::kLeftNullSpace);
  EXPECT_LT(oracle::max_abs_diff(phi.q, pln + phi.q_tilde), 1e-9);
  EXPECT_LT(phi.q_tilde_norm, 1.0);
}

TEST(ColumnOperators, ZeroColumnIsRejected) {
  EXPECT_THROW(build_column_operators(DenseMatrix{{1, 0}, {1, 0}}), ZeroColumnError);
}

TEST(RealizedWindowContraction, IsTheWorstWindow) {
  SplitMix64 rng(4);
  const DenseMatrix a = oracle::random_matrix(rng, 3, 3);
  const std::vector<std::size_t> history{0, 1, 2, 2, 1, 0, 0, 1, 2};
  const double worst = realized_window_contraction(a, history, 3);
  const double w1 = build_row_operators(a, std::vector<std::size_t>{0, 1, 2}).q_tilde_norm;
  const double w2 = build_row_operators(a, std::vector<std::size_t>{2, 1, 0}).q_tilde_norm;
  EXPECT_DOUBLE_EQ(worst, std::max(w1, w2));
}

TEST(RealizedWindowContraction, RejectsTrailingPartialWindow) {
  SplitMix64 rng(5);
  const DenseMatrix a = oracle::random_matrix(rng, 2, 3);
  const std::vector<std::size_t> history{0, 1, 1, 0, 1};
  EXPECT_THROW(realized_window_contraction(a, history, 2), ContractError);
  EXPECT_NO_THROW(realized_window_contraction(a, std::span(history).first(4), 2));
}

TEST(RealizedWindowContraction, RejectsWindowsMissingARow) {
  SplitMix64 rng(6);
  const DenseMatrix a = oracle::random_matrix(rng, 2, 3);
  EXPECT_THROW(realized_window_contraction(a, std::vector<std::size_t>{0, 0, 0, 1}, 2),
               ContractError);
  EXPECT_THROW(realized_window_contraction(a, std::vector<std::size_t>{0}, 2), ContractError);
}
