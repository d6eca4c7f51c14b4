#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/linalg.hpp"
#include "oracles.hpp"

using namespace kaczmarz;

namespace {

DenseMatrix reconstruct(const SvdResult& d, std::size_t m, std::size_t n) {
  DenseMatrix a(m, n);
  for (std::size_t k = 0; k < d.singular_values.size(); ++k)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        a(i, j) += d.left_vectors(i, k) * d.singular_values[k] * d.right_vectors(j, k);
  return a;
}

double orthonormality_defect(const DenseMatrix& q) {
  const DenseMatrix g = oracle::matmul(q.transpose(), q);
  return oracle::max_abs_diff(g, DenseMatrix::identity(q.cols()));
}

}  // namespace

TEST(Vector, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(Vector(0), InvalidInputError);
  EXPECT_THROW(Vector(std::vector<double>{}), InvalidInputError);
  EXPECT_THROW(Vector({1.0, std::numeric_limits<double>::quiet_NaN()}), InvalidInputError);
  EXPECT_THROW(Vector(std::vector<double>{std::numeric_limits<double>::infinity()}),
               InvalidInputError);
}

TEST(Vector, ArithmeticAndNorms) {
  const Vector a{3, 4};
  const Vector b{1, -1};
  EXPECT_EQ(a + b, (Vector{4, 3}));
  EXPECT_EQ(a - b, (Vector{2, 5}));
  EXPECT_EQ(2.0 * a, (Vector{6, 8}));
  EXPECT_DOUBLE_EQ(dot(a, b), -1.0);
  EXPECT_DOUBLE_EQ(norm(a.span()), 5.0);
  EXPECT_THROW(dot(a, Vector{1, 2, 3}), InvalidInputError);
}

TEST(Vector, NormDoesNotOverflowOrUnderflow) {
  EXPECT_DOUBLE_EQ(norm(Vector{3e200, 4e200}.span()), 5e200);
  EXPECT_DOUBLE_EQ(norm(Vector{3e-200, 4e-200}.span()), 5e-200);
}

TEST(DenseMatrix, ConstructionAndAccessors) {
  const DenseMatrix a{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(a.rows(), 2u);
  EXPECT_EQ(a.cols(), 3u);
  EXPECT_EQ(a.row(1), (Vector{4, 5, 6}));
  EXPECT_EQ(a.col(2), (Vector{3, 6}));
  EXPECT_EQ(a.transpose().transpose(), a);
  EXPECT_THROW((DenseMatrix{{1, 2}, {3}}), InvalidInputError);
  EXPECT_THROW(DenseMatrix(0, 3), InvalidInputError);
  EXPECT_THROW(DenseMatrix(2, 2, std::vector<double>{1, 2, 3}), InvalidInputError);
}

TEST(DenseMatrix, ProductsMatchTripleLoop) {
  SplitMix64 rng(1);
  const DenseMatrix a = oracle::random_matrix(rng, 5, 3);
  const DenseMatrix b = oracle::random_matrix(rng, 3, 4);
  EXPECT_LT(oracle::max_abs_diff(a * b, oracle::matmul(a, b)), 1e-14);
  const Vector x = oracle::random_vector(rng, 3);
  EXPECT_LT(oracle::max_abs_diff(a * x, oracle::matvec(a, x)), 1e-14);
  const Vector y = oracle::random_vector(rng, 5);
  EXPECT_LT(oracle::max_abs_diff(transpose_times(a, y), oracle::matvec(a.transpose(), y)), 1e-14);
  EXPECT_THROW(a * a, InvalidInputError);
}

TEST(DenseMatrix, SelectRowsKeepsOrderAndRepeats) {
  const DenseMatrix a{{1, 0}, {0, 2}, {3, 3}};
  const std::vector<std::size_t> idx{2, 0, 2};
  const DenseMatrix s = a.select_rows(idx);
  EXPECT_EQ(s, (DenseMatrix{{3, 3}, {1, 0}, {3, 3}}));
  const std::vector<std::size_t> bad{3};
  EXPECT_THROW(a.select_rows(bad), InvalidInputError);
}

TEST(Svd, Identity) {
  const SvdResult d = svd(DenseMatrix::identity(2));
  EXPECT_DOUBLE_EQ(d.singular_values[0], 1.0);
  EXPECT_DOUBLE_EQ(d.singular_values[1], 1.0);
  EXPECT_EQ(d.numeric_rank, 2u);
}

TEST(Svd, DiagonalWithZero) {
  const SvdResult d = svd(DenseMatrix{{3, 0}, {0, 0}});
  EXPECT_DOUBLE_EQ(d.singular_values[0], 3.0);
  EXPECT_DOUBLE_EQ(d.singular_values[1], 0.0);
  EXPECT_EQ(d.numeric_rank, 1u);
}

TEST(Svd, ZeroMatrixHasRankZero) {
  const SvdResult d = svd(DenseMatrix(3, 2));
  EXPECT_EQ(d.numeric_rank, 0u);
  EXPECT_LT(orthonormality_defect(d.left_vectors), 1e-12);
  EXPECT_LT(orthonormality_defect(d.right_vectors), 1e-12);
}

TEST(Svd, RandomShapesReconstructAndAreOrthonormal) {
  SplitMix64 rng(2);
  for (const auto [m, n, k] : std::vector<std::array<std::size_t, 3>>{
           {5, 3, 3}, {3, 5, 3}, {6, 6, 2}, {1, 4, 1}, {4, 1, 1}, {12, 7, 5}, {7, 12, 4}}) {
    const DenseMatrix a = oracle::random_rank(rng, m, n, k);
    const SvdResult d = svd(a);
    EXPECT_EQ(d.numeric_rank, k) << m << "x" << n;
    EXPECT_LT(oracle::power_norm(a - reconstruct(d, m, n)), 1e-10 * std::max(1.0, d.singular_values[0]));
    EXPECT_LT(orthonormality_defect(d.left_vectors), 1e-10);
    EXPECT_LT(orthonormality_defect(d.right_vectors), 1e-10);
    for (std::size_t t = 1; t < d.singular_values.size(); ++t)
      EXPECT_GE(d.singular_values[t - 1], d.singular_values[t]);
  }
}

TEST(Svd, IsBitwiseDeterministic) {
  SplitMix64 rng(3);
  const DenseMatrix a = oracle::random_matrix(rng, 9, 6);
  const SvdResult d1 = svd(a);
  const SvdResult d2 = svd(a);
  EXPECT_EQ(d1.left_vectors, d2.left_vectors);
  EXPECT_EQ(d1.singular_values, d2.singular_values);
  EXPECT_EQ(d1.right_vectors, d2.right_vectors);
}

TEST(Norms, SpectralAndFrobenius) {
  EXPECT_DOUBLE_EQ(spectral_norm(DenseMatrix::identity(4)), 1.0);
  EXPECT_DOUBLE_EQ(spectral_norm(DenseMatrix{{2, 0}, {0, 0.5}}), 2.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(DenseMatrix::identity(3)), std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(frobenius_norm(DenseMatrix{{3, 4}}), 5.0);
}

TEST(Norms, SpectralNormBracketedByRandomDirections) {
  SplitMix64 rng(4);
  const DenseMatrix a = oracle::random_matrix(rng, 4, 4);
  double best = 0;
  for (int t = 0; t < 1000; ++t) {
    const Vector x = oracle::random_vector(rng, 4);
    best = std::max(best, oracle::euclid(a * x) / oracle::euclid(x));
  }
  const double s = spectral_norm(a);
  EXPECT_LE(best, s * (1 + 1e-12));
  EXPECT_NEAR(s, oracle::power_norm(a), 1e-9);
}

TEST(Norms, FrobeniusIsRootOfRowNorms) {
  SplitMix64 rng(5);
  const DenseMatrix a = oracle::random_matrix(rng, 6, 3);
  double s = 0;
  for (double r : row_squared_norms(a)) s += r;
  EXPECT_NEAR(frobenius_norm(a), std::sqrt(s), 1e-14);
}

TEST(Projectors, AxisAligned) {
  const DenseMatrix p = subspace_projector(DenseMatrix{{1, 0}}, Subspace::kNullSpace);
  EXPECT_LT(oracle::max_abs_diff(p, DenseMatrix{{0, 0}, {0, 1}}), 1e-15);
}

TEST(Projectors, FullColumnRankHasTrivialNullSpace) {
  SplitMix64 rng(6);
  const DenseMatrix p = subspace_projector(oracle::random_matrix(rng, 7, 4), Subspace::kNullSpace);
  EXPECT_LT(oracle::max_abs_diff(p, DenseMatrix(4, 4)), 1e-12);
}

TEST(Projectors, ComplementarySymmetricIdempotent) {
  SplitMix64 rng(7);
  for (int t = 0; t < 30; ++t) {
    const std::size_t m = 1 + rng.below(15), n = 1 + rng.below(15);
    const std::size_t k = 1 + rng.below(std::min(m, n));
    const DenseMatrix a = oracle::random_rank(rng, m, n, k);
    const FundamentalProjectors f = fundamental_projectors(a);
    EXPECT_EQ(f.rank, k);
    EXPECT_LT(oracle::max_abs_diff(f.null_space + f.row_space, DenseMatrix::identity(n)), 1e-10);
    EXPECT_LT(oracle::max_abs_diff(f.left_null_space + f.column_space, DenseMatrix::identity(m)),
              1e-10);
    for (const DenseMatrix* p : {&f.null_space, &f.row_space, &f.left_null_space, &f.column_space}) {
      EXPECT_EQ(*p, p->transpose());
      EXPECT_LT(oracle::power_norm(oracle::matmul(*p, *p) - *p, 200), 1e-10);
    }
  }
}

TEST(Projectors, RowsLieInRowSpace) {
  SplitMix64 rng(8);
  const DenseMatrix a = oracle::random_rank(rng, 4, 3, 2);
  const DenseMatrix p = subspace_projector(a, Subspace::kRowSpace);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(oracle::max_abs_diff(p * a.row(i), a.row(i)), 1e-10);
  const DenseMatrix pn = subspace_projector(a, Subspace::kNullSpace);
  EXPECT_LT(oracle::max_abs_diff(oracle::matmul(a, pn), DenseMatrix(4, 3)), 1e-10);
}

TEST(MinNorm, SmallCases) {
  const Vector b{2, -1, 5};
  EXPECT_LT(oracle::max_abs_diff(min_norm_solution(DenseMatrix::identity(3), b), b), 1e-15);
  const Vector x = min_norm_solution(DenseMatrix{{1, 0}, {1, 0}}, Vector{1, 1});
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 0.0, 1e-15);
  EXPECT_THROW(min_norm_solution(DenseMatrix::identity(3), Vector{1, 2}), InvalidInputError);
}

TEST(MinNorm, MatchesNormalEquationsAndFullRowRankFormula) {
  SplitMix64 rng(9);
  const DenseMatrix tall = oracle::random_matrix(rng, 8, 5);
  const Vector b = oracle::random_vector(rng, 8);
  EXPECT_LT(oracle::max_abs_diff(min_norm_solution(tall, b), oracle::normal_equations(tall, b)),
            1e-10);
  const DenseMatrix wide = oracle::random_matrix(rng, 4, 9);
  const Vector c = oracle::random_vector(rng, 4);
  EXPECT_LT(oracle::max_abs_diff(min_norm_solution(wide, c), oracle::min_norm_full_row_rank(wide, c)),
            1e-10);
}

TEST(MinNorm, BeatsRandomCompetitorsAndIsOrthogonalToNullSpace) {
  SplitMix64 rng(10);
  const DenseMatrix a = oracle::random_rank(rng, 6, 4, 3);
  const Vector b = oracle::random_vector(rng, 6);
  const Vector x = min_norm_solution(a, b);
  const double best = oracle::euclid(a * x - b);
  for (int t = 0; t < 1000; ++t) {
    const Vector z = oracle::random_vector(rng, 4);
    EXPECT_LE(best, oracle::euclid(a * z - b) + 1e-12);
  }
  const std::vector<Vector> basis = null_space_basis(a);
  ASSERT_EQ(basis.size(), 1u);
  EXPECT_LT(std::abs(dot(x, basis[0])), 1e-10);
  EXPECT_LT(oracle::euclid(a * basis[0]), 1e-10);
}

TEST(MinNorm, RecoversRowSpaceComponent) {
  SplitMix64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const std::size_t m = 2 + rng.below(10), n = 2 + rng.below(10);
    const DenseMatrix a = oracle::random_rank(rng, m, n, 1 + rng.below(std::min(m, n)));
    const Vector x = oracle::random_vector(rng, n);
    const Vector expected = subspace_projector(a, Subspace::kRowSpace) * x;
    EXPECT_LT(oracle::euclid(min_norm_solution(a, a * x) - expected), 1e-8 * oracle::euclid(x));
  }
}
