#pragma once

// Dense real vectors and matrices, a one-sided Jacobi SVD, and the four
// fundamental-subspace projectors built from it.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace kaczmarz {

class Vector {
 public:
  /// Zero vector of the given length (length >= 1).
  explicit Vector(std::size_t size, double value = 0.0);
  Vector(std::initializer_list<double> entries);
  /// Takes ownership of `entries`; rejects empty or non-finite data.
  explicit Vector(std::vector<double> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  double& operator[](std::size_t i) { return entries_[i]; }
  double operator[](std::size_t i) const { return entries_[i]; }

  double* data() noexcept { return entries_.data(); }
  const double* data() const noexcept { return entries_.data(); }
  auto begin() noexcept { return entries_.begin(); }
  auto end() noexcept { return entries_.end(); }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  std::span<const double> span() const noexcept { return entries_; }
  operator std::span<const double>() const noexcept { return entries_; }
  const std::vector<double>& values() const noexcept { return entries_; }

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double factor);

  bool operator==(const Vector& other) const = default;

 private:
  std::vector<double> entries_;
};

Vector operator+(Vector lhs, const Vector& rhs);
Vector operator-(Vector lhs, const Vector& rhs);
Vector operator*(double factor, Vector v);
Vector operator*(Vector v, double factor);

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> v);
double norm(std::span<const double> v);
bool all_finite(std::span<const double> v);

/// Row-major dense matrix with at least one row and one column.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols, double value = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  /// DenseMatrix{{1, 2}, {3, 4}}; all rows must have the same length.
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(const std::vector<Vector>& rows);
  static DenseMatrix from_columns(const std::vector<Vector>& columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  std::span<const double> row_span(std::size_t i) const {
    return {entries_.data() + i * cols_, cols_};
  }
  std::span<double> row_span(std::size_t i) { return {entries_.data() + i * cols_, cols_}; }

  Vector row(std::size_t i) const;
  Vector col(std::size_t j) const;

  const std::vector<double>& values() const noexcept { return entries_; }

  DenseMatrix transpose() const;
  /// Rows i_1, ..., i_k stacked in the given order (repeats allowed).
  DenseMatrix select_rows(std::span<const std::size_t> indices) const;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double factor);

  bool operator==(const DenseMatrix& other) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_;
};

DenseMatrix operator+(DenseMatrix lhs, const DenseMatrix& rhs);
DenseMatrix operator-(DenseMatrix lhs, const DenseMatrix& rhs);
DenseMatrix operator*(double factor, DenseMatrix m);
DenseMatrix operator*(const DenseMatrix& lhs, const DenseMatrix& rhs);
Vector operator*(const DenseMatrix& a, const Vector& x);
/// Aᵀy without forming the transpose.
Vector transpose_times(const DenseMatrix& a, const Vector& y);

bool all_finite(const DenseMatrix& a);
std::vector<double> row_squared_norms(const DenseMatrix& a);
std::vector<double> column_squared_norms(const DenseMatrix& a);

/// Relative threshold (against σ₁) below which a singular value counts as zero.
inline constexpr double kRankTolerance = 1e-10;

struct SvdResult {
  /// m×p, p = min(m, n); column k pairs with singular_values[k].
  DenseMatrix left_vectors;
  /// Nonincreasing, length p.
  Vector singular_values;
  /// n×n orthogonal; the first p columns pair with singular_values, the rest
  /// (when n > m) span part of the null space.
  DenseMatrix right_vectors;
  std::size_t numeric_rank;
};

SvdResult svd(const DenseMatrix& a);

double spectral_norm(const DenseMatrix& a);
double frobenius_norm(const DenseMatrix& a);

/// Smallest singular value above the rank threshold (σ_ρ).
double smallest_nonzero_singular_value(const DenseMatrix& a);

enum class Subspace {
  kNullSpace,      // N(A)
  kRowSpace,       // R(Aᵀ)
  kLeftNullSpace,  // N(Aᵀ)
  kColumnSpace,    // R(A)
};

DenseMatrix subspace_projector(const DenseMatrix& a, Subspace which);

/// All four orthogonal projectors from a single decomposition.
struct FundamentalProjectors {
  DenseMatrix null_space;        // n×n
  DenseMatrix row_space;         // n×n
  DenseMatrix left_null_space;   // m×m
  DenseMatrix column_space;      // m×m
  std::size_t rank;
};

FundamentalProjectors fundamental_projectors(const DenseMatrix& a);

/// A⁺b, with singular values below kRankTolerance·σ₁ treated as zero.
Vector min_norm_solution(const DenseMatrix& a, const Vector& b);

/// Orthonormal basis of N(A); empty when A has full column rank.
std::vector<Vector> null_space_basis(const DenseMatrix& a);

}  // namespace kaczmarz
