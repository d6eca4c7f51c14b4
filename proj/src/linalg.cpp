#include "kaczmarz/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kaczmarz/errors.hpp"

namespace kaczmarz {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidInputError(std::string("dimension mismatch in ") + what + ": " +
                            std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Vector

Vector::Vector(std::size_t size, double value) : entries_(size, value) {
  if (size == 0) throw InvalidInputError("vector length must be at least 1");
  if (!std::isfinite(value)) throw InvalidInputError("vector entries must be finite");
}

Vector::Vector(std::initializer_list<double> entries) : Vector(std::vector<double>(entries)) {}

Vector::Vector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw InvalidInputError("vector length must be at least 1");
  if (!all_finite(entries_)) throw InvalidInputError("vector entries must be finite");
}

Vector& Vector::operator+=(const Vector& other) {
  require_same_size(size(), other.size(), "vector addition");
  for (std::size_t i = 0; i < size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  require_same_size(size(), other.size(), "vector subtraction");
  for (std::size_t i = 0; i < size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

Vector& Vector::operator*=(double factor) {
  for (double& e : entries_) e *= factor;
  return *this;
}

Vector operator+(Vector lhs, const Vector& rhs) { return lhs += rhs; }
Vector operator-(Vector lhs, const Vector& rhs) { return lhs -= rhs; }
Vector operator*(double factor, Vector v) { return v *= factor; }
Vector operator*(Vector v, double factor) { return v *= factor; }

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot product");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double squared_norm(std::span<const double> v) { return dot(v, v); }

double norm(std::span<const double> v) {
  // Scaled accumulation keeps tiny iterate errors (1e-160 and below) from
  // underflowing to zero when squared.
  double scale = 0.0;
  for (double e : v) scale = std::max(scale, std::abs(e));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double e : v) {
    const double t = e / scale;
    sum += t * t;
  }
  return scale * std::sqrt(sum);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

// ---------------------------------------------------------------------------
// DenseMatrix

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double value)
    : rows_(rows), cols_(cols), entries_(rows * cols, value) {
  if (rows == 0 || cols == 0) throw InvalidInputError("matrix dimensions must be at least 1");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), entries_(std::move(row_major)) {
  if (rows == 0 || cols == 0) throw InvalidInputError("matrix dimensions must be at least 1");
  if (entries_.size() != rows * cols) {
    throw InvalidInputError("matrix data has " + std::to_string(entries_.size()) +
                            " entries, expected " + std::to_string(rows * cols));
  }
  if (!all_finite(entries_)) throw InvalidInputError("matrix entries must be finite");
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw InvalidInputError("matrix dimensions must be at least 1");
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InvalidInputError("ragged matrix initializer");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
  if (!all_finite(entries_)) throw InvalidInputError("matrix entries must be finite");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) throw InvalidInputError("matrix dimensions must be at least 1");
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require_same_size(rows[i].size(), m.cols(), "from_rows");
    std::copy(rows[i].begin(), rows[i].end(), m.row_span(i).begin());
  }
  return m;
}

DenseMatrix DenseMatrix::from_columns(const std::vector<Vector>& columns) {
  if (columns.empty()) throw InvalidInputError("matrix dimensions must be at least 1");
  DenseMatrix m(columns.front().size(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    require_same_size(columns[j].size(), m.rows(), "from_columns");
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = columns[j][i];
  }
  return m;
}

Vector DenseMatrix::row(std::size_t i) const {
  auto s = row_span(i);
  return Vector(std::vector<double>(s.begin(), s.end()));
}

Vector DenseMatrix::col(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::select_rows(std::span<const std::size_t> indices) const {
  if (indices.empty()) throw InvalidInputError("row selection must be nonempty");
  DenseMatrix s(indices.size(), cols_);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= rows_) {
      throw InvalidInputError("row index " + std::to_string(indices[k]) + " out of range");
    }
    auto src = row_span(indices[k]);
    std::copy(src.begin(), src.end(), s.row_span(k).begin());
  }
  return s;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  require_same_size(rows_, other.rows_, "matrix addition");
  require_same_size(cols_, other.cols_, "matrix addition");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += other.entries_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  require_same_size(rows_, other.rows_, "matrix subtraction");
  require_same_size(cols_, other.cols_, "matrix subtraction");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= other.entries_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double factor) {
  for (double& e : entries_) e *= factor;
  return *this;
}

DenseMatrix operator+(DenseMatrix lhs, const DenseMatrix& rhs) { return lhs += rhs; }
DenseMatrix operator-(DenseMatrix lhs, const DenseMatrix& rhs) { return lhs -= rhs; }
DenseMatrix operator*(double factor, DenseMatrix m) { return m *= factor; }

DenseMatrix operator*(const DenseMatrix& lhs, const DenseMatrix& rhs) {
  require_same_size(lhs.cols(), rhs.rows(), "matrix product");
  DenseMatrix out(lhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i) {
    auto out_row = out.row_span(i);
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const double a = lhs(i, k);
      if (a == 0.0) continue;
      auto r = rhs.row_span(k);
      for (std::size_t j = 0; j < rhs.cols(); ++j) out_row[j] += a * r[j];
    }
  }
  return out;
}

Vector operator*(const DenseMatrix& a, const Vector& x) {
  require_same_size(a.cols(), x.size(), "matrix-vector product");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row_span(i), x);
  return y;
}

Vector transpose_times(const DenseMatrix& a, const Vector& y) {
  require_same_size(a.rows(), y.size(), "transposed matrix-vector product");
  Vector x(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row_span(i);
    for (std::size_t j = 0; j < a.cols(); ++j) x[j] += r[j] * y[i];
  }
  return x;
}

bool all_finite(const DenseMatrix& a) { return all_finite(std::span<const double>(a.values())); }

std::vector<double> row_squared_norms(const DenseMatrix& a) {
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = squared_norm(a.row_span(i));
  return out;
}

std::vector<double> column_squared_norms(const DenseMatrix& a) {
  std::vector<double> out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row_span(i);
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += r[j] * r[j];
  }
  return out;
}

// ---------------------------------------------------------------------------
// One-sided (Hestenes) Jacobi SVD.
//
// Columns of a working copy W = A·V are rotated pairwise until every pair is
// orthogonal to within kJacobiTolerance relative to their norms. Then the
// column norms are the singular values, the normalized columns are the left
// vectors and the accumulated rotations are the right vectors.

namespace {

constexpr double kJacobiTolerance = 1e-15;
constexpr int kMaxSweeps = 100;

using Column = std::vector<double>;

double column_dot(const Column& a, const Column& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void rotate(Column& a, Column& b, double c, double s) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    const double bi = b[i];
    a[i] = c * ai - s * bi;
    b[i] = s * ai + c * bi;
  }
}

// Unit vector orthogonal to every column in `basis`, taken from the
// standard basis by two rounds of Gram-Schmidt.
Column orthogonal_complement_vector(const std::vector<Column>& basis, std::size_t dim) {
  for (std::size_t e = 0; e < dim; ++e) {
    Column v(dim, 0.0);
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Column& u : basis) {
        const double proj = column_dot(v, u);
        for (std::size_t i = 0; i < dim; ++i) v[i] -= proj * u[i];
      }
    }
    const double len = std::sqrt(column_dot(v, v));
    if (len > 0.5) {
      for (double& x : v) x /= len;
      return v;
    }
  }
  throw InvalidInputError("cannot complete orthonormal basis");
}

}  // namespace

SvdResult svd(const DenseMatrix& a) {
  if (!all_finite(a)) throw InvalidInputError("svd: matrix entries must be finite");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const std::size_t p = std::min(m, n);

  std::vector<Column> w(n, Column(m));
  std::vector<Column> v(n, Column(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) w[j][i] = a(i, j);
    v[j][j] = 1.0;
  }

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double alpha = column_dot(w[i], w[i]);
        const double beta = column_dot(w[j], w[j]);
        const double gamma = column_dot(w[i], w[j]);
        if (gamma == 0.0 || alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= kJacobiTolerance * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::abs(zeta) > 1e150
                             ? 0.5 / zeta
                             : std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(w[i], w[j], c, s);
        rotate(v[i], v[j], c, s);
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(column_dot(w[j], w[j]));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  Vector singular_values(p);
  DenseMatrix right(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) right(i, k) = v[order[k]][i];
  }

  std::vector<Column> left_cols(p);
  std::vector<Column> accepted;
  for (std::size_t k = 0; k < p; ++k) {
    const double s = sigma[order[k]];
    singular_values[k] = s;
    if (s > 0.0) {
      Column u = w[order[k]];
      for (double& x : u) x /= s;
      left_cols[k] = u;
      accepted.push_back(std::move(u));
    }
  }
  for (std::size_t k = 0; k < p; ++k) {
    if (!left_cols[k].empty()) continue;
    left_cols[k] = orthogonal_complement_vector(accepted, m);
    accepted.push_back(left_cols[k]);
  }
  DenseMatrix left(m, p);
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t i = 0; i < m; ++i) left(i, k) = left_cols[k][i];

  std::size_t rank = 0;
  const double threshold = kRankTolerance * singular_values[0];
  for (std::size_t k = 0; k < p; ++k) {
    if (singular_values[k] > threshold && singular_values[k] > 0.0) ++rank;
  }

  return SvdResult{std::move(left), std::move(singular_values), std::move(right), rank};
}

double spectral_norm(const DenseMatrix& a) { return svd(a).singular_values[0]; }

double frobenius_norm(const DenseMatrix& a) { return norm(a.values()); }

double smallest_nonzero_singular_value(const DenseMatrix& a) {
  const SvdResult d = svd(a);
  if (d.numeric_rank == 0) return 0.0;
  return d.singular_values[d.numeric_rank - 1];
}

namespace {

// Σ_{k<rank} c_k c_kᵀ over the leading columns of `basis`.
DenseMatrix leading_column_projector(const DenseMatrix& basis, std::size_t rank) {
  const std::size_t d = basis.rows();
  DenseMatrix p(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < rank; ++k) s += basis(i, k) * basis(j, k);
      p(i, j) = s;
      p(j, i) = s;
    }
  }
  return p;
}

}  // namespace

FundamentalProjectors fundamental_projectors(const DenseMatrix& a) {
  const SvdResult d = svd(a);
  DenseMatrix row_space = leading_column_projector(d.right_vectors, d.numeric_rank);
  DenseMatrix column_space = leading_column_projector(d.left_vectors, d.numeric_rank);
  DenseMatrix null_space = DenseMatrix::identity(a.cols()) - row_space;
  DenseMatrix left_null = DenseMatrix::identity(a.rows()) - column_space;
  return FundamentalProjectors{std::move(null_space), std::move(row_space), std::move(left_null),
                               std::move(column_space), d.numeric_rank};
}

DenseMatrix subspace_projector(const DenseMatrix& a, Subspace which) {
  FundamentalProjectors p = fundamental_projectors(a);
  switch (which) {
    case Subspace::kNullSpace: return std::move(p.null_space);
    case Subspace::kRowSpace: return std::move(p.row_space);
    case Subspace::kLeftNullSpace: return std::move(p.left_null_space);
    case Subspace::kColumnSpace: return std::move(p.column_space);
  }
  throw InvalidInputError("unknown subspace");
}

Vector min_norm_solution(const DenseMatrix& a, const Vector& b) {
  require_same_size(a.rows(), b.size(), "min_norm_solution");
  const SvdResult d = svd(a);
  Vector x(a.cols());
  for (std::size_t k = 0; k < d.numeric_rank; ++k) {
    double coeff = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) coeff += d.left_vectors(i, k) * b[i];
    coeff /= d.singular_values[k];
    for (std::size_t j = 0; j < a.cols(); ++j) x[j] += coeff * d.right_vectors(j, k);
  }
  return x;
}

std::vector<Vector> null_space_basis(const DenseMatrix& a) {
  const SvdResult d = svd(a);
  std::vector<Vector> basis;
  for (std::size_t k = d.numeric_rank; k < a.cols(); ++k) basis.push_back(d.right_vectors.col(k));
  return basis;
}

}  // namespace kaczmarz
