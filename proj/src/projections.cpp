#include "kaczmarz/projections.hpp"

#include "kaczmarz/errors.hpp"

namespace kaczmarz {

namespace {

void require_dims(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    throw InvalidInputError(std::string(what) + ": expected length " + std::to_string(expected) +
                            ", got " + std::to_string(actual));
  }
}

}  // namespace

void project_hyperplane_inplace(std::span<const double> row, double row_squared_norm, double rhs,
                                Vector& x) {
  const double step = (dot(row, x) - rhs) / row_squared_norm;
  for (std::size_t j = 0; j < x.size(); ++j) x[j] -= step * row[j];
}

Vector project_hyperplane(std::span<const double> row, double rhs, const Vector& x) {
  require_dims(row.size(), x.size(), "project_hyperplane");
  const double nn = squared_norm(row);
  if (!(nn > 0.0)) throw ZeroRowError();
  Vector out = x;
  project_hyperplane_inplace(row, nn, rhs, out);
  return out;
}

Vector project_row_null(std::span<const double> row, const Vector& x) {
  return project_hyperplane(row, 0.0, x);
}

Vector project_column(std::span<const double> column, const Vector& y) {
  require_dims(column.size(), y.size(), "project_column");
  const double nn = squared_norm(column);
  if (!(nn > 0.0)) throw ZeroColumnError();
  Vector out = y;
  project_hyperplane_inplace(column, nn, 0.0, out);
  return out;
}

Vector sweep_rows(const DenseMatrix& a, const Vector& b, const Vector& x) {
  require_dims(a.rows(), b.size(), "sweep_rows rhs");
  require_dims(a.cols(), x.size(), "sweep_rows iterate");
  Vector out = x;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row_span(i);
    const double nn = squared_norm(row);
    if (!(nn > 0.0)) throw ZeroRowError(i);
    project_hyperplane_inplace(row, nn, b[i], out);
  }
  return out;
}

Vector sweep_columns(const DenseMatrix& a, const Vector& y) {
  require_dims(a.rows(), y.size(), "sweep_columns");
  const std::vector<double> norms = column_squared_norms(a);
  Vector out = y;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    if (!(norms[j] > 0.0)) throw ZeroColumnError(j);
    double proj = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) proj += a(i, j) * out[i];
    proj /= norms[j];
    for (std::size_t i = 0; i < a.rows(); ++i) out[i] -= proj * a(i, j);
  }
  return out;
}

}  // namespace kaczmarz
