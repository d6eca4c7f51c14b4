#include "kaczmarz/operators.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "kaczmarz/controls.hpp"
#include "kaczmarz/errors.hpp"

namespace kaczmarz {

namespace {

// M ← (I - a aᵀ/‖a‖²) M, column by column.
void apply_row_projection(std::span<const double> a, double a_squared_norm, DenseMatrix& m) {
  const std::size_t d = m.rows();
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double proj = 0.0;
    for (std::size_t i = 0; i < d; ++i) proj += a[i] * m(i, c);
    proj /= a_squared_norm;
    if (proj == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) m(i, c) -= proj * a[i];
  }
}

}  // namespace

IterationOperators build_row_operators(const DenseMatrix& a, std::span<const std::size_t> gamma) {
  if (gamma.empty()) throw InvalidInputError("index window must be nonempty");
  const std::size_t d = a.cols();
  const std::size_t len = gamma.size();

  const std::vector<double> norms = row_squared_norms(a);
  std::vector<bool> seen(a.rows(), false);
  for (std::size_t i : gamma) {
    if (i >= a.rows()) throw InvalidInputError("row index " + std::to_string(i) + " out of range");
    if (!(norms[i] > 0.0)) throw ZeroRowError(i);
    seen[i] = true;
  }
  const bool covers = std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });

  // After t steps: Q_t = P_{i_t} Q_{t-1}, and column s < t of R is
  // P_{i_t} ... P_{i_{s+1}} A_{i_s} / ‖A_{i_s}‖².
  DenseMatrix q = DenseMatrix::identity(d);
  DenseMatrix r(d, len);
  for (std::size_t t = 0; t < len; ++t) {
    const std::size_t i = gamma[t];
    const auto row = a.row_span(i);
    apply_row_projection(row, norms[i], q);
    apply_row_projection(row, norms[i], r);
    for (std::size_t k = 0; k < d; ++k) r(k, t) = row[k] / norms[i];
  }

  const DenseMatrix window_rows = a.select_rows(gamma);
  DenseMatrix q_tilde = q * subspace_projector(window_rows, Subspace::kRowSpace);
  const double q_tilde_norm = spectral_norm(q_tilde);

  return IterationOperators{std::move(q), std::move(r), std::move(q_tilde),
                            std::vector<std::size_t>(gamma.begin(), gamma.end()), q_tilde_norm,
                            covers};
}

IterationOperators build_column_operators(const DenseMatrix& a) {
  const std::vector<double> norms = column_squared_norms(a);
  for (std::size_t j = 0; j < norms.size(); ++j) {
    if (!(norms[j] > 0.0)) throw ZeroColumnError(j);
  }
  std::vector<std::size_t> all(a.cols());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return build_row_operators(a.transpose(), all);
}

double realized_window_contraction(const DenseMatrix& a, std::span<const std::size_t> history,
                                   std::size_t window) {
  if (window == 0) throw ContractError("window length must be positive");
  if (history.empty() || history.size() % window != 0) {
    throw ContractError("history of length " + std::to_string(history.size()) +
                        " does not split into complete windows of length " + std::to_string(window));
  }
  if (!verify_window_property(history, a.rows(), window)) {
    throw ContractError("a realized window does not cover every row");
  }
  std::map<std::vector<std::size_t>, double> cache;
  double delta = 0.0;
  for (std::size_t start = 0; start < history.size(); start += window) {
    std::vector<std::size_t> gamma(history.begin() + static_cast<std::ptrdiff_t>(start),
                                   history.begin() + static_cast<std::ptrdiff_t>(start + window));
    auto it = cache.find(gamma);
    if (it == cache.end()) {
      const double norm_value = build_row_operators(a, gamma).q_tilde_norm;
      it = cache.emplace(std::move(gamma), norm_value).first;
    }
    delta = std::max(delta, it->second);
  }
  return delta;
}

}  // namespace kaczmarz
