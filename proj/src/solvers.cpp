#include "kaczmarz/solvers.hpp"

#include "kaczmarz/errors.hpp"
#include "kaczmarz/projections.hpp"

namespace kaczmarz {

namespace {

void validate(const DenseMatrix& a, const Vector& rhs, const Vector& x0, const SolverConfig& config,
              bool need_columns) {
  if (rhs.size() != a.rows()) {
    throw InvalidInputError("right-hand side has length " + std::to_string(rhs.size()) +
                            ", matrix has " + std::to_string(a.rows()) + " rows");
  }
  if (x0.size() != a.cols()) {
    throw InvalidInputError("initial iterate has length " + std::to_string(x0.size()) +
                            ", matrix has " + std::to_string(a.cols()) + " columns");
  }
  if (config.max_iterations == 0) throw InvalidInputError("max_iterations must be at least 1");
  if (!(config.stop_tolerance >= 0.0)) throw InvalidInputError("stop_tolerance must be >= 0");
  if (config.reference && config.reference->size() != a.cols()) {
    throw InvalidInputError("reference solution has the wrong length");
  }
  const std::vector<double> rows = row_squared_norms(a);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i] > 0.0)) throw ZeroRowError(i);
  }
  if (need_columns) {
    const std::vector<double> cols = column_squared_norms(a);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (!(cols[j] > 0.0)) throw ZeroColumnError(j);
    }
  }
}

// Stores iterates according to the config and decides when to stop.
class Recorder {
 public:
  Recorder(const SolverConfig& config, IterateTrace& trace) : config_(config), trace_(trace) {}

  void start(const Vector& x0, const Vector* y0 = nullptr, const Vector* b0 = nullptr) {
    trace_.iterates.push_back(x0);
    if (y0) trace_.y_iterates.push_back(*y0);
    if (b0) trace_.rhs_iterates.push_back(*b0);
    record_error(x0);
  }

  /// Records iterate k+1 and returns true when the run should stop.
  bool step(const Vector& previous, const Vector& x, const Vector* y = nullptr,
            const Vector* b = nullptr) {
    ++trace_.iterations;
    const bool last = trace_.iterations == config_.max_iterations;
    const bool converged =
        config_.stop_tolerance > 0.0 && norm((x - previous).span()) <= config_.stop_tolerance;
    if (config_.record_trace || last || converged) {
      trace_.iterates.push_back(x);
      if (y) trace_.y_iterates.push_back(*y);
      if (b) trace_.rhs_iterates.push_back(*b);
    }
    record_error(x);
    if (converged && !last) trace_.stopped_early = true;
    return last || converged;
  }

 private:
  void record_error(const Vector& x) {
    if (config_.reference) trace_.errors.push_back(norm((x - *config_.reference).span()));
  }

  const SolverConfig& config_;
  IterateTrace& trace_;
};

Vector residual(const DenseMatrix& a, const Vector& x, const Vector& rhs) { return a * x - rhs; }

}  // namespace

IterateTrace solve_kt(const DenseMatrix& a, const Vector& b, const Vector& x0,
                      const SolverConfig& config) {
  validate(a, b, x0, config, false);
  IterateTrace trace;
  Recorder recorder(config, trace);
  recorder.start(x0);
  Vector x = x0;
  for (;;) {
    Vector next = sweep_rows(a, b, x);
    const bool done = recorder.step(x, next);
    x = std::move(next);
    if (done) break;
  }
  return trace;
}

IterateTrace solve_kaczmarz(const DenseMatrix& a, const Vector& b, const Vector& x0,
                            const SolverConfig& config) {
  validate(a, b, x0, config, false);
  const std::vector<double> norms = row_squared_norms(a);
  const bool greedy = std::holds_alternative<MaximalResidualControl>(config.row_control);
  ControlState control(config.row_control, a.rows());

  IterateTrace trace;
  Recorder recorder(config, trace);
  recorder.start(x0);
  Vector x = x0;
  for (;;) {
    const std::size_t i =
        greedy ? control.next_row_index(a, residual(a, x, b).span()) : control.next_row_index(a);
    Vector next = x;
    project_hyperplane_inplace(a.row_span(i), norms[i], b[i], next);
    const bool done = recorder.step(x, next);
    x = std::move(next);
    if (done) break;
  }
  trace.row_indices = control.history();
  return trace;
}

IterateTrace solve_ekt(const DenseMatrix& a, const Vector& bhat, const Vector& x0,
                       const SolverConfig& config) {
  validate(a, bhat, x0, config, true);
  IterateTrace trace;
  Recorder recorder(config, trace);
  Vector y = bhat;
  Vector rhs = bhat - y;
  recorder.start(x0, &y, &rhs);
  Vector x = x0;
  for (;;) {
    y = sweep_columns(a, y);
    rhs = bhat - y;
    Vector next = sweep_rows(a, rhs, x);
    const bool done = recorder.step(x, next, &y, &rhs);
    x = std::move(next);
    if (done) break;
  }
  return trace;
}

IterateTrace solve_extended_kaczmarz(const DenseMatrix& a, const Vector& bhat, const Vector& x0,
                                     const SolverConfig& config) {
  validate(a, bhat, x0, config, true);
  const std::vector<double> row_norms = row_squared_norms(a);
  const std::vector<double> col_norms = column_squared_norms(a);
  const bool greedy_rows = std::holds_alternative<MaximalResidualControl>(config.row_control);
  ControlState row_control(config.row_control, a.rows());
  ControlState column_control(config.column_control, a.cols());

  IterateTrace trace;
  Recorder recorder(config, trace);
  Vector y = bhat;
  Vector rhs = bhat - y;
  recorder.start(x0, &y, &rhs);
  Vector x = x0;
  for (;;) {
    // y^k = y^{k-1} - ⟨y^{k-1}, A^j⟩ / ‖A^j‖² · A^j
    const std::size_t j = column_control.next_column_index(a, y);
    double proj = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) proj += a(r, j) * y[r];
    proj /= col_norms[j];
    for (std::size_t r = 0; r < a.rows(); ++r) y[r] -= proj * a(r, j);
    rhs = bhat - y;

    const std::size_t i = greedy_rows ? row_control.next_row_index(a, residual(a, x, rhs).span())
                                      : row_control.next_row_index(a);
    Vector next = x;
    project_hyperplane_inplace(a.row_span(i), row_norms[i], rhs[i], next);
    const bool done = recorder.step(x, next, &y, &rhs);
    x = std::move(next);
    if (done) break;
  }
  trace.row_indices = row_control.history();
  trace.column_indices = column_control.history();
  return trace;
}

}  // namespace kaczmarz
