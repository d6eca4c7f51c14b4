#include "kaczmarz/controls.hpp"

#include <cmath>
#include <numeric>

#include "kaczmarz/errors.hpp"

namespace kaczmarz {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t initial_seed(const ControlKind& kind) {
  return std::visit(overloaded{[](const AlmostCyclicControl& c) { return c.seed; },
                               [](const RandomControl& c) { return c.seed; },
                               [](const auto&) { return std::uint64_t{0}; }},
                    kind);
}

}  // namespace

std::string control_name(const ControlKind& kind) {
  return std::visit(overloaded{[](const CyclicControl&) { return std::string("cyclic"); },
                               [](const AlmostCyclicControl&) { return std::string("almost-cyclic"); },
                               [](const MaximalResidualControl&) { return std::string("mr"); },
                               [](const RandomControl&) { return std::string("random"); }},
                    kind);
}

ControlState::ControlState(ControlKind kind, std::size_t index_count)
    : kind_(kind), index_count_(index_count), rng_(initial_seed(kind)) {
  if (index_count == 0) throw InvalidInputError("control needs at least one index");
  if (const auto* ac = std::get_if<AlmostCyclicControl>(&kind_)) {
    if (ac->window < index_count) {
      throw InvalidInputError("almost-cyclic window " + std::to_string(ac->window) +
                              " cannot cover " + std::to_string(index_count) + " indices");
    }
  }
}

std::size_t ControlState::record(std::size_t index) {
  history_.push_back(index);
  return index;
}

std::size_t ControlState::next_scheduled() {
  if (std::holds_alternative<CyclicControl>(kind_)) return history_.size() % index_count_;

  const std::size_t window = std::get<AlmostCyclicControl>(kind_).window;
  if (window_position_ == pending_window_.size()) {
    pending_window_.resize(window);
    std::iota(pending_window_.begin(), pending_window_.begin() + index_count_, std::size_t{0});
    for (std::size_t t = index_count_; t < window; ++t) {
      pending_window_[t] = static_cast<std::size_t>(rng_.below(index_count_));
    }
    for (std::size_t t = window; t > 1; --t) {
      std::swap(pending_window_[t - 1], pending_window_[rng_.below(t)]);
    }
    window_position_ = 0;
  }
  return pending_window_[window_position_++];
}

std::size_t ControlState::next_greedy(std::span<const double> scores) {
  if (scores.size() != index_count_) {
    throw ContractError("maximal-residual control needs " + std::to_string(index_count_) +
                        " scores, got " + std::to_string(scores.size()));
  }
  std::size_t best = 0;
  double best_value = std::abs(scores[0]);
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (std::abs(scores[i]) > best_value) {
      best = i;
      best_value = std::abs(scores[i]);
    }
  }
  return best;
}

std::size_t ControlState::next_sampled(std::span<const double> weights) {
  if (weights.size() != index_count_) {
    throw ContractError("random control expects " + std::to_string(index_count_) +
                        " weights, got " + std::to_string(weights.size()));
  }
  const std::vector<double> p = sampling_distribution(weights);
  const double u = rng_.uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cumulative += p[i];
    if (u < cumulative) return i;
  }
  // u landed in the rounding gap above the last partial sum.
  for (std::size_t i = p.size(); i-- > 0;) {
    if (p[i] > 0.0) return i;
  }
  return p.size() - 1;
}

std::size_t ControlState::next_row_index(const DenseMatrix& a, std::span<const double> residual) {
  if (a.rows() != index_count_) {
    throw ContractError("row control built for " + std::to_string(index_count_) +
                        " rows, matrix has " + std::to_string(a.rows()));
  }
  return std::visit(
      overloaded{[&](const MaximalResidualControl&) {
                   if (residual.empty()) throw ContractError("maximal-residual control needs the residual");
                   return record(next_greedy(residual));
                 },
                 [&](const RandomControl&) { return record(next_sampled(row_squared_norms(a))); },
                 [&](const auto&) { return record(next_scheduled()); }},
      kind_);
}

std::size_t ControlState::next_column_index(const DenseMatrix& a, const Vector& y) {
  if (a.cols() != index_count_) {
    throw ContractError("column control built for " + std::to_string(index_count_) +
                        " columns, matrix has " + std::to_string(a.cols()));
  }
  return std::visit(
      overloaded{[&](const MaximalResidualControl&) {
                   const Vector correlations = transpose_times(a, y);
                   return record(next_greedy(correlations));
                 },
                 [&](const RandomControl&) { return record(next_sampled(column_squared_norms(a))); },
                 [&](const auto&) { return record(next_scheduled()); }},
      kind_);
}

std::vector<double> sampling_distribution(std::span<const double> squared_norms) {
  const double total = std::accumulate(squared_norms.begin(), squared_norms.end(), 0.0);
  if (!(total > 0.0)) throw InvalidInputError("sampling weights sum to zero");
  std::vector<double> p(squared_norms.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = squared_norms[i] / total;
  return p;
}

bool verify_window_property(std::span<const std::size_t> history, std::size_t m,
                            std::size_t window) {
  if (history.empty()) throw InvalidInputError("empty control history");
  if (m == 0) throw InvalidInputError("index set must be nonempty");
  if (window < m) {
    throw InvalidInputError("window " + std::to_string(window) + " cannot cover " +
                            std::to_string(m) + " indices");
  }
  std::vector<std::size_t> seen(m, 0);
  std::size_t stamp = 0;
  for (std::size_t start = 0; start + window <= history.size(); start += window) {
    ++stamp;
    std::size_t covered = 0;
    for (std::size_t t = start; t < start + window; ++t) {
      const std::size_t i = history[t];
      if (i >= m) throw InvalidInputError("index " + std::to_string(i) + " out of range");
      if (seen[i] != stamp) {
        seen[i] = stamp;
        ++covered;
      }
    }
    if (covered != m) return false;
  }
  for (std::size_t t = (history.size() / window) * window; t < history.size(); ++t) {
    if (history[t] >= m) throw InvalidInputError("index " + std::to_string(history[t]) + " out of range");
  }
  return true;
}

}  // namespace kaczmarz
