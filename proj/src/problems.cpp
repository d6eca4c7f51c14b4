#include "kaczmarz/problems.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "kaczmarz/rng.hpp"

namespace kaczmarz {

namespace {

constexpr double kMinRowColumnNorm = 1e-8;
constexpr int kMaxResamples = 100;

// d×k matrix with orthonormal columns from Gaussian draws (Gram-Schmidt, two passes).
std::vector<Vector> random_orthonormal_columns(SplitMix64& rng, std::size_t d, std::size_t k) {
  std::vector<Vector> basis;
  basis.reserve(k);
  while (basis.size() < k) {
    Vector v(d);
    for (double& e : v) e = rng.normal();
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& u : basis) {
        const double proj = dot(v, u);
        for (std::size_t i = 0; i < d; ++i) v[i] -= proj * u[i];
      }
    }
    const double len = norm(v.span());
    if (len < 1e-8) continue;
    v *= 1.0 / len;
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

LeastSquaresProblem generate_problem(std::size_t m, std::size_t n, std::size_t rank,
                                     double noise_ratio, double condition_cap, std::uint64_t seed) {
  if (m == 0 || n == 0) throw InvalidInputError("problem dimensions must be at least 1");
  if (rank == 0 || rank > std::min(m, n)) {
    throw InvalidInputError("rank must lie in [1, min(m, n)], got " + std::to_string(rank));
  }
  if (!std::isfinite(noise_ratio) || noise_ratio < 0.0) {
    throw InvalidInputError("noise ratio must be a finite value >= 0");
  }
  if (!std::isfinite(condition_cap) || condition_cap < 1.0) {
    throw InvalidInputError("condition cap must be a finite value >= 1");
  }
  if (noise_ratio > 0.0 && rank == m) {
    throw NoiseUnsupportedError("rank equals the row count, so N(A^T) = {0} and no noise fits");
  }

  SplitMix64 rng(seed);
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    const std::vector<Vector> u = random_orthonormal_columns(rng, m, rank);
    const std::vector<Vector> v = random_orthonormal_columns(rng, n, rank);

    std::vector<double> sigma(rank, 1.0);
    const double log_cap = std::log(condition_cap);
    if (rank >= 2) {
      sigma[rank - 1] = 1.0 / condition_cap;
      for (std::size_t k = 1; k + 1 < rank; ++k) sigma[k] = std::exp(-rng.uniform() * log_cap);
      std::sort(sigma.begin(), sigma.end(), std::greater<>());
    }

    DenseMatrix a(m, n);
    for (std::size_t k = 0; k < rank; ++k) {
      for (std::size_t i = 0; i < m; ++i) {
        const double scaled = sigma[k] * u[k][i];
        for (std::size_t j = 0; j < n; ++j) a(i, j) += scaled * v[k][j];
      }
    }

    bool degenerate = false;
    for (double s : row_squared_norms(a)) degenerate |= std::sqrt(s) < kMinRowColumnNorm;
    for (double s : column_squared_norms(a)) degenerate |= std::sqrt(s) < kMinRowColumnNorm;
    if (degenerate) continue;

    Vector x_true(n);
    for (double& e : x_true) e = rng.normal();
    Vector b = a * x_true;

    Vector r(m);
    if (noise_ratio > 0.0) {
      const DenseMatrix left_null = subspace_projector(a, Subspace::kLeftNullSpace);
      Vector g(m);
      Vector dir(m);
      double len = 0.0;
      while (!(len > 1e-6)) {
        for (double& e : g) e = rng.normal();
        dir = left_null * g;
        len = norm(dir.span());
      }
      r = dir * (noise_ratio * norm(b.span()) / len);
    }

    Vector bhat = b + r;
    Vector x_ls = min_norm_solution(a, b);
    return LeastSquaresProblem{std::move(a), std::move(bhat), std::move(b), std::move(r),
                               std::move(x_ls), rank, seed};
  }
  throw InvalidInputError("could not generate a matrix without zero rows or columns");
}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace {

void write_values(std::ostream& out, std::span<const double> values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out << ' ';
    out << format_double(values[k]);
  }
  out << '\n';
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string next(const std::string& expecting) {
    std::string line;
    if (!std::getline(in_, line)) {
      throw ParseError(line_number_ + 1, "unexpected end of file, expected " + expecting);
    }
    ++line_number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  std::size_t line_number() const { return line_number_; }

  void expect_label(const std::string& label) {
    const std::string line = next("'" + label + "'");
    if (line != label) {
      throw ParseError(line_number_, "expected '" + label + "', found '" + line + "'");
    }
  }

  std::vector<double> numbers(std::size_t count, const std::string& what) {
    const std::string line = next(what);
    std::vector<double> values;
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
        throw ParseError(line_number_, "invalid number '" + token + "' in " + what);
      }
      values.push_back(value);
    }
    if (values.size() != count) {
      throw ParseError(line_number_, what + " has " + std::to_string(values.size()) +
                                         " values, expected " + std::to_string(count));
    }
    return values;
  }

  bool only_blank_lines_remain() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_number_;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return false;
    }
    return true;
  }

 private:
  std::istream& in_;
  std::size_t line_number_ = 0;
};

template <class T>
T parse_integer(const std::string& token, std::size_t line, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, std::string("invalid ") + what + " '" + token + "'");
  }
  return value;
}

}  // namespace

void write_problem(std::ostream& out, const LeastSquaresProblem& p) {
  out << "kaczmarz-problem v1 " << p.a.rows() << ' ' << p.a.cols() << ' ' << p.rank << ' '
      << p.seed << '\n';
  out << "A:\n";
  for (std::size_t i = 0; i < p.a.rows(); ++i) write_values(out, p.a.row_span(i));
  out << "bhat:\n";
  write_values(out, p.bhat);
  out << "b:\n";
  write_values(out, p.b);
  out << "r:\n";
  write_values(out, p.r);
  out << "x_ls:\n";
  write_values(out, p.x_ls);
}

LeastSquaresProblem read_problem(std::istream& in) {
  LineReader reader(in);
  const std::string header = reader.next("header");
  std::istringstream tokens(header);
  std::string magic, version, m_s, n_s, rank_s, seed_s, extra;
  tokens >> magic >> version >> m_s >> n_s >> rank_s >> seed_s;
  if (magic != "kaczmarz-problem") throw ParseError(1, "not a kaczmarz-problem file");
  if (version != "v1") throw ParseError(1, "unsupported version '" + version + "'");
  if (seed_s.empty() || (tokens >> extra)) throw ParseError(1, "malformed header");
  const auto m = parse_integer<std::size_t>(m_s, 1, "row count");
  const auto n = parse_integer<std::size_t>(n_s, 1, "column count");
  const auto rank = parse_integer<std::size_t>(rank_s, 1, "rank");
  const auto seed = parse_integer<std::uint64_t>(seed_s, 1, "seed");
  if (m == 0 || n == 0) throw ParseError(1, "dimensions must be at least 1");
  if (rank == 0 || rank > std::min(m, n)) throw ParseError(1, "rank out of range");

  reader.expect_label("A:");
  std::vector<double> entries;
  entries.reserve(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = reader.numbers(n, "row " + std::to_string(i) + " of A");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  reader.expect_label("bhat:");
  Vector bhat(reader.numbers(m, "bhat"));
  reader.expect_label("b:");
  Vector b(reader.numbers(m, "b"));
  reader.expect_label("r:");
  Vector r(reader.numbers(m, "r"));
  reader.expect_label("x_ls:");
  Vector x_ls(reader.numbers(n, "x_ls"));
  if (!reader.only_blank_lines_remain()) {
    throw ParseError(reader.line_number(), "unexpected content after x_ls");
  }
  return LeastSquaresProblem{DenseMatrix(m, n, std::move(entries)), std::move(bhat), std::move(b),
                             std::move(r), std::move(x_ls), rank, seed};
}

void save_problem(const std::filesystem::path& path, const LeastSquaresProblem& problem) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_problem(out, problem);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

LeastSquaresProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_problem(in);
}

}  // namespace kaczmarz
