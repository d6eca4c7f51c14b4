#pragma once

// kaczmarz_lab: generate problems, run solvers, replay convergence bounds.
//
//   kaczmarz_lab generate --m 8 --n 5 --rank 5 --noise 0 --seed 1 --out p.kzp
//   kaczmarz_lab solve --problem p.kzp --solver kaczmarz --control random --iters 50 --trace-out t.csv
//   kaczmarz_lab verify --problem p.kzp --bound ekt --iters 200 --report r.json
//
// Exit codes: 0 success (bound satisfied), 1 bound violated, 2 usage or
// contract error.

#include <iosfwd>
#include <string>
#include <vector>

namespace kaczmarz::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolated = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kaczmarz::cli
