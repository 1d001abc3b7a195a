// Exhaustive ground truth at small N: the solution count Z, the capacity M_N
// of a nested row sequence, and the positive-temperature partition function.
// A constraint counts as satisfied when (G J)_mu / sqrt(N) >= kappa; ties have
// probability zero under Gaussian disorder.
#pragma once

#include "percap/tap_simulator.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace percap {

inline constexpr std::size_t kMaxBruteN = 26;

// Gray-code traversal: one coordinate flips per step and the M running sums
// move by O(M). The sums are rebuilt every 2^16 steps to stop drift.
std::uint64_t exhaustive_Z(const Disorder& d, double kappa);

// Re-evaluates every constraint for every J; the self-oracle of exhaustive_Z.
std::uint64_t naive_Z(const Disorder& d, double kappa);

// Number of J violating exactly v constraints, v = 0..M (Gray-code traversal).
std::vector<std::uint64_t> violation_histogram(const Disorder& d, double kappa);

// log Z_{kappa,beta} = log sum_J exp(-beta #violated(J)).
double soft_Z(const Disorder& d, double kappa, double beta);
// The same from a precomputed violation histogram.
double soft_Z_from_histogram(const std::vector<std::uint64_t>& hist, double beta);

struct CapacityResult {
  std::size_t N = 0;
  std::size_t M_N = 0;                 // last prefix length with Z > 0
  bool censored = false;               // Z > 0 still after M_max rows
  std::vector<std::uint64_t> Z_prefix; // Z after 1, 2, ... rows
};

// Appends rows from next_row until Z = 0 or M_max rows were used.
CapacityResult capacity_MN(const std::function<std::vector<double>()>& next_row, std::size_t N, double kappa, std::size_t M_max);
// Rows are the rows of sample_disorder(M_max, N, seed), so prefixes nest across M_max.
CapacityResult capacity_MN(std::size_t N, double kappa, std::size_t M_max, std::uint64_t seed);

}  // namespace percap
