#include "percap/brute_force.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace percap {

namespace {

void check_size(std::size_t N) {
  if (N == 0 || N > kMaxBruteN)
    throw std::invalid_argument("brute force: N must lie in 1.." + std::to_string(kMaxBruteN) + ", got " + std::to_string(N));
}

// J_i = +1 when bit i of the code is set.
double row_dot(const double* g, std::size_t N, std::uint64_t code) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += (code >> i & 1u) ? g[i] : -g[i];
  return s;
}

// Visits all 2^N codes in Gray order and hands each one's violation count to visit.
template <class Visit>
void gray_walk(const Disorder& d, double kappa, Visit&& visit) {
  check_size(d.N);
  const double thr = kappa * std::sqrt(static_cast<double>(d.N));
  std::vector<double> sum(d.M);
  std::uint64_t code = 0;
  std::size_t bad = 0;
  auto rebuild = [&] {
    bad = 0;
    for (std::size_t mu = 0; mu < d.M; ++mu) {
      sum[mu] = row_dot(d.row(mu), d.N, code);
      bad += sum[mu] < thr;
    }
  };
  rebuild();
  visit(bad);
  const std::uint64_t total = std::uint64_t{1} << d.N;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int i = std::countr_zero(k);
    code ^= std::uint64_t{1} << i;
    if ((k & 0xFFFF) == 0) {
      rebuild();
    } else {
      // The new J_i is +1 iff the bit is now set; the sum moves by 2 g J_i.
      const double sgn = (code >> i & 1u) ? 2.0 : -2.0;
      for (std::size_t mu = 0; mu < d.M; ++mu) {
        const bool was_bad = sum[mu] < thr;
        sum[mu] += sgn * d.at(mu, static_cast<std::size_t>(i));
        const bool now_bad = sum[mu] < thr;
        bad += static_cast<std::size_t>(now_bad) - static_cast<std::size_t>(was_bad);
      }
    }
    visit(bad);
  }
}

}  // namespace

std::uint64_t exhaustive_Z(const Disorder& d, double kappa) {
  std::uint64_t z = 0;
  gray_walk(d, kappa, [&](std::size_t bad) { z += bad == 0; });
  return z;
}

std::uint64_t naive_Z(const Disorder& d, double kappa) {
  check_size(d.N);
  const double thr = kappa * std::sqrt(static_cast<double>(d.N));
  std::uint64_t z = 0;
  const std::uint64_t total = std::uint64_t{1} << d.N;
  for (std::uint64_t code = 0; code < total; ++code) {
    bool ok = true;
    for (std::size_t mu = 0; mu < d.M && ok; ++mu) ok = row_dot(d.row(mu), d.N, code) >= thr;
    z += ok;
  }
  return z;
}

std::vector<std::uint64_t> violation_histogram(const Disorder& d, double kappa) {
  std::vector<std::uint64_t> h(d.M + 1, 0);
  gray_walk(d, kappa, [&](std::size_t bad) { ++h[bad]; });
  return h;
}

double soft_Z_from_histogram(const std::vector<std::uint64_t>& hist, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("soft_Z: need beta >= 0");
  // Log-sum-exp anchored at the smallest populated violation count.
  std::size_t v0 = 0;
  while (v0 < hist.size() && hist[v0] == 0) ++v0;
  if (v0 == hist.size()) return -std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (std::size_t v = v0; v < hist.size(); ++v)
    if (hist[v] > 0) s += static_cast<double>(hist[v]) * std::exp(-beta * static_cast<double>(v - v0));
  return -beta * static_cast<double>(v0) + std::log(s);
}

double soft_Z(const Disorder& d, double kappa, double beta) { return soft_Z_from_histogram(violation_histogram(d, kappa), beta); }

CapacityResult capacity_MN(const std::function<std::vector<double>()>& next_row, std::size_t N, double kappa, std::size_t M_max) {
  check_size(N);
  if (M_max == 0) throw std::invalid_argument("capacity_MN: need M_max >= 1");
  const double thr = kappa * std::sqrt(static_cast<double>(N));
  // Split J into two halves so a row dot is two table lookups.
  const std::size_t lo_bits = N / 2, hi_bits = N - lo_bits;
  std::vector<double> lo_tab(std::size_t{1} << lo_bits), hi_tab(std::size_t{1} << hi_bits);

  CapacityResult r;
  r.N = N;
  std::vector<std::uint32_t> alive;
  bool first = true;
  for (std::size_t m = 1; m <= M_max; ++m) {
    const std::vector<double> g = next_row();
    if (g.size() != N) throw std::invalid_argument("capacity_MN: row length differs from N");
    for (std::uint64_t c = 0; c < lo_tab.size(); ++c) lo_tab[c] = row_dot(g.data(), lo_bits, c);
    for (std::uint64_t c = 0; c < hi_tab.size(); ++c) hi_tab[c] = row_dot(g.data() + lo_bits, hi_bits, c);
    const std::uint32_t lo_mask = (std::uint32_t{1} << lo_bits) - 1;
    auto ok = [&](std::uint32_t c) { return lo_tab[c & lo_mask] + hi_tab[c >> lo_bits] >= thr; };
    if (first) {
      const std::uint64_t total = std::uint64_t{1} << N;
      for (std::uint64_t c = 0; c < total; ++c)
        if (ok(static_cast<std::uint32_t>(c))) alive.push_back(static_cast<std::uint32_t>(c));
      first = false;
    } else {
      alive.erase(std::remove_if(alive.begin(), alive.end(), [&](std::uint32_t c) { return !ok(c); }), alive.end());
    }
    r.Z_prefix.push_back(alive.size());
    if (alive.empty()) {
      r.M_N = m - 1;
      return r;
    }
  }
  r.M_N = M_max;
  r.censored = true;
  return r;
}

CapacityResult capacity_MN(std::size_t N, double kappa, std::size_t M_max, std::uint64_t seed) {
  const Disorder d = sample_disorder(M_max, N, seed);
  std::size_t next = 0;
  return capacity_MN(
      [&] {
        const double* r = d.row(next++);
        return std::vector<double>(r, r + d.N);
      },
      N, kappa, M_max);
}

}  // namespace percap
