#include "percap/tap_simulator.hpp"

#include "percap/parallel.hpp"
#include "percap/scalar_kernels.hpp"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace percap {

namespace {

// Neumaier step: s + c carries the running sum with its lost low-order part.
inline void neumaier_add(double& s, double& c, double x) {
  const double t = s + x;
  c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
  s = t;
}

constexpr std::size_t kBlock = 256;

double sq_norm(const std::vector<double>& v) {
  double s = 0.0, c = 0.0;
  for (double x : v) neumaier_add(s, c, x * x);
  return s + c;
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) neumaier_add(s, c, (a[i] - b[i]) * (a[i] - b[i]));
  return std::sqrt(s + c);
}

}  // namespace

Disorder sample_disorder(std::size_t M, std::size_t N, std::uint64_t seed) {
  if (M == 0 || N == 0) throw std::invalid_argument("sample_disorder: need M, N >= 1");
  if (M > kMaxDisorderEntries / N) {
    std::ostringstream os;
    os << "sample_disorder: " << M << " x " << N << " exceeds the budget of " << kMaxDisorderEntries << " entries";
    throw std::length_error(os.str());
  }
  Disorder d;
  d.M = M;
  d.N = N;
  d.seed = seed;
  d.g.resize(M * N);
  boost::random::mt19937_64 eng(seed);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  for (double& x : d.g) x = normal(eng);
  return d;
}

std::vector<double> matvec(const Disorder& d, const std::vector<double>& x) {
  if (x.size() != d.N) throw std::invalid_argument("matvec: size mismatch");
  const std::size_t nb = (d.M + kBlock - 1) / kBlock;
  const auto blocks = parallel_map<std::vector<double>>(nb, [&](std::size_t b) {
    const std::size_t lo = b * kBlock, hi = std::min(d.M, lo + kBlock);
    std::vector<double> out(hi - lo);
    for (std::size_t mu = lo; mu < hi; ++mu) {
      const double* r = d.row(mu);
      double s = 0.0, c = 0.0;
      for (std::size_t i = 0; i < d.N; ++i) neumaier_add(s, c, r[i] * x[i]);
      out[mu - lo] = s + c;
    }
    return out;
  });
  std::vector<double> y;
  y.reserve(d.M);
  for (const auto& b : blocks) y.insert(y.end(), b.begin(), b.end());
  return y;
}

std::vector<double> matvec_t(const Disorder& d, const std::vector<double>& y) {
  if (y.size() != d.M) throw std::invalid_argument("matvec_t: size mismatch");
  const std::size_t nb = (d.N + kBlock - 1) / kBlock;
  const auto blocks = parallel_map<std::vector<double>>(nb, [&](std::size_t b) {
    const std::size_t lo = b * kBlock, hi = std::min(d.N, lo + kBlock), w = hi - lo;
    std::vector<double> s(w, 0.0), c(w, 0.0);
    for (std::size_t mu = 0; mu < d.M; ++mu) {
      const double* r = d.row(mu) + lo;
      const double ym = y[mu];
      for (std::size_t k = 0; k < w; ++k) neumaier_add(s[k], c[k], r[k] * ym);
    }
    for (std::size_t k = 0; k < w; ++k) s[k] += c[k];
    return s;
  });
  std::vector<double> x;
  x.reserve(d.N);
  for (const auto& b : blocks) x.insert(x.end(), b.begin(), b.end());
  return x;
}

std::vector<TapState> tap_iterate(const Disorder& d, const ModelParams& p, int t, const SaddlePoint& sp) {
  if (t < 1) throw std::invalid_argument("tap_iterate: need t >= 1");
  const double q1 = sp.q_star;
  if (!(q1 > 0.0 && q1 < 1.0)) throw std::invalid_argument("tap_iterate: saddle q must lie in (0,1)");
  const double N = static_cast<double>(d.N), sqrtN = std::sqrt(N);

  std::vector<TapState> out;
  out.reserve(static_cast<std::size_t>(t));
  std::vector<double> n_prev(d.M, 0.0);
  std::vector<double> m(d.N, std::sqrt(q1));
  std::vector<double> H(d.N, std::atanh(std::sqrt(q1)));
  for (int s = 1; s <= t; ++s) {
    TapState st;
    st.iter = s;
    st.q = sq_norm(m) / N;
    if (!(st.q >= 0.0 && st.q <= 1.0)) {
      st.m = m;
      throw TapDivergence("tap_iterate: q_s left [0,1] at s = " + std::to_string(s), st);
    }
    st.b = 1.0 - st.q;
    std::vector<double> h = matvec(d, m);
    double dsum = 0.0, dc = 0.0;
    std::vector<double> n(d.M);
    for (std::size_t mu = 0; mu < d.M; ++mu) {
      h[mu] = h[mu] / sqrtN - st.b * n_prev[mu];
      n[mu] = F_q(q1, p.kappa, h[mu]);
      neumaier_add(dsum, dc, F_q_deriv(q1, p.kappa, h[mu]));
    }
    st.d = (dsum + dc) / N;
    st.psi = sq_norm(n) / N;
    if (s > 1) {
      st.m_step = dist(m, out.back().m) / sqrtN;
      st.n_step = dist(n, out.back().n) / sqrtN;
    }
    st.m = m;
    st.H = H;
    st.h = std::move(h);
    st.n = n;

    // Next field and magnetization.
    std::vector<double> Hn = matvec_t(d, n);
    for (std::size_t i = 0; i < d.N; ++i) {
      Hn[i] = Hn[i] / sqrtN - st.d * m[i];
      m[i] = std::tanh(Hn[i]);
    }
    H = std::move(Hn);
    n_prev = std::move(n);
    out.push_back(std::move(st));
  }
  return out;
}

double sigma_sq_empirical(const TapState& state) {
  const double N = static_cast<double>(state.m.size());
  double s = 0.0, c = 0.0;
  for (double x : state.m) {
    const double v = 1.0 - x * x;
    neumaier_add(s, c, v * v);
  }
  return (s + c) / (N * (1.0 - state.q) * (1.0 - state.q));
}

PerturbedFixedPoint solve_fixed_point_rhs(double q, double kappa, const std::vector<double>& y) {
  PerturbedFixedPoint r;
  r.y = y;
  r.h.resize(y.size());
  r.n.resize(y.size());
  for (std::size_t mu = 0; mu < y.size(); ++mu) {
    if (!(y[mu] > kappa)) {
      std::ostringstream os;
      os << "perturbed_fixed_point: coordinate " << mu << " has y = " << y[mu] << " <= kappa = " << kappa;
      throw NoFixedPoint(os.str(), mu);
    }
    r.h[mu] = L_inverse(q, kappa, y[mu]);
    r.n[mu] = F_q(q, kappa, r.h[mu]);
    r.max_residual = std::max(r.max_residual, std::abs(r.h[mu] + (1.0 - q) * r.n[mu] - y[mu]));
  }
  return r;
}

PerturbedFixedPoint perturbed_fixed_point(const Disorder& d, const ModelParams& p, const TapState& state,
                                          const std::vector<double>& kappa_perturb, const std::vector<double>& extra_field) {
  if (kappa_perturb.size() != d.M) throw std::invalid_argument("perturbed_fixed_point: kappa_perturb must have M entries");
  if (!extra_field.empty() && extra_field.size() != d.M)
    throw std::invalid_argument("perturbed_fixed_point: extra_field must be empty or have M entries");
  std::vector<double> y = matvec(d, state.m);
  const double sqrtN = std::sqrt(static_cast<double>(d.N));
  for (std::size_t mu = 0; mu < d.M; ++mu) {
    y[mu] = y[mu] / sqrtN - kappa_perturb[mu];
    if (!extra_field.empty()) y[mu] += extra_field[mu];
  }
  return solve_fixed_point_rhs(state.q, p.kappa, y);
}

std::vector<double> sample_kappa_perturb(std::size_t M, double delta, std::uint64_t seed) {
  if (!(delta > 0.0)) throw std::invalid_argument("sample_kappa_perturb: need delta > 0");
  boost::random::mt19937_64 eng(seed);
  boost::random::uniform_real_distribution<double> u(0.0, delta / std::exp(1.0 / (delta * delta)));
  std::vector<double> k(M);
  for (double& x : k) x = u(eng);
  return k;
}

}  // namespace percap
