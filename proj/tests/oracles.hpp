#pragma once

// Brute-force reference implementations used only by the tests. They touch
// nothing but raw matrix entries and point numerators, so agreement with the
// library is a genuine cross-check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "netscope/haar.hpp"
#include "netscope/net.hpp"

namespace oracle {

using cplx = std::complex<double>;
using u64 = std::uint64_t;

inline u64 ipow(u64 b, unsigned e) {
  u64 r = 1;
  while (e--) r *= b;
  return r;
}

inline unsigned brute_inverse(unsigned a, unsigned b) {
  for (unsigned x = 1; x < b; ++x)
    if (a * x % b == 1) return x;
  return 0;
}

/// All vectors v in F_b^cols with M v = 0, by exhaustive enumeration.
inline std::vector<std::vector<unsigned>> brute_kernel(const std::vector<std::vector<unsigned>>& m, unsigned cols,
                                                       unsigned b) {
  std::vector<std::vector<unsigned>> out;
  const u64 total = ipow(b, cols);
  for (u64 code = 0; code < total; ++code) {
    std::vector<unsigned> v(cols);
    u64 c = code;
    for (unsigned k = 0; k < cols; ++k, c /= b) v[k] = static_cast<unsigned>(c % b);
    bool zero = true;
    for (const auto& row : m) {
      u64 acc = 0;
      for (unsigned k = 0; k < cols; ++k) acc += u64{row[k]} * v[k];
      zero = zero && acc % b == 0;
    }
    if (zero) out.push_back(v);
  }
  return out;
}

/// Digits of a, least significant first, padded to len.
inline std::vector<unsigned> digits_lsb(u64 a, unsigned b, std::size_t len) {
  std::vector<unsigned> d(len, 0);
  for (std::size_t k = 0; k < len && a; ++k, a /= b) d[k] = static_cast<unsigned>(a % b);
  return d;
}

/// rho_sigma(a): the sigma largest 1-based positions of nonzero base-b digits, summed.
inline unsigned nrt(u64 a, std::size_t sigma, unsigned b) {
  std::vector<unsigned> pos;
  for (unsigned k = 1; a; ++k, a /= b)
    if (a % b) pos.push_back(k);
  std::sort(pos.rbegin(), pos.rend());
  unsigned s = 0;
  for (std::size_t i = 0; i < pos.size() && i < sigma; ++i) s += pos[i];
  return s;
}

/// Digit a (1-based, weight b^-a) of numerator k over b^s.
inline unsigned point_digit(u64 k, unsigned b, std::size_t s, std::size_t a) {
  if (a > s) return 0;
  return static_cast<unsigned>(k / ipow(b, static_cast<unsigned>(s - a)) % b);
}

/// t is in the dual net iff every point has Walsh exponent 0 mod b.
inline bool in_dual_by_points(const netscope::PointSet& pts, const std::vector<u64>& t) {
  for (const auto& p : pts.points) {
    u64 e = 0;
    for (std::size_t i = 0; i < pts.d; ++i) {
      u64 ti = t[i];
      for (std::size_t a = 1; ti; ++a, ti /= pts.b) e += (ti % pts.b) * point_digit(p.numerators[i], pts.b, pts.s, a);
    }
    if (e % pts.b) return false;
  }
  return true;
}

/// All dual vectors with every t_i < b^box.
inline std::vector<std::vector<u64>> brute_dual(const netscope::PointSet& pts, std::size_t box) {
  std::vector<std::vector<u64>> out;
  const u64 side = ipow(pts.b, static_cast<unsigned>(box));
  std::vector<u64> t(pts.d, 0);
  while (true) {
    if (in_dual_by_points(pts, t)) out.push_back(t);
    std::size_t i = 0;
    while (i < pts.d && ++t[i] == side) t[i++] = 0;
    if (i == pts.d) break;
  }
  return out;
}

/// Least v with every nonzero dual t having rho_sigma(t) > sigma n - v, found by
/// scanning the dual in the box max(s, sigma n).
inline unsigned brute_quality_by_dual(const netscope::PointSet& pts, std::size_t sigma) {
  const std::size_t box = std::max(pts.s, sigma * pts.n);
  unsigned wmin = ~0u;
  for (const auto& t : brute_dual(pts, box)) {
    if (std::all_of(t.begin(), t.end(), [](u64 x) { return x == 0; })) continue;
    unsigned w = 0;
    for (auto ti : t) w += nrt(ti, sigma, pts.b);
    wmin = std::min(wmin, w);
  }
  const int sn = static_cast<int>(sigma * pts.n);
  if (wmin == ~0u) return 0;
  return static_cast<unsigned>(std::max(0, sn - static_cast<int>(wmin) + 1));
}

/// Every elementary interval of order n - v holds exactly b^v points (direct count).
inline bool brute_equidistributed(const netscope::PointSet& pts, unsigned v) {
  const unsigned order = static_cast<unsigned>(pts.n) - v;
  const std::size_t d = pts.d;
  std::vector<unsigned> j(d, 0);
  std::function<bool(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) -> bool {
    if (i + 1 == d) {
      j[i] = left;
      std::vector<u64> counts;
      std::vector<u64> radix(d);
      u64 cells = 1;
      for (std::size_t c = 0; c < d; ++c) cells *= ipow(pts.b, j[c]);
      counts.assign(cells, 0);
      for (const auto& p : pts.points) {
        u64 key = 0;
        for (std::size_t c = 0; c < d; ++c)
          key = key * ipow(pts.b, j[c]) + p.numerators[c] / ipow(pts.b, static_cast<unsigned>(pts.s) - j[c]);
        ++counts[key];
      }
      const u64 want = ipow(pts.b, v);
      return std::all_of(counts.begin(), counts.end(), [&](u64 c) { return c == want; });
    }
    for (unsigned x = 0; x <= left; ++x) {
      j[i] = x;
      if (!rec(i + 1, left - x)) return false;
    }
    return true;
  };
  return rec(0, order);
}

inline unsigned brute_quality_equidistribution(const netscope::PointSet& pts) {
  for (unsigned v = 0;; ++v)
    if (brute_equidistributed(pts, v)) return v;
}

// ---------------------------------------------------------------------------
// Piecewise integration of step functions on b-adic cells

inline cplx root(unsigned b, long long k) {
  const double a = 2.0 * std::numbers::pi * static_cast<double>(((k % static_cast<long long>(b)) + b) % b) / b;
  return {std::cos(a), std::sin(a)};
}

/// Haar function h_{j,m,l} at a real x in [0,1).
inline cplx haar_1d(int j, u64 m, unsigned l, unsigned b, double x) {
  if (j < 0) return 1.0;
  const double scaled = x * static_cast<double>(ipow(b, static_cast<unsigned>(j)));
  if (static_cast<u64>(std::floor(scaled)) != m) return 0.0;
  const auto k = static_cast<long long>(std::floor((scaled - static_cast<double>(m)) * b));
  return root(b, static_cast<long long>(l) * k);
}

/// Walsh function wal_t at a real x.
inline cplx walsh_1d(u64 t, unsigned b, double x) {
  long long e = 0;
  double y = x;
  for (u64 tt = t; tt; tt /= b) {
    // Nudge up so b-adic rationals like 4/9 don't lose a digit to rounding.
    y *= b;
    const auto digit = static_cast<long long>(std::floor(y + 1e-9));
    y = std::max(0.0, y - static_cast<double>(digit));
    e += static_cast<long long>(tt % b) * digit;
  }
  return root(b, e);
}

/// int_lo^hi f(x) (c0 + c1 x) dx for f constant on every cell of level `level`;
/// f is sampled at cell midpoints. lo, hi need not be on the grid.
inline cplx integrate_steps(const std::function<cplx(double)>& f, unsigned b, unsigned level, double lo, double hi,
                            double c0 = 1.0, double c1 = 0.0) {
  const double cells = static_cast<double>(ipow(b, level));
  cplx s = 0.0;
  const auto first = static_cast<u64>(std::floor(lo * cells));
  for (u64 c = first; static_cast<double>(c) < hi * cells; ++c) {
    const double a = std::max(lo, static_cast<double>(c) / cells);
    const double e = std::min(hi, static_cast<double>(c + 1) / cells);
    if (e <= a) continue;
    const double mid = (static_cast<double>(c) + 0.5) / cells;
    s += f(mid) * (c0 * (e - a) + c1 * (e * e - a * a) / 2.0);
  }
  return s;
}

inline unsigned haar_level(int j) { return j < 0 ? 0u : static_cast<unsigned>(j + 1); }

/// int_z^1 conj(h) dx with z = zk / b^ze.
inline cplx indicator_coeff(int j, u64 m, unsigned l, unsigned b, u64 zk, unsigned ze) {
  const unsigned level = std::max(haar_level(j), ze);
  return integrate_steps([&](double x) { return std::conj(haar_1d(j, m, l, b, x)); }, b, level,
                         static_cast<double>(zk) / static_cast<double>(ipow(b, ze)), 1.0);
}

/// int_0^1 x conj(h) dx.
inline cplx linear_coeff(int j, u64 m, unsigned l, unsigned b) {
  return integrate_steps([&](double x) { return std::conj(haar_1d(j, m, l, b, x)); }, b, haar_level(j), 0.0, 1.0,
                         0.0, 1.0);
}

/// int_0^1 h1 conj(h2) dx.
inline cplx gram_1d(int j1, u64 m1, unsigned l1, int j2, u64 m2, unsigned l2, unsigned b) {
  return integrate_steps([&](double x) { return haar_1d(j1, m1, l1, b, x) * std::conj(haar_1d(j2, m2, l2, b, x)); },
                         b, std::max(haar_level(j1), haar_level(j2)), 0.0, 1.0);
}

/// int_0^x conj(wal_t(y)) dy with x = xk / b^xe.
inline cplx walsh_integral(u64 t, unsigned b, u64 xk, unsigned xe) {
  const unsigned level = std::max(static_cast<unsigned>(nrt(t, 1, b)), xe);
  return integrate_steps([&](double y) { return std::conj(walsh_1d(t, b, y)); }, b, level, 0.0,
                         static_cast<double>(xk) / static_cast<double>(ipow(b, xe)));
}

/// Counting part minus volume part, each integrated piecewise.
inline cplx haar_coeff_piecewise(const netscope::PointSet& pts, const std::vector<int>& j, const std::vector<u64>& m,
                                 const std::vector<unsigned>& l) {
  cplx count = 0.0;
  for (const auto& p : pts.points) {
    cplx term = 1.0;
    for (std::size_t i = 0; i < pts.d; ++i)
      term *= indicator_coeff(j[i], m[i], l[i], pts.b, p.numerators[i], static_cast<unsigned>(pts.s));
    count += term;
  }
  cplx vol = 1.0;
  for (std::size_t i = 0; i < pts.d; ++i) vol *= linear_coeff(j[i], m[i], l[i], pts.b);
  return count / static_cast<double>(pts.size()) - vol;
}

/// Local discrepancy by direct count at a real point (strict inequalities).
inline double local_discrepancy(const netscope::PointSet& pts, const std::vector<double>& x) {
  const double den = static_cast<double>(pts.denominator());
  u64 inside = 0;
  for (const auto& p : pts.points) {
    bool in = true;
    for (std::size_t i = 0; i < pts.d && in; ++i) in = static_cast<double>(p.numerators[i]) / den < x[i];
    inside += in;
  }
  double vol = 1.0;
  for (double xi : x) vol *= xi;
  return static_cast<double>(inside) / static_cast<double>(pts.size()) - vol;
}

/// Midpoint quadrature of D_P conj(h) on the b^-level grid of [0,1)^2. Exact when
/// level >= s and level > every j_i: both factors are then constant or
/// bilinear on each cell.
class GridQuadrature2d {
 public:
  GridQuadrature2d(const netscope::PointSet& pts, unsigned level)
      : b_(pts.b), side_(ipow(pts.b, level)), disc_(side_ * side_) {
    for (u64 a = 0; a < side_; ++a)
      for (u64 c = 0; c < side_; ++c) disc_[a * side_ + c] = local_discrepancy(pts, {mid(a), mid(c)});
  }

  cplx coeff(const std::vector<int>& j, const std::vector<u64>& m, const std::vector<unsigned>& l) const {
    cplx s = 0.0;
    for (u64 a = 0; a < side_; ++a) {
      const cplx ha = std::conj(haar_1d(j[0], m[0], l[0], b_, mid(a)));
      if (ha == cplx{}) continue;
      for (u64 c = 0; c < side_; ++c) s += disc_[a * side_ + c] * ha * std::conj(haar_1d(j[1], m[1], l[1], b_, mid(c)));
    }
    return s / static_cast<double>(side_ * side_);
  }

 private:
  double mid(u64 c) const { return (static_cast<double>(c) + 0.5) / static_cast<double>(side_); }
  unsigned b_;
  u64 side_;
  std::vector<double> disc_;
};

// Every (m, l) for a level shape j.
inline std::vector<netscope::HaarIndex> indices_of(const std::vector<int>& j, netscope::Digit b) {
  std::vector<netscope::HaarIndex> out;
  std::vector<std::uint64_t> mcount;
  for (int x : j) mcount.push_back(x < 0 ? 1 : ipow(b, static_cast<unsigned>(x)));
  const auto labels = netscope::label_tuples(j, b);
  std::vector<std::uint64_t> m(j.size(), 0);
  while (true) {
    for (const auto& l : labels) out.push_back({j, m, l});
    std::size_t i = 0;
    while (i < j.size() && ++m[i] == mcount[i]) m[i++] = 0;
    if (i == j.size()) break;
  }
  return out;
}

}  // namespace oracle
