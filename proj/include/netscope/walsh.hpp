#pragma once

// b-adic Walsh functions, character sums over nets, Walsh coefficients of
// anchored intervals, and the dual-net Walsh series of the discrepancy
// function.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "netscope/errors.hpp"
#include "netscope/net.hpp"
#include "netscope/numeric.hpp"
#include "netscope/parallel.hpp"
#include "netscope/quality.hpp"

namespace netscope {

/// Exponent k (mod b) with wal_alpha(x) = omega^k, for one coordinate.
inline std::uint64_t walsh_exponent(std::uint64_t alpha, const BAdic& x) {
  const Digit b = x.base;
  std::uint64_t e = 0;
  for (unsigned a = 1; alpha != 0; ++a, alpha /= b) {
    const auto beta = alpha % b;
    if (beta != 0) e += beta * x.digit(a);
  }
  return e % b;
}

inline Complex walsh_eval(std::uint64_t alpha, const BAdic& x) {
  return UnitRoots(x.base)(static_cast<std::int64_t>(walsh_exponent(alpha, x)));
}

inline Complex walsh_eval(std::span<const std::uint64_t> alpha, std::span<const BAdic> x) {
  require(alpha.size() == x.size(), ErrorCode::DimensionMismatch, "Walsh index and point differ in dimension");
  if (x.empty()) return 1.0;
  std::uint64_t e = 0;
  for (std::size_t i = 0; i < x.size(); ++i) e += walsh_exponent(alpha[i], x[i]);
  return UnitRoots(x.front().base)(static_cast<std::int64_t>(e % x.front().base));
}

inline std::vector<BAdic> point_coords(const PointSet& pts, std::size_t p) {
  std::vector<BAdic> x(pts.d);
  for (std::size_t i = 0; i < pts.d; ++i) x[i] = pts.coord(p, i);
  return x;
}

/// Sum of wal_t over the point set. Exponents are histogrammed first, so the
/// result is sum_k count_k omega^k with exact integer counts.
inline Complex character_sum(const PointSet& pts, std::span<const std::uint64_t> t) {
  require(t.size() == pts.d, ErrorCode::DimensionMismatch, "character index has wrong dimension");
  std::vector<std::uint64_t> hist(pts.b, 0);
  for (std::size_t p = 0; p < pts.size(); ++p) {
    std::uint64_t e = 0;
    for (std::size_t i = 0; i < pts.d; ++i) e += walsh_exponent(t[i], pts.coord(p, i));
    ++hist[e % pts.b];
  }
  const UnitRoots w(pts.b);
  CompensatedComplexSum acc;
  for (Digit k = 0; k < pts.b; ++k) acc.add(static_cast<double>(hist[k]) * w(k));
  return acc.value();
}

inline Complex character_sum(const PointSet& pts, const DualVector& t) { return character_sum(pts, t.t); }

/// Integral of conj(wal_t) over [0, x), closed form.
///
/// With g = rho_1(t), leading digit tau and t = t' + tau b^{g-1}: full cells
/// of level g-1 below x integrate to zero, the level-(g-1) cell containing x
/// contributes b^{-g} sum_{k < x_g} omega^{-tau k} times conj(wal_{t'}(x)),
/// and the partial level-g cell adds conj(wal_t(x)) (x - floor_g(x)).
inline Complex chi_walsh_coeff(std::uint64_t t, const BAdic& x) {
  const Digit b = x.base;
  const double xv = x.to_double();
  if (t == 0) return xv;
  const unsigned g = nrt_weight(t, 1, b);
  const std::uint64_t lead_place = checked_pow(b, g - 1);
  const auto tau = static_cast<std::int64_t>(t / lead_place);
  const std::uint64_t rest = t % lead_place;
  const UnitRoots w(b);
  const auto xg = static_cast<std::int64_t>(x.digit(g));
  const Complex conj_rest = std::conj(walsh_eval(rest, x));
  const double cell = std::pow(static_cast<double>(b), -static_cast<double>(g));
  const Complex full = cell * (1.0 - w(-tau * xg)) / (1.0 - w(-tau));
  const auto [fnum, fden] = x.frac_scaled(g);
  const double partial = cell * static_cast<double>(fnum) / static_cast<double>(fden);
  return conj_rest * (full + w(-tau * xg) * partial);
}

/// D_P(x) = #{z in P : z < x componentwise} / N - prod x_i, strict inequalities.
inline double discrepancy_direct(const PointSet& pts, std::span<const BAdic> x) {
  require(x.size() == pts.d, ErrorCode::DimensionMismatch, "evaluation point has wrong dimension");
  std::uint64_t inside = 0;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    bool in = true;
    for (std::size_t i = 0; i < pts.d && in; ++i) in = pts.coord(p, i) < x[i];
    if (in) ++inside;
  }
  double vol = 1.0;
  for (const auto& xi : x) vol *= xi.to_double();
  return static_cast<double>(inside) / static_cast<double>(pts.size()) - vol;
}

namespace detail {
inline void require_on_grid(const GeneratingSet& g, std::span<const BAdic> x) {
  require(x.size() == g.d, ErrorCode::DimensionMismatch, "evaluation point has wrong dimension");
  for (const auto& xi : x) {
    require(xi.base == g.b, ErrorCode::DimensionMismatch, "evaluation point uses a different base");
    require(xi.on_grid(static_cast<unsigned>(g.s)), ErrorCode::TruncationUnsound,
            "coordinate is not resolved on the b^-s grid; the truncated Walsh series would be inexact");
    require(!(BAdic{1, g.b, 0} < xi), ErrorCode::InvariantViolation, "coordinate exceeds 1");
  }
}

inline double checked_real(Complex z) {
  require(std::abs(z.imag()) < 1e-9, ErrorCode::InvariantViolation,
          "Walsh series has non-negligible imaginary part " + std::to_string(z.imag()));
  return z.real();
}
}  // namespace detail

/// D_P(x) as the sum over nonzero dual vectors of prod_i chi_walsh_coeff(t_i, x_i).
/// Exact when every x_i is a multiple of b^-s and duals cover the digit box s.
inline double discrepancy_walsh(const GeneratingSet& g, std::span<const BAdic> x, std::span<const DualVector> duals) {
  detail::require_on_grid(g, x);
  CompensatedComplexSum acc;
  for (const auto& t : duals) {
    if (t.is_zero()) continue;
    Complex term = 1.0;
    for (std::size_t i = 0; i < g.d && term != Complex{}; ++i) term *= chi_walsh_coeff(t.t[i], x[i]);
    acc.add(term);
  }
  return detail::checked_real(acc.value());
}

/// Walsh-series evaluation on the whole b^-s grid, sharing one coefficient
/// table per coordinate: table[i][t_i][k] = chi_walsh_coeff(t_i, k b^-s).
class WalshGridEvaluator {
 public:
  WalshGridEvaluator(const GeneratingSet& g, Budget budget = {}) : g_(g), duals_(enumerate_dual(g, g.s, budget)) {
    side_ = checked_pow(g.b, static_cast<unsigned>(g.s));
    budget.charge(side_ * side_ * g.d, "Walsh coefficient tables");
    table_.assign(g.d, std::vector<Complex>(side_ * (side_ + 1)));
    for (std::size_t i = 0; i < g.d; ++i)
      for (std::uint64_t t = 0; t < side_; ++t)
        for (std::uint64_t k = 0; k <= side_; ++k)
          table_[i][t * (side_ + 1) + k] = chi_walsh_coeff(t, BAdic{k, g.b, static_cast<unsigned>(g.s)});
  }

  const std::vector<DualVector>& duals() const { return duals_; }
  std::uint64_t side() const { return side_; }

  /// x given as grid numerators k_i in [0, b^s] (x_i = k_i b^-s).
  double operator()(std::span<const std::uint64_t> k) const {
    CompensatedComplexSum acc;
    for (const auto& t : duals_) {
      if (t.is_zero()) continue;
      Complex term = 1.0;
      for (std::size_t i = 0; i < g_.d; ++i) term *= table_[i][t.t[i] * (side_ + 1) + k[i]];
      acc.add(term);
    }
    return detail::checked_real(acc.value());
  }

  /// Values along the last coordinate, x_d = 0, ..., b^s - 1, with the first
  /// d - 1 numerators fixed. Duals are grouped by t_d so each prefix costs
  /// one pass over the dual plus b^s * b^s table lookups.
  std::vector<double> line(std::span<const std::uint64_t> prefix) const {
    const std::size_t last = g_.d - 1;
    std::vector<Complex> weight(side_, Complex{});
    std::vector<bool> used(side_, false);
    for (const auto& t : duals_) {
      if (t.is_zero()) continue;
      Complex term = 1.0;
      for (std::size_t i = 0; i < last; ++i) term *= table_[i][t.t[i] * (side_ + 1) + prefix[i]];
      weight[t.t[last]] += term;
      used[t.t[last]] = true;
    }
    std::vector<double> out(side_);
    for (std::uint64_t k = 0; k < side_; ++k) {
      CompensatedComplexSum acc;
      for (std::uint64_t td = 0; td < side_; ++td)
        if (used[td]) acc.add(weight[td] * table_[last][td * (side_ + 1) + k]);
      out[k] = detail::checked_real(acc.value());
    }
    return out;
  }

 private:
  GeneratingSet g_;
  std::vector<DualVector> duals_;
  std::uint64_t side_ = 0;
  std::vector<std::vector<Complex>> table_;
};

struct GridComparison {
  std::uint64_t points = 0;
  double max_abs_error = 0.0;
  std::vector<std::uint64_t> worst;  // grid numerators of the worst point
};

/// Compares the Walsh series with direct counting at every point of the
/// b^-s grid in [0,1)^d.
inline GridComparison compare_walsh_direct_on_grid(const GeneratingSet& g, Budget budget = {}) {
  const PointSet pts = generate_points(g);
  const WalshGridEvaluator eval(g, budget);
  const std::uint64_t side = eval.side();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < g.d; ++i) total = total > budget.limit / side ? budget.limit + 1 : total * side;
  budget.charge(total, "grid comparison");
  const std::uint64_t prefixes = total / side;
  const auto lines = parallel_map(static_cast<std::size_t>(prefixes), [&](std::size_t idx) {
    std::vector<std::uint64_t> k(g.d);
    std::vector<BAdic> x(g.d);
    std::uint64_t rem = idx;
    for (std::size_t i = 0; i + 1 < g.d; ++i) {
      k[i] = rem % side;
      rem /= side;
      x[i] = BAdic{k[i], g.b, static_cast<unsigned>(g.s)};
    }
    const auto series = eval.line(k);
    std::vector<double> err(side);
    for (std::uint64_t kd = 0; kd < side; ++kd) {
      x[g.d - 1] = BAdic{kd, g.b, static_cast<unsigned>(g.s)};
      err[kd] = std::abs(series[kd] - discrepancy_direct(pts, x));
    }
    return err;
  });
  std::vector<double> errors;
  errors.reserve(static_cast<std::size_t>(total));
  // Flat index: coordinates 1..d-1 from the prefix (least significant first), then x_d.
  for (std::uint64_t kd = 0; kd < side; ++kd)
    for (std::uint64_t p = 0; p < prefixes; ++p) errors.push_back(lines[p][kd]);
  GridComparison out;
  out.points = total;
  for (std::size_t idx = 0; idx < errors.size(); ++idx)
    if (out.worst.empty() || errors[idx] > out.max_abs_error) {
      out.max_abs_error = errors[idx];
      out.worst.clear();
      std::uint64_t rem = idx;
      for (std::size_t i = 0; i < g.d; ++i) {
        out.worst.push_back(rem % side);
        rem /= side;
      }
    }
  return out;
}

}  // namespace netscope
