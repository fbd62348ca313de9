#pragma once

// L2 and Besov-type norms of the discrepancy function, and scaling studies
// over families of nets.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "netscope/constructions.hpp"
#include "netscope/errors.hpp"
#include "netscope/haar.hpp"
#include "netscope/net.hpp"
#include "netscope/numeric.hpp"
#include "netscope/parallel.hpp"
#include "netscope/quality.hpp"

namespace netscope {

/// Warnock's formula for ||D_P||_2^2, returned as the square root.
inline double l2_warnock_squared(const PointSet& pts) {
  const std::size_t n = pts.size(), d = pts.d;
  std::vector<std::vector<double>> x(n, std::vector<double>(d));
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t i = 0; i < d; ++i) x[p][i] = pts.coord_double(p, i);

  // Row sums of the pair term, one per outer point; combined in index order.
  const auto rows = parallel_map(n, [&](std::size_t p) {
    CompensatedSum row;
    for (std::size_t q = 0; q < n; ++q) {
      double prod = 1.0;
      for (std::size_t i = 0; i < d; ++i) prod *= 1.0 - std::max(x[p][i], x[q][i]);
      row.add(prod);
    }
    return row.value();
  });
  CompensatedSum pair, single;
  for (std::size_t p = 0; p < n; ++p) {
    pair.add(rows[p]);
    double prod = 1.0;
    for (std::size_t i = 0; i < d; ++i) prod *= (1.0 - x[p][i] * x[p][i]) / 2.0;
    single.add(prod);
  }
  const double dn = static_cast<double>(n);
  CompensatedSum total;
  total.add(std::pow(3.0, -static_cast<double>(d)));
  total.add(-2.0 / dn * single.value());
  total.add(pair.value() / (dn * dn));
  return std::max(0.0, total.value());
}

inline double l2_warnock(const PointSet& pts) { return std::sqrt(l2_warnock_squared(pts)); }

struct L2HaarResult {
  double value = 0.0;
  double squared = 0.0;
  /// Squared contribution of the last level order included.
  double tail = 0.0;
  /// Cumulative squared value after each level order 0..j_max.
  std::vector<double> cumulative;
};

/// Parseval sum over |j|_+ <= j_max: sum_j b^{|j|_+} sum_{m,l} |mu_{j,m,l}|^2.
inline L2HaarResult l2_haar(const std::vector<LevelCoefficients>& levels, unsigned j_max) {
  L2HaarResult out;
  std::vector<CompensatedSum> by_order(j_max + 1);
  for (const auto& lc : levels) {
    if (lc.order() > j_max) continue;
    by_order[lc.order()].add(std::pow(static_cast<double>(lc.base()), lc.order()) * lc.power_sum(2.0));
  }
  CompensatedSum acc;
  for (unsigned o = 0; o <= j_max; ++o) {
    acc.add(by_order[o].value());
    out.cumulative.push_back(acc.value());
  }
  out.squared = acc.value();
  out.value = std::sqrt(out.squared);
  out.tail = by_order[j_max].value();
  return out;
}

inline L2HaarResult l2_haar(const PointSet& pts, unsigned j_max, Budget budget = {}) {
  return l2_haar(compute_levels(pts, j_max, budget), j_max);
}

inline unsigned default_j_max(std::size_t n) { return static_cast<unsigned>(n) + 6; }

struct BesovParams {
  double p = 2.0;
  double q = 2.0;
  double r = 0.0;
  unsigned j_max = 0;
  /// Evaluate outside the admissible parameter range (e.g. p = q = inf).
  bool allow_inadmissible = false;
};

inline bool besov_admissible(const BesovParams& bp, std::string* why = nullptr) {
  auto no = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (!(bp.p >= 1.0) || !(bp.q >= 1.0)) return no("p and q must be at least 1");
  const double inv_p = std::isinf(bp.p) ? 0.0 : 1.0 / bp.p;
  if (!(inv_p - 1.0 < bp.r && bp.r < std::min(inv_p, 1.0)))
    return no("need 1/p - 1 < r < min(1/p, 1), got p=" + std::to_string(bp.p) + ", r=" + std::to_string(bp.r));
  if (std::isinf(bp.p) && !(bp.q > 1.0)) return no("q must exceed 1 when p is infinite");
  return true;
}

struct BesovResult {
  double value = 0.0;
  /// value(j_max) - value(j_max - 1); zero when j_max = 0.
  double last_increment = 0.0;
};

/// (sum_j (b^{|j|_+(r - 1/p + 1)} ||mu_j||_p)^q)^{1/q} over |j|_+ <= j_max,
/// with max in place of the inner/outer sum when p or q is infinite.
inline BesovResult besov_quasinorm(const std::vector<LevelCoefficients>& levels, const BesovParams& bp) {
  std::string why;
  if (!besov_admissible(bp, &why) && !bp.allow_inadmissible) fail(ErrorCode::InadmissibleParams, why);
  const bool p_inf = std::isinf(bp.p), q_inf = std::isinf(bp.q);
  const double inv_p = p_inf ? 0.0 : 1.0 / bp.p;

  std::vector<CompensatedSum> sum_by_order(bp.j_max + 1);
  std::vector<double> max_by_order(bp.j_max + 1, 0.0);
  for (const auto& lc : levels) {
    if (lc.order() > bp.j_max) continue;
    const double weight = std::pow(static_cast<double>(lc.base()), lc.order() * (bp.r - inv_p + 1.0));
    const double inner = p_inf ? lc.max_abs() : std::pow(lc.power_sum(bp.p), inv_p);
    const double term = weight * inner;
    if (q_inf)
      max_by_order[lc.order()] = std::max(max_by_order[lc.order()], term);
    else
      sum_by_order[lc.order()].add(std::pow(term, bp.q));
  }
  auto value_through = [&](unsigned top) {
    if (q_inf) {
      double mx = 0.0;
      for (unsigned o = 0; o <= top; ++o) mx = std::max(mx, max_by_order[o]);
      return mx;
    }
    CompensatedSum acc;
    for (unsigned o = 0; o <= top; ++o) acc.add(sum_by_order[o].value());
    return std::pow(acc.value(), 1.0 / bp.q);
  };
  BesovResult out;
  out.value = value_through(bp.j_max);
  if (bp.j_max > 0) out.last_increment = out.value - value_through(bp.j_max - 1);
  return out;
}

inline BesovResult besov_quasinorm(const PointSet& pts, const BesovParams& bp, Budget budget = {}) {
  std::string why;
  if (!besov_admissible(bp, &why) && !bp.allow_inadmissible) fail(ErrorCode::InadmissibleParams, why);
  return besov_quasinorm(compute_levels(pts, bp.j_max, budget), bp);
}

// ---------------------------------------------------------------------------
// Scaling studies

struct FamilySpec {
  std::string construction = "hammersley";
  Digit b = 2;
  std::size_t d = 2;
  /// Order the family is analyzed at; interlaced families use it as the
  /// interlacing factor.
  std::size_t sigma = 1;
};

inline GeneratingSet build_member(const FamilySpec& f, std::size_t n, Budget budget = {}) {
  return build_construction(f.construction, f.b, n, f.d, f.sigma, budget);
}

enum class MetricKind { L2, Besov };

struct Metric {
  MetricKind kind = MetricKind::L2;
  BesovParams besov;
  /// Besov truncation as n + j_extra when besov.j_max is 0.
  unsigned j_extra = 6;
};

struct ScalingRow {
  std::size_t n = 0;
  std::uint64_t N = 0;
  double value = 0.0;
  double normalized = 0.0;
  double envelope = 0.0;
  std::string envelope_id;
  std::optional<unsigned> certified_v;
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  double max_min_ratio = 1.0;
  /// Sup of the normalized column: the fitted constant.
  double fitted_constant = 0.0;
  std::vector<std::string> warnings;
};

/// n^{(d-1)/2} b^{-n} for L2; b^{n(r-1)} n^{(d-1)/q} for Besov.
inline double scaling_envelope(const Metric& m, Digit b, std::size_t n, std::size_t d) {
  const double dn = static_cast<double>(n), dd = static_cast<double>(d), bd = static_cast<double>(b);
  if (m.kind == MetricKind::L2) return std::pow(dn, (dd - 1.0) / 2.0) * std::pow(bd, -dn);
  const double inv_q = std::isinf(m.besov.q) ? 0.0 : 1.0 / m.besov.q;
  return std::pow(bd, dn * (m.besov.r - 1.0)) * std::pow(dn, (dd - 1.0) * inv_q);
}

inline std::string envelope_id(const Metric& m) {
  return m.kind == MetricKind::L2 ? "n^((d-1)/2)/b^n" : "b^(n(r-1))*n^((d-1)/q)";
}

inline double metric_value(const PointSet& pts, const Metric& m, Budget budget = {}) {
  if (m.kind == MetricKind::L2) return l2_warnock(pts);
  BesovParams bp = m.besov;
  if (bp.j_max == 0) bp.j_max = static_cast<unsigned>(pts.n) + m.j_extra;
  return besov_quasinorm(pts, bp, budget).value;
}

inline void summarize(ScalingStudy& st) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : st.rows) {
    lo = std::min(lo, r.normalized);
    hi = std::max(hi, r.normalized);
  }
  st.fitted_constant = hi;
  st.max_min_ratio = st.rows.empty() ? 1.0 : hi / lo;
}

inline ScalingStudy scaling_study(const FamilySpec& family, std::size_t n_lo, std::size_t n_hi, const Metric& metric,
                                  Budget budget = {}) {
  ScalingStudy st;
  if (metric.kind == MetricKind::Besov && family.sigma < 2 && metric.besov.r <= 0.0)
    st.warnings.push_back("order-1 nets are only covered for r > 0 (0 < r < 1/p); r=" +
                          std::to_string(metric.besov.r) + " is outside that range");
  for (std::size_t n = n_lo; n <= n_hi; ++n) {
    const auto g = build_member(family, n, budget);
    const auto pts = generate_points(g);
    ScalingRow row;
    row.n = n;
    row.N = pts.size();
    row.value = metric_value(pts, metric, budget);
    row.envelope = scaling_envelope(metric, family.b, n, g.d);
    row.normalized = row.value / row.envelope;
    row.envelope_id = envelope_id(metric);
    row.certified_v = min_quality_v(g, family.sigma, budget).v;
    st.rows.push_back(std::move(row));
  }
  summarize(st);
  return st;
}

/// Same table for externally supplied point sets (e.g. random controls),
/// one point set per n.
inline ScalingStudy scaling_study(const std::vector<PointSet>& sets, const Metric& metric, Budget budget = {}) {
  ScalingStudy st;
  for (const auto& pts : sets) {
    ScalingRow row;
    row.n = pts.n;
    row.N = pts.size();
    row.value = metric_value(pts, metric, budget);
    row.envelope = scaling_envelope(metric, pts.b, pts.n, pts.d);
    row.normalized = row.value / row.envelope;
    row.envelope_id = envelope_id(metric);
    st.rows.push_back(std::move(row));
  }
  summarize(st);
  return st;
}

}  // namespace netscope
