#pragma once

// Quality certification of (order sigma) digital (v,n,d)-nets.
//
// Three independent routes compute the least quality parameter v:
//   * row independence of the generating matrices (the definition),
//   * minimum NRT weight over the dual net,
//   * equidistribution of the points over b-adic intervals (sigma = 1).
//
// Row selections and dual digits beyond row s are treated as zero rows, so a
// net with s < sigma*n is certified as if padded with zero rows.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netscope/errors.hpp"
#include "netscope/gfmat.hpp"
#include "netscope/net.hpp"
#include "netscope/numeric.hpp"

namespace netscope {

// ---------------------------------------------------------------------------
// NRT weights

/// Sum of the sigma most significant nonzero digit positions of `digits`
/// (least significant first, positions 1-based); 0 for the zero vector.
inline unsigned nrt_weight_digits(std::span<const Digit> digits, std::size_t sigma) {
  unsigned total = 0;
  std::size_t taken = 0;
  for (std::size_t a = digits.size(); a-- > 0 && taken < sigma;) {
    if (digits[a] != 0) {
      total += static_cast<unsigned>(a + 1);
      ++taken;
    }
  }
  return total;
}

inline unsigned nrt_weight(std::uint64_t a, std::size_t sigma, Digit b) {
  std::vector<Digit> digits;
  for (; a != 0; a /= b) digits.push_back(static_cast<Digit>(a % b));
  return nrt_weight_digits(digits, sigma);
}

inline unsigned nrt_weight(std::span<const std::uint64_t> t, std::size_t sigma, Digit b) {
  unsigned total = 0;
  for (auto ti : t) total += nrt_weight(ti, sigma, b);
  return total;
}

/// t' : t with its leading digit removed; 0' = 0.
inline std::uint64_t drop_leading_digit(std::uint64_t t, Digit b) {
  if (t == 0) return 0;
  std::uint64_t place = 1;
  while (t / place >= b) place *= b;
  return t % place;
}

// ---------------------------------------------------------------------------
// Dual net

struct DualVector {
  std::vector<std::uint64_t> t;
  /// Per coordinate the digit vector (tau_0, ..., tau_{box-1}).
  std::vector<std::vector<Digit>> digits;
  unsigned rho1 = 0;
  unsigned rho2 = 0;

  bool is_zero() const {
    return std::all_of(t.begin(), t.end(), [](auto x) { return x == 0; });
  }
};

/// Kernel of the stacked map t -> C_1^T t_1 + ... + C_d^T t_d on F_b^{d*box}.
/// Stacked digit layout is coordinate-major: index i*box + a holds tau_{i,a}.
class DualSpace {
 public:
  DualSpace(const GeneratingSet& g, std::size_t box) : b_(g.b), d_(g.d), box_(box) {
    g.validate();
    require(box >= 1, ErrorCode::InvariantViolation, "digit box must be positive");
    checked_pow(g.b, static_cast<unsigned>(box));
    FieldMatrix stacked(g.n, g.d * box, g.b);
    for (std::size_t i = 0; i < g.d; ++i)
      for (std::size_t a = 0; a < std::min(box, g.s); ++a)
        for (std::size_t c = 0; c < g.n; ++c) stacked.set(c, i * box + a, g.matrices[i](a, c));
    basis_ = kernel_basis(stacked);
  }

  Digit base() const { return b_; }
  std::size_t dimension() const { return d_; }
  std::size_t box() const { return box_; }
  std::size_t kernel_dimension() const { return basis_.size(); }
  const std::vector<std::vector<Digit>>& basis() const { return basis_; }

  std::uint64_t size() const { return checked_pow(b_, static_cast<unsigned>(basis_.size())); }

  /// Calls fn(stacked_digits) for every dual element, starting with t = 0.
  /// Order: odometer over kernel-basis coefficients, lowest basis index fastest.
  template <class Fn>
  void for_each(Budget budget, Fn&& fn) const {
    if (basis_.size() >= 64) fail(ErrorCode::BudgetExceeded, "kernel dimension " + std::to_string(basis_.size()));
    budget.charge(size(), "dual enumeration (kernel dimension " + std::to_string(basis_.size()) + ")");
    const std::size_t len = d_ * box_;
    std::vector<Digit> cur(len, 0);
    std::vector<Digit> coef(basis_.size(), 0);
    fn(std::span<const Digit>(cur));
    const std::uint64_t total = size();
    auto add = [&](std::size_t p) {
      const auto& v = basis_[p];
      for (std::size_t x = 0; x < len; ++x)
        if (v[x] != 0) {
          cur[x] += v[x];
          if (cur[x] >= b_) cur[x] -= b_;
        }
    };
    for (std::uint64_t step = 1; step < total; ++step) {
      std::size_t p = 0;
      while (coef[p] == b_ - 1) {
        coef[p] = 0;
        add(p);
        ++p;
      }
      ++coef[p];
      add(p);
      fn(std::span<const Digit>(cur));
    }
  }

  std::span<const Digit> coordinate_digits(std::span<const Digit> stacked, std::size_t i) const {
    return stacked.subspan(i * box_, box_);
  }

  std::uint64_t coordinate_value(std::span<const Digit> stacked, std::size_t i) const {
    std::uint64_t t = 0;
    for (std::size_t a = box_; a-- > 0;) t = t * b_ + stacked[i * box_ + a];
    return t;
  }

  unsigned weight(std::span<const Digit> stacked, std::size_t sigma) const {
    unsigned w = 0;
    for (std::size_t i = 0; i < d_; ++i) w += nrt_weight_digits(coordinate_digits(stacked, i), sigma);
    return w;
  }

  DualVector materialize(std::span<const Digit> stacked) const {
    DualVector dv;
    for (std::size_t i = 0; i < d_; ++i) {
      const auto dig = coordinate_digits(stacked, i);
      dv.t.push_back(coordinate_value(stacked, i));
      dv.digits.emplace_back(dig.begin(), dig.end());
    }
    dv.rho1 = weight(stacked, 1);
    dv.rho2 = weight(stacked, 2);
    return dv;
  }

 private:
  Digit b_;
  std::size_t d_;
  std::size_t box_;
  std::vector<std::vector<Digit>> basis_;
};

/// All t with t_i < b^box and sum_i C_i^T t_i = 0 (t = 0 first).
inline std::vector<DualVector> enumerate_dual(const GeneratingSet& g, std::size_t digit_box, Budget budget = {}) {
  DualSpace space(g, digit_box);
  std::vector<DualVector> out;
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(space.size(), budget.limit)));
  space.for_each(budget, [&](std::span<const Digit> st) { out.push_back(space.materialize(st)); });
  return out;
}

/// Membership test without enumeration.
inline bool in_dual(const GeneratingSet& g, std::span<const std::uint64_t> t) {
  require(t.size() == g.d, ErrorCode::DimensionMismatch, "dual vector has wrong dimension");
  std::vector<Digit> acc(g.n, 0);
  for (std::size_t i = 0; i < g.d; ++i) {
    const auto digits = to_digits(t[i], g.b, g.s);
    const auto part = mat_vec(g.matrices[i], std::span<const Digit>(digits), Transpose::Yes);
    for (std::size_t c = 0; c < g.n; ++c) acc[c] = (acc[c] + part[c]) % g.b;
  }
  return std::all_of(acc.begin(), acc.end(), [](Digit x) { return x == 0; });
}

// ---------------------------------------------------------------------------
// Certificates

enum class QualityMethod { Independence, DualWeight, Equidistribution };

constexpr std::string_view to_string(QualityMethod m) {
  switch (m) {
    case QualityMethod::Independence: return "independence";
    case QualityMethod::DualWeight: return "dual-weight";
    case QualityMethod::Equidistribution: return "equidistribution";
  }
  return "unknown";
}

/// Rows picked per coordinate, 1-based, ascending.
struct RowSelection {
  std::vector<std::vector<std::size_t>> rows;
  unsigned weight = 0;
};

struct QualityCertificate {
  std::size_t sigma = 1;
  unsigned v = 0;
  QualityMethod method = QualityMethod::Independence;
  /// When v > 0: a selection (independence) or dual vector (dual-weight) that
  /// rules out v - 1. Equidistribution witnesses are reported as an interval.
  std::optional<RowSelection> selection;
  std::optional<DualVector> dual;
  std::optional<std::vector<int>> interval_shape;
};

// ---------------------------------------------------------------------------
// Route 1: row linear independence

namespace detail {

struct TopSet {
  std::vector<std::size_t> top;  // chosen rows, ascending
  unsigned weight = 0;
};

/// All subsets of {1..max_row} with at most sigma elements, bucketed by weight.
inline std::vector<std::vector<TopSet>> top_sets_by_weight(std::size_t max_row, std::size_t sigma) {
  std::vector<std::vector<TopSet>> by_weight(max_row * sigma + 1);
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    unsigned w = 0;
    for (auto r : cur) w += static_cast<unsigned>(r);
    if (w < by_weight.size()) by_weight[w].push_back({cur, w});
    if (cur.size() == sigma) return;
    for (std::size_t r = start; r <= max_row; ++r) {
      cur.push_back(r);
      rec(r + 1);
      cur.pop_back();
    }
  };
  rec(1);
  return by_weight;
}

/// Largest row set with the given sigma largest rows: when the top set is
/// full, every smaller row can be added without changing the weight.
inline std::vector<std::size_t> closure(const TopSet& t, std::size_t sigma) {
  if (t.top.size() < sigma || t.top.empty()) return t.top;
  std::vector<std::size_t> rows;
  for (std::size_t r = 1; r < t.top.front(); ++r) rows.push_back(r);
  rows.insert(rows.end(), t.top.begin(), t.top.end());
  return rows;
}

}  // namespace detail

/// Least-weight dependent row selection, where weight sums the sigma largest
/// row indices per coordinate. Searches weights 1..sigma*n in increasing order.
inline std::optional<RowSelection> min_dependent_selection(const GeneratingSet& g, std::size_t sigma,
                                                           Budget budget = {}) {
  g.validate();
  require(sigma >= 1, ErrorCode::InvariantViolation, "sigma must be positive");
  const std::size_t max_w = sigma * g.n;
  const auto opts = detail::top_sets_by_weight(max_w, sigma);

  // Total number of profiles with weight <= sigma*n, by convolution.
  std::vector<long double> ways(max_w + 1, 0.0L);
  ways[0] = 1.0L;
  for (std::size_t i = 0; i < g.d; ++i) {
    std::vector<long double> next(max_w + 1, 0.0L);
    for (std::size_t w = 0; w <= max_w; ++w)
      for (std::size_t u = 0; u + w <= max_w; ++u) next[w + u] += ways[w] * static_cast<long double>(opts[u].size());
    ways = std::move(next);
  }
  long double total = 0;
  for (auto x : ways) total += x;
  if (total > static_cast<long double>(budget.limit))
    fail(ErrorCode::InstanceTooLarge, "row-selection search needs " + std::to_string(static_cast<double>(total)) +
                                          " tests, budget is " + std::to_string(budget.limit));

  const std::vector<Digit> zero_row(g.n, 0);
  auto row_of = [&](std::size_t i, std::size_t r) -> std::span<const Digit> {
    return r <= g.s ? g.matrices[i].row(r - 1) : std::span<const Digit>(zero_row);
  };

  std::vector<const detail::TopSet*> pick(g.d, nullptr);
  std::vector<unsigned> split(g.d, 0);

  auto dependent = [&]() {
    std::vector<std::span<const Digit>> rows;
    for (std::size_t i = 0; i < g.d; ++i)
      for (auto r : detail::closure(*pick[i], sigma)) rows.push_back(row_of(i, r));
    if (rows.size() > g.n) return true;
    return detail::rank_of_rows(rows, g.n, g.b) < rows.size();
  };

  for (unsigned w = 1; w <= max_w; ++w) {
    std::optional<RowSelection> found;
    // Enumerate weight splits w = w_1 + ... + w_d, then the top sets per split.
    std::function<void(std::size_t, unsigned)> splits = [&](std::size_t i, unsigned left) {
      if (found) return;
      if (i + 1 == g.d) {
        if (left >= opts.size() || opts[left].empty()) return;
        split[i] = left;
        std::function<void(std::size_t)> choose = [&](std::size_t k) {
          if (found) return;
          if (k == g.d) {
            if (dependent()) {
              RowSelection sel;
              sel.weight = w;
              for (std::size_t c = 0; c < g.d; ++c) sel.rows.push_back(detail::closure(*pick[c], sigma));
              found = std::move(sel);
            }
            return;
          }
          for (const auto& t : opts[split[k]]) {
            pick[k] = &t;
            choose(k + 1);
            if (found) return;
          }
        };
        choose(0);
        return;
      }
      for (unsigned u = 0; u <= left; ++u) {
        if (opts[u].empty()) continue;
        split[i] = u;
        splits(i + 1, left - u);
      }
    };
    splits(0, w);
    if (found) return found;
  }
  return std::nullopt;
}

/// True iff every selection with weight <= sigma*n - v is linearly independent.
inline bool check_independence(const GeneratingSet& g, std::size_t sigma, int v, Budget budget = {}) {
  const auto sel = min_dependent_selection(g, sigma, budget);
  const long threshold = static_cast<long>(sigma * g.n) - v;
  return !sel || static_cast<long>(sel->weight) > threshold;
}

/// Least v in [0, sigma*n] for which the row-independence definition holds.
inline QualityCertificate min_quality_v(const GeneratingSet& g, std::size_t sigma, Budget budget = {}) {
  QualityCertificate cert;
  cert.sigma = sigma;
  cert.method = QualityMethod::Independence;
  const auto sel = min_dependent_selection(g, sigma, budget);
  if (sel) {
    cert.v = static_cast<unsigned>(sigma * g.n - sel->weight + 1);
    cert.selection = sel;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Route 2: dual weights

struct WeightCheck {
  bool ok = true;
  /// Nonzero dual vector of minimal rho_sigma, if any exists in the box.
  std::optional<DualVector> witness;
  unsigned min_weight = 0;
};

/// The digit box needed so that every dual vector of weight <= sigma*n is seen.
inline std::size_t weight_digit_box(const GeneratingSet& g, std::size_t sigma) {
  return std::max(g.s, sigma * g.n);
}

inline WeightCheck min_dual_weight(const GeneratingSet& g, std::size_t sigma, Budget budget = {}) {
  DualSpace space(g, weight_digit_box(g, sigma));
  WeightCheck out;
  bool first = true;
  std::vector<Digit> best;
  space.for_each(budget, [&](std::span<const Digit> st) {
    if (first) {  // t = 0
      first = false;
      return;
    }
    const unsigned w = space.weight(st, sigma);
    if (best.empty() || w < out.min_weight) {
      out.min_weight = w;
      best.assign(st.begin(), st.end());
    }
  });
  if (!best.empty()) out.witness = space.materialize(best);
  return out;
}

/// Dual weight criterion: rho_sigma(t) > sigma*n - v for every nonzero dual t.
inline WeightCheck check_weight_criterion(const GeneratingSet& g, std::size_t sigma, int v, Budget budget = {}) {
  auto res = min_dual_weight(g, sigma, budget);
  res.ok = !res.witness || static_cast<long>(res.min_weight) > static_cast<long>(sigma * g.n) - v;
  return res;
}

inline QualityCertificate min_quality_v_dual(const GeneratingSet& g, std::size_t sigma, Budget budget = {}) {
  const auto res = min_dual_weight(g, sigma, budget);
  QualityCertificate cert;
  cert.sigma = sigma;
  cert.method = QualityMethod::DualWeight;
  if (res.witness) {
    const long v = static_cast<long>(sigma * g.n) - static_cast<long>(res.min_weight) + 1;
    cert.v = static_cast<unsigned>(std::max(0L, v));
    if (cert.v > 0) cert.dual = res.witness;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Route 3: equidistribution

/// Calls fn(shape) for each j in N_0^d with |j| = order, colexicographic.
template <class Fn>
void for_each_composition(std::size_t d, unsigned order, Fn&& fn) {
  std::vector<int> j(d, 0);
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
    if (i == 0) {
      j[0] = static_cast<int>(left);
      fn(std::as_const(j));
      return;
    }
    for (unsigned u = 0; u <= left; ++u) {
      j[i] = static_cast<int>(u);
      rec(i - 1, left - u);
    }
  };
  rec(d - 1, order);
}

struct EquidistributionCheck {
  bool ok = true;
  std::optional<std::vector<int>> failing_shape;
};

/// Every b-adic interval of order n - v holds exactly b^v points.
inline EquidistributionCheck check_equidistribution(const PointSet& pts, int v, Budget budget = {}) {
  require(v >= 0 && static_cast<std::size_t>(v) <= pts.n, ErrorCode::InvariantViolation,
          "equidistribution needs 0 <= v <= n");
  const unsigned order = static_cast<unsigned>(pts.n) - static_cast<unsigned>(v);
  const std::uint64_t cells = checked_pow(pts.b, order);
  const std::uint64_t expected = checked_pow(pts.b, static_cast<unsigned>(v));
  require(pts.size() == checked_pow(pts.b, static_cast<unsigned>(pts.n)), ErrorCode::InvariantViolation,
          "point set does not hold b^n points");
  budget.charge(cells, "equidistribution cells");
  EquidistributionCheck out;
  std::vector<std::uint64_t> counts(cells);
  for_each_composition(pts.d, order, [&](const std::vector<int>& j) {
    if (!out.ok) return;
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t p = 0; p < pts.size(); ++p) {
      std::uint64_t key = 0;
      for (std::size_t i = 0; i < pts.d; ++i) {
        const auto level = static_cast<unsigned>(j[i]);
        key = key * checked_pow(pts.b, level) + pts.coord(p, i).floor_scaled(level);
      }
      ++counts[key];
    }
    if (std::any_of(counts.begin(), counts.end(), [&](auto c) { return c != expected; })) {
      out.ok = false;
      out.failing_shape = j;
    }
  });
  return out;
}

inline EquidistributionCheck check_equidistribution(const PointSet& pts, const GeneratingSet& /*g*/,
                                                    std::size_t /*sigma*/, int v, Budget budget = {}) {
  return check_equidistribution(pts, v, budget);
}

/// Least v in [0, n] passing the equidistribution test.
inline QualityCertificate min_quality_v_geometric(const PointSet& pts, Budget budget = {}) {
  QualityCertificate cert;
  cert.sigma = 1;
  cert.method = QualityMethod::Equidistribution;
  for (unsigned v = 0; v <= pts.n; ++v) {
    const auto res = check_equidistribution(pts, static_cast<int>(v), budget);
    if (res.ok) {
      cert.v = v;
      return cert;
    }
    cert.interval_shape = res.failing_shape;
  }
  cert.v = static_cast<unsigned>(pts.n);
  return cert;
}

// ---------------------------------------------------------------------------
// Omega counting

struct OmegaResult {
  std::uint64_t count = 0;
  double bound = 0.0;
  bool within = true;
};

/// Histogram of the dual net by (rho_1(t_i), rho_1(t_i')) per coordinate,
/// enumerated with digit box s + 1 so that gamma_i = s + 1 is populated.
class OmegaTable {
 public:
  OmegaTable(const GeneratingSet& g, unsigned v, Budget budget = {}) : b_(g.b), s_(g.s), n_(g.n), d_(g.d), v_(v) {
    DualSpace space(g, g.s + 1);
    std::vector<unsigned> key(2 * g.d);
    space.for_each(budget, [&](std::span<const Digit> st) {
      for (std::size_t i = 0; i < d_; ++i) {
        const auto t = space.coordinate_value(st, i);
        key[i] = nrt_weight(t, 1, b_);
        key[d_ + i] = nrt_weight(drop_leading_digit(t, b_), 1, b_);
      }
      ++hist_[key];
    });
  }

  std::size_t s() const { return s_; }
  std::size_t dimension() const { return d_; }
  unsigned v() const { return v_; }

  /// Number of dual t with rho_1(t_i) = gamma_i and (gamma_i <= lambda_i or
  /// rho_1(t_i') = lambda_i) for all i; each t counted once.
  std::uint64_t count(std::span<const unsigned> gamma, std::span<const unsigned> lambda) const {
    check(gamma, lambda);
    std::uint64_t total = 0;
    for (const auto& [key, c] : hist_) {
      bool match = true;
      for (std::size_t i = 0; i < d_ && match; ++i)
        match = key[i] == gamma[i] && (gamma[i] <= lambda[i] || key[d_ + i] == lambda[i]);
      if (match) total += c;
    }
    return total;
  }

  /// (b-1)^d b^{(sum_i min(lambda_i, gamma_i - 1) - n + v)_+}, with the
  /// per-coordinate minimum clamped at 0 when gamma_i = 0.
  double bound(std::span<const unsigned> gamma, std::span<const unsigned> lambda) const {
    check(gamma, lambda);
    long e = 0;
    for (std::size_t i = 0; i < d_; ++i) {
      const long g1 = static_cast<long>(gamma[i]) - 1;
      e += std::max(0L, std::min<long>(lambda[i], g1));
    }
    e = std::max(0L, e - static_cast<long>(n_) + static_cast<long>(v_));
    return std::pow(static_cast<double>(b_ - 1), static_cast<double>(d_)) *
           std::pow(static_cast<double>(b_), static_cast<double>(e));
  }

  OmegaResult evaluate(std::span<const unsigned> gamma, std::span<const unsigned> lambda) const {
    OmegaResult r;
    r.count = count(gamma, lambda);
    r.bound = bound(gamma, lambda);
    r.within = static_cast<double>(r.count) <= r.bound;
    return r;
  }

 private:
  void check(std::span<const unsigned> gamma, std::span<const unsigned> lambda) const {
    require(gamma.size() == d_ && lambda.size() == d_, ErrorCode::DimensionMismatch, "gamma/lambda dimension");
    for (auto l : lambda)
      require(l <= s_, ErrorCode::InvariantViolation, "lambda_i must not exceed s=" + std::to_string(s_));
  }

  Digit b_;
  std::size_t s_, n_, d_;
  unsigned v_;
  std::map<std::vector<unsigned>, std::uint64_t> hist_;
};

/// One-shot omega count for a single (gamma, lambda); v is the order-1 quality.
inline OmegaResult count_omega(const GeneratingSet& g, std::span<const unsigned> gamma,
                               std::span<const unsigned> lambda, Budget budget = {}) {
  const unsigned v = min_quality_v(g, 1, budget).v;
  return OmegaTable(g, v, budget).evaluate(gamma, lambda);
}

}  // namespace netscope
