#pragma once

// b-adic Haar system and exact Haar coefficients of the discrepancy function.
//
// <D_P, h> = (1/N) sum_z prod_i int_{z_i}^1 conj(h_i)  -  prod_i int_0^1 x conj(h_i)
//
// Both one-dimensional factors have closed forms. A point only contributes to
// the counting part of a cell if it lies in the open interior of the cell in
// every coordinate with j_i >= 0; all other cells carry minus the volume part.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "netscope/errors.hpp"
#include "netscope/net.hpp"
#include "netscope/numeric.hpp"
#include "netscope/parallel.hpp"

namespace netscope {

struct HaarIndex {
  std::vector<int> j;
  std::vector<std::uint64_t> m;
  std::vector<Digit> l;

  std::size_t dimension() const { return j.size(); }

  unsigned order() const {
    unsigned o = 0;
    for (int x : j) o += static_cast<unsigned>(std::max(x, 0));
    return o;
  }

  void validate(Digit b) const {
    require(m.size() == j.size() && l.size() == j.size(), ErrorCode::DimensionMismatch, "Haar index arity");
    for (std::size_t i = 0; i < j.size(); ++i) {
      require(j[i] >= -1, ErrorCode::InvariantViolation, "Haar level below -1");
      if (j[i] == -1) {
        require(m[i] == 0 && l[i] == 1, ErrorCode::InvariantViolation, "level -1 requires m=0, l=1");
      } else {
        require(m[i] < checked_pow(b, static_cast<unsigned>(j[i])), ErrorCode::InvariantViolation,
                "Haar position out of range");
        require(l[i] >= 1 && l[i] < b, ErrorCode::InvariantViolation, "Haar label out of range");
      }
    }
  }

  friend bool operator==(const HaarIndex&, const HaarIndex&) = default;
};

/// h_{j,m,l}(x) in one coordinate.
inline Complex haar_eval_1d(int j, std::uint64_t m, Digit l, const BAdic& x) {
  if (j < 0) return 1.0;
  const auto level = static_cast<unsigned>(j);
  if (x.floor_scaled(level) != m) return 0.0;
  const auto k = static_cast<std::int64_t>(x.floor_scaled(level + 1) - m * x.base);
  return UnitRoots(x.base)(static_cast<std::int64_t>(l) * k);
}

inline Complex haar_eval(const HaarIndex& idx, std::span<const BAdic> x, Digit b) {
  idx.validate(b);
  require(x.size() == idx.dimension(), ErrorCode::DimensionMismatch, "point dimension");
  Complex v = 1.0;
  for (std::size_t i = 0; i < x.size() && v != Complex{}; ++i) v *= haar_eval_1d(idx.j[i], idx.m[i], idx.l[i], x[i]);
  return v;
}

/// int_0^1 x conj(h_{j,m,l}(x)) dx. Independent of m for j >= 0:
/// b^{-2(j+1)} sum_k k omega^{-lk}.
inline Complex linear_factor_coeff(int j, std::uint64_t /*m*/, Digit l, Digit b) {
  if (j < 0) return 0.5;
  const UnitRoots w(b);
  Complex s = 0.0;
  for (Digit k = 1; k < b; ++k) s += static_cast<double>(k) * w(-static_cast<std::int64_t>(l) * k);
  return s * std::pow(static_cast<double>(b), -2.0 * (j + 1));
}

/// int_z^1 conj(h_{j,m,l}(x)) dx. Zero unless z is interior to I_{j,m};
/// then the partial child cell containing z plus every child cell above it.
inline Complex indicator_factor_coeff(int j, std::uint64_t m, Digit l, const BAdic& z) {
  if (j < 0) return 1.0 - z.to_double();
  const Digit b = z.base;
  const auto level = static_cast<unsigned>(j);
  if (z.floor_scaled(level) != m || z.on_grid(level)) return 0.0;
  const UnitRoots w(b);
  const auto kz = static_cast<std::int64_t>(z.floor_scaled(level + 1) - m * b);
  const auto [fnum, fden] = z.frac_scaled(level + 1);
  Complex s = (1.0 - static_cast<double>(fnum) / static_cast<double>(fden)) * w(-static_cast<std::int64_t>(l) * kz);
  for (std::int64_t k = kz + 1; k < static_cast<std::int64_t>(b); ++k) s += w(-static_cast<std::int64_t>(l) * k);
  return s * std::pow(static_cast<double>(b), -static_cast<double>(j + 1));
}

struct CoeffRecord {
  HaarIndex index;
  Complex value;
  Complex counting;
  Complex volume;
};

/// <D_P, h_idx>, with counting and volume parts kept apart.
inline CoeffRecord discrepancy_haar_coeff(const PointSet& pts, const HaarIndex& idx) {
  idx.validate(pts.b);
  require(idx.dimension() == pts.d, ErrorCode::DimensionMismatch, "Haar index dimension");
  CoeffRecord rec{idx, 0.0, 0.0, 1.0};
  for (std::size_t i = 0; i < pts.d; ++i) rec.volume *= linear_factor_coeff(idx.j[i], idx.m[i], idx.l[i], pts.b);
  CompensatedComplexSum acc;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    Complex term = 1.0;
    for (std::size_t i = 0; i < pts.d && term != Complex{}; ++i)
      term *= indicator_factor_coeff(idx.j[i], idx.m[i], idx.l[i], pts.coord(p, i));
    if (term != Complex{}) acc.add(term);
  }
  rec.counting = acc.value() / static_cast<double>(pts.size());
  rec.value = rec.counting - rec.volume;
  return rec;
}

// ---------------------------------------------------------------------------
// Level shapes

/// All j in {-1,0,1,...}^d with |j|_+ = order, colexicographic (last
/// coordinate most significant).
inline std::vector<std::vector<int>> level_shapes(std::size_t d, unsigned order) {
  std::vector<std::vector<int>> out;
  std::vector<int> j(d, -1);
  // Odometer over j_i in [-1, order], keeping those with the right order.
  while (true) {
    unsigned o = 0;
    for (int x : j) o += static_cast<unsigned>(std::max(x, 0));
    if (o == order) out.push_back(j);
    std::size_t i = 0;
    while (i < d && j[i] == static_cast<int>(order)) j[i++] = -1;
    if (i == d) break;
    ++j[i];
  }
  return out;
}

inline std::vector<std::vector<int>> level_shapes_up_to(std::size_t d, unsigned max_order) {
  std::vector<std::vector<int>> out;
  for (unsigned o = 0; o <= max_order; ++o) {
    auto s = level_shapes(d, o);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

/// Haar labels l in B_j in row-major order (first coordinate slowest).
inline std::vector<std::vector<Digit>> label_tuples(std::span<const int> j, Digit b) {
  std::vector<std::vector<Digit>> out{{}};
  for (int ji : j) {
    std::vector<std::vector<Digit>> next;
    const Digit hi = ji < 0 ? 1 : b - 1;
    for (const auto& prefix : out)
      for (Digit l = 1; l <= hi; ++l) {
        auto t = prefix;
        t.push_back(l);
        next.push_back(std::move(t));
      }
    out = std::move(next);
  }
  return out;
}

/// Every coefficient on one level j, stored sparsely: cells with an interior
/// point explicitly, all other cells implicitly as minus the volume part.
class LevelCoefficients {
 public:
  LevelCoefficients(const PointSet& pts, std::vector<int> j) : b_(pts.b), j_(std::move(j)) {
    require(j_.size() == pts.d, ErrorCode::DimensionMismatch, "level dimension");
    labels_ = label_tuples(j_, b_);
    cells_ = 1;
    order_ = 0;
    for (int ji : j_)
      if (ji > 0) order_ += static_cast<unsigned>(ji);
    cells_ = checked_pow(b_, order_);
    volume_.resize(labels_.size());
    for (std::size_t li = 0; li < labels_.size(); ++li) {
      Complex v = 1.0;
      for (std::size_t i = 0; i < j_.size(); ++i) v *= linear_factor_coeff(j_[i], 0, labels_[li][i], b_);
      volume_[li] = v;
    }

    std::map<std::uint64_t, std::vector<CompensatedComplexSum>> sums;
    std::vector<std::vector<Complex>> factors(j_.size());
    const double inv_n = 1.0 / static_cast<double>(pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p) {
      std::uint64_t key = 0;
      bool interior = true;
      for (std::size_t i = 0; i < j_.size() && interior; ++i) {
        const BAdic z = pts.coord(p, i);
        if (j_[i] < 0) {
          factors[i] = {1.0 - z.to_double()};
          continue;
        }
        const auto level = static_cast<unsigned>(j_[i]);
        if (z.on_grid(level)) {
          interior = false;
          break;
        }
        const auto m = z.floor_scaled(level);
        key = key * checked_pow(b_, level) + m;
        factors[i].resize(b_ - 1);
        for (Digit l = 1; l < b_; ++l) factors[i][l - 1] = indicator_factor_coeff(j_[i], m, l, z);
      }
      if (!interior) continue;
      auto& cell = sums[key];
      if (cell.empty()) cell.resize(labels_.size());
      for (std::size_t li = 0; li < labels_.size(); ++li) {
        Complex term = inv_n;
        for (std::size_t i = 0; i < j_.size(); ++i) term *= factors[i][j_[i] < 0 ? 0 : labels_[li][i] - 1];
        cell[li].add(term);
      }
    }
    for (auto& [key, cell] : sums) {
      std::vector<Complex> mu(labels_.size());
      for (std::size_t li = 0; li < labels_.size(); ++li) mu[li] = cell[li].value() - volume_[li];
      occupied_.emplace_back(key, std::move(mu));
    }
  }

  const std::vector<int>& shape() const { return j_; }
  unsigned order() const { return order_; }
  Digit base() const { return b_; }
  std::uint64_t cells() const { return cells_; }
  std::uint64_t empty_cells() const { return cells_ - occupied_.size(); }
  const std::vector<std::vector<Digit>>& labels() const { return labels_; }
  /// Volume part per label (equal to minus the coefficient of an empty cell).
  const std::vector<Complex>& volume() const { return volume_; }
  /// (cell key, coefficient per label) for cells with an interior point, by key.
  const std::vector<std::pair<std::uint64_t, std::vector<Complex>>>& occupied() const { return occupied_; }

  /// Splits a cell key into the position vector m.
  std::vector<std::uint64_t> position(std::uint64_t key) const {
    std::vector<std::uint64_t> m(j_.size(), 0);
    for (std::size_t i = j_.size(); i-- > 0;) {
      if (j_[i] <= 0) continue;
      const auto side = checked_pow(b_, static_cast<unsigned>(j_[i]));
      m[i] = key % side;
      key /= side;
    }
    return m;
  }

  /// sum over (m, l) of |mu|^p, empty cells included analytically.
  double power_sum(double p) const {
    CompensatedSum acc;
    for (const auto& [key, mu] : occupied_)
      for (const auto& x : mu) acc.add(std::pow(scale_ * std::abs(x), p));
    CompensatedSum vol;
    for (const auto& v : volume_) vol.add(std::pow(scale_ * std::abs(v), p));
    acc.add(static_cast<double>(empty_cells()) * vol.value());
    return acc.value();
  }

  double max_abs() const {
    double mx = 0.0;
    for (const auto& [key, mu] : occupied_)
      for (const auto& x : mu) mx = std::max(mx, std::abs(x));
    if (empty_cells() > 0)
      for (const auto& v : volume_) mx = std::max(mx, std::abs(v));
    return scale_ * mx;
  }

  /// Largest volume part, the magnitude carried by every empty cell.
  double volume_max() const {
    double mx = 0.0;
    for (const auto& v : volume_) mx = std::max(mx, std::abs(v));
    return scale_ * mx;
  }

  /// Number of positions m with some |mu_{j,m,l}| above `threshold`.
  std::uint64_t positions_above(double threshold) const {
    std::uint64_t count = 0;
    for (const auto& [key, mu] : occupied_)
      if (std::any_of(mu.begin(), mu.end(), [&](const Complex& x) { return scale_ * std::abs(x) > threshold; })) ++count;
    if (empty_cells() > 0 && volume_max() > threshold) count += empty_cells();
    return count;
  }

  /// Coefficients of c * D_P.
  LevelCoefficients scaled(double c) const {
    LevelCoefficients out = *this;
    out.scale_ *= std::abs(c);
    return out;
  }

  /// Every coefficient of the level in (m row-major, then l) order.
  /// Costs b^{|j|_+} (b-1)^d records.
  std::vector<CoeffRecord> records() const {
    std::vector<CoeffRecord> out;
    std::size_t next = 0;
    for (std::uint64_t key = 0; key < cells_; ++key) {
      const bool occ = next < occupied_.size() && occupied_[next].first == key;
      const auto m = position(key);
      for (std::size_t li = 0; li < labels_.size(); ++li) {
        CoeffRecord r;
        r.index = HaarIndex{j_, m, labels_[li]};
        r.volume = scale_ * volume_[li];
        r.value = occ ? scale_ * occupied_[next].second[li] : -r.volume;
        r.counting = r.value + r.volume;
        out.push_back(std::move(r));
      }
      if (occ) ++next;
    }
    return out;
  }

 private:
  Digit b_;
  std::vector<int> j_;
  unsigned order_ = 0;
  std::uint64_t cells_ = 1;
  std::vector<std::vector<Digit>> labels_;
  std::vector<Complex> volume_;
  std::vector<std::pair<std::uint64_t, std::vector<Complex>>> occupied_;
  double scale_ = 1.0;
};

/// Coefficient levels for every shape with |j|_+ <= max_order, in level order.
inline std::vector<LevelCoefficients> compute_levels(const PointSet& pts, unsigned max_order, Budget budget = {}) {
  const auto shapes = level_shapes_up_to(pts.d, max_order);
  budget.charge(static_cast<std::uint64_t>(shapes.size()) * pts.size(), "Haar level sweep");
  return parallel_map(shapes.size(), [&](std::size_t k) { return LevelCoefficients(pts, shapes[k]); });
}

// ---------------------------------------------------------------------------
// Decay regimes

enum class DecayRegime { Coarse, Fine };

constexpr std::string_view to_string(DecayRegime r) { return r == DecayRegime::Coarse ? "coarse" : "fine"; }

struct LevelStats {
  std::vector<int> j;
  unsigned order = 0;
  std::size_t sigma = 1;
  int v = 0;
  DecayRegime regime = DecayRegime::Fine;
  double max_abs = 0.0;
  double power_sum = 0.0;
  /// Decay envelope for this level and the realized ratio max_abs / bound.
  double bound = 0.0;
  double ratio = 0.0;
  /// Positions whose coefficients exceed the empty-cell magnitude, against
  /// the b^n positions that may do so on fine levels.
  std::uint64_t above_volume = 0;
  std::uint64_t above_volume_limit = 0;
};

/// Level threshold between the coarse regime (|j|_+ below it) and the fine regime.
inline int decay_threshold(std::size_t n, int v, std::size_t sigma) {
  return sigma >= 2 ? static_cast<int>(n) - (v + 1) / 2 : static_cast<int>(n) - v;
}

/// Envelope of |<D_P, h_{j,m,l}>| for an order-sigma (v,n,d)-net:
///   sigma = 1: b^{-|j|-n+v} (n-v-|j|)^{d-1} below n-v, b^{-|j|-n+v} above;
///   sigma = 2: b^{-2n+v} (2n-v-2|j|)^{d-1} below n-ceil(v/2), b^{-|j|-n+v/2} above.
inline double decay_bound(Digit b, std::size_t n, std::size_t d, int v, std::size_t sigma, unsigned order) {
  const double bd = static_cast<double>(b);
  const double dn = static_cast<double>(n), dv = static_cast<double>(v), o = static_cast<double>(order);
  const bool coarse = static_cast<int>(order) < decay_threshold(n, v, sigma);
  const double dm1 = static_cast<double>(d) - 1.0;
  if (sigma >= 2) {
    if (coarse) return std::pow(bd, -2.0 * dn + dv) * std::pow(2.0 * dn - dv - 2.0 * o, dm1);
    return std::pow(bd, -o - dn + dv / 2.0);
  }
  if (coarse) return std::pow(bd, -o - dn + dv) * std::pow(dn - dv - o, dm1);
  return std::pow(bd, -o - dn + dv);
}

inline LevelStats level_stats(const LevelCoefficients& lc, std::size_t n, int v, std::size_t sigma, double p = 2.0) {
  LevelStats st;
  st.j = lc.shape();
  st.order = lc.order();
  st.sigma = sigma;
  st.v = v;
  st.regime = static_cast<int>(st.order) < decay_threshold(n, v, sigma) ? DecayRegime::Coarse : DecayRegime::Fine;
  st.max_abs = lc.max_abs();
  st.power_sum = lc.power_sum(p);
  st.bound = decay_bound(lc.base(), n, st.j.size(), v, sigma, st.order);
  st.ratio = st.max_abs / st.bound;
  st.above_volume = lc.positions_above(lc.volume_max() * (1.0 + 1e-9) + 1e-300);
  st.above_volume_limit = checked_pow(lc.base(), static_cast<unsigned>(n));
  return st;
}

inline LevelStats level_stats(const PointSet& pts, const std::vector<int>& j, int v, std::size_t sigma,
                              double p = 2.0) {
  return level_stats(LevelCoefficients(pts, j), pts.n, v, sigma, p);
}

}  // namespace netscope
