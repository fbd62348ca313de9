#pragma once

// Named checks with machine-readable pass/fail reports.

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "netscope/constructions.hpp"
#include "netscope/errors.hpp"
#include "netscope/haar.hpp"
#include "netscope/net.hpp"
#include "netscope/norms.hpp"
#include "netscope/quality.hpp"
#include "netscope/walsh.hpp"

namespace netscope {

enum class Status { Pass, Fail, Budget };

constexpr std::string_view to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Budget: return "budget";
  }
  return "unknown";
}

struct CheckReport {
  std::string check;
  std::string instance;
  Status status = Status::Pass;
  nlohmann::json witness;  // null on pass
  std::map<std::string, double> constants;
  nlohmann::json details = nlohmann::json::object();
  double seconds = 0.0;

  bool passed() const { return status == Status::Pass; }

  /// Seconds are reported only on request so that reports stay byte-identical.
  nlohmann::json to_json(bool with_timing = false) const {
    nlohmann::json consts = nlohmann::json::object();
    for (const auto& [k, v] : constants) consts[k] = v;
    return {{"check", check},          {"instance", instance}, {"status", std::string(to_string(status))},
            {"witness", witness},      {"constants", consts},  {"details", details},
            {"seconds", with_timing ? seconds : 0.0}};
  }
};

inline std::string describe(const GeneratingSet& g, const std::string& name = "net") {
  return name + "(b=" + std::to_string(g.b) + ",s=" + std::to_string(g.s) + ",n=" + std::to_string(g.n) +
         ",d=" + std::to_string(g.d) + ")";
}

inline nlohmann::json to_json(const DualVector& t) {
  return {{"t", t.t}, {"rho1", t.rho1}, {"rho2", t.rho2}};
}

inline nlohmann::json to_json(const QualityCertificate& c) {
  nlohmann::json w = nullptr;
  if (c.selection) w = {{"rows", c.selection->rows}, {"weight", c.selection->weight}};
  if (c.dual) w = to_json(*c.dual);
  if (c.interval_shape) w = {{"interval_shape", *c.interval_shape}};
  return {{"sigma", c.sigma}, {"v", c.v}, {"method", std::string(to_string(c.method))}, {"witness", w}};
}

namespace detail {

/// Runs body(report); budget-type errors become status "budget".
template <class Body>
CheckReport run_check(std::string check, std::string instance, Body&& body) {
  CheckReport rep;
  rep.check = std::move(check);
  rep.instance = std::move(instance);
  const auto start = std::chrono::steady_clock::now();
  try {
    body(rep);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded && e.code() != ErrorCode::InstanceTooLarge) throw;
    rep.status = Status::Budget;
    rep.witness = {{"error", e.what()}};
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline double one_sided_t_critical(std::size_t dof, double alpha = 0.05) {
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Character sums

/// Every t in the digit box: the character sum over `reference` (the points
/// of g unless given) must be b^n for t in the dual of g and 0 otherwise.
inline CheckReport verify_walsh_character(const GeneratingSet& g, std::size_t digit_box,
                                          const PointSet* reference = nullptr, Budget budget = {}) {
  return detail::run_check("walsh-sum", describe(g), [&](CheckReport& rep) {
    g.validate();
    const PointSet own = reference ? PointSet{} : generate_points(g);
    const PointSet& pts = reference ? *reference : own;
    require(pts.d == g.d && pts.b == g.b, ErrorCode::DimensionMismatch, "reference points do not match the net");
    const std::uint64_t side = checked_pow(g.b, static_cast<unsigned>(digit_box));
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < g.d; ++i) total = total > budget.limit / side ? budget.limit + 1 : total * side;
    budget.charge(total, "character-sum sweep");

    // Per coordinate: walsh exponents per (t_i, point) and syndromes C_i^T t_i.
    std::vector<std::vector<Digit>> expo(g.d), syn(g.d);
    for (std::size_t i = 0; i < g.d; ++i) {
      expo[i].resize(side * pts.size());
      syn[i].resize(side * g.n);
      for (std::uint64_t t = 0; t < side; ++t) {
        for (std::size_t p = 0; p < pts.size(); ++p)
          expo[i][t * pts.size() + p] = static_cast<Digit>(walsh_exponent(t, pts.coord(p, i)));
        const auto digits = to_digits(t, g.b, g.s);
        const auto s = mat_vec(g.matrices[i], std::span<const Digit>(digits), Transpose::Yes);
        std::copy(s.begin(), s.end(), syn[i].begin() + static_cast<std::ptrdiff_t>(t * g.n));
      }
    }
    const UnitRoots w(g.b);
    const double bn = static_cast<double>(pts.size());
    std::vector<std::uint64_t> t(g.d, 0);
    std::vector<std::uint64_t> hist(g.b);
    std::uint64_t in_dual_count = 0;
    double worst = 0.0;
    for (std::uint64_t step = 0; step < total; ++step) {
      bool member = true;
      for (std::size_t c = 0; c < g.n && member; ++c) {
        std::uint64_t acc = 0;
        for (std::size_t i = 0; i < g.d; ++i) acc += syn[i][t[i] * g.n + c];
        member = acc % g.b == 0;
      }
      std::fill(hist.begin(), hist.end(), 0);
      for (std::size_t p = 0; p < pts.size(); ++p) {
        std::uint64_t e = 0;
        for (std::size_t i = 0; i < g.d; ++i) e += expo[i][t[i] * pts.size() + p];
        ++hist[e % g.b];
      }
      CompensatedComplexSum sum;
      for (Digit k = 0; k < g.b; ++k) sum.add(static_cast<double>(hist[k]) * w(k));
      const Complex value = sum.value();
      const double expected = member ? bn : 0.0;
      const double err = std::abs(value - expected);
      worst = std::max(worst, err);
      if (member) ++in_dual_count;
      if (err > 1e-9 && rep.status == Status::Pass) {
        rep.status = Status::Fail;
        rep.witness = {{"t", t}, {"in_dual", member}, {"expected", expected},
                       {"re", value.real()}, {"im", value.imag()}};
      }
      for (std::size_t i = 0; i < g.d && ++t[i] == side; ++i) t[i] = 0;
    }
    rep.details = {{"candidates", total}, {"dual_members", in_dual_count}, {"max_abs_error", worst}};
  });
}

// ---------------------------------------------------------------------------
// Quality agreement

/// Least v by row independence, by dual weights and (sigma = 1) by
/// equidistribution must coincide, and equal `expected_v` when given.
inline CheckReport verify_duality(const GeneratingSet& g, std::size_t sigma, std::optional<unsigned> expected_v = {},
                                  Budget budget = {}) {
  return detail::run_check("duality", describe(g) + ",sigma=" + std::to_string(sigma), [&](CheckReport& rep) {
    const auto ind = min_quality_v(g, sigma, budget);
    const auto dual = min_quality_v_dual(g, sigma, budget);
    rep.details = {{"independence", to_json(ind)}, {"dual_weight", to_json(dual)}};
    bool agree = ind.v == dual.v;
    if (sigma == 1) {
      const auto geo = min_quality_v_geometric(generate_points(g), budget);
      rep.details["equidistribution"] = to_json(geo);
      agree = agree && geo.v == ind.v;
    }
    if (!agree) {
      rep.status = Status::Fail;
      rep.witness = {{"reason", "methods disagree"}, {"certificates", rep.details}};
    } else if (expected_v && ind.v != *expected_v) {
      rep.status = Status::Fail;
      rep.witness = {{"reason", "quality differs from the expected value"},
                     {"expected_v", *expected_v},
                     {"certificate", ind.v > *expected_v ? to_json(ind) : to_json(dual)}};
    }
  });
}

// ---------------------------------------------------------------------------
// Omega counts

/// Every gamma with gamma_i <= s+1 and lambda with lambda_i <= s.
inline CheckReport verify_omega(const GeneratingSet& g, Budget budget = {}) {
  return detail::run_check("omega", describe(g), [&](CheckReport& rep) {
    const unsigned v = min_quality_v(g, 1, budget).v;
    const OmegaTable table(g, v, budget);
    const std::size_t gs = g.s + 2, ls = g.s + 1;
    std::uint64_t cells = 1;
    for (std::size_t i = 0; i < g.d; ++i) cells = cells > budget.limit / (gs * ls) ? budget.limit + 1 : cells * gs * ls;
    budget.charge(cells, "omega grid");
    std::vector<unsigned> gamma(g.d, 0), lambda(g.d, 0);
    std::uint64_t checked = 0, violations = 0;
    double tight = 0.0;
    for (std::uint64_t c = 0; c < cells; ++c) {
      std::uint64_t rem = c;
      for (std::size_t i = 0; i < g.d; ++i) {
        gamma[i] = static_cast<unsigned>(rem % gs);
        rem /= gs;
        lambda[i] = static_cast<unsigned>(rem % ls);
        rem /= ls;
      }
      const auto r = table.evaluate(gamma, lambda);
      ++checked;
      tight = std::max(tight, static_cast<double>(r.count) / r.bound);
      if (!r.within) {
        if (violations == 0)
          rep.witness = {{"gamma", gamma}, {"lambda", lambda}, {"count", r.count}, {"bound", r.bound}};
        ++violations;
      }
    }
    if (violations > 0) rep.status = Status::Fail;
    rep.constants["tightness"] = tight;
    rep.details = {{"v", v}, {"grid_points", checked}, {"violations", violations}};
  });
}

// ---------------------------------------------------------------------------
// Coefficient decay

struct DecayConstants {
  std::optional<double> coarse;
  std::optional<double> fine;
};

struct DecayResult {
  DecayConstants constants;
  bool envelope_ok = true;
  std::optional<LevelStats> worst_envelope;
  std::vector<LevelStats> levels;
};

/// Level statistics through |j|_+ <= max_order for an order-sigma (v,n,d)-net.
inline DecayResult decay_analysis(const PointSet& pts, std::size_t sigma, int v, unsigned max_order,
                                  Budget budget = {}) {
  DecayResult out;
  for (const auto& lc : compute_levels(pts, max_order, budget)) {
    auto st = level_stats(lc, pts.n, v, sigma);
    auto& slot = st.regime == DecayRegime::Coarse ? out.constants.coarse : out.constants.fine;
    slot = std::max(slot.value_or(0.0), st.ratio);
    if (st.regime == DecayRegime::Fine && st.above_volume > st.above_volume_limit && out.envelope_ok) {
      out.envelope_ok = false;
      out.worst_envelope = st;
    }
    out.levels.push_back(std::move(st));
  }
  return out;
}

inline unsigned default_decay_levels(std::size_t n) { return static_cast<unsigned>(n) + 2; }

inline CheckReport verify_decay(const GeneratingSet& g, std::size_t sigma, std::optional<int> v = {},
                                std::optional<unsigned> max_order = {}, Budget budget = {}) {
  return detail::run_check("decay", describe(g) + ",sigma=" + std::to_string(sigma), [&](CheckReport& rep) {
    const int vv = v ? *v : static_cast<int>(min_quality_v(g, sigma, budget).v);
    const auto pts = generate_points(g);
    const auto res = decay_analysis(pts, sigma, vv, max_order.value_or(default_decay_levels(g.n)), budget);
    if (res.constants.coarse) rep.constants["coarse"] = *res.constants.coarse;
    if (res.constants.fine) rep.constants["fine"] = *res.constants.fine;
    rep.details = {{"v", vv}, {"levels", res.levels.size()}};
    bool finite = true;
    for (const auto& [k, c] : rep.constants) finite = finite && std::isfinite(c) && c > 0.0;
    if (!res.envelope_ok) {
      rep.status = Status::Fail;
      const auto& st = *res.worst_envelope;
      rep.witness = {{"j", st.j}, {"positions_above_volume", st.above_volume}, {"limit", st.above_volume_limit}};
    } else if (!finite) {
      rep.status = Status::Fail;
      rep.witness = {{"reason", "non-finite decay constant"}};
    }
  });
}

struct TrendStats {
  double max_min_ratio = 1.0;
  double slope = 0.0;
  double t_stat = 0.0;
  double t_critical = std::numeric_limits<double>::infinity();
  bool significant_increase = false;
};

/// Least-squares slope of log(values) against xs, one-sided t test at 5%.
inline TrendStats trend(const std::vector<double>& xs, const std::vector<double>& values) {
  TrendStats ts;
  const std::size_t k = values.size();
  if (k == 0) return ts;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  ts.max_min_ratio = hi / lo;
  if (k < 3) return ts;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += xs[i];
    my += std::log(values[i]);
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (std::log(values[i]) - my);
  }
  ts.slope = sxy / sxx;
  double sse = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = std::log(values[i]) - my - ts.slope * (xs[i] - mx);
    sse += r * r;
  }
  const double se = std::sqrt(sse / static_cast<double>(k - 2) / sxx);
  ts.t_critical = detail::one_sided_t_critical(k - 2);
  ts.t_stat = se > 0 ? ts.slope / se : (ts.slope > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  ts.significant_increase = ts.t_stat > ts.t_critical;
  return ts;
}

struct DecayFamilyStudy {
  std::vector<std::size_t> ns;
  std::vector<int> vs;
  std::map<std::string, std::vector<double>> constants;  // regime -> per n
  std::map<std::string, TrendStats> trends;
};

/// Decay constants per n for a family, using each member's certified v at
/// the family's order.
inline DecayFamilyStudy decay_family_study(const FamilySpec& family, std::size_t n_lo, std::size_t n_hi,
                                           Budget budget = {}) {
  DecayFamilyStudy st;
  for (std::size_t n = n_lo; n <= n_hi; ++n) {
    const auto g = build_member(family, n, budget);
    const int v = static_cast<int>(min_quality_v(g, family.sigma, budget).v);
    const auto res = decay_analysis(generate_points(g), family.sigma, v, default_decay_levels(n), budget);
    st.ns.push_back(n);
    st.vs.push_back(v);
    st.constants["coarse"].push_back(res.constants.coarse.value_or(std::numeric_limits<double>::quiet_NaN()));
    st.constants["fine"].push_back(res.constants.fine.value_or(std::numeric_limits<double>::quiet_NaN()));
  }
  for (const auto& [regime, values] : st.constants) {
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < values.size(); ++k)
      if (!std::isnan(values[k])) {
        xs.push_back(static_cast<double>(st.ns[k]));
        ys.push_back(values[k]);
      }
    st.trends[regime] = trend(xs, ys);
  }
  return st;
}

// ---------------------------------------------------------------------------
// Scaling

inline CheckReport report_scaling(const std::string& instance, const ScalingStudy& st, double threshold) {
  return detail::run_check("scaling", instance, [&](CheckReport& rep) {
    rep.constants["fitted"] = st.fitted_constant;
    rep.constants["max_min_ratio"] = st.max_min_ratio;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : st.rows) rows.push_back({{"n", r.n}, {"value", r.value}, {"normalized", r.normalized}});
    rep.details = {{"rows", rows}, {"threshold", threshold}, {"warnings", st.warnings}};
    if (st.max_min_ratio > threshold) {
      rep.status = Status::Fail;
      rep.witness = {{"max_min_ratio", st.max_min_ratio}, {"rows", rows}};
    }
  });
}

/// Boundedness proxy: max/min of the normalized column must not exceed threshold.
inline CheckReport verify_scaling(const FamilySpec& family, std::size_t n_lo, std::size_t n_hi, const Metric& metric,
                                  double threshold = 3.0, Budget budget = {}) {
  const std::string inst = family.construction + "(b=" + std::to_string(family.b) + ",d=" +
                           std::to_string(family.d) + ",n=" + std::to_string(n_lo) + ".." + std::to_string(n_hi) +
                           ")";
  return report_scaling(inst, scaling_study(family, n_lo, n_hi, metric, budget), threshold);
}

struct RandomControl {
  std::vector<std::size_t> ns;
  /// Root mean square of the normalized L2 column over the sets, per n.
  std::vector<double> normalized;
  double growth = 1.0;
};

/// Uniform random point sets of size b^n (sets per n), normalized by the net envelope.
inline RandomControl random_control(Digit b, std::size_t d, std::size_t n_lo, std::size_t n_hi, std::size_t sets,
                                    std::uint64_t seed, std::size_t digits = 30) {
  RandomControl rc;
  std::mt19937_64 seeder(seed);
  Metric l2;
  for (std::size_t n = n_lo; n <= n_hi; ++n) {
    double sq = 0.0;
    for (std::size_t k = 0; k < sets; ++k) {
      const auto pts = random_point_set(b, n, d, digits, seeder());
      const double norm = l2_warnock(pts) / scaling_envelope(l2, b, n, d);
      sq += norm * norm;
    }
    rc.ns.push_back(n);
    rc.normalized.push_back(std::sqrt(sq / static_cast<double>(sets)));
  }
  rc.growth = rc.normalized.back() / rc.normalized.front();
  return rc;
}

// ---------------------------------------------------------------------------
// Mutation detection

struct MutationOutcome {
  std::size_t matrix = 0, row = 0, col = 0;
  Digit from = 0, to = 0;
  bool detected = false;
  std::vector<CheckReport> reports;
};

/// Changes one entry of one matrix to a different value.
inline GeneratingSet mutate_entry(const GeneratingSet& g, std::mt19937_64& rng, MutationOutcome* where = nullptr) {
  GeneratingSet out = g;
  const auto i = std::uniform_int_distribution<std::size_t>(0, g.d - 1)(rng);
  const auto r = std::uniform_int_distribution<std::size_t>(0, g.s - 1)(rng);
  const auto c = std::uniform_int_distribution<std::size_t>(0, g.n - 1)(rng);
  const auto shift = std::uniform_int_distribution<Digit>(1, g.b - 1)(rng);
  const Digit from = g.matrices[i](r, c);
  const Digit to = static_cast<Digit>((from + shift) % g.b);
  out.matrices[i].set(r, c, to);
  if (where) *where = MutationOutcome{i, r, c, from, to, false, {}};
  return out;
}

/// Runs walsh-sum (against the original points) and duality (against the
/// original quality) on `trials` single-entry mutations.
inline std::vector<MutationOutcome> mutation_trials(const GeneratingSet& g, std::size_t sigma, std::size_t trials,
                                                    std::uint64_t seed, Budget budget = {}) {
  const auto reference = generate_points(g);
  const unsigned v = min_quality_v(g, sigma, budget).v;
  std::mt19937_64 rng(seed);
  std::vector<MutationOutcome> out;
  for (std::size_t k = 0; k < trials; ++k) {
    MutationOutcome mo;
    const auto bad = mutate_entry(g, rng, &mo);
    mo.reports.push_back(verify_walsh_character(bad, bad.s, &reference, budget));
    mo.reports.push_back(verify_duality(bad, sigma, v, budget));
    for (const auto& r : mo.reports) mo.detected = mo.detected || (r.status == Status::Fail && !r.witness.is_null());
    out.push_back(std::move(mo));
  }
  return out;
}

inline CheckReport verify_mutation(const GeneratingSet& g, std::size_t sigma, std::size_t trials = 20,
                                   std::uint64_t seed = 1, Budget budget = {}) {
  return detail::run_check("mutation", describe(g) + ",sigma=" + std::to_string(sigma), [&](CheckReport& rep) {
    std::size_t detected = 0;
    for (const auto& mo : mutation_trials(g, sigma, trials, seed, budget)) {
      if (mo.detected) {
        ++detected;
      } else if (rep.status == Status::Pass) {
        rep.status = Status::Fail;
        rep.witness = {{"matrix", mo.matrix + 1}, {"row", mo.row + 1}, {"col", mo.col + 1},
                       {"from", mo.from},         {"to", mo.to}};
      }
    }
    rep.details = {{"trials", trials}, {"detected", detected}};
  });
}

// ---------------------------------------------------------------------------
// Built-in instance matrix

struct Instance {
  std::string name;
  GeneratingSet g;
  /// Orders at which the instance is certified.
  std::vector<std::size_t> sigmas;
};

/// Multi-dimensional built-in nets with b in {2,3}, n <= 6, d <= 3.
inline std::vector<Instance> builtin_instances(Budget budget = {}) {
  std::vector<Instance> out;
  for (std::size_t n = 2; n <= 6; ++n) out.push_back({"hammersley", construct_hammersley(2, n), {1, 2}});
  for (std::size_t n = 2; n <= 4; ++n) out.push_back({"faure", construct_faure(2, n, 3, budget), {1}});
  for (std::size_t n = 2; n <= 3; ++n) out.push_back({"faure", construct_faure(3, n, 3, budget), {1}});
  out.push_back({"faure", construct_faure(3, 2, 2, budget), {1}});
  for (std::size_t n = 2; n <= 3; ++n)
    out.push_back({"interlaced-faure", construct_interlaced_faure(3, n, 2, 2, budget), {1, 2}});
  return out;
}

/// Full harness on the built-in instances plus the Hammersley scaling checks.
inline std::vector<CheckReport> run_all(Budget budget = {}) {
  std::vector<CheckReport> reps;
  for (const auto& inst : builtin_instances(budget)) {
    const auto& g = inst.g;
    reps.push_back(verify_walsh_character(g, g.s, nullptr, budget));
    for (auto sigma : inst.sigmas) reps.push_back(verify_duality(g, sigma, {}, budget));
    reps.push_back(verify_omega(g, budget));
    for (auto sigma : inst.sigmas) reps.push_back(verify_decay(g, sigma, {}, {}, budget));
    for (auto& r : reps)
      if (r.instance.rfind("net(", 0) == 0) r.instance = inst.name + r.instance.substr(3);
  }
  Metric l2;
  reps.push_back(verify_scaling({"hammersley", 2, 2, 1}, 3, 10, l2, 3.0, budget));
  Metric besov;
  besov.kind = MetricKind::Besov;
  besov.besov = {1.0, 1.0, 0.5, 0, false};
  reps.push_back(verify_scaling({"hammersley", 2, 2, 2}, 3, 8, besov, 3.0, budget));
  return reps;
}

}  // namespace netscope
