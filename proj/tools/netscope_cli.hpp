#pragma once

// Command-line front end. run() is separate from main() so tests can drive it.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netscope/constructions.hpp"
#include "netscope/haar.hpp"
#include "netscope/net.hpp"
#include "netscope/norms.hpp"
#include "netscope/parallel.hpp"
#include "netscope/quality.hpp"
#include "netscope/verify.hpp"
#include "netscope/walsh.hpp"

namespace netscope::cli {

enum Exit : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kBudget = 3 };

inline const char* kGrammar =
    "usage: netscope <command> [options]\n"
    "  net gen      --construction {identity|hammersley|faure|interlaced-faure} --b B --n N [--d D] [--sigma S]\n"
    "  net check    --in NET [--sigma S] [--method {independence|dual|equidistribution|all}]\n"
    "  net points   --in NET\n"
    "  dual enum    --in NET [--box K]\n"
    "  haar coeffs  --in NET [--jmax J]\n"
    "  discrepancy l2    --in NET [--method {warnock|haar|both}] [--jmax J]\n"
    "  discrepancy besov --in NET --p P --q Q --r R [--jmax J] [--allow-inadmissible]\n"
    "  verify walsh-sum --in NET [--box K]\n"
    "  verify duality   --in NET [--sigma S] [--expect-v V]\n"
    "  verify omega     --in NET\n"
    "  verify decay     --in NET [--sigma S] [--v V] [--jmax J]\n"
    "  verify scaling   --construction C --b B [--d D] [--sigma S] --n-min A --n-max Z [--metric {l2|besov}]\n"
    "                   [--p P --q Q --r R] [--threshold T] [--control SETS]\n"
    "  verify all\n"
    "common options: --out PATH, --format {csv|json}, --config FILE.json, --threads T, --budget U, --seed S, "
    "--timing\n";

struct Common {
  std::string out;
  std::string format = "csv";
  unsigned threads = 0;
  std::optional<std::uint64_t> budget;
  std::uint64_t seed = 1;
  bool timing = false;

  Budget effective_budget() const { return budget ? Budget{*budget} : budget_from_env(); }
};

inline std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline double parse_extended(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw CLI::ValidationError("expected a number or 'inf', got '" + s + "'");
  return v;
}

/// Appends flags from a JSON config file for every key not given on the command line.
inline std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open '" + path + "'");
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw CLI::ValidationError("--config", e.what());
  }
  if (!cfg.is_object()) throw CLI::ValidationError("--config", "expected a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
    if (given || key == "config") continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else {
      args.push_back(flag);
      args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  return args;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(std::vector<std::string> args) {
    CLI::App app{"Digital net construction and discrepancy analysis"};
    app.require_subcommand(1);
    build(app);
    try {
      args = merge_config(std::move(args));
      std::vector<std::string> rev(args.rbegin(), args.rend());
      app.parse(rev);
    } catch (const CLI::CallForHelp&) {
      out_ << kGrammar;
      return kOk;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n" << kGrammar;
      return kUsage;
    }
    if (common_.format != "csv" && common_.format != "json") {
      err_ << "error: --format must be csv or json, got '" << common_.format << "'\n" << kGrammar;
      return kUsage;
    }
    if (common_.threads > 0) set_thread_cap(common_.threads);
    try {
      return action_();
    } catch (const Error& e) {
      err_ << "error: " << e.what() << "\n";
      if (e.code() == ErrorCode::BudgetExceeded || e.code() == ErrorCode::InstanceTooLarge) return kBudget;
      return kUsage;
    } catch (const CLI::ValidationError& e) {
      err_ << "error: " << e.what() << "\n" << kGrammar;
      return kUsage;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return kUsage;
    }
  }

 private:
  // -------------------------------------------------------------------------
  // Option plumbing

  void add_common(CLI::App* sub) {
    sub->add_option("--out", common_.out, "output path (default stdout)");
    sub->add_option("--format", common_.format, "csv or json");
    sub->add_option("--config", config_, "JSON file whose keys replace flags");
    sub->add_option("--threads", common_.threads, "worker thread cap");
    sub->add_option("--budget", common_.budget, "enumeration budget");
    sub->add_option("--seed", common_.seed, "random seed");
    sub->add_flag("--timing", common_.timing, "include runtimes in reports");
  }

  CLI::App* leaf(CLI::App* parent, const std::string& name, const std::string& help, std::function<int()> fn) {
    auto* sub = parent->add_subcommand(name, help);
    add_common(sub);
    sub->callback([this, fn] { action_ = fn; });
    return sub;
  }

  void emit(const std::string& text) {
    if (common_.out.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(common_.out, std::ios::binary);
    if (!f) fail(ErrorCode::ParseError, "cannot open '" + common_.out + "' for writing");
    f << text;
  }

  void emit_json(const nlohmann::json& j) { emit(j.dump(2) + "\n"); }

  bool json() const { return common_.format == "json"; }

  GeneratingSet input_net() const {
    if (in_.empty()) throw CLI::ValidationError("--in", "an input net is required");
    return load_net(in_);
  }

  int report_exit(const std::vector<CheckReport>& reps) const {
    for (const auto& r : reps)
      if (r.status == Status::Fail) return kCheckFailed;
    for (const auto& r : reps)
      if (r.status == Status::Budget) return kBudget;
    return kOk;
  }

  int emit_reports(const std::vector<CheckReport>& reps) {
    if (json()) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : reps) arr.push_back(r.to_json(common_.timing));
      emit_json(reps.size() == 1 ? arr[0] : arr);
    } else {
      std::ostringstream os;
      os << "check,instance,status,witness\n";
      for (const auto& r : reps)
        os << r.check << ",\"" << r.instance << "\"," << to_string(r.status) << ",\""
           << (r.witness.is_null() ? std::string() : r.witness.dump()) << "\"\n";
      emit(os.str());
    }
    return report_exit(reps);
  }

  void scaling_csv(std::ostringstream& os, const std::vector<ScalingRow>& rows) {
    for (const auto& r : rows)
      os << r.n << ',' << r.N << ',' << num(r.value) << ',' << num(r.normalized) << ',' << num(r.envelope) << '\n';
  }

  Metric metric_from_flags(bool besov) const {
    Metric m;
    if (besov) {
      m.kind = MetricKind::Besov;
      m.besov.p = parse_extended(p_);
      m.besov.q = parse_extended(q_);
      m.besov.r = r_;
      m.besov.allow_inadmissible = allow_inadmissible_;
    }
    return m;
  }

  // -------------------------------------------------------------------------
  // Grammar

  void build(CLI::App& app) {
    auto* net = app.add_subcommand("net", "construct and certify nets");
    net->require_subcommand(1);
    auto* gen = leaf(net, "gen", "build a generating set", [this] { return net_gen(); });
    gen->add_option("--construction", construction_)->required();
    gen->add_option("--b", b_)->required();
    gen->add_option("--n", n_)->required();
    gen->add_option("--d", d_);
    gen->add_option("--sigma", sigma_);
    auto* check = leaf(net, "check", "certify the quality parameter", [this] { return net_check(); });
    check->add_option("--in", in_)->required();
    check->add_option("--sigma", sigma_);
    check->add_option("--method", method_)
        ->check(CLI::IsMember({"independence", "dual", "equidistribution", "all"}));
    auto* points = leaf(net, "points", "export the point set", [this] { return net_points(); });
    points->add_option("--in", in_)->required();

    auto* dual = app.add_subcommand("dual", "dual net");
    dual->require_subcommand(1);
    auto* en = leaf(dual, "enum", "enumerate the dual net", [this] { return dual_enum(); });
    en->add_option("--in", in_)->required();
    en->add_option("--box", box_);

    auto* haar = app.add_subcommand("haar", "Haar coefficients");
    haar->require_subcommand(1);
    auto* coeffs = leaf(haar, "coeffs", "dump Haar coefficients of the discrepancy function",
                        [this] { return haar_coeffs(); });
    coeffs->add_option("--in", in_)->required();
    coeffs->add_option("--jmax", jmax_);

    auto* disc = app.add_subcommand("discrepancy", "discrepancy norms");
    disc->require_subcommand(1);
    auto* l2 = leaf(disc, "l2", "L2 discrepancy", [this] { return disc_l2(); });
    l2->add_option("--in", in_)->required();
    l2->add_option("--method", method_)->check(CLI::IsMember({"warnock", "haar", "both"}));
    l2->add_option("--jmax", jmax_);
    auto* besov = leaf(disc, "besov", "Besov quasi-norm", [this] { return disc_besov(); });
    besov->add_option("--in", in_)->required();
    besov->add_option("--p", p_)->required();
    besov->add_option("--q", q_)->required();
    besov->add_option("--r", r_)->required();
    besov->add_option("--jmax", jmax_);
    besov->add_flag("--allow-inadmissible", allow_inadmissible_);

    auto* ver = app.add_subcommand("verify", "verification checks");
    ver->require_subcommand(1);
    auto* ws = leaf(ver, "walsh-sum", "character sums over the digit box", [this] { return verify_walsh(); });
    ws->add_option("--in", in_)->required();
    ws->add_option("--box", box_);
    auto* du = leaf(ver, "duality", "quality by independence vs dual weights", [this] { return verify_dual(); });
    du->add_option("--in", in_)->required();
    du->add_option("--sigma", sigma_);
    du->add_option("--expect-v", expect_v_);
    auto* om = leaf(ver, "omega", "omega counts against their bound", [this] { return verify_om(); });
    om->add_option("--in", in_)->required();
    auto* de = leaf(ver, "decay", "Haar coefficient decay", [this] { return verify_dec(); });
    de->add_option("--in", in_)->required();
    de->add_option("--sigma", sigma_);
    de->add_option("--v", v_);
    de->add_option("--jmax", jmax_);
    auto* sc = leaf(ver, "scaling", "normalized norms over a family", [this] { return verify_scale(); });
    sc->add_option("--construction", construction_)->required();
    sc->add_option("--b", b_)->required();
    sc->add_option("--d", d_);
    sc->add_option("--sigma", sigma_);
    sc->add_option("--n-min", n_min_)->required();
    sc->add_option("--n-max", n_max_)->required();
    sc->add_option("--metric", metric_)->check(CLI::IsMember({"l2", "besov"}));
    sc->add_option("--p", p_);
    sc->add_option("--q", q_);
    sc->add_option("--r", r_);
    sc->add_option("--jmax", jmax_);
    sc->add_option("--threshold", threshold_);
    sc->add_option("--control", control_, "random point sets per n for a Monte Carlo control");
    leaf(ver, "all", "full harness on the built-in instances", [this] { return verify_everything(); });
  }

  // -------------------------------------------------------------------------
  // Commands

  int net_gen() {
    const auto g = build_construction(construction_, b_, n_, d_.value_or(construction_ == "hammersley" ? 2 : 1),
                                      sigma_.value_or(2), common_.effective_budget());
    if (json()) {
      emit(net_to_json(g).dump() + "\n");
    } else {
      std::ostringstream os;
      os << "matrix,row,col,value\n";
      for (std::size_t i = 0; i < g.d; ++i)
        for (std::size_t r = 0; r < g.s; ++r)
          for (std::size_t c = 0; c < g.n; ++c) os << i + 1 << ',' << r + 1 << ',' << c + 1 << ',' << g.matrices[i](r, c) << '\n';
      emit(os.str());
    }
    return kOk;
  }

  int net_check() {
    const auto g = input_net();
    const std::size_t sigma = sigma_.value_or(1);
    const auto budget = common_.effective_budget();
    std::vector<QualityCertificate> certs;
    const std::string m = method_.empty() ? "independence" : method_;
    if (m == "independence" || m == "all") certs.push_back(min_quality_v(g, sigma, budget));
    if (m == "dual" || m == "all") certs.push_back(min_quality_v_dual(g, sigma, budget));
    if (m == "equidistribution" || m == "all") {
      if (sigma != 1) throw CLI::ValidationError("--method", "equidistribution certifies sigma = 1 only");
      certs.push_back(min_quality_v_geometric(generate_points(g), budget));
    }
    if (json()) {
      if (certs.size() == 1) {
        emit_json(to_json(certs[0]));
      } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : certs) arr.push_back(to_json(c));
        emit_json(arr);
      }
    } else {
      std::ostringstream os;
      os << "sigma,v,method\n";
      for (const auto& c : certs) os << c.sigma << ',' << c.v << ',' << to_string(c.method) << '\n';
      emit(os.str());
    }
    for (const auto& c : certs)
      if (c.v != certs.front().v) return kCheckFailed;
    return kOk;
  }

  int net_points() {
    const auto pts = generate_points(input_net());
    if (json()) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& p : pts.points) arr.push_back(p.numerators);
      emit_json({{"denominator", pts.denominator()}, {"points", arr}});
    } else {
      emit(points_to_csv(pts));
    }
    return kOk;
  }

  int dual_enum() {
    const auto g = input_net();
    const auto duals = enumerate_dual(g, box_.value_or(g.s), common_.effective_budget());
    const auto pts = generate_points(g);
    std::ostringstream os;
    nlohmann::json arr = nlohmann::json::array();
    if (!json()) {
      for (std::size_t i = 1; i <= g.d; ++i) os << 't' << '_' << i << ',';
      os << "rho1,rho2,re,im\n";
    }
    for (const auto& t : duals) {
      const auto s = character_sum(pts, t);
      if (json()) {
        arr.push_back({{"t", t.t}, {"rho1", t.rho1}, {"rho2", t.rho2}, {"re", s.real()}, {"im", s.imag()}});
      } else {
        for (auto ti : t.t) os << ti << ',';
        os << t.rho1 << ',' << t.rho2 << ',' << num(s.real()) << ',' << num(s.imag()) << '\n';
      }
    }
    if (json())
      emit_json(arr);
    else
      emit(os.str());
    return kOk;
  }

  int haar_coeffs() {
    const auto g = input_net();
    const auto pts = generate_points(g);
    const unsigned jmax = jmax_.value_or(static_cast<unsigned>(g.n));
    const auto budget = common_.effective_budget();
    std::uint64_t total = 0;
    for (const auto& j : level_shapes_up_to(g.d, jmax)) {
      std::uint64_t c = 1;
      for (int ji : j) c *= ji < 0 ? 1 : checked_pow(g.b, static_cast<unsigned>(ji)) * (g.b - 1);
      total += c;
    }
    budget.charge(total, "Haar coefficient dump");
    std::ostringstream os;
    nlohmann::json arr = nlohmann::json::array();
    if (!json()) {
      for (const char* f : {"j", "m", "l"})
        for (std::size_t i = 1; i <= g.d; ++i) os << f << '_' << i << ',';
      os << "re,im,abs\n";
    }
    for (const auto& lc : compute_levels(pts, jmax, budget))
      for (const auto& rec : lc.records()) {
        if (json()) {
          arr.push_back({{"j", rec.index.j},
                         {"m", rec.index.m},
                         {"l", rec.index.l},
                         {"re", rec.value.real()},
                         {"im", rec.value.imag()},
                         {"abs", std::abs(rec.value)}});
          continue;
        }
        for (int x : rec.index.j) os << x << ',';
        for (auto x : rec.index.m) os << x << ',';
        for (auto x : rec.index.l) os << x << ',';
        os << num(rec.value.real()) << ',' << num(rec.value.imag()) << ',' << num(std::abs(rec.value)) << '\n';
      }
    if (json())
      emit_json(arr);
    else
      emit(os.str());
    return kOk;
  }

  int disc_l2() {
    const auto g = input_net();
    const auto pts = generate_points(g);
    const std::string m = method_.empty() ? "warnock" : method_;
    const unsigned jmax = jmax_.value_or(default_j_max(g.n));
    Metric l2;
    const double env = scaling_envelope(l2, g.b, g.n, g.d);
    std::vector<std::pair<std::string, double>> values;
    std::optional<L2HaarResult> haar;
    if (m == "warnock" || m == "both") values.emplace_back("warnock", l2_warnock(pts));
    if (m == "haar" || m == "both") {
      haar = l2_haar(pts, jmax, common_.effective_budget());
      values.emplace_back("haar", haar->value);
    }
    if (json()) {
      nlohmann::json j = {{"n", g.n}, {"N", pts.size()}, {"envelope", env}, {"jmax", jmax}};
      for (const auto& [name, v] : values) j[name] = {{"value", v}, {"normalized", v / env}};
      if (haar) j["haar"]["tail"] = haar->tail;
      emit_json(j);
    } else {
      std::ostringstream os;
      os << "n,N,value,normalized,envelope\n";
      for (const auto& [name, v] : values)
        os << g.n << ',' << pts.size() << ',' << num(v) << ',' << num(v / env) << ',' << num(env) << '\n';
      emit(os.str());
    }
    return kOk;
  }

  int disc_besov() {
    const auto g = input_net();
    const auto pts = generate_points(g);
    Metric m = metric_from_flags(true);
    m.besov.j_max = jmax_.value_or(default_j_max(g.n));
    const auto res = besov_quasinorm(pts, m.besov, common_.effective_budget());
    const double env = scaling_envelope(m, g.b, g.n, g.d);
    if (json()) {
      emit_json({{"n", g.n},
                 {"N", pts.size()},
                 {"value", res.value},
                 {"normalized", res.value / env},
                 {"envelope", env},
                 {"jmax", m.besov.j_max},
                 {"last_increment", res.last_increment}});
    } else {
      std::ostringstream os;
      os << "n,N,value,normalized,envelope\n"
         << g.n << ',' << pts.size() << ',' << num(res.value) << ',' << num(res.value / env) << ',' << num(env)
         << '\n';
      emit(os.str());
    }
    return kOk;
  }

  int verify_walsh() {
    const auto g = input_net();
    const std::size_t box = box_.value_or(g.s);
    const auto budget = common_.effective_budget();
    const auto rep = verify_walsh_character(g, box, nullptr, budget);
    if (json() || rep.status == Status::Budget) return emit_reports({rep});
    // Per-candidate listing.
    const auto pts = generate_points(g);
    const std::uint64_t side = checked_pow(g.b, static_cast<unsigned>(box));
    std::ostringstream os;
    for (std::size_t i = 1; i <= g.d; ++i) os << "t_" << i << ',';
    os << "rho1,rho2,re,im\n";
    std::vector<std::uint64_t> t(g.d, 0);
    while (true) {
      const auto s = character_sum(pts, t);
      for (auto ti : t) os << ti << ',';
      os << nrt_weight(std::span<const std::uint64_t>(t), 1, g.b) << ','
         << nrt_weight(std::span<const std::uint64_t>(t), 2, g.b) << ',' << num(s.real()) << ',' << num(s.imag())
         << '\n';
      std::size_t i = 0;
      while (i < g.d && ++t[i] == side) t[i++] = 0;
      if (i == g.d) break;
    }
    emit(os.str());
    if (rep.status == Status::Fail) err_ << "walsh-sum failed: " << rep.witness.dump() << '\n';
    return report_exit({rep});
  }

  int verify_dual() {
    const auto g = input_net();
    std::optional<unsigned> expect;
    if (expect_v_) expect = *expect_v_;
    return emit_reports({verify_duality(g, sigma_.value_or(1), expect, common_.effective_budget())});
  }

  int verify_om() { return emit_reports({verify_omega(input_net(), common_.effective_budget())}); }

  int verify_dec() {
    const auto g = input_net();
    std::optional<int> v;
    if (v_) v = *v_;
    return emit_reports({verify_decay(g, sigma_.value_or(1), v, jmax_, common_.effective_budget())});
  }

  int verify_scale() {
    FamilySpec fam{construction_, b_, d_.value_or(2), sigma_.value_or(1)};
    Metric m = metric_from_flags(metric_ == "besov");
    if (jmax_) m.j_extra = *jmax_;
    const auto budget = common_.effective_budget();
    const auto st = scaling_study(fam, n_min_, n_max_, m, budget);
    auto rep = report_scaling(construction_, st, threshold_);
    std::optional<RandomControl> rc;
    if (control_ > 0) {
      rc = random_control(b_, fam.d, n_min_, n_max_, control_, common_.seed);
      rep.constants["control_growth"] = rc->growth;
    }
    for (const auto& w : st.warnings) err_ << "warning: " << w << '\n';
    if (json()) {
      auto j = rep.to_json(common_.timing);
      if (rc) j["details"]["control"] = {{"n", rc->ns}, {"normalized", rc->normalized}, {"growth", rc->growth}};
      emit_json(j);
    } else {
      std::ostringstream os;
      os << "n,N,value,normalized,envelope\n";
      scaling_csv(os, st.rows);
      emit(os.str());
    }
    return report_exit({rep});
  }

  int verify_everything() { return emit_reports(run_all(common_.effective_budget())); }

  std::ostream& out_;
  std::ostream& err_;
  Common common_;
  std::string config_;
  std::function<int()> action_;

  std::string in_, construction_, method_, metric_ = "l2";
  Digit b_ = 2;
  std::size_t n_ = 0, n_min_ = 0, n_max_ = 0, control_ = 0;
  std::optional<std::size_t> d_, sigma_, box_;
  std::optional<unsigned> jmax_, expect_v_;
  std::optional<int> v_;
  std::string p_ = "2", q_ = "2";
  double r_ = 0.0;
  double threshold_ = 3.0;
  bool allow_inadmissible_ = false;
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return Runner(out, err).run(std::move(args));
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Runner(out, err).run(args);
}

}  // namespace netscope::cli
