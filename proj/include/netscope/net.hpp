#pragma once

// Digital construction of point sets from generating matrices, digit
// interlacing, and the net/points file formats.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "netscope/errors.hpp"
#include "netscope/gfmat.hpp"
#include "netscope/numeric.hpp"

namespace netscope {

/// d generating matrices C_1..C_d of shape s x n over F_b.
struct GeneratingSet {
  Digit b = 2;
  std::size_t s = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<FieldMatrix> matrices;

  void validate() const {
    require_prime(b);
    require(d >= 1 && matrices.size() == d, ErrorCode::InvariantViolation,
            "expected d=" + std::to_string(d) + " matrices, got " + std::to_string(matrices.size()));
    require(n >= 1, ErrorCode::InvariantViolation, "n must be positive");
    require(s >= n, ErrorCode::InvariantViolation,
            "s=" + std::to_string(s) + " < n=" + std::to_string(n));
    for (std::size_t i = 0; i < d; ++i) {
      const auto& c = matrices[i];
      require(c.modulus() == b && c.rows() == s && c.cols() == n, ErrorCode::InvariantViolation,
              "matrix " + std::to_string(i + 1) + " does not have shape " + std::to_string(s) + "x" +
                  std::to_string(n) + " over F_" + std::to_string(b));
    }
    checked_pow(b, static_cast<unsigned>(s));
  }

  std::uint64_t num_points() const { return checked_pow(b, static_cast<unsigned>(n)); }

  friend bool operator==(const GeneratingSet&, const GeneratingSet&) = default;
};

inline GeneratingSet make_generating_set(std::vector<FieldMatrix> matrices) {
  require(!matrices.empty(), ErrorCode::InvariantViolation, "no generating matrices");
  GeneratingSet g;
  g.b = matrices.front().modulus();
  g.s = matrices.front().rows();
  g.n = matrices.front().cols();
  g.d = matrices.size();
  g.matrices = std::move(matrices);
  g.validate();
  return g;
}

/// One point: coordinate i equals numerators[i] / b^s, with digits[i] the
/// s-digit column (x_{i,1}, ..., x_{i,s}), most significant first.
struct NetPoint {
  std::vector<std::uint64_t> numerators;
  std::vector<std::vector<Digit>> digits;

  friend bool operator==(const NetPoint&, const NetPoint&) = default;
};

struct PointSet {
  Digit b = 2;
  std::size_t s = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<NetPoint> points;
  /// Generating set the points came from; empty for external point sets.
  std::optional<GeneratingSet> source;

  std::size_t size() const { return points.size(); }
  std::uint64_t denominator() const { return checked_pow(b, static_cast<unsigned>(s)); }

  BAdic coord(std::size_t point, std::size_t i) const {
    return BAdic{points[point].numerators[i], b, static_cast<unsigned>(s)};
  }
  double coord_double(std::size_t point, std::size_t i) const {
    return static_cast<double>(points[point].numerators[i]) / static_cast<double>(denominator());
  }
};

inline NetPoint make_point(std::vector<std::uint64_t> numerators, Digit b, std::size_t s) {
  NetPoint p;
  p.digits.reserve(numerators.size());
  for (auto k : numerators) {
    auto lsb = to_digits(k, b, s);
    std::reverse(lsb.begin(), lsb.end());
    p.digits.push_back(std::move(lsb));
  }
  p.numerators = std::move(numerators);
  return p;
}

/// Point nu has coordinate digits C_i * digits(nu), digits least significant first.
inline PointSet generate_points(const GeneratingSet& g) {
  g.validate();
  PointSet ps{g.b, g.s, g.n, g.d, {}, g};
  const std::uint64_t count = g.num_points();
  ps.points.reserve(count);
  for (std::uint64_t nu = 0; nu < count; ++nu) {
    const auto nu_digits = to_digits(nu, g.b, g.n);
    NetPoint p;
    p.numerators.resize(g.d);
    p.digits.resize(g.d);
    for (std::size_t i = 0; i < g.d; ++i) {
      p.digits[i] = mat_vec(g.matrices[i], std::span<const Digit>(nu_digits));
      std::uint64_t k = 0;
      for (Digit x : p.digits[i]) k = k * g.b + x;
      p.numerators[i] = k;
    }
    ps.points.push_back(std::move(p));
  }
  return ps;
}

/// Wraps externally supplied exact points (numerators over b^s); |points| must be b^n.
inline PointSet make_external_point_set(Digit b, std::size_t s, std::size_t n,
                                        const std::vector<std::vector<std::uint64_t>>& numerators) {
  require_prime(b);
  require(!numerators.empty(), ErrorCode::InvariantViolation, "empty point set");
  const std::uint64_t den = checked_pow(b, static_cast<unsigned>(s));
  require(numerators.size() == checked_pow(b, static_cast<unsigned>(n)), ErrorCode::InvariantViolation,
          "external point set must hold b^n points");
  PointSet ps{b, s, n, numerators.front().size(), {}, std::nullopt};
  for (const auto& row : numerators) {
    require(row.size() == ps.d, ErrorCode::DimensionMismatch, "ragged point coordinates");
    for (auto k : row) require(k < den, ErrorCode::InvariantViolation, "coordinate outside [0,1)");
    ps.points.push_back(make_point(row, b, s));
  }
  return ps;
}

/// b^n uniform random points with `digits` base-b digits per coordinate.
inline PointSet random_point_set(Digit b, std::size_t n, std::size_t d, std::size_t digits, std::uint64_t seed) {
  const std::uint64_t den = checked_pow(b, static_cast<unsigned>(digits));
  const std::uint64_t count = checked_pow(b, static_cast<unsigned>(n));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> dist(0, den - 1);
  std::vector<std::vector<std::uint64_t>> rows(count, std::vector<std::uint64_t>(d));
  for (auto& row : rows)
    for (auto& k : row) k = dist(rng);
  return make_external_point_set(b, digits, n, rows);
}

/// Digit interlacing of order sigma: rows of output E_j are taken round-robin
/// from C_{(j-1)sigma+1}, ..., C_{j sigma}: row sigma(a-1)+i of E_j is row a
/// of C_{(j-1)sigma+i}.
inline GeneratingSet interlace(const GeneratingSet& gs, std::size_t sigma) {
  gs.validate();
  require(sigma >= 1 && gs.d % sigma == 0, ErrorCode::DimensionMismatch,
          "d=" + std::to_string(gs.d) + " is not divisible by sigma=" + std::to_string(sigma));
  require(gs.s == gs.n, ErrorCode::DimensionMismatch, "interlacing expects square n x n input matrices");
  if (sigma == 1) return gs;
  std::vector<FieldMatrix> out;
  for (std::size_t j = 0; j < gs.d / sigma; ++j) {
    FieldMatrix e(sigma * gs.n, gs.n, gs.b);
    for (std::size_t a = 0; a < gs.n; ++a)
      for (std::size_t i = 0; i < sigma; ++i) {
        const auto& src = gs.matrices[j * sigma + i];
        for (std::size_t c = 0; c < gs.n; ++c) e.set(sigma * a + i, c, src(a, c));
      }
    out.push_back(std::move(e));
  }
  return make_generating_set(std::move(out));
}

// ---------------------------------------------------------------------------
// File formats

inline nlohmann::json net_to_json(const GeneratingSet& g) {
  nlohmann::json mats = nlohmann::json::array();
  for (const auto& m : g.matrices) mats.push_back(m.to_rows());
  return {{"b", g.b}, {"s", g.s}, {"n", g.n}, {"d", g.d}, {"matrices", mats}};
}

namespace detail {

inline std::uint64_t json_uint(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number_integer() || (j.is_number_integer() && j.get<std::int64_t>() < 0))
    fail(ErrorCode::ParseError, "field '" + field + "': expected a nonnegative integer, got " + j.dump());
  return j.get<std::uint64_t>();
}

inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(offset, text.size()));
  return 1 + static_cast<std::size_t>(std::count(text.begin(), end, '\n'));
}

}  // namespace detail

inline GeneratingSet net_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::ParseError, "top level: expected an object");
  for (const char* key : {"b", "s", "n", "d", "matrices"})
    if (!j.contains(key)) fail(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  GeneratingSet g;
  const auto b = detail::json_uint(j["b"], "b");
  require(b <= kMaxModulus, ErrorCode::ParseError, "field 'b': value too large");
  g.b = static_cast<Digit>(b);
  g.s = detail::json_uint(j["s"], "s");
  g.n = detail::json_uint(j["n"], "n");
  g.d = detail::json_uint(j["d"], "d");
  require_prime(g.b);
  require(g.s >= g.n, ErrorCode::InvariantViolation,
          "s=" + std::to_string(g.s) + " < n=" + std::to_string(g.n));
  const auto& mats = j["matrices"];
  if (!mats.is_array()) fail(ErrorCode::ParseError, "field 'matrices': expected an array");
  require(mats.size() == g.d, ErrorCode::InvariantViolation,
          "field 'matrices': d=" + std::to_string(g.d) + " but " + std::to_string(mats.size()) + " matrices");
  for (std::size_t i = 0; i < mats.size(); ++i) {
    const std::string where = "matrices[" + std::to_string(i) + "]";
    if (!mats[i].is_array()) fail(ErrorCode::ParseError, "field '" + where + "': expected an array of rows");
    require(mats[i].size() == g.s, ErrorCode::InvariantViolation,
            "field '" + where + "': expected " + std::to_string(g.s) + " rows");
    FieldMatrix m(g.s, g.n, g.b);
    for (std::size_t r = 0; r < g.s; ++r) {
      const auto& row = mats[i][r];
      const std::string rw = where + "[" + std::to_string(r) + "]";
      if (!row.is_array()) fail(ErrorCode::ParseError, "field '" + rw + "': expected an array");
      require(row.size() == g.n, ErrorCode::InvariantViolation,
              "field '" + rw + "': expected " + std::to_string(g.n) + " entries");
      for (std::size_t c = 0; c < g.n; ++c) {
        const auto v = detail::json_uint(row[c], rw + "[" + std::to_string(c) + "]");
        require(v < g.b, ErrorCode::ParseError,
                "field '" + rw + "[" + std::to_string(c) + "]': entry " + std::to_string(v) + " not in [0,b)");
        m.set(r, c, v);
      }
    }
    g.matrices.push_back(std::move(m));
  }
  g.validate();
  return g;
}

inline GeneratingSet parse_net(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError,
         "line " + std::to_string(detail::line_of_offset(text, e.byte)) + ": " + e.what());
  }
  return net_from_json(j);
}

inline void save_net(const GeneratingSet& g, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::ParseError, "cannot open '" + path + "' for writing");
  out << net_to_json(g).dump() << '\n';
}

inline GeneratingSet load_net(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::ParseError, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_net(buf.str());
}

/// CSV with header nu,coord_1_num,...,coord_d_num,denominator.
inline std::string points_to_csv(const PointSet& ps) {
  std::ostringstream out;
  out << "nu";
  for (std::size_t i = 1; i <= ps.d; ++i) out << ",coord_" << i << "_num";
  out << ",denominator\n";
  const auto den = ps.denominator();
  for (std::size_t nu = 0; nu < ps.size(); ++nu) {
    out << nu;
    for (auto k : ps.points[nu].numerators) out << ',' << k;
    out << ',' << den << '\n';
  }
  return out.str();
}

}  // namespace netscope
