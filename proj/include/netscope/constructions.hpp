#pragma once

// Built-in generating sets: identity, Hammersley, Faure, interlaced Faure.

#include <string>
#include <vector>

#include "netscope/errors.hpp"
#include "netscope/gfmat.hpp"
#include "netscope/net.hpp"
#include "netscope/quality.hpp"

namespace netscope {

/// Reversal matrix: row a has its 1 in column n+1-a.
inline FieldMatrix reversal_matrix(std::size_t n, Digit b) {
  FieldMatrix j(n, n, b);
  for (std::size_t a = 0; a < n; ++a) j.set(a, n - 1 - a, 1);
  return j;
}

/// Upper-triangular Pascal matrix P[a][c] = binom(c, a) mod b (0-based).
inline FieldMatrix pascal_matrix(std::size_t n, Digit b) {
  FieldMatrix p(n, n, b);
  for (std::size_t c = 0; c < n; ++c) {
    p.set(0, c, 1);
    for (std::size_t a = 1; a <= c; ++a) p.set(a, c, std::uint64_t{p(a - 1, c - 1)} + p(a, c - 1));
  }
  return p;
}

inline GeneratingSet construct_identity(Digit b, std::size_t n) {
  return make_generating_set({FieldMatrix::identity(n, b)});
}

inline GeneratingSet construct_hammersley(Digit b, std::size_t n) {
  require(n >= 1, ErrorCode::InvariantViolation, "n must be positive");
  return make_generating_set({FieldMatrix::identity(n, b), reversal_matrix(n, b)});
}

/// C_i = P^{i-1} for i <= b. One extra coordinate (d = b + 1) is allowed and
/// uses the reversal matrix, the usual Hammersley-type completion. The result
/// is certified to be an order-1 (0,n,d)-net before it is returned.
inline GeneratingSet construct_faure(Digit b, std::size_t n, std::size_t d, Budget budget = {}) {
  require_prime(b);
  require(n >= 1 && d >= 1, ErrorCode::InvariantViolation, "n and d must be positive");
  require(d <= std::size_t{b} + 1, ErrorCode::BaseTooSmall,
          "Faure nets need d <= b+1, got d=" + std::to_string(d) + " for b=" + std::to_string(b));
  std::vector<FieldMatrix> ms;
  const auto p = pascal_matrix(n, b);
  auto power = FieldMatrix::identity(n, b);
  for (std::size_t i = 0; i < std::min<std::size_t>(d, b); ++i) {
    ms.push_back(power);
    power = matmul(power, p);
  }
  if (d == std::size_t{b} + 1) ms.push_back(reversal_matrix(n, b));
  auto g = make_generating_set(std::move(ms));
  const auto cert = min_quality_v(g, 1, budget);
  require(cert.v == 0, ErrorCode::InvariantViolation,
          "Faure construction failed certification (v=" + std::to_string(cert.v) + ")");
  return g;
}

/// Order-sigma net in dimension d from a Faure net in dimension sigma*d.
inline GeneratingSet construct_interlaced_faure(Digit b, std::size_t n, std::size_t d, std::size_t sigma = 2,
                                                Budget budget = {}) {
  return interlace(construct_faure(b, n, sigma * d, budget), sigma);
}

/// Builds a generating set by name: identity | hammersley | faure | interlaced-faure.
inline GeneratingSet build_construction(const std::string& name, Digit b, std::size_t n, std::size_t d,
                                        std::size_t sigma = 2, Budget budget = {}) {
  if (name == "identity") return construct_identity(b, n);
  if (name == "hammersley") return construct_hammersley(b, n);
  if (name == "faure") return construct_faure(b, n, d, budget);
  if (name == "interlaced-faure") return construct_interlaced_faure(b, n, d, sigma, budget);
  fail(ErrorCode::InvariantViolation, "unknown construction '" + name + "'");
}

}  // namespace netscope
