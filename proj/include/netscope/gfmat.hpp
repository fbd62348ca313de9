#pragma once

// Linear algebra over the prime field F_b.

#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "netscope/errors.hpp"
#include "netscope/numeric.hpp"

namespace netscope {

constexpr Digit kMaxModulus = 65521;

inline bool is_prime(std::uint64_t b) {
  if (b < 2) return false;
  for (std::uint64_t p = 2; p * p <= b; ++p)
    if (b % p == 0) return false;
  return true;
}

inline void require_prime(std::uint64_t b) {
  require(is_prime(b), ErrorCode::NotPrime, "modulus " + std::to_string(b) + " is not prime");
  require(b <= kMaxModulus, ErrorCode::InvariantViolation,
          "modulus " + std::to_string(b) + " exceeds supported range");
}

class FieldElem {
 public:
  FieldElem(std::uint64_t value, Digit modulus) : modulus_(modulus) {
    require_prime(modulus);
    value_ = static_cast<Digit>(value % modulus);
  }

  Digit value() const { return value_; }
  Digit modulus() const { return modulus_; }

  friend FieldElem operator+(FieldElem a, FieldElem b) {
    same(a, b);
    return FieldElem(std::uint64_t{a.value_} + b.value_, a.modulus_, Trusted{});
  }
  friend FieldElem operator-(FieldElem a, FieldElem b) {
    same(a, b);
    return FieldElem(std::uint64_t{a.value_} + a.modulus_ - b.value_, a.modulus_, Trusted{});
  }
  friend FieldElem operator*(FieldElem a, FieldElem b) {
    same(a, b);
    return FieldElem(std::uint64_t{a.value_} * b.value_, a.modulus_, Trusted{});
  }
  friend bool operator==(const FieldElem&, const FieldElem&) = default;

 private:
  struct Trusted {};
  FieldElem(std::uint64_t value, Digit modulus, Trusted)
      : value_(static_cast<Digit>(value % modulus)), modulus_(modulus) {}

  static void same(const FieldElem& a, const FieldElem& b) {
    require(a.modulus_ == b.modulus_, ErrorCode::DimensionMismatch, "mixed moduli in field arithmetic");
  }

  Digit value_ = 0;
  Digit modulus_ = 2;
};

/// Multiplicative inverse of a nonzero residue; extended Euclid.
inline Digit inverse_mod(Digit a, Digit b) {
  require(a % b != 0, ErrorCode::ZeroInverse, "0 has no inverse in F_" + std::to_string(b));
  std::int64_t r0 = b, r1 = a % b, s0 = 0, s1 = 1;
  while (r1 != 0) {
    const std::int64_t q = r0 / r1;
    std::tie(r0, r1) = std::pair{r1, r0 - q * r1};
    std::tie(s0, s1) = std::pair{s1, s0 - q * s1};
  }
  std::int64_t x = s0 % static_cast<std::int64_t>(b);
  if (x < 0) x += b;
  return static_cast<Digit>(x);
}

inline FieldElem field_inverse(FieldElem a) {
  return FieldElem(inverse_mod(a.value(), a.modulus()), a.modulus());
}

enum class Transpose : bool { No = false, Yes = true };

/// Dense s x n matrix over F_b, row-major.
class FieldMatrix {
 public:
  FieldMatrix(std::size_t rows, std::size_t cols, Digit modulus)
      : rows_(rows), cols_(cols), modulus_(modulus), entries_(rows * cols, 0) {
    require_prime(modulus);
    require(rows > 0 && cols > 0, ErrorCode::DimensionMismatch, "matrix dimensions must be positive");
  }

  static FieldMatrix identity(std::size_t n, Digit modulus) {
    FieldMatrix m(n, n, modulus);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }

  static FieldMatrix from_rows(const std::vector<std::vector<std::uint64_t>>& rows, Digit modulus) {
    require(!rows.empty() && !rows.front().empty(), ErrorCode::DimensionMismatch, "empty matrix");
    FieldMatrix m(rows.size(), rows.front().size(), modulus);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      require(rows[r].size() == m.cols_, ErrorCode::DimensionMismatch, "ragged matrix rows");
      for (std::size_t c = 0; c < m.cols_; ++c) m.set(r, c, rows[r][c]);
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Digit modulus() const { return modulus_; }

  Digit operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  FieldElem at(std::size_t r, std::size_t c) const { return FieldElem((*this)(r, c), modulus_); }
  void set(std::size_t r, std::size_t c, std::uint64_t value) {
    entries_[r * cols_ + c] = static_cast<Digit>(value % modulus_);
  }

  std::span<const Digit> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }

  std::vector<std::vector<Digit>> to_rows() const {
    std::vector<std::vector<Digit>> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r].assign(row(r).begin(), row(r).end());
    return out;
  }

  friend bool operator==(const FieldMatrix&, const FieldMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  Digit modulus_;
  std::vector<Digit> entries_;
};

/// M v, or M^T v when transposed; raw-digit version used by the hot loops.
inline std::vector<Digit> mat_vec(const FieldMatrix& m, std::span<const Digit> v, Transpose t = Transpose::No) {
  const bool tr = t == Transpose::Yes;
  const std::size_t in = tr ? m.rows() : m.cols();
  const std::size_t out_len = tr ? m.cols() : m.rows();
  require(v.size() == in, ErrorCode::DimensionMismatch,
          "vector of length " + std::to_string(v.size()) + " against " + std::to_string(in));
  const Digit b = m.modulus();
  std::vector<std::uint64_t> acc(out_len, 0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const Digit e = m(r, c);
      if (e == 0) continue;
      if (tr)
        acc[c] = (acc[c] + std::uint64_t{e} * v[r]) % b;
      else
        acc[r] = (acc[r] + std::uint64_t{e} * v[c]) % b;
    }
  }
  return {acc.begin(), acc.end()};
}

inline std::vector<FieldElem> mat_vec(const FieldMatrix& m, std::span<const FieldElem> v,
                                      Transpose t = Transpose::No) {
  std::vector<Digit> raw;
  raw.reserve(v.size());
  for (const auto& e : v) {
    require(e.modulus() == m.modulus(), ErrorCode::DimensionMismatch, "vector modulus differs from matrix");
    raw.push_back(e.value());
  }
  std::vector<FieldElem> out;
  for (Digit x : mat_vec(m, std::span<const Digit>(raw), t)) out.emplace_back(x, m.modulus());
  return out;
}

inline FieldMatrix matmul(const FieldMatrix& a, const FieldMatrix& b) {
  require(a.cols() == b.rows() && a.modulus() == b.modulus(), ErrorCode::DimensionMismatch,
          "matmul shape mismatch");
  FieldMatrix out(a.rows(), b.cols(), a.modulus());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < b.cols(); ++c) {
      std::uint64_t acc = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += std::uint64_t{a(r, k)} * b(k, c);
      out.set(r, c, acc);
    }
  return out;
}

namespace detail {

/// In-place reduced row echelon form over F_b on a row-major buffer.
/// Pivot = first nonzero entry in the column, lowest row index first.
/// Returns pivot column per pivot row.
inline std::vector<std::size_t> rref(std::vector<Digit>& a, std::size_t rows, std::size_t cols, Digit b) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p * cols + c] == 0) ++p;
    if (p == rows) continue;
    if (p != r)
      for (std::size_t k = 0; k < cols; ++k) std::swap(a[p * cols + k], a[r * cols + k]);
    const Digit inv = inverse_mod(a[r * cols + c], b);
    for (std::size_t k = c; k < cols; ++k) a[r * cols + k] = static_cast<Digit>(std::uint64_t{a[r * cols + k]} * inv % b);
    for (std::size_t q = 0; q < rows; ++q) {
      if (q == r) continue;
      const Digit f = a[q * cols + c];
      if (f == 0) continue;
      for (std::size_t k = c; k < cols; ++k)
        a[q * cols + k] = static_cast<Digit>((a[q * cols + k] + std::uint64_t{b - f} * a[r * cols + k]) % b);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

/// Rank of the given row vectors (each of equal length), without building a FieldMatrix.
inline std::size_t rank_of_rows(const std::vector<std::span<const Digit>>& rows, std::size_t len, Digit b) {
  if (rows.empty() || len == 0) return 0;
  std::vector<Digit> buf;
  buf.reserve(rows.size() * len);
  for (const auto& r : rows) buf.insert(buf.end(), r.begin(), r.end());
  return rref(buf, rows.size(), len, b).size();
}

}  // namespace detail

inline std::size_t mat_rank(const FieldMatrix& m) {
  std::vector<Digit> buf;
  buf.reserve(m.rows() * m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) buf.insert(buf.end(), m.row(r).begin(), m.row(r).end());
  return detail::rref(buf, m.rows(), m.cols(), m.modulus()).size();
}

/// Basis of {v : M v = 0}; one vector per free column, in increasing column order.
inline std::vector<std::vector<Digit>> kernel_basis(const FieldMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  const Digit b = m.modulus();
  std::vector<Digit> buf;
  buf.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) buf.insert(buf.end(), m.row(r).begin(), m.row(r).end());
  const auto pivots = detail::rref(buf, rows, cols, b);

  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;

  std::vector<std::vector<Digit>> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Digit> v(cols, 0);
    v[f] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      const Digit e = buf[r * cols + f];
      v[pivots[r]] = e == 0 ? 0 : b - e;
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace netscope
