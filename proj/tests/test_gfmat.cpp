#include <gtest/gtest.h>

#include <random>
#include <set>

#include "netscope/gfmat.hpp"
#include "oracles.hpp"

using namespace netscope;

namespace {

FieldMatrix random_matrix(std::size_t r, std::size_t c, Digit b, std::mt19937_64& rng) {
  FieldMatrix m(r, c, b);
  std::uniform_int_distribution<Digit> dig(0, b - 1);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < c; ++k) m.set(i, k, dig(rng));
  return m;
}

std::vector<std::vector<unsigned>> raw_rows(const FieldMatrix& m) {
  std::vector<std::vector<unsigned>> out;
  for (const auto& r : m.to_rows()) out.emplace_back(r.begin(), r.end());
  return out;
}

}  // namespace

TEST(FieldInverse, Examples) {
  EXPECT_EQ(field_inverse(FieldElem(1, 5)).value(), 1u);
  EXPECT_EQ(field_inverse(FieldElem(2, 5)).value(), 3u);
  EXPECT_EQ(field_inverse(FieldElem(4, 7)).value(), 2u);
}

TEST(FieldInverse, ZeroHasNoInverse) {
  try {
    field_inverse(FieldElem(0, 5));
    FAIL() << "expected ZeroInverse";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroInverse);
  }
}

TEST(FieldInverse, ExhaustiveUpTo97) {
  for (Digit b = 2; b <= 97; ++b) {
    if (!is_prime(b)) continue;
    for (Digit a = 1; a < b; ++a) {
      const auto inv = field_inverse(FieldElem(a, b));
      EXPECT_EQ((std::uint64_t{inv.value()} * a) % b, 1u) << "a=" << a << " b=" << b;
      EXPECT_EQ(inv.value(), oracle::brute_inverse(a, b));
    }
  }
}

TEST(FieldElem, CompositeModulusRejected) {
  try {
    FieldElem(1, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPrime);
  }
  EXPECT_THROW(FieldMatrix(2, 2, 9), Error);
}

TEST(FieldElem, MixedModuliRejected) { EXPECT_THROW(FieldElem(1, 3) + FieldElem(1, 5), Error); }

TEST(MatVec, Examples) {
  const auto id = FieldMatrix::identity(3, 2);
  const std::vector<Digit> v{1, 0, 1};
  EXPECT_EQ(mat_vec(id, v), (std::vector<Digit>{1, 0, 1}));

  const auto ones = FieldMatrix::from_rows({{1, 1}, {1, 1}}, 2);
  EXPECT_EQ(mat_vec(ones, std::vector<Digit>{1, 1}), (std::vector<Digit>{0, 0}));

  const auto m3 = FieldMatrix::from_rows({{1, 2}, {0, 1}}, 3);
  EXPECT_EQ(mat_vec(m3, std::vector<Digit>{1, 1}), (std::vector<Digit>{0, 1}));
}

TEST(MatVec, TransposeMatchesExplicitTranspose) {
  std::mt19937_64 rng(7);
  for (Digit b : {2u, 3u, 5u}) {
    const auto m = random_matrix(4, 3, b, rng);
    FieldMatrix t(3, 4, b);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 3; ++c) t.set(c, r, m(r, c));
    const std::vector<Digit> v{1, b - 1, 0, 1};
    EXPECT_EQ(mat_vec(m, v, Transpose::Yes), mat_vec(t, v));
  }
}

TEST(MatVec, DimensionMismatch) {
  const auto id = FieldMatrix::identity(3, 2);
  EXPECT_THROW(mat_vec(id, std::vector<Digit>{1, 0}), Error);
}

TEST(MatRank, Examples) {
  EXPECT_EQ(mat_rank(FieldMatrix(3, 3, 2)), 0u);
  EXPECT_EQ(mat_rank(FieldMatrix::identity(4, 3)), 4u);
  EXPECT_EQ(mat_rank(FieldMatrix::from_rows({{1, 1}, {2, 2}}, 3)), 1u);
}

TEST(KernelBasis, Examples) {
  EXPECT_TRUE(kernel_basis(FieldMatrix::identity(2, 2)).empty());
  EXPECT_EQ(kernel_basis(FieldMatrix(1, 2, 2)).size(), 2u);
  const auto m = FieldMatrix::from_rows({{1, 1, 0}}, 2);
  const auto basis = kernel_basis(m);
  ASSERT_EQ(basis.size(), 2u);
  std::set<std::vector<Digit>> span;
  for (Digit a = 0; a < 2; ++a)
    for (Digit c = 0; c < 2; ++c) {
      std::vector<Digit> v(3);
      for (std::size_t k = 0; k < 3; ++k) v[k] = (a * basis[0][k] + c * basis[1][k]) % 2;
      span.insert(v);
    }
  EXPECT_EQ(span, (std::set<std::vector<Digit>>{{0, 0, 0}, {1, 1, 0}, {0, 0, 1}, {1, 1, 1}}));
}

TEST(KernelBasis, RankNullityAndMembership) {
  std::mt19937_64 rng(11);
  for (Digit b : {2u, 3u, 5u})
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t r = 1 + rng() % 8, c = 1 + rng() % 8;
      const auto m = random_matrix(r, c, b, rng);
      const auto basis = kernel_basis(m);
      EXPECT_EQ(mat_rank(m) + basis.size(), c);
      for (const auto& v : basis) {
        const auto img = mat_vec(m, v);
        EXPECT_TRUE(std::all_of(img.begin(), img.end(), [](Digit x) { return x == 0; }));
      }
    }
}

TEST(KernelBasis, SpanEqualsBruteForceKernel) {
  std::mt19937_64 rng(13);
  for (Digit b : {2u, 3u})
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t c = 1 + rng() % (b == 2 ? 10 : 7);
      const std::size_t r = 1 + rng() % 6;
      const auto m = random_matrix(r, c, b, rng);
      const auto basis = kernel_basis(m);
      std::set<std::vector<unsigned>> span;
      const auto total = oracle::ipow(b, static_cast<unsigned>(basis.size()));
      for (std::uint64_t code = 0; code < total; ++code) {
        std::vector<unsigned> v(c, 0);
        std::uint64_t x = code;
        for (const auto& bv : basis) {
          const auto coef = static_cast<unsigned>(x % b);
          x /= b;
          for (std::size_t k = 0; k < c; ++k) v[k] = (v[k] + coef * bv[k]) % b;
        }
        span.insert(v);
      }
      EXPECT_EQ(span.size(), total);
      const auto brute = oracle::brute_kernel(raw_rows(m), static_cast<unsigned>(c), b);
      EXPECT_EQ(span, std::set<std::vector<unsigned>>(brute.begin(), brute.end()));
    }
}

TEST(KernelBasis, Deterministic) {
  std::mt19937_64 rng(17);
  const auto m = random_matrix(3, 6, 3, rng);
  EXPECT_EQ(kernel_basis(m), kernel_basis(m));
}

TEST(Matmul, AssociatesWithMatVec) {
  std::mt19937_64 rng(19);
  const auto a = random_matrix(3, 4, 5, rng);
  const auto c = random_matrix(4, 2, 5, rng);
  const std::vector<Digit> v{3, 4};
  EXPECT_EQ(mat_vec(matmul(a, c), v), mat_vec(a, mat_vec(c, v)));
}
