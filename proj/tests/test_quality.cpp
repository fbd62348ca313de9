#include <gtest/gtest.h>

#include <random>
#include <set>

#include "netscope/constructions.hpp"
#include "netscope/quality.hpp"
#include "oracles.hpp"

using namespace netscope;

namespace {

GeneratingSet random_net(Digit b, std::size_t s, std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::vector<FieldMatrix> ms;
  std::uniform_int_distribution<Digit> dig(0, b - 1);
  for (std::size_t i = 0; i < d; ++i) {
    FieldMatrix m(s, n, b);
    for (std::size_t r = 0; r < s; ++r)
      for (std::size_t c = 0; c < n; ++c) m.set(r, c, dig(rng));
    ms.push_back(m);
  }
  return make_generating_set(ms);
}

std::vector<GeneratingSet> small_shipped() {
  return {construct_hammersley(2, 2), construct_hammersley(2, 3), construct_hammersley(2, 4),
          construct_hammersley(3, 2), construct_faure(2, 3, 3),   construct_faure(3, 2, 2),
          construct_faure(3, 2, 3),   construct_interlaced_faure(3, 2, 2)};
}

}  // namespace

TEST(NrtWeight, Examples) {
  EXPECT_EQ(nrt_weight(0, 2, 2), 0u);
  EXPECT_EQ(nrt_weight(1, 1, 2), 1u);
  EXPECT_EQ(nrt_weight(3, 2, 2), 3u);
  EXPECT_EQ(nrt_weight(3, 1, 2), 2u);
}

TEST(NrtWeight, MatchesOracleAndMonotoneInSigma) {
  for (Digit b : {2u, 3u}) {
    const auto top = oracle::ipow(b, 8);
    for (std::uint64_t a = 0; a < top; ++a) {
      for (std::size_t sigma = 1; sigma <= 3; ++sigma) {
        const auto w = nrt_weight(a, sigma, b);
        ASSERT_EQ(w, oracle::nrt(a, sigma, b));
        ASSERT_GE(nrt_weight(a, sigma + 1, b), w);
        ASSERT_LE(w, sigma * nrt_weight(a, 1, b));
      }
    }
  }
}

TEST(NrtWeight, DropLeadingDigit) {
  EXPECT_EQ(drop_leading_digit(0, 2), 0u);
  EXPECT_EQ(drop_leading_digit(6, 2), 2u);
  EXPECT_EQ(drop_leading_digit(7 * 9 + 5, 3), 7u * 9 + 5 - 2 * 27);
}

TEST(Quality, FaureOrderOneIsZero) {
  EXPECT_EQ(min_quality_v(construct_faure(3, 3, 3), 1).v, 0u);
  EXPECT_EQ(min_quality_v_dual(construct_faure(3, 3, 3), 1).v, 0u);
}

TEST(Quality, CandidateSigmaNAlwaysAccepted) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const auto g = random_net(k % 2 ? 3 : 2, 3, 2 + k % 2, 2, rng);
    for (std::size_t sigma = 1; sigma <= 2; ++sigma) {
      EXPECT_TRUE(check_independence(g, sigma, static_cast<int>(sigma * g.n)));
      EXPECT_TRUE(check_weight_criterion(g, sigma, static_cast<int>(sigma * g.n)).ok);
    }
  }
}

// Plain Hammersley point sets are order-1 (0,n,2)-nets but only order-2
// (n,n,2)-nets: t = (2^{n-1}, 1) lies in the dual with rho_2 = n + 1.
TEST(Quality, HammersleyOrderTwoQualityIsN) {
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto g = construct_hammersley(2, n);
    const auto cert = min_quality_v(g, 2);
    EXPECT_EQ(cert.v, n) << n;
    EXPECT_EQ(min_quality_v_dual(g, 2).v, n) << n;
    const std::vector<std::uint64_t> t{std::uint64_t{1} << (n - 1), 1};
    EXPECT_TRUE(in_dual(g, t));
    EXPECT_EQ(nrt_weight(std::span<const std::uint64_t>(t), 2, 2), n + 1);
  }
  for (std::size_t n = 2; n <= 4; ++n)
    EXPECT_EQ(oracle::brute_quality_by_dual(generate_points(construct_hammersley(2, n)), 2), n);
}

TEST(WeightCriterion, HammersleyOrderTwoMinimalWeight) {
  const auto g = construct_hammersley(2, 3);
  const auto w = min_dual_weight(g, 2);
  EXPECT_EQ(w.min_weight, 4u);
  ASSERT_TRUE(w.witness);
  EXPECT_EQ(w.witness->rho2, 4u);
  EXPECT_TRUE(in_dual(g, w.witness->t));
  EXPECT_TRUE(check_weight_criterion(g, 2, 3).ok);
  const auto rej = check_weight_criterion(g, 2, 2);
  EXPECT_FALSE(rej.ok);
  ASSERT_TRUE(rej.witness);
  EXPECT_LE(rej.witness->rho2, 4u);
}

TEST(WeightCriterion, ZeroMatrixWitness) {
  const auto g = make_generating_set({FieldMatrix(2, 2, 2), FieldMatrix::identity(2, 2)});
  const auto res = check_weight_criterion(g, 1, 0);
  EXPECT_FALSE(res.ok);
  ASSERT_TRUE(res.witness);
  EXPECT_EQ(res.witness->t, (std::vector<std::uint64_t>{1, 0}));
}

TEST(Dual, ZeroVectorIsMember) {
  for (const auto& g : small_shipped()) {
    EXPECT_TRUE(in_dual(g, std::vector<std::uint64_t>(g.d, 0)));
    const auto duals = enumerate_dual(g, g.s);
    EXPECT_TRUE(std::any_of(duals.begin(), duals.end(), [](const DualVector& t) { return t.is_zero(); }));
  }
}

TEST(Dual, EnumerationMatchesBruteForce) {
  std::mt19937_64 rng(5);
  auto nets = small_shipped();
  for (int k = 0; k < 6; ++k) nets.push_back(random_net(2, 3, 2, 2, rng));
  for (const auto& g : nets) {
    const auto pts = generate_points(g);
    for (std::size_t box : {g.s, g.s + 1}) {
      std::set<std::vector<std::uint64_t>> lib;
      for (const auto& t : enumerate_dual(g, box)) {
        lib.insert(t.t);
        EXPECT_EQ(t.rho1, nrt_weight(std::span<const std::uint64_t>(t.t), 1, g.b));
        EXPECT_EQ(t.rho2, nrt_weight(std::span<const std::uint64_t>(t.t), 2, g.b));
      }
      const auto brute = oracle::brute_dual(pts, box);
      EXPECT_EQ(lib, std::set<std::vector<std::uint64_t>>(brute.begin(), brute.end()));
    }
  }
}

TEST(Equidistribution, HammersleyEveryIntervalOnePoint) {
  const auto pts = generate_points(construct_hammersley(2, 4));
  EXPECT_TRUE(check_equidistribution(pts, 0).ok);
  EXPECT_TRUE(oracle::brute_equidistributed(pts, 0));
}

TEST(Equidistribution, WholeCubeAtVEqualsN) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 10; ++k) {
    const auto pts = generate_points(random_net(3, 2, 2, 2, rng));
    EXPECT_TRUE(check_equidistribution(pts, 2).ok);
  }
}

// The three certification routes and the brute-force oracles agree.
TEST(Quality, RoutesAgreeWithOracles) {
  std::mt19937_64 rng(21);
  auto nets = small_shipped();
  for (int k = 0; k < 30; ++k) nets.push_back(random_net(2, 2, 2, 2, rng));
  for (int k = 0; k < 10; ++k) nets.push_back(random_net(2, 3, 3, 2, rng));
  for (int k = 0; k < 10; ++k) nets.push_back(random_net(3, 2, 2, 2, rng));
  for (const auto& g : nets) {
    const auto pts = generate_points(g);
    const auto v1 = min_quality_v(g, 1).v;
    EXPECT_EQ(min_quality_v_dual(g, 1).v, v1);
    EXPECT_EQ(min_quality_v_geometric(pts).v, v1);
    EXPECT_EQ(oracle::brute_quality_equidistribution(pts), v1);
    EXPECT_EQ(oracle::brute_quality_by_dual(pts, 1), v1);
    if (g.d * std::max(g.s, 2 * g.n) <= 12) {
      const auto v2 = min_quality_v(g, 2).v;
      EXPECT_EQ(min_quality_v_dual(g, 2).v, v2);
      EXPECT_EQ(oracle::brute_quality_by_dual(pts, 2), v2);
    }
    if (v1 > 0) {
      EXPECT_FALSE(check_equidistribution(pts, static_cast<int>(v1) - 1).ok);
      EXPECT_FALSE(check_independence(g, 1, static_cast<int>(v1) - 1));
    }
  }
}

TEST(Quality, MonotoneInCandidate) {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 15; ++k) {
    const auto g = random_net(2, 3, 3, 2, rng);
    for (std::size_t sigma = 1; sigma <= 2; ++sigma) {
      bool seen = false;
      for (int v = 0; v <= static_cast<int>(sigma * g.n); ++v) {
        const bool ok = check_independence(g, sigma, v);
        if (seen) {
          EXPECT_TRUE(ok);
        }
        seen = seen || ok;
        EXPECT_EQ(check_weight_criterion(g, sigma, v).ok, ok);
      }
    }
  }
}

TEST(Quality, OrderTwoImpliesOrderOneAtHalf) {
  for (const auto& g : {construct_interlaced_faure(3, 2, 2), construct_interlaced_faure(3, 3, 2),
                        construct_interlaced_faure(2, 3, 1)}) {
    const auto v2 = min_quality_v(g, 2).v;
    EXPECT_TRUE(check_independence(g, 1, static_cast<int>((v2 + 1) / 2)));
    EXPECT_LE(min_quality_v(g, 1).v, (v2 + 1) / 2);
  }
}

TEST(Quality, IndependenceWitnessIsDependent) {
  const auto g = construct_hammersley(2, 3);
  const auto cert = min_quality_v(g, 2);
  ASSERT_TRUE(cert.selection);
  EXPECT_EQ(cert.selection->weight, 2 * g.n - cert.v + 1);
}

TEST(Quality, BudgetIsHardError) {
  const auto g = construct_interlaced_faure(3, 6, 2);
  try {
    min_quality_v_dual(g, 2, Budget{1000});
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::BudgetExceeded || e.code() == ErrorCode::InstanceTooLarge);
  }
}

TEST(Omega, ZeroGammaCountsOnlyZeroVector) {
  for (const auto& g : small_shipped()) {
    const std::vector<unsigned> gamma(g.d, 0), lambda(g.d, 1);
    const auto r = count_omega(g, gamma, lambda);
    EXPECT_EQ(r.count, 1u);
    EXPECT_LE(static_cast<double>(r.count), std::pow(g.b - 1.0, static_cast<double>(g.d)));
  }
}

TEST(Omega, HammersleyExhaustiveGridMatchesBruteFilter) {
  const auto g = construct_hammersley(2, 3);
  const auto pts = generate_points(g);
  const auto duals = oracle::brute_dual(pts, g.s + 1);
  const OmegaTable table(g, 0);
  for (unsigned g1 = 0; g1 <= 4; ++g1)
    for (unsigned g2 = 0; g2 <= 4; ++g2)
      for (unsigned l1 = 0; l1 <= 3; ++l1)
        for (unsigned l2 = 0; l2 <= 3; ++l2) {
          const std::vector<unsigned> gamma{g1, g2}, lambda{l1, l2};
          std::uint64_t brute = 0;
          for (const auto& t : duals) {
            bool ok = true;
            for (std::size_t i = 0; i < 2 && ok; ++i) {
              const auto head = oracle::nrt(t[i], 1, 2);
              std::uint64_t rest = t[i];
              if (head) rest -= (rest >> (head - 1)) << (head - 1);
              ok = head == gamma[i] && (gamma[i] <= lambda[i] || oracle::nrt(rest, 1, 2) == lambda[i]);
            }
            brute += ok;
          }
          const auto r = table.evaluate(gamma, lambda);
          EXPECT_EQ(r.count, brute);
          EXPECT_TRUE(r.within) << g1 << g2 << l1 << l2;
        }
}

TEST(Omega, FaureExample) {
  const auto g = construct_faure(3, 2, 2);
  const std::vector<unsigned> gamma{2, 2}, lambda{2, 2};
  const auto r = count_omega(g, gamma, lambda);
  // (b-1)^2 b^{(min(2,1) + min(2,1) - 2 + 0)_+}
  EXPECT_DOUBLE_EQ(r.bound, 4.0);
  EXPECT_LE(static_cast<double>(r.count), r.bound);
  EXPECT_LE(r.count, 36u);
}

TEST(Omega, LambdaAboveSRejected) {
  const auto g = construct_hammersley(2, 3);
  const std::vector<unsigned> gamma{1, 1}, lambda{4, 0};
  EXPECT_THROW(count_omega(g, gamma, lambda), Error);
}
