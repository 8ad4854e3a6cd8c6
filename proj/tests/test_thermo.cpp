#include <gtest/gtest.h>

#include <random>

#include "escrate/errors.hpp"
#include "escrate/thermo.hpp"
#include "support.hpp"

using namespace escrate;
using escrate::testing::kLog2;

namespace {

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

Potential asymmetric() { return Potential::per_symbol(Subshift::full(2), {-kLog2, -2.0 * kLog2}); }

// A deterministic depth-2 potential on a 3-symbol SFT.
Potential random_potential(const Subshift& s, std::size_t depth, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.5, 0.5);
  std::map<Word, double> values;
  Cylinders c(s, depth);
  for (std::size_t i = 0; i < c.size(); ++i) values[c.word(i)] = u(gen);
  return Potential(s, depth, values);
}

const Subshift& three_symbol() {
  static const Subshift s({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}});
  return s;
}

}  // namespace

TEST(Potential, MissingValuesNeedDefault) {
  const auto s = Subshift::full(2);
  EXPECT_THROW(Potential(s, 1, {{Word{0}, 1.0}}), Error);
  const Potential p(s, 2, {{Word{0, 1}, 3.0}}, -1.0);
  EXPECT_DOUBLE_EQ(p(Word{0, 1, 1}), 3.0);
  EXPECT_DOUBLE_EQ(p(Word{1, 1}), -1.0);
  EXPECT_DOUBLE_EQ(p.lifted(4)(Word{0, 1, 0, 0}), 3.0);
}

TEST(TransferMatrix, NormalizedDoubling) {
  const auto m = build_transfer_matrix(Subshift::full(2), Potential::constant(Subshift::full(2), -kLog2), 1);
  const auto d = m.entries.to_dense();
  for (const auto& row : d)
    for (double v : row) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(TransferMatrix, GoldenMeanAdjacency) {
  const auto m = build_transfer_matrix(Subshift::golden_mean(), Potential::constant(Subshift::golden_mean(), 0.0), 1);
  EXPECT_EQ(m.entries.to_dense(), (std::vector<std::vector<double>>{{1, 1}, {1, 0}}));
}

TEST(TransferMatrix, ColumnsCarryPreimageWeights) {
  const auto m = build_transfer_matrix(Subshift::full(2), asymmetric(), 1);
  const auto d = m.entries.to_dense();
  EXPECT_NEAR(d[0][0], 0.5, 1e-15);
  EXPECT_NEAR(d[0][1], 0.25, 1e-15);
  EXPECT_NEAR(d[1][0], 0.5, 1e-15);
  EXPECT_NEAR(d[1][1], 0.25, 1e-15);
}

TEST(TransferMatrix, ActsExactlyOnCylinderFunctions) {
  // (L w)(x) = sum_a e^{phi(a x)} w(a x), evaluated on the least extension of
  // each depth-n state.
  const auto& s = three_symbol();
  const auto phi = random_potential(s, 2, 7);
  const auto m = build_transfer_matrix(s, phi, 3);
  const auto& states = *m.states;
  std::vector<double> w(states.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 + 0.1 * static_cast<double>(i);
  std::vector<double> lw(w.size());
  m.entries.multiply(w, lw);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const Word x = states.word(i);
    double expected = 0.0;
    for (Symbol a = 0; a < 3; ++a) {
      if (!s.allowed(a, x[0])) continue;
      const Word ax = Word{a} + x;
      expected += std::exp(phi(ax)) * w[*states.index_of(ax.prefix(3))];
    }
    EXPECT_NEAR(lw[i], expected, 1e-14);
  }
}

TEST(LeadingEigentriple, NormalizedDoubling) {
  const auto d = leading_eigentriple(
      build_transfer_matrix(Subshift::full(2), Potential::constant(Subshift::full(2), -kLog2), 1));
  EXPECT_NEAR(d.lambda, 1.0, 1e-13);
  EXPECT_NEAR(d.right_vector[0], 1.0, 1e-12);
  EXPECT_NEAR(d.right_vector[1], 1.0, 1e-12);
  EXPECT_NEAR(d.left_vector[0], 0.5, 1e-12);
  EXPECT_NEAR(d.gibbs[1], 0.5, 1e-12);
  EXPECT_LE(d.residual, 1e-12);
}

TEST(LeadingEigentriple, GoldenMean) {
  const auto d = leading_eigentriple(
      build_transfer_matrix(Subshift::golden_mean(), Potential::constant(Subshift::golden_mean(), 0.0), 1));
  EXPECT_NEAR(d.lambda, kPhi, 1e-12);
  EXPECT_NEAR(d.pressure, std::log(kPhi), 1e-12);
}

TEST(LeadingEigentriple, RankOneColumns) {
  const auto d = leading_eigentriple(build_transfer_matrix(Subshift::full(2), asymmetric(), 1));
  EXPECT_NEAR(d.lambda, 0.75, 1e-12);
  EXPECT_NEAR(d.pressure, std::log(0.75), 1e-12);
}

TEST(LeadingEigentriple, RejectsNonPrimitiveGraphs) {
  const Subshift swap({{0, 1}, {1, 0}});
  try {
    leading_eigentriple(build_transfer_matrix(swap, Potential::constant(swap, 0.0), 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotMixingAfterRestriction);
  }
}

TEST(LeadingEigentriple, BudgetExhaustion) {
  PowerOptions tight{1e-15, 2};
  try {
    leading_eigentriple(build_transfer_matrix(three_symbol(), random_potential(three_symbol(), 2, 1), 4), tight);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
  }
}

TEST(LeadingEigentriple, MatchesDenseEigensolver) {
  // Every instance has at most 64 states.
  struct Case {
    Subshift s;
    Potential phi;
    std::size_t depth;
  };
  std::vector<Case> cases;
  cases.push_back({Subshift::full(2), asymmetric(), 1});
  cases.push_back({Subshift::golden_mean(), Potential::constant(Subshift::golden_mean(), 0.0), 5});
  for (unsigned seed = 0; seed < 6; ++seed) {
    cases.push_back({three_symbol(), random_potential(three_symbol(), 2, seed), 2 + seed % 3});
    cases.push_back({Subshift::full(2), random_potential(Subshift::full(2), 3, seed + 10), 3 + seed % 4});
  }
  for (const auto& c : cases) {
    const auto m = build_transfer_matrix(c.s, c.phi, c.depth);
    ASSERT_LE(m.states->size(), 64u);
    const auto d = leading_eigentriple(m);
    const auto dense = escrate::testing::dense(m.entries);
    const auto right = escrate::testing::dense_perron(dense);
    const auto left = escrate::testing::dense_perron(dense.transpose());
    EXPECT_NEAR(d.lambda, right.lambda, 1e-10 * right.lambda);

    // Normalize the oracle vectors the same way: sum(left) = 1, left . right = 1.
    auto l = left.vector;
    double total = 0.0;
    for (double x : l) total += x;
    for (auto& x : l) x /= total;
    auto r = right.vector;
    double pairing = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) pairing += l[i] * r[i];
    for (auto& x : r) x /= pairing;
    EXPECT_LT(escrate::testing::max_abs_diff(d.left_vector, l), 1e-10);
    EXPECT_LT(escrate::testing::max_abs_diff(d.right_vector, r), 1e-10 * *std::max_element(r.begin(), r.end()));
  }
}

TEST(Pressure, Examples) {
  const auto f = Subshift::full(2);
  EXPECT_NEAR(pressure(f, Potential::constant(f, -kLog2)), 0.0, 1e-12);
  EXPECT_NEAR(pressure(f, Potential::constant(f, 0.0)), kLog2, 1e-12);
  EXPECT_NEAR(pressure(Subshift::golden_mean(), Potential::constant(Subshift::golden_mean(), 0.0)), std::log(kPhi),
              1e-12);
}

TEST(Pressure, ConstantShiftAddsToPressure) {
  const auto phi = random_potential(three_symbol(), 2, 3);
  EXPECT_NEAR(pressure(three_symbol(), phi.shifted(0.7)), pressure(three_symbol(), phi) + 0.7, 1e-11);
}

TEST(GibbsMeasure, UniformOnFullShift) {
  const auto w = gibbs_measure(Subshift::full(2), Potential::constant(Subshift::full(2), -kLog2), 3);
  ASSERT_EQ(w.weights.size(), 8u);
  for (double x : w.weights) EXPECT_NEAR(x, 0.125, 1e-13);
}

TEST(GibbsMeasure, ParryMeasureOfGoldenMean) {
  // Parry: mu[0] = phi^2 / (1 + phi^2), mu[1] = 1 / (1 + phi^2).
  const auto w = gibbs_measure(Subshift::golden_mean(), Potential::constant(Subshift::golden_mean(), 0.0), 1);
  EXPECT_NEAR(w[Word{0}], kPhi * kPhi / (1.0 + kPhi * kPhi), 1e-12);
  EXPECT_NEAR(w[Word{1}], 1.0 / (1.0 + kPhi * kPhi), 1e-12);
}

TEST(GibbsMeasure, AsymmetricBernoulli) {
  const auto w = gibbs_measure(Subshift::full(2), asymmetric(), 1);
  EXPECT_NEAR(w[Word{0}], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(w[Word{1}], 1.0 / 3.0, 1e-12);
}

TEST(GibbsMeasure, RefinementConsistency) {
  const auto& s = three_symbol();
  const auto phi = random_potential(s, 2, 4);
  const auto coarse = gibbs_measure(s, phi, 2);
  for (std::size_t n = 3; n <= 7; ++n) {
    const auto fine = gibbs_measure(s, phi, n);
    double worst = 0.0;
    for (std::size_t i = 0; i < coarse.cylinders->size(); ++i) {
      const auto [lo, hi] = fine.cylinders->refinement_range(coarse.cylinders->word(i));
      double sum = 0.0;
      for (std::size_t j = lo; j < hi; ++j) sum += fine.weights[j];
      worst = std::max(worst, std::abs(sum - coarse.weights[i]));
    }
    EXPECT_LE(worst, 1e-11) << "depth " << n;
  }
}

TEST(GibbsMeasure, ShiftInvariance) {
  const auto& s = three_symbol();
  const GibbsMeasure mu(s, random_potential(s, 2, 5));
  Cylinders words(s, 4);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const Word w = words.word(i);
    double sum = 0.0;
    for (Symbol a = 0; a < 3; ++a) sum += mu(Word{a} + w);
    EXPECT_NEAR(sum, mu(w), 1e-13);
  }
}

TEST(GibbsMeasure, LongWordsAgreeWithDeepMatrix) {
  const auto& s = three_symbol();
  const auto phi = random_potential(s, 2, 6);
  const GibbsMeasure mu(s, phi);
  const auto deep = gibbs_measure(s, phi, 8);
  for (std::size_t i = 0; i < deep.cylinders->size(); i += 7)
    EXPECT_NEAR(mu(deep.cylinders->word(i)), deep.weights[i], 1e-12);
  EXPECT_DOUBLE_EQ(mu(Word{}), 1.0);
  EXPECT_DOUBLE_EQ(mu(Word{0, 2}), 0.0);
}

TEST(BirkhoffSum, Examples) {
  const auto f = Subshift::full(2);
  const auto z = SymbolicPoint::periodic(Word{0, 1});
  EXPECT_NEAR(birkhoff_sum(Potential::constant(f, -kLog2), z, 2), -2.0 * kLog2, 1e-15);
  EXPECT_DOUBLE_EQ(birkhoff_sum(Potential::constant(f, 0.0), z, 5), 0.0);
  EXPECT_DOUBLE_EQ(birkhoff_sum(Potential::per_symbol(f, {0.3, -1.1}), z, 2), 0.3 - 1.1);
}

TEST(GibbsConstant, ExactOnBernoulli) {
  const auto r = gibbs_constant_check(Subshift::full(2), Potential::constant(Subshift::full(2), -kLog2), 8);
  EXPECT_NEAR(r.constant, 1.0, 1e-10);
}

TEST(GibbsConstant, GoldenMeanIsFiniteAndSettles) {
  const auto r = gibbs_constant_check(Subshift::golden_mean(), Potential::constant(Subshift::golden_mean(), 0.0), 8);
  ASSERT_EQ(r.per_depth.size(), 8u);
  EXPECT_TRUE(std::isfinite(r.constant));
  EXPECT_GE(r.constant, 1.0);
  for (std::size_t d = 4; d < 8; ++d) EXPECT_LE(r.per_depth[d], r.per_depth[d - 1] + 1e-9);
}

TEST(GibbsConstant, MatchesBruteForce) {
  const auto f = Subshift::full(2);
  const auto phi = asymmetric();
  const auto r = gibbs_constant_check(f, phi, 6);
  // Bernoulli(2/3, 1/3) with P = log 3/4: mu[w] = e^{phi^n(w) - n P} exactly.
  EXPECT_NEAR(r.constant, 1.0, 1e-10);
  const auto q = random_potential(three_symbol(), 2, 8);
  const auto r2 = gibbs_constant_check(three_symbol(), q, 7);
  const double p = pressure(three_symbol(), q);
  double brute = 1.0;
  for (std::size_t n = 1; n <= 7; ++n) {
    const auto weights = gibbs_measure(three_symbol(), q, n);
    for (std::size_t i = 0; i < weights.cylinders->size(); ++i) {
      const Word w = weights.cylinders->word(i);
      const Word x = least_extension(three_symbol(), w, n + 1);
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum += q(x.suffix_from(j));
      const double ratio = weights.weights[i] / std::exp(sum - static_cast<double>(n) * p);
      brute = std::max({brute, ratio, 1.0 / ratio});
    }
  }
  EXPECT_NEAR(r2.constant, brute, 1e-9 * brute);
}

TEST(NormalizedPotential, HasZeroPressureAndFixesOne) {
  const auto& s = three_symbol();
  const auto phi = random_potential(s, 2, 9);
  const auto norm = normalized_potential(s, phi);
  EXPECT_NEAR(pressure(s, norm), 0.0, 1e-11);
  const auto m = build_transfer_matrix(s, norm, norm.depth());
  std::vector<double> one(m.states->size(), 1.0), out(one.size());
  m.entries.multiply(one, out);
  for (double x : out) EXPECT_NEAR(x, 1.0, 1e-11);
}
