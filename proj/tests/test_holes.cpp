#include <gtest/gtest.h>

#include "escrate/errors.hpp"
#include "escrate/holes.hpp"
#include "escrate/oracle.hpp"
#include "support.hpp"

using namespace escrate;
using escrate::testing::kLog2;

namespace {

const Subshift kFull2 = Subshift::full(2);
const Subshift kCantor({{1, 1}, {1, 1}}, {"0", "2"});

Potential half() { return Potential::constant(kFull2, -kLog2); }

}  // namespace

TEST(StandardHoleFamily, PrefixesOfCenter) {
  const auto f = standard_hole_family(kFull2, SymbolicPoint::periodic(Word{0, 1}), 3);
  ASSERT_EQ(f.holes().size(), 3u);
  EXPECT_EQ(f.at(1).words, (std::vector<Word>{{0}}));
  EXPECT_EQ(f.at(2).words, (std::vector<Word>{{0, 1}}));
  EXPECT_EQ(f.at(3).words, (std::vector<Word>{{0, 1, 0}}));
}

TEST(StandardHoleFamily, CantorSecondHole) {
  const auto f = standard_hole_family(kCantor, SymbolicPoint::periodic(kCantor.parse_word("02")), 4);
  EXPECT_EQ(kCantor.format(f.at(2).words.front()), "02");
}

TEST(StandardHoleFamily, RunsOutOfDigits) {
  try {
    standard_hole_family(kFull2, SymbolicPoint::prefix(champernowne_binary(10)), 12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientDigits);
  }
}

TEST(HoleFamilyReport, StandardFamilySatisfiesAssumptions) {
  const auto z = SymbolicPoint::periodic(Word{0, 1, 1});
  const auto family = standard_hole_family(kFull2, z, 12);
  const GibbsMeasure mu(kFull2, Potential::per_symbol(kFull2, {-0.4, -1.3}));
  const auto r = check_hole_family(kFull2, family, mu);
  EXPECT_TRUE(r.nested);
  EXPECT_TRUE(r.contains_center);
  EXPECT_TRUE(r.inside_center_cylinder);
  EXPECT_DOUBLE_EQ(r.kappa, 1.0);
  EXPECT_LT(r.fitted_rho, 1.0);
  ASSERT_TRUE(r.periodic_threshold.has_value());
  EXPECT_LE(*r.periodic_threshold, 3u);
}

TEST(HoleFamilyReport, DetectsNonNestedFamily) {
  const auto z = SymbolicPoint::periodic(Word{0});
  const HoleFamily bad(z, {Hole{1, {{0}}, 1, 1}, Hole{2, {{0, 0}, {1, 0}}, 2, 1}});
  const GibbsMeasure mu(kFull2, half());
  const auto r = check_hole_family(kFull2, bad, mu);
  EXPECT_FALSE(r.nested);
  EXPECT_FALSE(r.inside_center_cylinder);
}

TEST(PerturbedMatrix, DeletesHoleColumns) {
  const auto m = build_transfer_matrix(kFull2, half(), 1);
  EXPECT_EQ(perturbed_matrix(m, {{0}}).entries.to_dense(), (std::vector<std::vector<double>>{{0, 0.5}, {0, 0.5}}));
  EXPECT_EQ(perturbed_matrix(m, {}).entries.to_dense(), m.entries.to_dense());
  const auto g = Subshift::golden_mean();
  const auto mg = build_transfer_matrix(g, Potential::constant(g, 0.0), 1);
  EXPECT_EQ(perturbed_matrix(mg, {{1}}).entries.to_dense(), (std::vector<std::vector<double>>{{1, 0}, {1, 0}}));
}

TEST(PerturbedMatrix, RefinesShortWordsAndRejectsLongOnes) {
  const auto m = build_transfer_matrix(kFull2, half(), 2);
  const auto p = perturbed_matrix(m, {{1}});
  const auto d = p.entries.to_dense();
  for (const auto& row : d) {
    EXPECT_EQ(row[2], 0.0);
    EXPECT_EQ(row[3], 0.0);
  }
  try {
    perturbed_matrix(m, {{0, 1, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DepthMismatch);
  }
}

TEST(PerturbedEigenvalue, Examples) {
  EXPECT_NEAR(perturbed_eigenvalue(kFull2, half(), {{0}}, 1).lambda_n, 0.5, 1e-12);
  const auto empty = perturbed_eigenvalue(kFull2, half(), {{0, 0}, {0, 1}, {1, 0}, {1, 1}}, 2);
  EXPECT_TRUE(empty.empty_survivor);
  EXPECT_EQ(empty.lambda_n, 0.0);
  const auto g = Subshift::golden_mean();
  EXPECT_NEAR(perturbed_eigenvalue(g, Potential::constant(g, 0.0), {{1}}, 1).lambda_n, 1.0, 1e-12);
}

TEST(PerturbedEigenvalue, NonMixingSurvivorUsesLargestComponent) {
  // Removing 01 and 10 leaves the two loops 0^inf and 1^inf.
  const auto r = perturbed_eigenvalue(kFull2, Potential::per_symbol(kFull2, {-0.2, -0.9}), {{0, 1}, {1, 0}}, 2);
  EXPECT_FALSE(r.mixing);
  EXPECT_EQ(r.components_with_cycles, 2u);
  EXPECT_NEAR(r.lambda_n, std::exp(-0.2), 1e-12);
}

TEST(EscapeRate, Examples) {
  const auto z = SymbolicPoint::periodic(Word{0});
  const auto family = standard_hole_family(kFull2, z, 3);
  const auto r = escape_rate(kFull2, half(), family, 1);
  EXPECT_NEAR(r.escape_rate, kLog2, 1e-12);
  EXPECT_NEAR(r.mu_hole, 0.5, 1e-14);
  EXPECT_LE(r.lambda_n, r.lambda);

  EscapeProblem problem(kFull2, half());
  const auto none = problem.escape_rate(Hole{1, {}, 1, 0}, z);
  EXPECT_EQ(none.escape_rate, 0.0);
  EXPECT_TRUE(std::isnan(none.ratio));

  const auto all = problem.escape_rate(Hole{1, {{0}, {1}}, 1, 0}, z);
  EXPECT_TRUE(all.empty_survivor);
  EXPECT_TRUE(std::isinf(all.escape_rate));
}

TEST(PredictedLimit, Examples) {
  const auto cantor_phi = Potential::constant(kCantor, -kLog2);
  EXPECT_NEAR(predicted_limit(kCantor, cantor_phi, SymbolicPoint::periodic(kCantor.parse_word("02"))), 0.75, 1e-12);
  EXPECT_DOUBLE_EQ(predicted_limit(kFull2, half(), SymbolicPoint::prefix(champernowne_binary(100))), 1.0);
  EXPECT_DOUBLE_EQ(predicted_limit(kFull2, half(), SymbolicPoint::periodic(Word{1}, Word{0})), 1.0);
  const auto parry = Potential::constant(kFull2, 0.0);
  for (std::size_t p = 1; p <= 3; ++p) {
    Word block{1};
    while (block.size() < p) block.push_back(0);
    EXPECT_NEAR(predicted_limit(kFull2, parry, SymbolicPoint::periodic(block)), 1.0 - std::pow(2.0, -double(p)), 1e-12);
  }
}

TEST(PredictedLimit, InvariantUnderConstantShift) {
  const auto phi = Potential::per_symbol(kFull2, {-0.3, -1.7});
  for (const auto& z : {SymbolicPoint::periodic(Word{0, 1, 1}), SymbolicPoint::periodic(Word{1})}) {
    EXPECT_NEAR(predicted_limit(kFull2, phi, z), predicted_limit(kFull2, phi.shifted(2.5), z), 1e-12);
  }
}

TEST(EscapeSweep, CantorTrendsToThreeQuarters) {
  const auto z = SymbolicPoint::periodic(kCantor.parse_word("02"));
  const auto family = standard_hole_family(kCantor, z, 12);
  const auto r = escape_sweep(kCantor, Potential::constant(kCantor, -kLog2), family, 2, 12);
  ASSERT_EQ(r.rows.size(), 11u);
  EXPECT_DOUBLE_EQ(r.predicted, 0.75);
  EXPECT_LT(r.deviation, 0.05);
  EXPECT_TRUE(r.lambda_monotone);
  EXPECT_TRUE(r.deviations_decreasing);
  EXPECT_NEAR(r.predicted_gap, 0.75, 1e-12);
  ASSERT_TRUE(r.convergence_rate);
  EXPECT_LT(*r.convergence_rate, 1.0);
}

TEST(EscapeSweep, NonPeriodicTrendsToOne) {
  const auto z = SymbolicPoint::prefix(champernowne_binary(64));
  const auto family = standard_hole_family(kFull2, z, 12);
  const auto r = escape_sweep(kFull2, half(), family, 2, 12);
  EXPECT_DOUBLE_EQ(r.predicted, 1.0);
  EXPECT_LT(r.deviation, 0.05);
}

TEST(EscapeSweep, SingleRowHasNoFit) {
  const auto family = standard_hole_family(kFull2, SymbolicPoint::periodic(Word{0, 1}), 4);
  const auto r = escape_sweep(kFull2, half(), family, 4, 4);
  EXPECT_EQ(r.rows.size(), 1u);
  EXPECT_FALSE(r.convergence_rate.has_value());
}

TEST(EscapeSweep, LambdaConvergesToLambda) {
  const auto phi = Potential::per_symbol(kFull2, {-0.4, -1.3});
  const auto family = standard_hole_family(kFull2, SymbolicPoint::periodic(Word{0, 1, 1}), 12);
  const auto r = escape_sweep(kFull2, phi, family, 1, 12);
  const double first = r.rows.front().lambda - r.rows.front().lambda_n;
  const double last = r.rows.back().lambda - r.rows.back().lambda_n;
  EXPECT_LT(last, first / 10.0);
  EXPECT_TRUE(r.lambda_monotone);
}

TEST(PressureGapRatio, Examples) {
  const auto z = SymbolicPoint::periodic(kCantor.parse_word("02"));
  const auto family = standard_hole_family(kCantor, z, 14);
  EXPECT_NEAR(pressure_gap_ratio(kCantor, Potential::constant(kCantor, -kLog2), family, 14).value, 0.75, 0.01);

  const auto parry = Potential::constant(kFull2, 0.0);
  const auto f2 = standard_hole_family(kFull2, SymbolicPoint::periodic(Word{0, 1}), 14);
  EXPECT_NEAR(pressure_gap_ratio(kFull2, parry, f2, 14).value, 0.75, 0.01);

  EscapeProblem problem(kFull2, parry);
  const auto degenerate = pressure_gap_ratio(problem, Hole{1, {}, 1, 0});
  EXPECT_TRUE(degenerate.degenerate);
  EXPECT_TRUE(std::isnan(degenerate.value));
  EXPECT_FALSE(degenerate.note.empty());
}

TEST(MatrixSurvival, MatchesExhaustiveEnumeration) {
  const Subshift three({{1, 1, 0}, {0, 1, 1}, {1, 1, 1}});
  std::map<Word, double> values;
  Cylinders c(three, 2);
  for (std::size_t i = 0; i < c.size(); ++i) values[c.word(i)] = -0.3 - 0.17 * static_cast<double>(i);
  const Potential phi(three, 2, values);
  for (const std::vector<Word>& hole :
       {std::vector<Word>{{0}}, std::vector<Word>{{1, 2}}, std::vector<Word>{{2, 0, 1}, {1, 1, 1}}}) {
    const auto m = matrix_survival(three, phi, hole, 12);
    const auto e = exhaustive_survival(three, phi, hole, 12);
    for (std::size_t k = 0; k <= 12; ++k) EXPECT_NEAR(m[k], e.survival[k], 1e-12) << "k=" << k;
  }
}
