#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "humpforge/errors.hpp"
#include "humpforge/humpbuilder.hpp"

using namespace humpforge;

namespace {

const Exponent p2(2.0);

BuildResult build(Preset preset, std::uint64_t seed, double p, double delta, std::size_t K,
                  std::size_t budget = kDefaultSupportBudget) {
  RunParams params;
  params.p = Exponent(p);
  params.delta = delta;
  params.stages = K;
  params.support_budget = budget;
  return build_witness_stages(BasisProvider::make_preset(preset, seed, std::nullopt, Exponent(p)), params);
}

}  // namespace

TEST(FlatHump, CanonicalUnitCase) {
  const auto basis = BasisProvider::make_preset(Preset::canonical, 0);
  const auto h = build_flat_hump(basis, 0, 0, 0.5, 0.25, p2);
  EXPECT_EQ(h.m, 4);
  EXPECT_EQ(h.u, (SparseSeq{{1, 0.5}, {2, 0.5}, {3, 0.5}, {4, 0.5}}));
  EXPECT_EQ(h.v, h.u);
  EXPECT_TRUE(h.w.empty());
  ASSERT_EQ(h.s_values.size(), 4u);
  for (std::size_t k = 1; k <= 4; ++k) {
    EXPECT_DOUBLE_EQ(h.s_values[k - 1], std::sqrt(static_cast<double>(k)));
    EXPECT_GE(h.s_values[k - 1], 0.75 * std::sqrt(static_cast<double>(k)));
  }
  EXPECT_EQ(h.inner_cuts, (std::vector<Index>{1, 2, 3, 4}));
}

TEST(FlatHump, NoFlatnessNeededStopsAfterOneVector) {
  const auto basis = BasisProvider::make_preset(Preset::canonical, 0);
  for (double eps : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
    const auto h = build_flat_hump(basis, 0, 0, eps, 0.25, p2);
    EXPECT_EQ(h.m, 1);
    EXPECT_EQ(h.u, SparseSeq::unit(1));
  }
}

TEST(FlatHump, RespectsHeadAndFloor) {
  const auto basis = BasisProvider::make_preset(Preset::canonical, 0);
  const auto h = build_flat_hump(basis, 2, 9, 0.5, 0.25, p2);
  EXPECT_GE(h.u.min_index(), 3);
  EXPECT_GT(h.m, 4);
  EXPECT_GE(h.m, 9);
  EXPECT_LE(h.v.max_index(), h.m);
}

TEST(FlatHump, PropertiesOnRandomBlockBasis) {
  for (double p : {1.5, 2.0, 3.0}) {
    const Exponent e(p);
    const auto basis = BasisProvider::make_preset(Preset::random_block, 4, std::nullopt, e);
    for (Index n : {0, 3, 20}) {
      for (double eps : {0.6, 0.3, 0.1}) {
        const double delta = 0.1;
        const auto h = build_flat_hump(basis, n, 2 * n + 5, eps, delta, e);
        EXPECT_NEAR(lp_norm(h.u, e), 1.0, 1e-12);
        EXPECT_GT(h.m, 2 * n);
        EXPECT_GE(h.m, 2 * n + 5);
        EXPECT_GT(h.u.min_index(), n);
        EXPECT_EQ(h.v + h.w, h.u);
        EXPECT_LE(h.v.max_index(), h.m);
        EXPECT_TRUE(h.w.empty() || h.w.min_index() > h.m);
        EXPECT_LE(h.v.max_abs(), eps * (1 + 1e-12));
        EXPECT_LE(lp_norm(h.w, e), delta * (1 + 1e-12));
        EXPECT_GE(lp_norm(h.v, e), 1 - delta);
        for (std::size_t k = 1; k <= h.s_values.size(); ++k) {
          EXPECT_GE(h.s_values[k - 1], (1 - delta) * std::pow(static_cast<double>(k), 1 / p) - 1e-12);
        }
      }
    }
  }
}

TEST(FlatHump, BudgetExhaustedCarriesPartialTrace) {
  const auto basis = BasisProvider::make_preset(Preset::canonical, 0);
  try {
    (void)build_flat_hump(basis, 0, 0, 0.01, 0.1, p2, 50);
    FAIL() << "expected BudgetExhausted";
  } catch (const BudgetExhausted& e) {
    EXPECT_FALSE(e.partial().inner_vectors.empty());
    // The vector that crossed the budget is part of the partial trace.
    EXPECT_GT(e.partial().stored_entries, 50u);
    EXPECT_LE(e.partial().stored_entries - e.partial().inner_vectors.back().size(), 50u);
  }
}

TEST(RunParams, Validation) {
  RunParams params;
  EXPECT_NO_THROW(params.validate());
  params.delta = 1.5;
  EXPECT_THROW(params.validate(), std::invalid_argument);
  params.delta = 0.0;
  EXPECT_THROW(params.validate(), std::invalid_argument);
  params = RunParams{};
  params.stages = 0;
  EXPECT_THROW(params.validate(), std::invalid_argument);
  params = RunParams{};
  params.support_budget = 0;
  EXPECT_THROW(params.validate(), std::invalid_argument);
}

TEST(Stages, CanonicalTwoStageExample) {
  const auto result = build(Preset::canonical, 0, 2.0, 0.1, 2);
  ASSERT_EQ(result.stages.size(), 2u);
  EXPECT_EQ(result.stages[0].n_k, 1);
  EXPECT_EQ(result.stages[0].b, 1.0);
  EXPECT_GT(result.stages[1].n_k, 2);
  EXPECT_EQ(result.truncation, Truncation::none);
}

TEST(Stages, CanonicalBlocksDoubleForEveryExponent) {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto result = build(Preset::canonical, 0, p, 0.1, 10);
    ASSERT_EQ(result.stages.size(), 10u);
    for (const auto& s : result.stages) {
      EXPECT_EQ(s.n_k, (Index{1} << s.k) - 1) << "p=" << p << " k=" << s.k;
      // Flat hump over the whole block: c^{-1/p} on every coordinate.
      const double c = static_cast<double>(s.block_length());
      EXPECT_EQ(static_cast<Index>(s.v.size()), s.block_length());
      for (const auto& e : s.v.entries()) EXPECT_NEAR(e.value, std::pow(c, -1 / p), 1e-15);
    }
    EXPECT_TRUE(all_passed(result.checklist));
  }
}

TEST(Stages, StructuralInvariantsOnRandomBlock) {
  for (double p : {1.5, 2.0, 3.0}) {
    const Exponent e(p);
    const double delta = 0.1;
    const auto result = build(Preset::random_block, 1, p, delta, 6);
    ASSERT_EQ(result.stages.size(), 6u);
    Index n_prev = 0;
    for (const auto& s : result.stages) {
      EXPECT_EQ(s.n_prev, n_prev);
      EXPECT_NEAR(lp_norm(s.u, e), 1.0, 1e-12);
      EXPECT_EQ(s.v + s.w, s.u);
      EXPECT_GT(s.v.min_index(), s.n_prev);
      EXPECT_LE(s.v.max_index(), s.n_k);
      EXPECT_TRUE(s.w.empty() || s.w.min_index() > s.n_k);
      EXPECT_LE(lp_norm(s.w, e), delta / std::ldexp(1.0, static_cast<int>(s.k)) * (1 + 1e-12));
      EXPECT_GE(lp_norm(s.v, e), 1 - delta / std::ldexp(1.0, static_cast<int>(s.k)) - 1e-12);
      EXPECT_EQ(s.b, decreasing_rearrangement(s.v).values.back());
      EXPECT_GT(s.n_k - s.n_prev, s.n_prev);
      n_prev = s.n_k;
    }
    for (std::size_t k = 1; k < result.stages.size(); ++k) {
      const auto& prev = result.stages[k - 1];
      const auto& next = result.stages[k];
      EXPECT_LE(next.v.max_abs(), prev.b * (1 + 1e-12));
      EXPECT_LE(next.v.max_abs(), std::pow(static_cast<double>(prev.block_length()), -1 / p) * (1 + 1e-12));
      EXPECT_GE(static_cast<double>(next.n_k - prev.n_k), std::pow(prev.b, -p) * (1 - 1e-9));
    }
    EXPECT_TRUE(all_passed(result.checklist));
  }
}

TEST(Stages, SmallBudgetTruncatesWithPassingPrefix) {
  const auto result = build(Preset::canonical, 0, 2.0, 0.1, 64, 1000000);
  EXPECT_EQ(result.truncation, Truncation::support_budget);
  EXPECT_GE(result.stages.size(), 10u);
  EXPECT_LT(result.stages.size(), 64u);
  EXPECT_LE(result.stored_entries, 1000000u);
  EXPECT_TRUE(all_passed(result.checklist));
}

TEST(Stages, LacunaryRunsOutOfBasis) {
  const auto result = build(Preset::lacunary, 0, 2.0, 0.1, 10);
  EXPECT_EQ(result.truncation, Truncation::basis_exhausted);
  EXPECT_GE(result.stages.size(), 2u);
  EXPECT_TRUE(all_passed(result.checklist));
}

TEST(Stages, ChecklistHasAllFamiliesAndVacuousCrossStageAtK1) {
  const auto result = build(Preset::canonical, 0, 2.0, 0.1, 1);
  for (const char* id : {"structure", "unit_norm", "block_doubling", "support", "flatness", "block_height",
                         "hump_mass", "tail_mass"}) {
    ASSERT_NE(find_condition(result.checklist, id), nullptr) << id;
  }
  EXPECT_FALSE(find_condition(result.checklist, "flatness")->evaluated);
  EXPECT_FALSE(find_condition(result.checklist, "block_height")->evaluated);
  EXPECT_TRUE(find_condition(result.checklist, "flatness")->passed);
}

TEST(PaddedMajorant, FillsZeroPositionsOfTheBlock) {
  HumpStage s;
  s.k = 2;
  s.n_prev = 2;
  s.n_k = 4;
  s.v = SparseSeq{{3, 0.5}};
  s.u = s.v;
  EXPECT_EQ(padded_majorant(s, p2), (SparseSeq{{3, 0.5}, {4, std::pow(2.0, -0.5)}}));
}

TEST(PaddedMajorant, SupportIsExactlyTheBlockAndDominatesHump) {
  const auto result = build(Preset::random_block, 3, 2.0, 0.1, 6);
  Index covered = 0;
  for (const auto& s : result.stages) {
    const auto vt = padded_majorant(s, p2);
    EXPECT_EQ(vt.min_index(), s.n_prev + 1);
    EXPECT_EQ(vt.max_index(), s.n_k);
    EXPECT_EQ(static_cast<Index>(vt.size()), s.block_length());
    for (const auto& e : s.v.entries()) EXPECT_EQ(vt.at(e.index), std::abs(e.value));
    covered += static_cast<Index>(vt.size());
  }
  const auto total = padded_sum(result.stages, result.stages.size(), p2);
  EXPECT_EQ(static_cast<Index>(total.size()), covered);
  EXPECT_EQ(total.max_index(), result.stages.back().n_k);
}

TEST(Sums, WitnessSumIsSumOfStages) {
  const auto result = build(Preset::canonical, 0, 2.0, 0.1, 5);
  SparseSeq z;
  for (std::size_t N = 1; N <= 5; ++N) {
    z = z + result.stages[N - 1].u;
    EXPECT_EQ(witness_sum(result.stages, N), z);
  }
  EXPECT_EQ(hump_sum(result.stages, 5), witness_sum(result.stages, 5));
  EXPECT_THROW((void)witness_sum(result.stages, 6), std::out_of_range);
  EXPECT_THROW((void)padded_sum(result.stages, 0, p2), std::out_of_range);
}
