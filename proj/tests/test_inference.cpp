// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <map>

#include "support.hpp"

namespace dpp {
namespace {

using testing::random_psd;
using testing::rel_close;

/// Brute-force sum over subsets, kept local so the test does not lean on
/// the oracle module for the most basic identity.
double subset_sum(const Matrix& l) {
  const auto n = static_cast<unsigned>(l.rows());
  double z = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    z += mask == 0 ? 1.0 : principal_submatrix(l, Subset::from_mask(mask)).determinant();
  }
  return z;
}

TEST(Normalizer, SmallCases) {
  EXPECT_NEAR(normalizer(LEnsemble::from_matrix(Matrix::Zero(3, 3))).value, 1.0, 1e-15);
  EXPECT_NEAR(normalizer(LEnsemble::from_matrix(Matrix::Identity(2, 2))).value, 4.0, 1e-14);
}

TEST(Normalizer, MatchesEnumeration) {
  Rng rng(1);
  const Matrix l = random_psd(10, rng);
  EXPECT_TRUE(rel_close(normalizer(LEnsemble::from_matrix(l)).value, subset_sum(l), 1e-10));
}

TEST(Normalizer, LogFormSurvivesOverflow) {
  const Matrix l = 1e300 * Matrix::Identity(4, 4);
  const auto z = normalizer(LEnsemble::from_matrix(l));
  EXPECT_TRUE(std::isfinite(z.log_value));
  EXPECT_NEAR(z.log_value, 4 * std::log1p(1e300), 1e-9);
}

TEST(SetProbability, IndependentCoins) {
  const auto ens = LEnsemble::from_matrix(Matrix::Identity(2, 2));
  EXPECT_NEAR(set_probability(ens, Subset{1}).value, 0.25, 1e-15);
  EXPECT_NEAR(set_probability(ens, Subset{}).value, 0.25, 1e-15);
}

TEST(SetProbability, FormulasAgree) {
  Rng rng(2);
  for (int trial = 0; trial < 25; ++trial) {
    const auto ens = LEnsemble::from_matrix(random_psd(7, rng));
    const Subset y = testing::random_subset(7, rng);
    const double a = set_probability(ens, y, LikelihoodFormula::kLRatio).value;
    const double b = set_probability(ens, y, LikelihoodFormula::kKMixed).value;
    const double c = set_probability(ens, y, LikelihoodFormula::kKSigned).value;
    EXPECT_NEAR(a, c, 1e-10);
    EXPECT_TRUE(rel_close(a, b, 1e-8));
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
  }
}

TEST(Marginal, EmptyAndSingleton) {
  Rng rng(3);
  const auto k = l_to_k(SpectralDecomposition::of(random_psd(5, rng)));
  EXPECT_DOUBLE_EQ(marginal(k, Subset{}).value, 1.0);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(marginal(k, Subset{i}).value, k.matrix()(static_cast<Index>(i), static_cast<Index>(i)), 1e-15);
  }
}

TEST(Marginal, MatchesSupersetSum) {
  Rng rng(4);
  const Matrix l = random_psd(9, rng);
  const auto k = l_to_k(SpectralDecomposition::of(l));
  const auto table = enumerate_dpp(l);
  const Subset a{1, 4, 7};
  double direct = 0.0;
  for (std::size_t mask = 0; mask < table.subset_count(); ++mask) {
    if ((mask & a.mask()) == a.mask()) direct += table.probability(mask);
  }
  EXPECT_TRUE(rel_close(marginal(k, a).value, direct, 1e-9));
}

TEST(ComplementMarginal, Cases) {
  const auto zero = MarginalKernel::from_matrix(Matrix::Zero(4, 4));
  EXPECT_DOUBLE_EQ(complement_marginal(zero, Subset{0, 2}).value, 1.0);
  Rng rng(5);
  const Matrix l = random_psd(8, rng);
  const auto k = l_to_k(SpectralDecomposition::of(l));
  EXPECT_NEAR(complement_marginal(k, Subset{3}).value, 1.0 - k.matrix()(3, 3), 1e-14);
  const auto table = enumerate_dpp(l);
  const Subset a{0, 2, 5};
  EXPECT_NEAR(complement_marginal(k, a).value, table.complement_marginal(a), 1e-9);
}

TEST(PartialMarginal, Cases) {
  Rng rng(6);
  const Matrix l = random_psd(7, rng);
  const auto ens = LEnsemble::from_matrix(l);
  const auto k = l_to_k(ens.spectrum());
  EXPECT_NEAR(partial_marginal(ens, {}).value, 1.0, 1e-15);
  const Subset b{1, 6};
  EXPECT_NEAR(partial_marginal(ens, {{}, b}).value, complement_marginal(k, b).value, 1e-12);
  const auto table = enumerate_dpp(l);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::size_t> perm{0, 1, 2, 3, 4, 5, 6};
    for (std::size_t i = 6; i > 0; --i) std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
    const ConditionSpec spec{Subset{perm[0], perm[1]}, Subset{perm[2], perm[3]}};
    EXPECT_TRUE(rel_close(partial_marginal(ens, spec).value, table.partial(spec.include, spec.exclude), 1e-8));
  }
}

TEST(PartialMarginal, ZeroProbabilityInclude) {
  Matrix phi(2, 3);
  phi << 1, 1, 0, 0, 0, 1;
  const auto ens = gram_from_features(Vector::Ones(3), phi);
  try {
    partial_marginal(ens, {Subset{0, 1}, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroProbabilityCondition);
  }
}

TEST(Condition, ExcludeDropsRowsAndColumns) {
  Rng rng(7);
  const Matrix l = random_psd(5, rng);
  const auto c = condition(LEnsemble::from_matrix(l), {{}, Subset{2}});
  const std::vector<Index> keep{0, 1, 3, 4};
  EXPECT_TRUE(c.ensemble.matrix().isApprox(l(keep, keep)));
  EXPECT_EQ(c.items, (std::vector<std::size_t>{0, 1, 3, 4}));
}

TEST(Condition, IncludeEverything) {
  Rng rng(8);
  const auto ens = LEnsemble::from_matrix(random_psd(4, rng));
  const auto c = condition(ens, {Subset{0, 1, 2, 3}, {}});
  EXPECT_EQ(c.ensemble.size(), 0u);
  EXPECT_DOUBLE_EQ(set_probability(c.ensemble, Subset{}).value, 1.0);
}

TEST(Condition, MatchesRenormalization) {
  Rng rng(9);
  const Matrix l = random_psd(6, rng);
  const auto ens = LEnsemble::from_matrix(l);
  const ConditionSpec spec{Subset{0}, Subset{3}};
  const auto c = condition(ens, spec);
  const auto table = enumerate_dpp(l);
  const auto expect = table.conditional(spec.include, spec.exclude);
  for (unsigned local = 0; local < (1u << c.items.size()); ++local) {
    const Subset y = c.to_original(Subset::from_mask(local));
    const std::size_t full = y.mask() | spec.include.mask();
    EXPECT_TRUE(rel_close(set_probability(c.ensemble, Subset::from_mask(local)).value, expect.at(full), 1e-8));
  }
}

TEST(Sample, ZeroKernelGivesEmpty) {
  Rng rng(10);
  const auto spec = SpectralDecomposition::of(Matrix::Zero(4, 4));
  for (int t = 0; t < 100; ++t) EXPECT_TRUE(sample(spec, rng).empty());
}

TEST(Sample, ElementaryHasFixedSize) {
  Rng rng(11);
  const Matrix q = testing::gaussian(8, 8, rng).householderQr().householderQ();
  for (int t = 0; t < 200; ++t) {
    const auto items = sample_elementary(q.leftCols(3), rng);
    EXPECT_EQ(Subset(items).size(), 3u);
  }
}

TEST(Sample, MatchesEnumeration) {
  Rng rng(12);
  const Matrix l = random_psd(6, rng);
  const auto spec = SpectralDecomposition::of(l);
  const auto table = enumerate_dpp(l);
  const auto report = empirical_distribution([&](Rng& r) { return sample(spec, r).mask(); }, 200000,
                                             rng, table.distribution());
  EXPECT_LT(report.tv, 0.01);
  EXPECT_GT(report.fit.p_value, 1e-3);
}

TEST(CardinalityMoments, FairCoins) {
  const auto m = cardinality_moments(SpectralDecomposition::of(Matrix::Identity(4, 4)));
  EXPECT_NEAR(m.mean, 2.0, 1e-15);
  EXPECT_NEAR(m.variance, 1.0, 1e-15);
}

TEST(CardinalityMoments, TraceAndMonteCarlo) {
  Rng rng(13);
  const auto spec = SpectralDecomposition::of(random_psd(7, rng));
  const auto m = cardinality_moments(spec);
  EXPECT_NEAR(m.mean, l_to_k(spec).matrix().trace(), 1e-10);
  const int draws = 100000;
  double sum = 0.0;
  for (int t = 0; t < draws; ++t) sum += static_cast<double>(sample(spec, rng).size());
  EXPECT_LT(std::abs(sum / draws - m.mean), 3.0 * std::sqrt(m.variance / draws));
}

TEST(GreedyMap, BudgetBelowCheapestItem) {
  Rng rng(14);
  const auto ens = LEnsemble::from_matrix(random_psd(5, rng));
  EXPECT_TRUE(greedy_map(ens, Vector::Constant(5, 2.0), 1.5).items.empty());
}

TEST(GreedyMap, AgainstExhaustiveMode) {
  Rng rng(15);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix l = random_psd(10, rng, -1, 3.0);
    const auto ens = LEnsemble::from_matrix(l);
    const Vector cost = Vector::Ones(10);
    const auto res = greedy_map(ens, cost, 10.0);
    const auto table = enumerate_dpp(l);
    const Subset best = table.mode(cost, 10.0);
    const double ratio = table.weight(res.items.mask()) / table.weight(best.mask());
    RecordProperty("ratio_" + std::to_string(trial), std::to_string(ratio));
    EXPECT_GT(ratio, 0.0);
    EXPECT_LE(ratio, 1.0 + 1e-12);
    EXPECT_LE(res.total_cost, 10.0);
    EXPECT_NEAR(res.log_det, std::log(table.weight(res.items.mask())), 1e-9);
  }
}

TEST(GreedyMap, NeverPicksTwinOfSelectedItem) {
  Rng rng(16);
  Matrix phi = testing::gaussian(4, 6, rng);
  phi.col(5) = phi.col(2);
  for (Index i = 0; i < 6; ++i) phi.col(i).normalize();
  Vector q = Vector::Constant(6, 2.0);
  const auto ens = gram_from_features(q, phi);
  const auto res = greedy_map(ens, Vector::Ones(6), 6.0);
  EXPECT_FALSE(res.items.contains(2) && res.items.contains(5));
}

TEST(Mmr, PureQuality) {
  Vector q(4);
  q << 0.2, 0.9, 0.5, 0.7;
  Vector cost(4);
  cost << 1, 1, 1, 2;
  const auto y = mmr_select(Matrix::Identity(4, 4), q, 1.0, cost, 2.0);
  EXPECT_EQ(y, (Subset{1, 2}));  // 3 no longer fits after 1
}

TEST(Mmr, TiesGoToLowestIndex) {
  const auto y = mmr_select(Matrix::Ones(4, 4), Vector::Ones(4), 0.0, Vector::Ones(4), 1.0);
  EXPECT_EQ(y, Subset{0});
}

TEST(Mmr, DiffersFromGreedyMapOnRedundantInstance) {
  // Items 0 and 1 are near-duplicates with top quality; 2..7 are orthogonal
  // and weaker. MMR with alpha close to 1 takes both duplicates.
  const Index n = 8;
  Matrix phi = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) phi(i, i) = 1.0;
  phi.col(1) = (phi.col(0) * 0.999 + phi.col(1) * 0.045).normalized();
  Vector q(n);
  q << 3.0, 2.9, 1.5, 1.4, 1.3, 1.2, 1.1, 1.05;
  const auto ens = gram_from_features(q, phi);
  const Vector cost = Vector::Ones(n);
  const Subset mmr = mmr_select(similarity(ens), q, 0.9, cost, 2.0);
  const Subset greedy = greedy_map(ens, cost, 2.0).items;
  EXPECT_EQ(mmr, (Subset{0, 1}));
  EXPECT_EQ(greedy, (Subset{0, 2}));
}

TEST(Mbr, SingleSample) {
  Rng rng(17);
  const auto spec = SpectralDecomposition::of(Matrix::Identity(5, 5));
  MbrOptions opts;
  opts.samples = 1;
  Rng copy = rng;
  const Subset expect = sample(spec, copy);
  EXPECT_EQ(mbr_decode([&](Rng& r) { return sample(spec, r); }, opts, rng), expect);
}

TEST(Mbr, ExactMatchSimilarityReturnsMode) {
  Rng rng(18);
  std::vector<Subset> pool{Subset{1}, Subset{2}, Subset{1}, Subset{3}, Subset{1}, Subset{2}};
  std::size_t next = 0;
  MbrOptions opts;
  opts.samples = pool.size();
  opts.similarity = [](const Subset& a, const Subset& b) { return a == b ? 1.0 : 0.0; };
  EXPECT_EQ(mbr_decode([&](Rng&) { return pool[next++]; }, opts, rng), Subset{1});
}

TEST(Mbr, BeatsRandomSampleInExpectedJaccard) {
  Rng rng(19);
  const Matrix l = random_psd(6, rng, -1, 2.0);
  const auto spec = SpectralDecomposition::of(l);
  const auto table = enumerate_dpp(l);
  const auto expected_jaccard = [&](const Subset& z) {
    double s = 0.0;
    for (std::size_t mask = 0; mask < table.subset_count(); ++mask) {
      s += table.probability(mask) * jaccard(z, Subset::from_mask(mask));
    }
    return s;
  };
  double mbr = 0.0, random = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    mbr += expected_jaccard(mbr_decode([&](Rng& r) { return sample(spec, r); }, {}, rng));
    random += expected_jaccard(sample(spec, rng));
  }
  EXPECT_GE(mbr, random);
}

TEST(Mbr, WindowExhaustion) {
  Rng rng(20);
  const auto spec = SpectralDecomposition::of(Matrix::Zero(3, 3));
  MbrOptions opts;
  opts.window = LengthWindow{1.0, 2.0, {}};
  opts.max_retries = 10;
  try {
    mbr_decode([&](Rng& r) { return sample(spec, r); }, opts, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasibleWindow);
  }
}

// Properties ---------------------------------------------------------------

TEST(InferenceProperties, Restriction) {
  Rng rng(21);
  const Matrix l = random_psd(7, rng);
  const Matrix k = l_to_k(SpectralDecomposition::of(l)).matrix();
  const Subset a{0, 2, 3, 6};
  const auto table = enumerate_dpp(l);
  // The restricted process has kernel K_A; its marginals are sub-determinants.
  const Matrix ka = principal_submatrix(k, a);
  for (unsigned mask = 1; mask < 16u; ++mask) {
    std::vector<std::size_t> items;
    for (unsigned b = 0; b < 4; ++b) {
      if (mask & (1u << b)) items.push_back(a[b]);
    }
    const Subset local = Subset::from_mask(mask);
    EXPECT_NEAR(principal_submatrix(ka, local).determinant(), table.marginal(Subset(items)), 1e-10);
  }
}

TEST(InferenceProperties, LogSubmodularity) {
  Rng rng(22);
  for (int trial = 0; trial < 5; ++trial) {
    const Index n = 6;
    const Matrix l = random_psd(n, rng);
    const auto logdet = [&](unsigned mask) {
      return mask == 0 ? 0.0 : log_det_psd(principal_submatrix(l, Subset::from_mask(mask)));
    };
    for (unsigned big = 0; big < (1u << n); ++big) {
      const double ld_big = logdet(big);
      if (ld_big == kNegInf) continue;
      for (unsigned small = big;; small = (small - 1) & big) {
        for (unsigned i = 0; i < static_cast<unsigned>(n); ++i) {
          if (big & (1u << i)) continue;
          const double gain_small = logdet(small | (1u << i)) - logdet(small);
          const double gain_big = logdet(big | (1u << i)) - ld_big;
          if (gain_big == kNegInf) continue;
          EXPECT_GE(gain_small, gain_big - 1e-9);
        }
        if (small == 0) break;
      }
    }
  }
}

TEST(InferenceProperties, CardinalityLaw) {
  Rng rng(23);
  const auto spec = SpectralDecomposition::of(random_psd(8, rng));
  const auto m = cardinality_moments(spec);
  std::vector<double> probs(m.bernoulli_probs.data(), m.bernoulli_probs.data() + m.bernoulli_probs.size());
  const auto law = poisson_binomial(probs);
  std::vector<double> counts(law.size(), 0.0);
  for (int t = 0; t < 100000; ++t) counts[sample(spec, rng).size()] += 1.0;
  EXPECT_GT(chi_square_gof(counts, law).p_value, 1e-3);
}

TEST(InferenceProperties, ConditioningConsistency) {
  Rng rng(24);
  const auto ens = LEnsemble::from_matrix(random_psd(7, rng));
  const Subset a{1, 4};
  const auto cond = condition(ens, {a, {}});
  const auto kc = l_to_k(cond.ensemble.spectrum());
  // local index of original items 0 and 5
  const Subset b_local{0, 3};
  EXPECT_EQ(cond.to_original(b_local), (Subset{0, 5}));
  const double via_condition = marginal(kc, b_local).value;
  const double via_partial =
      partial_marginal(ens, {Subset{0, 1, 4, 5}, {}}).value / partial_marginal(ens, {a, {}}).value;
  EXPECT_TRUE(rel_close(via_condition, via_partial, 1e-8));
}

TEST(InferenceProperties, UniformEmissionOrder) {
  // Rank-3 projection kernel: every sample is the whole 3-set.
  Rng rng(25);
  const Matrix q = testing::gaussian(3, 3, rng).householderQr().householderQ();
  std::map<std::vector<std::size_t>, double> counts;
  const int draws = 60000;
  for (int t = 0; t < draws; ++t) ++counts[sample_elementary(q, rng)];
  ASSERT_EQ(counts.size(), 6u);
  const double p = 1.0 / 6.0;
  const double sigma = std::sqrt(p * (1 - p) / draws);
  for (const auto& [order, c] : counts) EXPECT_LT(std::abs(c / draws - p), 3.5 * sigma);
}

}  // namespace
}  // namespace dpp
