// Copyright 2026 The stokeslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <string>

#include "stokeslab/sampler.hpp"
#include "stokeslab/states.hpp"

namespace {

using namespace stokeslab;

SettingsPair same(int i) { return {BasisSetting::index(i), BasisSetting::index(i)}; }

void expect_within(const EstimatorReport &r, double exact, double k, const std::string &what) {
    EXPECT_LE(std::abs(r.estimate - exact), k * r.std_error + 1e-12)
        << what << ": estimate " << r.estimate << " exact " << exact << " se " << r.std_error;
}

TEST(Sampler, HorizontalPhotonsAlwaysPlus) {
    const StateVector s = product_state(BeamState::fock(1, 0), BeamState::fock(1, 0));
    const RunBatch b = sample_runs(s, same(1), {}, 1000, 7);
    ASSERT_EQ(b.runs.size(), 1000u);
    for (const auto &r : b.runs) {
        EXPECT_EQ(r.s_a(), 1.0);
        EXPECT_EQ(r.s_b(), 1.0);
    }
    const EstimatorReport e = estimate_correlator(b, RunStatistic::s_a_s_b);
    EXPECT_EQ(e.estimate, 1.0);
    EXPECT_EQ(e.std_error, 0.0);
    EXPECT_EQ(e.shots, 1000u);
    EXPECT_EQ(e.seed, 7u);
}

TEST(Sampler, SingletAnticorrelatedInEveryBasis) {
    std::vector<SettingsPair> settings = {same(1), same(2), same(3)};
    const BasisSetting m = BasisSetting::direction(Vec3(0.3, -0.5, 0.81).normalized());
    settings.push_back({m, m});
    for (const auto &st : settings) {
        const RunBatch b = sample_runs(singlet(1), st, {}, 500, 11);
        for (const auto &r : b.runs) {
            EXPECT_EQ(r.n_a(), 1);
            EXPECT_EQ(r.s_a() * r.s_b(), -1.0);
        }
    }
}

TEST(Sampler, VacuumRegistersNothing) {
    const RunBatch b = sample_runs(StateVector::vacuum(), same(2), {}, 200, 3);
    for (const auto &r : b.runs) {
        EXPECT_EQ(r.n_a(), 0);
        EXPECT_EQ(r.n_b(), 0);
        EXPECT_EQ(r.s_a(), 0.0);
    }
    const EstimatorReport e = estimate_correlator(b, RunStatistic::s0_a_s0_b);
    EXPECT_EQ(e.estimate, 0.0);
    EXPECT_EQ(e.std_error, 0.0);
    EXPECT_THROW(estimate_intensity_correlation(b), UndefinedResult);
}

TEST(Sampler, DeterministicAndIndependentOfJobs) {
    const StateVector s = bsv(BsvParams{0.5});
    const SettingsPair st = same(3);
    const std::size_t shots = 3 * kSampleBatchSize + 17;
    const RunBatch one = sample_runs(s, st, LossParams{0.6}, shots, 42, 1);
    const RunBatch three = sample_runs(s, st, LossParams{0.6}, shots, 42, 3);
    const RunBatch again = sample_runs(s, st, LossParams{0.6}, shots, 42, 1);
    const RunBatch other = sample_runs(s, st, LossParams{0.6}, shots, 43, 1);
    ASSERT_EQ(one.runs.size(), shots);
    ASSERT_EQ(three.runs.size(), shots);
    bool differs = false;
    for (std::size_t i = 0; i < shots; ++i) {
        const auto &x = one.runs[i], &y = three.runs[i], &z = again.runs[i], &w = other.runs[i];
        EXPECT_TRUE(x.a_plus == y.a_plus && x.a_minus == y.a_minus && x.b_plus == y.b_plus && x.b_minus == y.b_minus);
        EXPECT_TRUE(x.a_plus == z.a_plus && x.a_minus == z.a_minus && x.b_plus == z.b_plus && x.b_minus == z.b_minus);
        differs |= x.a_plus != w.a_plus || x.a_minus != w.a_minus || x.b_plus != w.b_plus || x.b_minus != w.b_minus;
    }
    EXPECT_TRUE(differs);
}

TEST(Sampler, Errors) {
    EXPECT_THROW(sample_runs(singlet(1), same(1), {}, 0, 1), InvalidArgument);
    EXPECT_THROW(sample_runs(singlet(1), same(1), LossParams{1.2}, 10, 1), InvalidArgument);
    const StateVector unnormalized = StateVector::from_terms({Term{Occupation{1, 0, 0, 1}, Complex{2.0, 0.0}}});
    EXPECT_THROW(sample_runs(unnormalized, same(1), {}, 10, 1), InvalidArgument);
    RunBatch tiny;
    tiny.runs.resize(1);
    EXPECT_THROW(estimate_correlator(tiny, RunStatistic::s_a), InvalidArgument);
}

TEST(Sampler, StatisticNamesAreDistinct) {
    std::set<std::string> names;
    for (RunStatistic s : kAllRunStatistics) names.insert(to_string(s));
    EXPECT_EQ(names.size(), std::size(kAllRunStatistics));
}

class BsvSampling : public ::testing::TestWithParam<double> {};

TEST_P(BsvSampling, EstimatesWithinFourStandardErrors) {
    const double eta = GetParam();
    const StateVector s = bsv(BsvParams{0.7});
    for (const SettingsPair &st : {same(2), SettingsPair{BasisSetting::index(1), BasisSetting::index(3)}}) {
        const JointMoments m = joint_moments(s, st.a, st.b, LossParams{eta});
        const RunBatch b = sample_runs(s, st, LossParams{eta}, 100000, 2026);
        for (RunStatistic stat : kAllRunStatistics)
            expect_within(estimate_correlator(b, stat), exact_statistic(m, stat), 4.0, to_string(stat));
        const double g = (m.sigma_a_sigma_b / m.norm) / ((m.n_a / m.norm) * (m.n_b / m.norm));
        expect_within(estimate_intensity_correlation(b), g, 4.0, "G");
    }
}

INSTANTIATE_TEST_SUITE_P(Efficiencies, BsvSampling, ::testing::Values(1.0, 0.5));

TEST(Sampler, ThinningAfterMeasurementMatchesLossyMoments) {
    for (int n = 1; n <= 6; ++n) {
        const StateVector s = singlet(n);
        const SettingsPair st{BasisSetting::index(2), BasisSetting::index(2)};
        const JointMoments m = joint_moments(s, st.a, st.b, LossParams{0.4});
        const RunBatch b = sample_runs(s, st, LossParams{0.4}, 20000, 100 + n);
        for (RunStatistic stat : {RunStatistic::s_a_s_b, RunStatistic::s0_a_s0_b, RunStatistic::sigma_a_sigma_b,
                                  RunStatistic::n_a_n_b})
            expect_within(estimate_correlator(b, stat), exact_statistic(m, stat), 4.5, to_string(stat));
    }
}

}  // namespace
