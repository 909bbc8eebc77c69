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

#include <random>

#include "oracles.hpp"
#include "stokeslab/detection.hpp"
#include "stokeslab/states.hpp"
#include "stokeslab/stokes.hpp"

namespace {

using namespace stokeslab;

const StateVector kH = StateVector::basis(Occupation{1, 0, 0, 0});

TEST(StokesExpectation, Vacuum) {
    for (int i = 1; i <= 3; ++i)
        for (Flavor f : {Flavor::normalized, Flavor::traditional})
            EXPECT_EQ(stokes_expectation(StateVector::vacuum(), Beam::a, BasisSetting::index(i), f), 0.0);
}

TEST(StokesExpectation, HorizontalPhoton) {
    EXPECT_DOUBLE_EQ(stokes_expectation(kH, Beam::a, BasisSetting::index(1), Flavor::normalized), 1.0);
    EXPECT_DOUBLE_EQ(stokes_expectation(kH, Beam::a, BasisSetting::index(1), Flavor::traditional), 1.0);
    EXPECT_NEAR(stokes_expectation(kH, Beam::a, BasisSetting::index(2), Flavor::normalized), 0.0, 1e-15);
    EXPECT_EQ(stokes_expectation(kH, Beam::b, BasisSetting::index(1), Flavor::normalized), 0.0);
}

TEST(StokesExpectation, BsvMarginalsUnpolarized) {
    const StateVector s = bsv(BsvParams{0.8});
    std::mt19937_64 rng(1);
    for (int t = 0; t < 5; ++t) {
        const BasisSetting b = t < 3 ? BasisSetting::index(t + 1) : BasisSetting::direction(oracle::random_unit(rng));
        for (Beam beam : {Beam::a, Beam::b}) {
            EXPECT_NEAR(stokes_expectation(s, beam, b, Flavor::normalized), 0.0, 1e-12);
            EXPECT_NEAR(stokes_expectation(s, beam, b, Flavor::traditional), 0.0, 1e-11);
        }
    }
}

TEST(S0Expectation, Examples) {
    EXPECT_EQ(s0_expectation(StateVector::vacuum(), Beam::a), 0.0);
    for (int n = 1; n <= 4; ++n) EXPECT_NEAR(s0_expectation(singlet(n), Beam::b), 1.0, 1e-15);
    const double g = 0.6;
    const StateVector s = bsv(BsvParams{g});
    EXPECT_NEAR(s0_expectation(s, Beam::a), 1.0 - std::pow(std::cosh(g), -4), 1e-12);
    EXPECT_NEAR(joint_moments(s, BasisSetting{}, BasisSetting{}).s0_a, s0_expectation(s, Beam::a), 1e-15);
}

TEST(Correlator, SingletPerfectAnticorrelation) {
    for (int i = 1; i <= 3; ++i) {
        const Observable x = Observable::component(i);
        const CorrelationRecord r = correlator(singlet(1), Flavor::normalized, x, x);
        EXPECT_NEAR(r.value, -1.0, 1e-14);
        EXPECT_EQ(r.flavor, Flavor::normalized);
    }
}

TEST(Correlator, BsvStokesTimesS0Vanishes) {
    const StateVector s = bsv(BsvParams{1.0});
    for (int i = 1; i <= 3; ++i) {
        EXPECT_NEAR(correlator(s, Flavor::normalized, Observable::component(i), Observable::zero()).value, 0.0, 1e-10);
        EXPECT_NEAR(correlator(s, Flavor::traditional, Observable::zero(), Observable::component(i)).value, 0.0, 1e-9);
    }
}

TEST(Correlator, ProductOfHorizontalPhotons) {
    const StateVector s = product_state(BeamState::fock(1, 0), BeamState::fock(1, 0));
    const Observable z = Observable::component(1);
    EXPECT_DOUBLE_EQ(correlator(s, Flavor::normalized, z, z).value, 1.0);
    EXPECT_DOUBLE_EQ(intensity_correlation(s, z, z), 1.0);
    EXPECT_THROW(intensity_correlation(kH, z, z), UndefinedResult);
}

TEST(Correlator, IntensityCorrelationDefinition) {
    const StateVector s = bsv(BsvParams{0.7});
    const Observable x = Observable::component(2);
    const JointMoments m = joint_moments(s, BasisSetting::index(2), BasisSetting::index(2));
    EXPECT_NEAR(intensity_correlation(s, x, x), m.sigma_a_sigma_b / (m.n_a * m.n_b), 1e-14);
}

TEST(Correlator, BoundedByS0S0) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 30; ++t) {
        const StateVector s = oracle::random_state(rng, 5, 8);
        const BasisSetting x = BasisSetting::direction(oracle::random_unit(rng));
        const BasisSetting y = BasisSetting::direction(oracle::random_unit(rng));
        const JointMoments m = joint_moments(s, x, y);
        EXPECT_LE(std::abs(m.s_a_s_b), m.s0_a_s0_b + 1e-12);
        EXPECT_LE(m.s0_a_s0_b, 1.0 + 1e-12);
    }
}

TEST(SquareSum, Examples) {
    EXPECT_NEAR(stokes_square_sum(kH, Beam::a, Flavor::traditional), 3.0, 1e-14);
    EXPECT_NEAR(stokes_square_sum(kH, Beam::a, Flavor::normalized), 3.0, 1e-14);
    const StateVector two = StateVector::basis(Occupation{2, 0, 0, 0});
    EXPECT_NEAR(stokes_square_sum(two, Beam::a, Flavor::traditional), 8.0, 1e-13);
    EXPECT_NEAR(stokes_square_sum(two, Beam::a, Flavor::normalized), 2.0, 1e-14);
    EXPECT_EQ(stokes_square_sum(StateVector::vacuum(), Beam::a, Flavor::traditional), 0.0);
    EXPECT_EQ(stokes_square_sum(StateVector::vacuum(), Beam::a, Flavor::normalized), 0.0);
}

TEST(SquareSum, ExplicitOperatorEvaluation) {
    const StateVector two = StateVector::basis(Occupation{2, 0, 0, 0});
    double trad = 0, norm = 0;
    for (int i = 1; i <= 3; ++i) {
        trad += oracle::expect(two, {oracle::sigma(i), oracle::sigma(i)}, {}, false);
        norm += oracle::expect(two, {oracle::sigma(i), oracle::sigma(i)}, {}, true);
    }
    EXPECT_NEAR(trad, 8.0, 1e-13);
    EXPECT_NEAR(norm, 2.0, 1e-14);
}

TEST(SquareSum, OperatorIdentitiesOnRandomStates) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 100; ++t) {
        const StateVector s = oracle::random_state(rng, 7, 10);
        for (Beam beam : {Beam::a, Beam::b}) {
            double n_n2 = 0;
            for (const auto &term : s.terms()) {
                const int n = term.occ.total(beam);
                n_n2 += std::norm(term.amp) * n * (n + 2.0);
            }
            EXPECT_NEAR(stokes_square_sum(s, beam, Flavor::traditional), n_n2, 1e-10 * std::max(1.0, n_n2));
            const double rhs = s0_expectation(s, beam) + 2.0 * inverse_number_expectation(s, beam);
            EXPECT_NEAR(stokes_square_sum(s, beam, Flavor::normalized), rhs, 1e-10);
        }
    }
}

TEST(PolarizationChain, RandomStatesAndDirections) {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 20; ++t) {
        const StateVector s = oracle::random_state(rng, 6, 10);
        for (Beam beam : {Beam::a, Beam::b}) {
            const StokesVector v = stokes_vector(s, beam, Flavor::normalized);
            EXPECT_LE(v.s1 * v.s1 + v.s2 * v.s2 + v.s3 * v.s3, v.s0 * v.s0 + 1e-10);
            EXPECT_LE(v.s0, 1.0 + 1e-10);
            const StokesVector tv = stokes_vector(s, beam, Flavor::traditional);
            EXPECT_LE(tv.polarized_length(), tv.s0 + 1e-10);
            for (int k = 0; k < 200; ++k) {
                const Vec3 m = oracle::random_unit(rng);
                const double ms = stokes_expectation(s, beam, BasisSetting::direction(m), Flavor::normalized);
                EXPECT_LE(std::abs(ms), v.s0 + 1e-10);
                // m.S is linear in m.
                EXPECT_NEAR(ms, m(0) * v.s1 + m(1) * v.s2 + m(2) * v.s3, 1e-10);
            }
        }
    }
}

TEST(Moments, AgreeWithLadderOperatorOracle) {
    std::mt19937_64 rng(31);
    const auto id = oracle::sigma(0);
    for (int t = 0; t < 25; ++t) {
        const StateVector s = oracle::random_state(rng, 5, 8);
        const Vec3 ma = oracle::random_unit(rng), mb = oracle::random_unit(rng);
        const auto sa = oracle::sigma_along(ma), sb = oracle::sigma_along(mb);
        const JointMoments m = joint_moments(s, BasisSetting::direction(ma), BasisSetting::direction(mb));
        EXPECT_NEAR(m.s_a, oracle::expect(s, {sa}, {}, true), 1e-12);
        EXPECT_NEAR(m.s_b, oracle::expect(s, {}, {sb}, true), 1e-12);
        EXPECT_NEAR(m.s_a_s_b, oracle::expect(s, {sa}, {sb}, true), 1e-12);
        EXPECT_NEAR(m.s_a_s0_b, oracle::expect(s, {sa}, {id}, true), 1e-12);
        EXPECT_NEAR(m.s0_a_s0_b, oracle::expect(s, {id}, {id}, true), 1e-12);
        EXPECT_NEAR(m.s_a_sq, oracle::expect(s, {sa, sa}, {}, true), 1e-12);
        EXPECT_NEAR(m.sigma_a_sigma_b, oracle::expect(s, {sa}, {sb}, false), 1e-10);
        EXPECT_NEAR(m.sigma_b_sq, oracle::expect(s, {}, {sb, sb}, false), 1e-10);
        EXPECT_NEAR(m.n_a_sigma_b, oracle::expect(s, {id}, {sb}, false), 1e-10);
        EXPECT_NEAR(m.n_a_n_b, oracle::expect(s, {id}, {id}, false), 1e-10);
        EXPECT_NEAR(m.norm, 1.0, 1e-12);
    }
}

TEST(Moments, SpectrumOnFockVectors) {
    for (int h = 0; h <= 4; ++h) {
        for (int v = 0; v <= 4; ++v) {
            const StateVector s = StateVector::basis(Occupation{h, v, 0, 0});
            const double want = h + v == 0 ? 0.0 : static_cast<double>(h - v) / (h + v);
            EXPECT_DOUBLE_EQ(stokes_expectation(s, Beam::a, BasisSetting::index(1), Flavor::normalized), want);
        }
    }
}

TEST(Moments, LinearInTheState) {
    std::mt19937_64 rng(37);
    for (int t = 0; t < 10; ++t) {
        const StateVector x = oracle::random_state(rng, 5, 6);
        const StateVector y = oracle::random_state(rng, 5, 6);
        Mixture mix;
        mix.add(0.3, x);
        mix.add(0.7, y);
        const BasisSetting b = BasisSetting::direction(oracle::random_unit(rng));
        const JointMoments mm = joint_moments(mix, b, BasisSetting::index(2));
        const JointMoments mx = joint_moments(x, b, BasisSetting::index(2));
        const JointMoments my = joint_moments(y, b, BasisSetting::index(2));
        EXPECT_NEAR(mm.s_a_s_b, 0.3 * mx.s_a_s_b + 0.7 * my.s_a_s_b, 1e-12);
        EXPECT_NEAR(mm.sum_s_sq, 0.3 * mx.sum_s_sq + 0.7 * my.sum_s_sq, 1e-12);
        EXPECT_NEAR(s0_expectation(mix, Beam::a), 0.3 * s0_expectation(x, Beam::a) + 0.7 * s0_expectation(y, Beam::a),
                    1e-12);
    }
}

TEST(Moments, LossyMatchesExplicitThinning) {
    std::mt19937_64 rng(41);
    for (double eta : {0.0, 0.3, 0.75}) {
        const StateVector s = oracle::random_state(rng, 4, 6);
        const BasisSetting x = BasisSetting::index(2), y = BasisSetting::index(3);
        const StateVector r = rotate_beam(rotate_beam(s, Beam::a, x), Beam::b, y);
        double s_ab = 0, sum_sq = 0, inv_a = 0, sig_ab = 0;
        for (const auto &t : r.terms()) {
            const double p = std::norm(t.amp);
            const Occupation &o = t.occ;
            for (int i = 0; i <= o.a_h; ++i)
                for (int j = 0; j <= o.a_v; ++j)
                    for (int k = 0; k <= o.b_h; ++k)
                        for (int l = 0; l <= o.b_v; ++l) {
                            const double w = p * binomial_prob(i, o.a_h, eta) * binomial_prob(j, o.a_v, eta) *
                                             binomial_prob(k, o.b_h, eta) * binomial_prob(l, o.b_v, eta);
                            const double sa = i + j ? double(i - j) / (i + j) : 0.0;
                            const double sb = k + l ? double(k - l) / (k + l) : 0.0;
                            s_ab += w * sa * sb;
                            sum_sq += w * (sa + sb) * (sa + sb);
                            inv_a += i + j ? w / (i + j) : 0.0;
                            sig_ab += w * (i - j) * (k - l);
                        }
        }
        const JointMoments m = joint_moments(s, x, y, LossParams{eta});
        EXPECT_NEAR(m.s_a_s_b, s_ab, 1e-12);
        EXPECT_NEAR(m.sum_s_sq, sum_sq, 1e-12);
        EXPECT_NEAR(m.inv_n_a, inv_a, 1e-12);
        EXPECT_NEAR(m.sigma_a_sigma_b, sig_ab, 1e-11);
    }
    EXPECT_THROW(joint_moments(kH, BasisSetting{}, BasisSetting{}, LossParams{1.5}), InvalidArgument);
}

TEST(Polarization, DegreeExamples) {
    EXPECT_NEAR(degree_of_polarization(kH, Beam::a), 1.0, 1e-15);
    EXPECT_NEAR(degree_of_polarization(bsv(BsvParams{0.5}), Beam::a), 0.0, 1e-12);
    Mixture mix;
    mix.add(0.5, kH);
    mix.add(0.5, StateVector::basis(Occupation{0, 1, 0, 0}));
    EXPECT_NEAR(degree_of_polarization(mix, Beam::a), 0.0, 1e-15);
    EXPECT_THROW(degree_of_polarization(StateVector::vacuum(), Beam::a), UndefinedResult);
    EXPECT_THROW(traditional_degree_of_polarization(kH, Beam::b), UndefinedResult);
}

TEST(Polarization, FlavorsAgreeOnFixedPhotonNumber) {
    std::mt19937_64 rng(43);
    std::normal_distribution<double> g;
    for (int n = 1; n <= 5; ++n) {
        std::vector<Term> terms;
        for (int h = 0; h <= n; ++h) terms.push_back({Occupation{h, n - h, 0, 0}, Complex(g(rng), g(rng))});
        const StateVector s = StateVector::from_terms(terms).normalized();
        EXPECT_NEAR(degree_of_polarization(s, Beam::a), traditional_degree_of_polarization(s, Beam::a), 1e-12);
    }
}

TEST(Mixture, Validation) {
    Mixture mix;
    EXPECT_THROW(mix.validate(), InvalidArgument);
    EXPECT_THROW(mix.add(-0.1, kH), InvalidArgument);
    EXPECT_THROW(mix.add(0.5, kH.scaled(2.0)), InvalidArgument);
    mix.add(0.4, kH);
    EXPECT_THROW(joint_moments(mix, BasisSetting{}, BasisSetting{}), InvalidArgument);
}

}  // namespace
