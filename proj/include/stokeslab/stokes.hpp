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

#pragma once

// Standard (Sigma) and normalized (S) Stokes observables.
//
// Every observable used here is a function of the four photon counts seen by
// a pair of analyzers. For a settings pair the state is rotated sector by
// sector into the analyzer bases and the count distribution |amp|^2 is
// summed against all needed functions at once (JointMoments). Expectations
// are linear in the state, so mixtures are weighted sums of pure results.

#include <cmath>
#include <concepts>
#include <string>
#include <vector>

#include "stokeslab/detection.hpp"
#include "stokeslab/error.hpp"
#include "stokeslab/fock.hpp"

namespace stokeslab {

enum class Flavor { normalized, traditional };

inline const char *to_string(Flavor f) { return f == Flavor::normalized ? "normalized" : "traditional"; }

/// Weighted ensemble of pure states, sum_k p_k |psi_k><psi_k|.
class Mixture {
  public:
    struct Component {
        double weight;
        StateVector state;
    };

    Mixture() = default;

    void add(double weight, StateVector state) {
        if (!(weight >= 0.0) || !std::isfinite(weight)) throw InvalidArgument("mixture weights must be >= 0");
        require_normalized(state, "Mixture::add");
        components_.push_back({weight, std::move(state)});
    }

    const std::vector<Component> &components() const { return components_; }

    double total_weight() const {
        double s = 0;
        for (const auto &c : components_) s += c.weight;
        return s;
    }

    void validate(double eps = 1e-12) const {
        if (components_.empty()) throw InvalidArgument("empty mixture");
        if (std::abs(total_weight() - 1.0) > eps) throw InvalidArgument("mixture weights must sum to 1");
    }

  private:
    std::vector<Component> components_;
};

template <class T>
concept StateLike = std::same_as<T, StateVector> || std::same_as<T, Mixture>;

/// Per-beam functions of registered counts (plus, minus), possibly averaged
/// over binomial thinning.
struct BeamFeatures {
    double one = 0;
    double s = 0;       // (n+ - n-) / N, 0 on vacuum
    double s_sq = 0;
    double s0 = 0;      // 1 if N > 0
    double inv_n = 0;   // 1/N if N > 0
    double sigma = 0;   // n+ - n-
    double sigma_sq = 0;
    double n = 0;

    static BeamFeatures exact(int plus, int minus) {
        BeamFeatures f;
        const int total = plus + minus;
        f.one = 1.0;
        f.sigma = plus - minus;
        f.sigma_sq = f.sigma * f.sigma;
        f.n = total;
        if (total > 0) {
            f.s = f.sigma / total;
            f.s_sq = f.s * f.s;
            f.s0 = 1.0;
            f.inv_n = 1.0 / total;
        }
        return f;
    }

    void add_scaled(const BeamFeatures &o, double w) {
        one += w * o.one;
        s += w * o.s;
        s_sq += w * o.s_sq;
        s0 += w * o.s0;
        inv_n += w * o.inv_n;
        sigma += w * o.sigma;
        sigma_sq += w * o.sigma_sq;
        n += w * o.n;
    }
};

/// Lazily filled table of thinned BeamFeatures for arriving counts (plus, minus).
class ThinnedFeatureTable {
  public:
    ThinnedFeatureTable(int n_max, double eta) : binom_(n_max, eta), n_max_(n_max) {
        table_.resize(static_cast<std::size_t>(n_max + 1) * static_cast<std::size_t>(n_max + 1));
        done_.assign(table_.size(), false);
    }

    const BeamFeatures &operator()(int plus, int minus) {
        const std::size_t idx = static_cast<std::size_t>(plus) * static_cast<std::size_t>(n_max_ + 1) +
                                static_cast<std::size_t>(minus);
        if (!done_[idx]) {
            BeamFeatures acc;
            const auto &rp = binom_.row(plus);
            const auto &rm = binom_.row(minus);
            for (int j = 0; j <= plus; ++j) {
                if (rp[static_cast<std::size_t>(j)] == 0.0) continue;
                for (int k = 0; k <= minus; ++k) {
                    const double w = rp[static_cast<std::size_t>(j)] * rm[static_cast<std::size_t>(k)];
                    if (w != 0.0) acc.add_scaled(BeamFeatures::exact(j, k), w);
                }
            }
            table_[idx] = acc;
            done_[idx] = true;
        }
        return table_[idx];
    }

  private:
    BinomialTable binom_;
    int n_max_;
    std::vector<BeamFeatures> table_;
    std::vector<bool> done_;
};

/// Expectations of every count function used by the library for one pair of
/// analyzer settings. Fields are raw sums over the (possibly truncated) state.
struct JointMoments {
    double norm = 0;
    // normalized flavor
    double s_a = 0, s_b = 0, s0_a = 0, s0_b = 0;
    double s_a_sq = 0, s_b_sq = 0, inv_n_a = 0, inv_n_b = 0;
    double s_a_s_b = 0, s_a_s0_b = 0, s0_a_s_b = 0, s0_a_s0_b = 0;
    double sum_s_sq = 0;  // <(S^a + S^b)^2>
    // traditional flavor
    double sigma_a = 0, sigma_b = 0, n_a = 0, n_b = 0;
    double sigma_a_sq = 0, sigma_b_sq = 0;
    double sigma_a_sigma_b = 0, sigma_a_n_b = 0, n_a_sigma_b = 0, n_a_n_b = 0;
    double sum_sigma_sq = 0;  // <(Sigma^a + Sigma^b)^2>

    void accumulate(double p, const BeamFeatures &fa, const BeamFeatures &fb) {
        norm += p * fa.one * fb.one;
        s_a += p * fa.s * fb.one;
        s_b += p * fa.one * fb.s;
        s0_a += p * fa.s0 * fb.one;
        s0_b += p * fa.one * fb.s0;
        s_a_sq += p * fa.s_sq * fb.one;
        s_b_sq += p * fa.one * fb.s_sq;
        inv_n_a += p * fa.inv_n * fb.one;
        inv_n_b += p * fa.one * fb.inv_n;
        s_a_s_b += p * fa.s * fb.s;
        s_a_s0_b += p * fa.s * fb.s0;
        s0_a_s_b += p * fa.s0 * fb.s;
        s0_a_s0_b += p * fa.s0 * fb.s0;
        sigma_a += p * fa.sigma * fb.one;
        sigma_b += p * fa.one * fb.sigma;
        n_a += p * fa.n * fb.one;
        n_b += p * fa.one * fb.n;
        sigma_a_sq += p * fa.sigma_sq * fb.one;
        sigma_b_sq += p * fa.one * fb.sigma_sq;
        sigma_a_sigma_b += p * fa.sigma * fb.sigma;
        sigma_a_n_b += p * fa.sigma * fb.n;
        n_a_sigma_b += p * fa.n * fb.sigma;
        n_a_n_b += p * fa.n * fb.n;
    }

    JointMoments &add_scaled(const JointMoments &o, double w) {
        auto f = [w](double &x, double y) { x += w * y; };
        f(norm, o.norm);
        f(s_a, o.s_a), f(s_b, o.s_b), f(s0_a, o.s0_a), f(s0_b, o.s0_b);
        f(s_a_sq, o.s_a_sq), f(s_b_sq, o.s_b_sq), f(inv_n_a, o.inv_n_a), f(inv_n_b, o.inv_n_b);
        f(s_a_s_b, o.s_a_s_b), f(s_a_s0_b, o.s_a_s0_b), f(s0_a_s_b, o.s0_a_s_b), f(s0_a_s0_b, o.s0_a_s0_b);
        f(sum_s_sq, o.sum_s_sq);
        f(sigma_a, o.sigma_a), f(sigma_b, o.sigma_b), f(n_a, o.n_a), f(n_b, o.n_b);
        f(sigma_a_sq, o.sigma_a_sq), f(sigma_b_sq, o.sigma_b_sq);
        f(sigma_a_sigma_b, o.sigma_a_sigma_b), f(sigma_a_n_b, o.sigma_a_n_b), f(n_a_sigma_b, o.n_a_sigma_b);
        f(n_a_n_b, o.n_a_n_b);
        f(sum_sigma_sq, o.sum_sigma_sq);
        return *this;
    }
};

inline JointMoments joint_moments(const StateVector &state, const BasisSetting &setting_a,
                                  const BasisSetting &setting_b, const LossParams &loss = {}) {
    require_normalized(state, "joint_moments");
    loss.validate();
    ModeMixer mixer_a(setting_a.unitary());
    ModeMixer mixer_b(setting_b.unitary());
    ModeMixer *ma = setting_a.is_identity() ? nullptr : &mixer_a;
    ModeMixer *mb = setting_b.is_identity() ? nullptr : &mixer_b;

    JointMoments out;
    if (loss.lossless()) {
        detail::for_each_rotated_block(state, ma, mb, [&](const SectorKey &key, const Eigen::MatrixXcd &block) {
            for (int q = 0; q <= key.n_b; ++q) {
                const BeamFeatures fb = BeamFeatures::exact(q, key.n_b - q);
                for (int p = 0; p <= key.n_a; ++p) {
                    const double prob = std::norm(block(p, q));
                    if (prob == 0.0) continue;
                    const BeamFeatures fa = BeamFeatures::exact(p, key.n_a - p);
                    out.accumulate(prob, fa, fb);
                    const double ss = fa.s + fb.s;
                    const double tt = fa.sigma + fb.sigma;
                    out.sum_s_sq += prob * ss * ss;
                    out.sum_sigma_sq += prob * tt * tt;
                }
            }
        }, false);
        return out;
    }

    ThinnedFeatureTable table_a(state.max_photons(Beam::a), loss.eta);
    ThinnedFeatureTable table_b(state.max_photons(Beam::b), loss.eta);
    detail::for_each_rotated_block(state, ma, mb, [&](const SectorKey &key, const Eigen::MatrixXcd &block) {
        for (int q = 0; q <= key.n_b; ++q) {
            const BeamFeatures &fb = table_b(q, key.n_b - q);
            for (int p = 0; p <= key.n_a; ++p) {
                const double prob = std::norm(block(p, q));
                if (prob == 0.0) continue;
                const BeamFeatures &fa = table_a(p, key.n_a - p);
                out.accumulate(prob, fa, fb);
                // Thinning acts independently on the two beams, so the square expands.
                out.sum_s_sq += prob * (fa.s_sq * fb.one + 2.0 * fa.s * fb.s + fa.one * fb.s_sq);
                out.sum_sigma_sq += prob * (fa.sigma_sq * fb.one + 2.0 * fa.sigma * fb.sigma + fa.one * fb.sigma_sq);
            }
        }
    }, false);
    return out;
}

inline JointMoments joint_moments(const Mixture &mixture, const BasisSetting &setting_a,
                                  const BasisSetting &setting_b, const LossParams &loss = {}) {
    mixture.validate();
    JointMoments out;
    for (const auto &c : mixture.components()) out.add_scaled(joint_moments(c.state, setting_a, setting_b, loss), c.weight);
    return out;
}

/// S_0 / Sigma_0 (when zero) or the polarization component along a setting.
class Observable {
  public:
    static Observable zero() { return Observable(true, BasisSetting{}); }
    static Observable along(const BasisSetting &setting) { return Observable(false, setting); }
    /// 0 -> S_0, 1..3 -> the fixed analyzer bases.
    static Observable component(int i) { return i == 0 ? zero() : along(BasisSetting::index(i)); }

    bool is_zero() const { return zero_; }
    const BasisSetting &setting() const { return setting_; }
    std::string label() const { return zero_ ? std::string("0") : setting_.label(); }

  private:
    Observable(bool z, BasisSetting s) : zero_(z), setting_(std::move(s)) {}
    bool zero_;
    BasisSetting setting_;
};

struct CorrelationRecord {
    BasisSetting setting_a;
    BasisSetting setting_b;
    std::string x_label;
    std::string y_label;
    double value = 0;
    Flavor flavor = Flavor::normalized;
};

inline double pick_correlation(const JointMoments &m, Flavor flavor, bool x_zero, bool y_zero) {
    if (flavor == Flavor::normalized) {
        if (x_zero && y_zero) return m.s0_a_s0_b;
        if (x_zero) return m.s0_a_s_b;
        if (y_zero) return m.s_a_s0_b;
        return m.s_a_s_b;
    }
    if (x_zero && y_zero) return m.n_a_n_b;
    if (x_zero) return m.n_a_sigma_b;
    if (y_zero) return m.sigma_a_n_b;
    return m.sigma_a_sigma_b;
}

/// <X^a Y^b> for X, Y in {S_0, m.S} (normalized) or {Sigma_0, m.Sigma} (traditional).
template <StateLike State>
CorrelationRecord correlator(const State &state, Flavor flavor, const Observable &x, const Observable &y,
                             const LossParams &loss = {}) {
    const JointMoments m = joint_moments(state, x.setting(), y.setting(), loss);
    return CorrelationRecord{x.setting(), y.setting(), x.label(), y.label(),
                             pick_correlation(m, flavor, x.is_zero(), y.is_zero()), flavor};
}

/// G(a,x; b,y) = <Sigma_x^a Sigma_y^b> / (<Sigma_0^a> <Sigma_0^b>).
template <StateLike State>
double intensity_correlation(const State &state, const Observable &x, const Observable &y,
                             const LossParams &loss = {}) {
    const JointMoments m = joint_moments(state, x.setting(), y.setting(), loss);
    if (m.n_a <= 0.0 || m.n_b <= 0.0)
        throw UndefinedResult("intensity correlation undefined: a beam has zero mean intensity");
    return pick_correlation(m, Flavor::traditional, x.is_zero(), y.is_zero()) / (m.n_a * m.n_b);
}

template <StateLike State>
JointMoments single_beam_moments(const State &state, Beam beam, const BasisSetting &setting,
                                 const LossParams &loss = {}) {
    return beam == Beam::a ? joint_moments(state, setting, BasisSetting{}, loss)
                           : joint_moments(state, BasisSetting{}, setting, loss);
}

/// <m.S> (normalized) or <m.Sigma> (traditional) on one beam.
template <StateLike State>
double stokes_expectation(const State &state, Beam beam, const BasisSetting &setting, Flavor flavor,
                          const LossParams &loss = {}) {
    const JointMoments m = single_beam_moments(state, beam, setting, loss);
    if (flavor == Flavor::normalized) return beam == Beam::a ? m.s_a : m.s_b;
    return beam == Beam::a ? m.sigma_a : m.sigma_b;
}

/// <S_0> = Tr[Pi rho], the probability of a non-vacuum event on the beam.
inline double s0_expectation(const StateVector &state, Beam beam) {
    require_normalized(state, "s0_expectation");
    double s = 0;
    for (const auto &t : state.terms())
        if (t.occ.total(beam) > 0) s += std::norm(t.amp);
    return s;
}

inline double s0_expectation(const Mixture &mixture, Beam beam) {
    mixture.validate();
    double s = 0;
    for (const auto &c : mixture.components()) s += c.weight * s0_expectation(c.state, beam);
    return s;
}

/// <Pi N^{-1} Pi>, accumulated per photon-number sector as weight / n.
inline double inverse_number_expectation(const StateVector &state, Beam beam) {
    require_normalized(state, "inverse_number_expectation");
    double s = 0;
    for (const auto &t : state.terms()) {
        const int n = t.occ.total(beam);
        if (n > 0) s += std::norm(t.amp) / n;
    }
    return s;
}

inline double inverse_number_expectation(const Mixture &mixture, Beam beam) {
    mixture.validate();
    double s = 0;
    for (const auto &c : mixture.components()) s += c.weight * inverse_number_expectation(c.state, beam);
    return s;
}

/// sum_i <X_i^2> over the three fixed bases, X = S or Sigma.
template <StateLike State>
double stokes_square_sum(const State &state, Beam beam, Flavor flavor, const LossParams &loss = {}) {
    double s = 0;
    for (int i = 1; i <= 3; ++i) {
        const JointMoments m = single_beam_moments(state, beam, BasisSetting::index(i), loss);
        if (flavor == Flavor::normalized)
            s += beam == Beam::a ? m.s_a_sq : m.s_b_sq;
        else
            s += beam == Beam::a ? m.sigma_a_sq : m.sigma_b_sq;
    }
    return s;
}

struct StokesVector {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    Flavor flavor = Flavor::normalized;

    double polarized_length() const { return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3); }
};

template <StateLike State>
StokesVector stokes_vector(const State &state, Beam beam, Flavor flavor, const LossParams &loss = {}) {
    StokesVector v;
    v.flavor = flavor;
    double *comp[3] = {&v.s1, &v.s2, &v.s3};
    for (int i = 1; i <= 3; ++i) {
        const JointMoments m = single_beam_moments(state, beam, BasisSetting::index(i), loss);
        if (flavor == Flavor::normalized) {
            *comp[i - 1] = beam == Beam::a ? m.s_a : m.s_b;
            v.s0 = beam == Beam::a ? m.s0_a : m.s0_b;
        } else {
            *comp[i - 1] = beam == Beam::a ? m.sigma_a : m.sigma_b;
            v.s0 = beam == Beam::a ? m.n_a : m.n_b;
        }
    }
    return v;
}

/// p' = sqrt(sum_i <S_i>^2) / <S_0>.
template <StateLike State>
double degree_of_polarization(const State &state, Beam beam, const LossParams &loss = {}) {
    const StokesVector v = stokes_vector(state, beam, Flavor::normalized, loss);
    if (!(v.s0 > 0.0)) throw UndefinedResult("degree of polarization undefined for a vacuum beam");
    return v.polarized_length() / v.s0;
}

/// sqrt(sum_i <Sigma_i>^2) / <N>.
template <StateLike State>
double traditional_degree_of_polarization(const State &state, Beam beam, const LossParams &loss = {}) {
    const StokesVector v = stokes_vector(state, beam, Flavor::traditional, loss);
    if (!(v.s0 > 0.0)) throw UndefinedResult("degree of polarization undefined for a vacuum beam");
    return v.polarized_length() / v.s0;
}

}  // namespace stokeslab
