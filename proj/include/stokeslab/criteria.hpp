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

// Separability conditions for two-beam polarization measurements and the map
// from two-qubit witnesses (Pauli coefficient tables) to optical indicators.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stokeslab/detection.hpp"
#include "stokeslab/error.hpp"
#include "stokeslab/fock.hpp"
#include "stokeslab/numeric.hpp"
#include "stokeslab/stokes.hpp"

namespace stokeslab {

enum class CriterionId { epr_old, epr_old_outer_square, epr_new, yu_mapped, yu_traditional, witness };

inline const char *to_string(CriterionId id) {
    switch (id) {
        case CriterionId::epr_old: return "epr_old";
        case CriterionId::epr_old_outer_square: return "epr_old_outer_square";
        case CriterionId::epr_new: return "epr_new";
        case CriterionId::yu_mapped: return "yu_mapped";
        case CriterionId::yu_traditional: return "yu_traditional";
        case CriterionId::witness: return "witness";
    }
    return "?";
}

/// Which side separable states sit on: lhs >= rhs (lower) or lhs <= rhs (upper).
enum class BoundDirection { lower, upper };

inline constexpr double kViolationTolerance = 1e-9;

/// margin >= 0 for every separable state; violated <=> margin < -tolerance.
struct CriterionResult {
    CriterionId id = CriterionId::epr_new;
    double lhs = 0;
    double rhs = 0;
    double margin = 0;
    bool violated = false;
    Flavor flavor = Flavor::normalized;

    static CriterionResult make(CriterionId id, Flavor flavor, BoundDirection dir, double lhs, double rhs,
                                double tolerance = kViolationTolerance) {
        CriterionResult r{id, lhs, rhs, dir == BoundDirection::lower ? lhs - rhs : rhs - lhs, false, flavor};
        r.violated = r.margin < -tolerance;
        return r;
    }
};

// ---------------------------------------------------------------------------
// EPR-type conditions

struct EprTerms {
    double sum_s_sq = 0;          // sum_i <(S_i^a + S_i^b)^2>
    double sum_sigma_sq = 0;      // sum_i <(Sigma_i^a + Sigma_i^b)^2>
    double sum_sigma_means_sq = 0;  // sum_i (<Sigma_i^a> + <Sigma_i^b>)^2
    double n_a = 0, n_b = 0;
    double inv_n_a = 0, inv_n_b = 0;
};

template <StateLike State>
EprTerms epr_terms(const State &state, const LossParams &loss = {}) {
    EprTerms t;
    for (int i = 1; i <= 3; ++i) {
        const BasisSetting s = BasisSetting::index(i);
        const JointMoments m = joint_moments(state, s, s, loss);
        t.sum_s_sq += m.sum_s_sq;
        t.sum_sigma_sq += m.sum_sigma_sq;
        const double mean = m.sigma_a + m.sigma_b;
        t.sum_sigma_means_sq += mean * mean;
        if (i == 1) {
            t.n_a = m.n_a;
            t.n_b = m.n_b;
            t.inv_n_a = m.inv_n_a;
            t.inv_n_b = m.inv_n_b;
        }
    }
    return t;
}

/// sum_i <(X_i^a + X_i^b)^2> with X = S (normalized) or Sigma (traditional).
template <StateLike State>
double epr_sum(const State &state, Flavor flavor, const LossParams &loss = {}) {
    const EprTerms t = epr_terms(state, loss);
    return flavor == Flavor::normalized ? t.sum_s_sq : t.sum_sigma_sq;
}

inline CriterionResult epr_criterion_old(const EprTerms &t) {
    return CriterionResult::make(CriterionId::epr_old, Flavor::traditional, BoundDirection::lower, t.sum_sigma_sq,
                                 2.0 * (t.n_a + t.n_b));
}

/// sum_i <(Sigma_i^a + Sigma_i^b)^2> >= 2 <N^a + N^b> for separable states.
template <StateLike State>
CriterionResult epr_criterion_old(const State &state, const LossParams &loss = {}) {
    return epr_criterion_old(epr_terms(state, loss));
}

/// Variant with the square outside the average. Not a valid separability
/// test on its own (product states with opposite Stokes vectors violate it).
template <StateLike State>
CriterionResult epr_criterion_old_outer_square(const State &state, const LossParams &loss = {}) {
    const EprTerms t = epr_terms(state, loss);
    return CriterionResult::make(CriterionId::epr_old_outer_square, Flavor::traditional, BoundDirection::lower,
                                 t.sum_sigma_means_sq, 2.0 * (t.n_a + t.n_b));
}

inline CriterionResult epr_criterion_new(const EprTerms &t) {
    return CriterionResult::make(CriterionId::epr_new, Flavor::normalized, BoundDirection::lower, t.sum_s_sq,
                                 2.0 * (t.inv_n_a + t.inv_n_b));
}

/// sum_i <(S_i^a + S_i^b)^2> >= 2 (<Pi_a/N_a Pi_a> + <Pi_b/N_b Pi_b>) for separable states.
template <StateLike State>
CriterionResult epr_criterion_new(const State &state, const LossParams &loss = {}) {
    return epr_criterion_new(epr_terms(state, loss));
}

// ---------------------------------------------------------------------------
// Yu-type conditions

/// Orthonormal analyzer directions (x, y, z) on the Poincare sphere.
struct OrthogonalTriple {
    BasisSetting x;
    BasisSetting y;
    BasisSetting z;

    /// z = H/V, x = D/A, y = R/L.
    static OrthogonalTriple standard() {
        return {BasisSetting::index(2), BasisSetting::index(3), BasisSetting::index(1)};
    }

    /// Columns of `r` are x, y, z.
    static OrthogonalTriple from_rotation(const Eigen::Matrix3d &r) {
        if (((r.transpose() * r) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-10)
            throw InvalidArgument("orthogonal triple: matrix is not orthogonal");
        return {BasisSetting::direction(r.col(0).normalized()), BasisSetting::direction(r.col(1).normalized()),
                BasisSetting::direction(r.col(2).normalized())};
    }
};

struct YuResults {
    CriterionResult normalized;
    CriterionResult traditional;
};

/// Both Yu-type conditions from one set of three correlation measurements.
template <StateLike State>
YuResults yu_criteria(const State &state, const OrthogonalTriple &triple = OrthogonalTriple::standard(),
                      const LossParams &loss = {}) {
    const JointMoments mx = joint_moments(state, triple.x, triple.x, loss);
    const JointMoments my = joint_moments(state, triple.y, triple.y, loss);
    const JointMoments mz = joint_moments(state, triple.z, triple.z, loss);

    if (!(mz.s0_a_s0_b > 0.0)) throw UndefinedResult("Yu criterion undefined: <S_0^a S_0^b> = 0");
    const double a = mx.s_a_s_b + my.s_a_s_b;
    const double b = mz.s_a_s0_b + mz.s0_a_s_b;
    const double lhs_n = (std::sqrt(a * a + b * b) - mz.s_a_s_b) / mz.s0_a_s0_b;

    if (!(mz.n_a_n_b > 0.0)) throw UndefinedResult("Yu criterion undefined: <N^a N^b> = 0");
    const double at = mx.sigma_a_sigma_b + my.sigma_a_sigma_b;
    const double bt = mz.sigma_a_n_b + mz.n_a_sigma_b;
    const double lhs_t = (std::sqrt(at * at + bt * bt) - mz.sigma_a_sigma_b) / mz.n_a_n_b;

    return {CriterionResult::make(CriterionId::yu_mapped, Flavor::normalized, BoundDirection::upper, lhs_n, 1.0),
            CriterionResult::make(CriterionId::yu_traditional, Flavor::traditional, BoundDirection::upper, lhs_t, 1.0)};
}

template <StateLike State>
CriterionResult yu_mapped(const State &state, const OrthogonalTriple &triple = OrthogonalTriple::standard(),
                          const LossParams &loss = {}) {
    return yu_criteria(state, triple, loss).normalized;
}

template <StateLike State>
CriterionResult yu_traditional(const State &state, const OrthogonalTriple &triple = OrthogonalTriple::standard(),
                               const LossParams &loss = {}) {
    return yu_criteria(state, triple, loss).traditional;
}

// ---------------------------------------------------------------------------
// Witness map

/// Real coefficients c(mu, nu) of W = sum c(mu, nu) sigma_mu^a sigma_nu^b,
/// rows/columns ordered (0, 1, 2, 3).
class WitnessSpec {
  public:
    explicit WitnessSpec(const Eigen::Matrix4d &c) : c_(c) {
        if (!c.allFinite()) throw InvalidArgument("witness coefficients must be finite");
    }

    const Eigen::Matrix4d &coefficients() const { return c_; }

    /// True when some c(mu, nu) with mu, nu >= 1 is nonzero.
    bool has_correlation_content() const { return c_.bottomRightCorner<3, 3>().cwiseAbs().maxCoeff() > 0.0; }

    static WitnessSpec identity() {
        Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
        c(0, 0) = 1.0;
        return WitnessSpec(c);
    }

    /// sum_i sigma_i (x) sigma_i
    static WitnessSpec sigma_dot_sigma() {
        Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
        c(1, 1) = c(2, 2) = c(3, 3) = 1.0;
        return WitnessSpec(c);
    }

    /// Linearized Yu form for the standard triple (z = 1, x = 2, y = 3):
    /// s0 s0 + z z + cos(alpha)(x x + y y) + sin(alpha)(z 0 + 0 z). Separable states give >= 0.
    static WitnessSpec yu_linearized(double alpha) {
        Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
        c(0, 0) = 1.0;
        c(1, 1) = 1.0;
        c(2, 2) = c(3, 3) = std::cos(alpha);
        c(1, 0) = c(0, 1) = std::sin(alpha);
        return WitnessSpec(c);
    }

    /// Four data lines of four whitespace-separated reals. Blank lines and
    /// lines starting with '#' are skipped.
    static WitnessSpec parse(std::istream &in) {
        Eigen::Matrix4d c;
        std::string line;
        int line_no = 0;
        int row = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            if (row == 4) throw ParseError("line " + std::to_string(line_no) + ": more than 4 coefficient rows", line_no);
            std::istringstream ls(line);
            ls.imbue(std::locale::classic());
            for (int col = 0; col < 4; ++col) {
                std::string tok;
                if (!(ls >> tok))
                    throw ParseError("line " + std::to_string(line_no) + ": expected 4 values, got " + std::to_string(col),
                                     line_no);
                char *end = nullptr;
                const double v = std::strtod(tok.c_str(), &end);
                if (end == tok.c_str() || *end != '\0' || !std::isfinite(v))
                    throw ParseError("line " + std::to_string(line_no) + ": not a finite real: '" + tok + "'", line_no);
                c(row, col) = v;
            }
            std::string extra;
            if (ls >> extra)
                throw ParseError("line " + std::to_string(line_no) + ": more than 4 values", line_no);
            ++row;
        }
        if (row != 4) throw ParseError("expected 4 coefficient rows, found " + std::to_string(row), line_no);
        return WitnessSpec(c);
    }

    static WitnessSpec load(const std::string &path) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open witness file '" + path + "'", 0);
        return parse(in);
    }

  private:
    Eigen::Matrix4d c_;
};

/// Local normalized Stokes data of a product state: s_k0 in [0, 1] and
/// |s_k| <= s_k0.
struct ProductStokesData {
    double s_a0 = 0;
    Vec3 s_a = Vec3::Zero();
    double s_b0 = 0;
    Vec3 s_b = Vec3::Zero();

    void validate(double eps = 1e-12) const {
        for (auto [s0, v] : {std::pair{s_a0, s_a}, std::pair{s_b0, s_b}}) {
            if (!(s0 >= -eps && s0 <= 1.0 + eps) || v.norm() > s0 + eps)
                throw InvalidArgument("ProductStokesData violates |s| <= s0 <= 1");
        }
    }

    Eigen::Vector4d four_a() const { return {s_a0, s_a(0), s_a(1), s_a(2)}; }
    Eigen::Vector4d four_b() const { return {s_b0, s_b(0), s_b(1), s_b(2)}; }
};

/// sum c(mu, nu) s_{a mu} s_{b nu}: the witness value of a product state.
inline double witness_value(const WitnessSpec &w, const ProductStokesData &d) {
    return d.four_a().dot(w.coefficients() * d.four_b());
}

/// Evaluates <W_QO> = sum c(mu, nu) <S_mu^a S_nu^b> on optical states.
class MappedWitness {
  public:
    explicit MappedWitness(WitnessSpec spec) : spec_(std::move(spec)) {}

    const WitnessSpec &spec() const { return spec_; }

    template <StateLike State>
    double operator()(const State &state, const LossParams &loss = {}) const {
        const Eigen::Matrix4d &c = spec_.coefficients();
        std::array<std::array<std::optional<JointMoments>, 3>, 3> cache;
        auto moments = [&](int i, int j) -> const JointMoments & {
            auto &slot = cache[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
            if (!slot) slot = joint_moments(state, BasisSetting::index(i), BasisSetting::index(j), loss);
            return *slot;
        };
        double value = 0;
        for (int mu = 0; mu < 4; ++mu) {
            for (int nu = 0; nu < 4; ++nu) {
                if (c(mu, nu) == 0.0) continue;
                const JointMoments &m = moments(mu == 0 ? 1 : mu, nu == 0 ? 1 : nu);
                value += c(mu, nu) * pick_correlation(m, Flavor::normalized, mu == 0, nu == 0);
            }
        }
        return value;
    }

  private:
    WitnessSpec spec_;
};

inline MappedWitness map_witness(const WitnessSpec &w) { return MappedWitness(w); }

// ---------------------------------------------------------------------------
// Separable bounds

enum class BoundMode { min, max };

struct SeparableBoundOptions {
    int restarts = 64;
    std::uint64_t seed = 0x5eed5eedULL;
    double agreement_tol = 1e-7;
};

struct SeparableBound {
    double value = 0;
    /// Fewer than two restarts reached the reported value.
    bool low_confidence = false;
    int agreeing_restarts = 0;
    ProductStokesData extremizer;
};

namespace detail {

/// Parameters (t0, t1, theta, phi) per side: s0 = sin^2 t0, r = |s|/s0 = sin^2 t1.
inline ProductStokesData decode_product(const std::vector<double> &x) {
    auto side = [&](std::size_t o, double &s0, Vec3 &v) {
        s0 = std::sin(x[o]) * std::sin(x[o]);
        const double r = std::sin(x[o + 1]) * std::sin(x[o + 1]);
        const double th = x[o + 2];
        const double ph = x[o + 3];
        v = s0 * r * Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
    };
    ProductStokesData d;
    side(0, d.s_a0, d.s_a);
    side(4, d.s_b0, d.s_b);
    return d;
}

}  // namespace detail

/// Extremum of sum c(mu, nu) s_{a mu} s_{b nu} over |s_k| <= s_k0 <= 1.
/// Convexity makes this the extremum over all separable states.
inline SeparableBound separable_bound(const WitnessSpec &w, BoundMode mode, const SeparableBoundOptions &opt = {}) {
    const double sign = mode == BoundMode::min ? 1.0 : -1.0;
    auto objective = [&](const std::vector<double> &x) { return sign * witness_value(w, detail::decode_product(x)); };

    std::vector<std::pair<double, ProductStokesData>> candidates;

    // Boundary cases: each side at the origin or at a unit axis vector with s0 = 1.
    std::vector<std::pair<double, Vec3>> corners{{0.0, Vec3::Zero()}};
    for (int k = 0; k < 3; ++k)
        for (double s : {1.0, -1.0}) corners.push_back({1.0, s * Vec3::Unit(k)});
    for (const auto &[a0, av] : corners) {
        for (const auto &[b0, bv] : corners) {
            ProductStokesData d{a0, av, b0, bv};
            candidates.push_back({sign * witness_value(w, d), d});
        }
    }
    double best = std::numeric_limits<double>::infinity();
    ProductStokesData best_data;
    for (const auto &[v, d] : candidates) {
        if (v < best) {
            best = v;
            best_data = d;
        }
    }

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::acos(-1.0));
    std::vector<double> restart_values;
    restart_values.reserve(static_cast<std::size_t>(opt.restarts));
    for (int r = 0; r < opt.restarts; ++r) {
        std::vector<double> x0(8);
        for (auto &xi : x0) xi = angle(rng);
        MinimizeResult res = nelder_mead(objective, x0, 0.5);
        res = nelder_mead(objective, res.x, 0.05);  // restart from the converged point
        restart_values.push_back(res.value);
        if (res.value < best) {
            best = res.value;
            best_data = detail::decode_product(res.x);
        }
    }
    int agree = 0;
    for (double v : restart_values)
        if (v <= best + opt.agreement_tol) ++agree;

    SeparableBound out;
    out.value = sign * best;
    out.agreeing_restarts = agree;
    out.low_confidence = agree < 2;
    out.extremizer = best_data;
    return out;
}

/// <W_QO> against the separable interval [B_min, B_max].
struct WitnessReport {
    double value = 0;
    SeparableBound lower;
    SeparableBound upper;
    bool violated = false;
};

template <StateLike State>
WitnessReport witness_report(const State &state, const WitnessSpec &w, const LossParams &loss = {},
                             const SeparableBoundOptions &opt = {}) {
    WitnessReport r;
    r.value = map_witness(w)(state, loss);
    r.lower = separable_bound(w, BoundMode::min, opt);
    r.upper = separable_bound(w, BoundMode::max, opt);
    r.violated = r.value < r.lower.value - kViolationTolerance || r.value > r.upper.value + kViolationTolerance;
    return r;
}

}  // namespace stokeslab
