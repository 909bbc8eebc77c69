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

// Singlets, the four-mode bright squeezed vacuum (BSV), product states and
// the closed-form BSV correlation tensors.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "stokeslab/error.hpp"
#include "stokeslab/fock.hpp"

namespace stokeslab {

/// |psi_-^(n)> = (n+1)^{-1/2} sum_m (-1)^m |n-m, m, m, n-m>.
inline StateVector singlet(int n) {
    if (n < 0) throw InvalidArgument("singlet order must be >= 0");
    const double amp = 1.0 / std::sqrt(n + 1.0);
    std::vector<Term> terms;
    terms.reserve(static_cast<std::size_t>(n) + 1);
    for (int m = 0; m <= n; ++m) terms.push_back({Occupation{n - m, m, m, n - m}, (m % 2 == 0 ? amp : -amp)});
    return StateVector::from_terms(std::move(terms));
}

namespace detail {

/// log cosh without overflow.
inline double log_cosh(double x) {
    x = std::abs(x);
    return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
}

/// sech^2(gamma) = 1 - tanh^2(gamma), computed without cancellation.
inline double sech2(double gamma) { return std::exp(-2.0 * log_cosh(gamma)); }

}  // namespace detail

/// Squared expansion coefficient |C(n, gamma)|^2 = (n+1) tanh^{2n}(gamma) / cosh^4(gamma).
inline double bsv_weight(int n, double gamma) {
    if (n < 0) return 0.0;
    const double s2 = detail::sech2(gamma);
    if (n == 0) return s2 * s2;
    const double t = std::tanh(std::abs(gamma));
    if (t == 0.0) return 0.0;
    return std::exp(std::log(n + 1.0) + 2.0 * n * std::log(t) + 2.0 * std::log(s2));
}

/// 1 - sum_{n <= n_max} |C(n, gamma)|^2 = x^{n_max+1} (1 + (n_max+1)(1-x)),
/// x = tanh^2(gamma), from sum_n (n+1) x^n = (1-x)^{-2}.
inline double bsv_tail_mass(int n_max, double gamma) {
    if (n_max < 0) return 1.0;
    const double t = std::tanh(std::abs(gamma));
    if (t == 0.0) return 0.0;
    const double log_x = 2.0 * std::log(t);
    return std::exp((n_max + 1.0) * log_x) * (1.0 + (n_max + 1.0) * detail::sech2(gamma));
}

/// Smallest n_max whose truncated tail mass is <= tail_tol.
inline int bsv_required_n_max(double gamma, double tail_tol) {
    if (!(tail_tol > 0.0)) throw InvalidArgument("tail_tol must be > 0");
    if (bsv_tail_mass(0, gamma) <= tail_tol) return 0;
    int hi = 1;
    while (bsv_tail_mass(hi, gamma) > tail_tol) {
        if (hi > (1 << 29)) throw TruncationError("BSV gain too large for any representable truncation", hi);
        hi *= 2;
    }
    int lo = hi / 2;  // tail(lo) > tol
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        (bsv_tail_mass(mid, gamma) > tail_tol ? lo : hi) = mid;
    }
    return hi;
}

struct BsvParams {
    double gamma = 0.0;
    /// Truncation order. Unset: chosen as the smallest order meeting tail_tol.
    std::optional<int> n_max;
    double tail_tol = 1e-12;
};

inline int resolve_n_max(const BsvParams &params) {
    if (!(params.gamma >= 0.0) || !std::isfinite(params.gamma)) throw InvalidArgument("BSV gamma must be >= 0");
    const int required = bsv_required_n_max(params.gamma, params.tail_tol);
    if (!params.n_max) return required;
    if (*params.n_max < 0) throw InvalidArgument("BSV n_max must be >= 0");
    if (bsv_tail_mass(*params.n_max, params.gamma) > params.tail_tol) {
        throw TruncationError("BSV truncation n_max=" + std::to_string(*params.n_max) +
                                  " leaves tail mass above tail_tol; requires n_max >= " + std::to_string(required),
                              required);
    }
    return *params.n_max;
}

/// Truncated BSV: sum_{n <= n_max} C(n, gamma) |psi_-^(n)>, not renormalized;
/// the discarded mass is recorded as tail_mass().
inline StateVector bsv(const BsvParams &params) {
    const int n_max = resolve_n_max(params);
    std::vector<Term> terms;
    terms.reserve(static_cast<std::size_t>(n_max + 1) * static_cast<std::size_t>(n_max + 2) / 2);
    for (int n = 0; n <= n_max; ++n) {
        const double c = std::sqrt(bsv_weight(n, params.gamma));
        if (c == 0.0) continue;
        const double amp = c / std::sqrt(n + 1.0);
        for (int m = 0; m <= n; ++m) terms.push_back({Occupation{n - m, m, m, n - m}, (m % 2 == 0 ? amp : -amp)});
    }
    StateVector out = StateVector::from_terms(std::move(terms));
    out.set_truncation(n_max, bsv_tail_mass(n_max, params.gamma));
    return out;
}

inline StateVector product_state(const BeamState &beam_a, const BeamState &beam_b) {
    for (const auto *s : {&beam_a, &beam_b}) {
        if (std::abs(s->squared_norm() - 1.0) > StateVector::kDefaultNormTolerance)
            throw InvalidArgument("product_state: beam factor is not normalized");
    }
    std::vector<Term> terms;
    terms.reserve(beam_a.terms().size() * beam_b.terms().size());
    for (const auto &ta : beam_a.terms())
        for (const auto &tb : beam_b.terms()) terms.push_back({Occupation{ta.h, ta.v, tb.h, tb.v}, ta.amp * tb.amp});
    return StateVector::from_terms(std::move(terms));
}

/// Diagonal element of the isotropic BSV correlation tensors:
/// t_prime = <S_i^a S_i^b> / <S_0^a S_0^b>, t = <S_i^a S_i^b>,
/// theta = <Sigma_i^a Sigma_i^b> / <N^a N^b>.
struct TensorTriple {
    double t_prime = 0.0;
    double t = 0.0;
    double theta = 0.0;
};

/// Below this gain the closed form for t_prime loses digits to cancellation;
/// a series in x = tanh^2(gamma) is used instead.
inline constexpr double kSmallGainSwitch = 1e-3;

inline TensorTriple closed_form_tensors(double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("closed_form_tensors: gamma must be >= 0");
    TensorTriple out;
    const double s2 = detail::sech2(gamma);  // 1 / cosh^2
    const double s4 = s2 * s2;
    const double ln_sech2 = -2.0 * detail::log_cosh(gamma);  // ln(1 / cosh^2)

    out.theta = 1.0 / (2.0 * s2 - 3.0);  // 2 cosh^2 / (1 - 3 cosh 2g), divided through by cosh^2
    out.t = ((2.0 * ln_sech2 + 2.0) * s4 - 2.0 * s2 + s4 - 1.0) / 3.0;  // cosh 2g / cosh^4 = 2 sech^2 - sech^4

    if (gamma < kSmallGainSwitch) {
        const double x = std::tanh(gamma) * std::tanh(gamma);
        const double series = 2.0 + 2.0 * x + 20.0 * x * x / 9.0;
        out.t_prime = -(1.0 - x) * (1.0 - x) / (2.0 - x) * series;
        out.t = out.t_prime * x * (2.0 - x);
    } else if (gamma <= 20.0) {
        const double num = 16.0 * ln_sech2 - std::cosh(4.0 * gamma) - 12.0 * std::cosh(2.0 * gamma) + 13.0;
        const double sh = std::sinh(gamma);
        const double den = 12.0 * sh * sh * (3.0 + std::cosh(2.0 * gamma));
        out.t_prime = num / den;
    } else {
        // Same expression with numerator and denominator scaled by exp(-4 gamma).
        const double e2 = std::exp(-2.0 * gamma);
        const double e4 = e2 * e2;
        const double num = 16.0 * ln_sech2 * e4 - 0.5 * (1.0 + e4 * e4) - 6.0 * (e2 + e4 * e2) + 13.0 * e4;
        const double den = 3.0 * (1.0 - e2) * (1.0 - e2) * (3.0 * e2 + 0.5 * (1.0 + e4));
        out.t_prime = num / den;
    }
    return out;
}

}  // namespace stokeslab
