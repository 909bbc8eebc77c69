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

// EPR-type criteria for 2n-photon singlets and BSV under detector losses.

#include <cmath>
#include <optional>
#include <vector>

#include "stokeslab/criteria.hpp"
#include "stokeslab/detection.hpp"
#include "stokeslab/error.hpp"
#include "stokeslab/numeric.hpp"
#include "stokeslab/states.hpp"
#include "stokeslab/stokes.hpp"

namespace stokeslab {

/// Per-sector sums for the singlet psi_n behind lossy detectors. The old pair
/// uses Sigma/2 per side, one quarter of the criterion's own units; the new
/// pair is in criterion units.
struct LossyCriterionTerms {
    int n = 0;
    double lhs_old = 0;
    double rhs_old = 0;
    double lhs_new = 0;
    double rhs_new = 0;
};

namespace detail {

inline void check_sector(int n, double eta, int min_n) {
    if (n < min_n) throw InvalidArgument("sector order n must be >= " + std::to_string(min_n));
    LossParams{eta}.validate();
}

/// (j - k) / (j + k), 0 when nothing is registered.
inline double ratio(int j, int k) { return j + k == 0 ? 0.0 : static_cast<double>(j - k) / (j + k); }
inline double inverse(int j, int k) { return j + k == 0 ? 0.0 : 2.0 / (j + k); }

/// Neumaier summation; the quadruple sums add up to ~10^5 terms.
class CompensatedSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0;
    double comp_ = 0;
};

/// Visits every (i, j, k, l, m) with its probability weight (1/(n+1)) p p p p.
template <class F>
void for_each_lossy_run(int n, double eta, F &&f) {
    const BinomialTable binom(n, eta);
    const double w0 = 1.0 / (n + 1.0);
    for (int i = 0; i <= n; ++i) {
        const auto &ri = binom.row(i);
        const auto &rn = binom.row(n - i);
        for (int j = 0; j <= i; ++j)
            for (int m = 0; m <= i; ++m)
                for (int k = 0; k <= n - i; ++k)
                    for (int l = 0; l <= n - i; ++l) {
                        const double w = w0 * ri[static_cast<std::size_t>(j)] * ri[static_cast<std::size_t>(m)] *
                                         rn[static_cast<std::size_t>(k)] * rn[static_cast<std::size_t>(l)];
                        if (w != 0.0) f(w, j, k, l, m);
                    }
    }
}

}  // namespace detail

/// Old-criterion sums by direct quadruple summation.
inline LossyCriterionTerms lossy_terms_old(int n, double eta) {
    detail::check_sector(n, eta, 0);
    LossyCriterionTerms t;
    t.n = n;
    detail::CompensatedSum lhs, rhs;
    detail::for_each_lossy_run(n, eta, [&](double w, int j, int k, int l, int m) {
        const double d = 0.5 * (j - k + l - m);
        lhs.add(w * d * d);
        rhs.add(w * 0.5 * (j + k + l + m));
    });
    t.lhs_old = 3.0 * lhs.value();
    t.rhs_old = rhs.value();
    return t;
}

/// lhs_old = (3/2) n eta (1 - eta), rhs_old = eta n.
inline LossyCriterionTerms lossy_terms_old_closed(int n, double eta) {
    detail::check_sector(n, eta, 0);
    LossyCriterionTerms t;
    t.n = n;
    t.lhs_old = 1.5 * n * eta * (1.0 - eta);
    t.rhs_old = eta * n;
    return t;
}

/// New-criterion sums by direct quadruple summation, O(n^5). Reference only.
inline LossyCriterionTerms lossy_terms_new_naive(int n, double eta) {
    detail::check_sector(n, eta, 1);
    LossyCriterionTerms t;
    t.n = n;
    detail::CompensatedSum lhs, rhs;
    detail::for_each_lossy_run(n, eta, [&](double w, int j, int k, int l, int m) {
        const double d = detail::ratio(j, k) + detail::ratio(l, m);
        lhs.add(w * d * d);
        rhs.add(w * (detail::inverse(j, k) + detail::inverse(l, m)));
    });
    t.lhs_new = 3.0 * lhs.value();
    t.rhs_new = rhs.value();
    return t;
}

/// New-criterion sums with the square expanded, A^2 + 2AB + B^2, so that each
/// piece factorizes over the two beams. O(n^3).
inline LossyCriterionTerms lossy_terms_new(int n, double eta, ThinnedFeatureTable &table) {
    detail::check_sector(n, eta, 1);
    LossyCriterionTerms t;
    t.n = n;
    for (int i = 0; i <= n; ++i) {
        const BeamFeatures &fa = table(i, n - i);
        const BeamFeatures &fb = table(n - i, i);
        t.lhs_new += fa.s_sq + 2.0 * fa.s * fb.s + fb.s_sq;
        t.rhs_new += 2.0 * (fa.inv_n + fb.inv_n);
    }
    t.lhs_new *= 3.0 / (n + 1.0);
    t.rhs_new /= n + 1.0;
    return t;
}

inline LossyCriterionTerms lossy_terms_new(int n, double eta) {
    detail::check_sector(n, eta, 1);
    ThinnedFeatureTable table(n, eta);
    return lossy_terms_new(n, eta, table);
}

struct CriticalEta {
    int n = 0;
    double eta = 0;
    /// More than one sign change seen on the scan grid; eta is the smallest root.
    bool multiple_roots = false;
};

inline constexpr double kCriticalEtaLo = 1e-6;
inline constexpr double kCriticalEtaHi = 1.0 - 1e-6;

namespace detail {

template <class F>
CriticalEta smallest_root(F &&f, double x_tol) {
    constexpr int kScan = 16;
    std::vector<double> xs(kScan + 1), fs(kScan + 1);
    for (int s = 0; s <= kScan; ++s) {
        xs[static_cast<std::size_t>(s)] = kCriticalEtaLo + (kCriticalEtaHi - kCriticalEtaLo) * s / kScan;
        fs[static_cast<std::size_t>(s)] = f(xs[static_cast<std::size_t>(s)]);
    }
    int changes = 0;
    std::optional<std::size_t> first;
    for (std::size_t s = 0; s < kScan; ++s) {
        if ((fs[s] > 0.0) != (fs[s + 1] > 0.0)) {
            ++changes;
            if (!first) first = s;
        }
    }
    CriticalEta out;
    if (!first) {
        // Raises BracketingError carrying the endpoint values.
        out.eta = bisect(f, kCriticalEtaLo, kCriticalEtaHi, x_tol);
        return out;
    }
    out.eta = bisect(f, xs[*first], xs[*first + 1], x_tol);
    out.multiple_roots = changes > 1;
    return out;
}

}  // namespace detail

/// Efficiency at which psi_n stops violating the new criterion.
inline CriticalEta critical_eta(int n, double x_tol = 1e-12) {
    if (n < 1) throw InvalidArgument("critical_eta requires n >= 1");
    CriticalEta out = detail::smallest_root(
        [n](double eta) {
            const LossyCriterionTerms t = lossy_terms_new(n, eta);
            return t.lhs_new - t.rhs_new;
        },
        x_tol);
    out.n = n;
    return out;
}

/// 1 - (2 / (n + 2))^(1/n)
inline double critical_eta_fit(int n) { return 1.0 - std::pow(2.0 / (n + 2.0), 1.0 / n); }

struct BsvLossyResult {
    CriterionResult result;
    int n_max = 0;
};

/// BSV under loss as the weighted sum of its singlet sectors.
/// Supports CriterionId::epr_old and CriterionId::epr_new.
inline BsvLossyResult bsv_lossy_criterion(CriterionId id, double gamma, double eta, std::optional<int> n_max = {},
                                          double tail_tol = 1e-12) {
    if (id != CriterionId::epr_old && id != CriterionId::epr_new)
        throw InvalidArgument(std::string("bsv_lossy_criterion: unsupported criterion ") + to_string(id));
    LossParams{eta}.validate();
    const int order = resolve_n_max(BsvParams{gamma, n_max, tail_tol});
    double lhs = 0, rhs = 0;
    if (id == CriterionId::epr_old) {
        for (int n = 1; n <= order; ++n) {
            const LossyCriterionTerms t = lossy_terms_old_closed(n, eta);
            const double w = bsv_weight(n, gamma);
            lhs += 4.0 * w * t.lhs_old;
            rhs += 4.0 * w * t.rhs_old;
        }
        return {CriterionResult::make(id, Flavor::traditional, BoundDirection::lower, lhs, rhs), order};
    }
    ThinnedFeatureTable table(order, eta);
    for (int n = 1; n <= order; ++n) {
        const double w = bsv_weight(n, gamma);
        if (w == 0.0) continue;
        const LossyCriterionTerms t = lossy_terms_new(n, eta, table);
        lhs += w * t.lhs_new;
        rhs += w * t.rhs_new;
    }
    return {CriterionResult::make(id, Flavor::normalized, BoundDirection::lower, lhs, rhs), order};
}

inline double bsv_lossy_margin(CriterionId id, double gamma, double eta, std::optional<int> n_max = {},
                               double tail_tol = 1e-12) {
    return bsv_lossy_criterion(id, gamma, eta, n_max, tail_tol).result.margin;
}

/// Efficiency at which BSV(gamma) stops violating the new criterion.
inline CriticalEta bsv_critical_eta(double gamma, std::optional<int> n_max = {}, double tail_tol = 1e-12,
                                    double x_tol = 1e-10) {
    if (!(gamma > 0.0)) throw InvalidArgument("bsv_critical_eta requires gamma > 0");
    return detail::smallest_root(
        [&](double eta) { return bsv_lossy_margin(CriterionId::epr_new, gamma, eta, n_max, tail_tol); }, x_tol);
}

}  // namespace stokeslab
