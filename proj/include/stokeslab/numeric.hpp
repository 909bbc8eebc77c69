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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "stokeslab/error.hpp"

namespace stokeslab {

/// Root of f in [lo, hi] by bisection, to bracket width x_tol. The bracket
/// must show a sign change; an exact zero at an endpoint is returned as is.
template <class F>
double bisect(F &&f, double lo, double hi, double x_tol = 1e-9, int max_iter = 200) {
    if (!(lo < hi)) throw InvalidArgument("bisect: empty bracket");
    double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if (!std::isfinite(f_lo) || !std::isfinite(f_hi) || (f_lo > 0.0) == (f_hi > 0.0)) {
        throw BracketingError("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                  "]: f(lo)=" + std::to_string(f_lo) + " f(hi)=" + std::to_string(f_hi),
                              f_lo, f_hi);
    }
    for (int it = 0; it < max_iter && hi - lo > x_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct MinimizeResult {
    std::vector<double> x;
    double value = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Unconstrained Nelder-Mead simplex minimization.
template <class F>
MinimizeResult nelder_mead(F &&f, std::vector<double> x0, double step, double f_tol = 1e-15, int max_evals = 20000) {
    const std::size_t dim = x0.size();
    std::vector<std::vector<double>> simplex(dim + 1, x0);
    for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += step;
    std::vector<double> values(dim + 1);
    int evals = 0;
    auto eval = [&](const std::vector<double> &x) {
        ++evals;
        return f(x);
    };
    for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), trial(dim), trial2(dim);
    bool converged = false;
    while (evals < max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[dim - 1];
        if (std::abs(values[worst] - values[best]) <= f_tol * (1.0 + std::abs(values[best]))) {
            converged = true;
            break;
        }
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k] / static_cast<double>(dim);
        }
        auto along = [&](double t, std::vector<double> &out) {
            for (std::size_t k = 0; k < dim; ++k) out[k] = centroid[k] + t * (simplex[worst][k] - centroid[k]);
        };
        along(-1.0, trial);
        const double f_r = eval(trial);
        if (f_r < values[best]) {
            along(-2.0, trial2);
            const double f_e = eval(trial2);
            if (f_e < f_r) {
                simplex[worst] = trial2;
                values[worst] = f_e;
            } else {
                simplex[worst] = trial;
                values[worst] = f_r;
            }
        } else if (f_r < values[second]) {
            simplex[worst] = trial;
            values[worst] = f_r;
        } else {
            const bool outside = f_r < values[worst];
            along(outside ? -0.5 : 0.5, trial2);
            const double f_c = eval(trial2);
            if (f_c < (outside ? f_r : values[worst])) {
                simplex[worst] = trial2;
                values[worst] = f_c;
            } else {
                for (std::size_t i = 0; i <= dim; ++i) {
                    if (i == best) continue;
                    for (std::size_t k = 0; k < dim; ++k)
                        simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
                    values[i] = eval(simplex[i]);
                }
            }
        }
    }
    const auto it = std::min_element(values.begin(), values.end());
    const std::size_t b = static_cast<std::size_t>(it - values.begin());
    return MinimizeResult{simplex[b], values[b], evals, converged};
}

}  // namespace stokeslab
