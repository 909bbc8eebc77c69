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

// Detector model: identical efficiency on all four detectors, each arriving
// photon registered independently with probability eta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "stokeslab/error.hpp"

namespace stokeslab {

struct LossParams {
    double eta = 1.0;

    bool lossless() const { return eta == 1.0; }
    void validate() const {
        if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("detector efficiency eta must lie in [0, 1]");
    }
};

/// Exact in 64-bit integers up to this n; log-gamma above.
inline constexpr int kExactBinomialMaxN = 60;

inline double binomial_coefficient(int n, int m) {
    if (m < 0 || m > n) return 0.0;
    if (n <= kExactBinomialMaxN) {
        m = std::min(m, n - m);
        std::uint64_t c = 1;
        for (int k = 0; k < m; ++k) c = c * static_cast<std::uint64_t>(n - k) / static_cast<std::uint64_t>(k + 1);
        return static_cast<double>(c);
    }
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0));
}

/// p(m | n, eta) = C(n, m) eta^m (1 - eta)^(n - m).
inline double binomial_prob(int m, int n, double eta) {
    if (n < 0 || m < 0 || m > n) throw InvalidArgument("binomial_prob requires 0 <= m <= n");
    LossParams{eta}.validate();
    if (eta == 0.0) return m == 0 ? 1.0 : 0.0;
    if (eta == 1.0) return m == n ? 1.0 : 0.0;
    if (n <= kExactBinomialMaxN)
        return binomial_coefficient(n, m) * std::pow(eta, m) * std::pow(1.0 - eta, n - m);
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0) + m * std::log(eta) +
                    (n - m) * std::log1p(-eta));
}

/// Rows p(. | n, eta) for n = 0..n_max.
class BinomialTable {
  public:
    BinomialTable(int n_max, double eta) : eta_(eta), rows_(static_cast<std::size_t>(n_max) + 1) {
        for (int n = 0; n <= n_max; ++n) {
            auto &row = rows_[static_cast<std::size_t>(n)];
            row.resize(static_cast<std::size_t>(n) + 1);
            for (int m = 0; m <= n; ++m) row[static_cast<std::size_t>(m)] = binomial_prob(m, n, eta);
        }
    }

    const std::vector<double> &row(int n) const { return rows_.at(static_cast<std::size_t>(n)); }
    double eta() const { return eta_; }
    int n_max() const { return static_cast<int>(rows_.size()) - 1; }

  private:
    double eta_;
    std::vector<std::vector<double>> rows_;
};

}  // namespace stokeslab
