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

// Monte Carlo simulation of the run-by-run measurement: draw an outcome from
// the rotated state, thin each detector binomially, record the counts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "stokeslab/detection.hpp"
#include "stokeslab/error.hpp"
#include "stokeslab/fock.hpp"
#include "stokeslab/parallel.hpp"
#include "stokeslab/stokes.hpp"

namespace stokeslab {

/// Registered counts of one run.
struct RunOutcome {
    int a_plus = 0, a_minus = 0, b_plus = 0, b_minus = 0;

    int n_a() const { return a_plus + a_minus; }
    int n_b() const { return b_plus + b_minus; }
    double s_a() const { return n_a() == 0 ? 0.0 : static_cast<double>(a_plus - a_minus) / n_a(); }
    double s_b() const { return n_b() == 0 ? 0.0 : static_cast<double>(b_plus - b_minus) / n_b(); }
    double s0_a() const { return n_a() > 0 ? 1.0 : 0.0; }
    double s0_b() const { return n_b() > 0 ? 1.0 : 0.0; }
    double sigma_a() const { return a_plus - a_minus; }
    double sigma_b() const { return b_plus - b_minus; }
};

struct SettingsPair {
    BasisSetting a;
    BasisSetting b;
};

struct RunBatch {
    std::vector<RunOutcome> runs;
    std::uint64_t seed = 0;
    SettingsPair settings;
    double eta = 1.0;
};

inline constexpr std::size_t kSampleBatchSize = 4096;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double uniform53(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline int thin(int n, double eta, std::mt19937_64 &rng) {
    if (eta == 1.0 || n == 0) return n;
    int kept = 0;
    for (int k = 0; k < n; ++k) kept += uniform53(rng) < eta ? 1 : 0;
    return kept;
}

}  // namespace detail

/// Cumulative outcome table of a state measured with a settings pair.
class OutcomeTable {
  public:
    OutcomeTable(const StateVector &state, const SettingsPair &settings) {
        require_normalized(state, "sample_runs");
        ModeMixer mixer_a(settings.a.unitary());
        ModeMixer mixer_b(settings.b.unitary());
        double acc = 0;
        detail::for_each_rotated_block(state, settings.a.is_identity() ? nullptr : &mixer_a,
                                       settings.b.is_identity() ? nullptr : &mixer_b,
                                       [&](const SectorKey &key, const Eigen::MatrixXcd &block) {
                                           for (int q = 0; q <= key.n_b; ++q) {
                                               for (int p = 0; p <= key.n_a; ++p) {
                                                   const double prob = std::norm(block(p, q));
                                                   if (prob == 0.0) continue;
                                                   acc += prob;
                                                   outcomes_.push_back({p, key.n_a - p, q, key.n_b - q});
                                                   cdf_.push_back(acc);
                                               }
                                           }
                                       }, false);
        if (outcomes_.empty()) throw InvalidArgument("sample_runs: state has no support");
        for (double &c : cdf_) c /= acc;  // truncated states carry norm 1 - tail
        cdf_.back() = 1.0;
    }

    const RunOutcome &draw(double u) const {
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return outcomes_[std::min(static_cast<std::size_t>(it - cdf_.begin()), outcomes_.size() - 1)];
    }

  private:
    std::vector<RunOutcome> outcomes_;
    std::vector<double> cdf_;
};

/// Deterministic for a given seed, independent of `jobs`.
inline RunBatch sample_runs(const StateVector &state, const SettingsPair &settings, const LossParams &loss,
                            std::size_t shots, std::uint64_t seed, int jobs = 1) {
    if (shots < 1) throw InvalidArgument("sample_runs requires shots >= 1");
    loss.validate();
    const OutcomeTable table(state, settings);
    const std::size_t batches = (shots + kSampleBatchSize - 1) / kSampleBatchSize;
    auto parts = parallel_map(batches, jobs, [&](std::size_t b) {
        std::mt19937_64 rng(detail::splitmix64(seed ^ detail::splitmix64(b)));
        const std::size_t count = std::min(kSampleBatchSize, shots - b * kSampleBatchSize);
        std::vector<RunOutcome> runs(count);
        for (auto &r : runs) {
            const RunOutcome &o = table.draw(detail::uniform53(rng));
            r.a_plus = detail::thin(o.a_plus, loss.eta, rng);
            r.a_minus = detail::thin(o.a_minus, loss.eta, rng);
            r.b_plus = detail::thin(o.b_plus, loss.eta, rng);
            r.b_minus = detail::thin(o.b_minus, loss.eta, rng);
        }
        return runs;
    });
    RunBatch out;
    out.seed = seed;
    out.settings = settings;
    out.eta = loss.eta;
    out.runs.reserve(shots);
    for (auto &p : parts) out.runs.insert(out.runs.end(), p.begin(), p.end());
    return out;
}

/// Per-run quantities whose means are the correlators.
enum class RunStatistic {
    s_a, s_b, s0_a, s0_b, s_a_s_b, s_a_s0_b, s0_a_s_b, s0_a_s0_b,
    sigma_a, sigma_b, n_a, n_b, sigma_a_sigma_b, sigma_a_n_b, n_a_sigma_b, n_a_n_b
};

inline constexpr RunStatistic kAllRunStatistics[] = {
    RunStatistic::s_a,       RunStatistic::s_b,          RunStatistic::s0_a,        RunStatistic::s0_b,
    RunStatistic::s_a_s_b,   RunStatistic::s_a_s0_b,     RunStatistic::s0_a_s_b,    RunStatistic::s0_a_s0_b,
    RunStatistic::sigma_a,   RunStatistic::sigma_b,      RunStatistic::n_a,         RunStatistic::n_b,
    RunStatistic::sigma_a_sigma_b, RunStatistic::sigma_a_n_b, RunStatistic::n_a_sigma_b, RunStatistic::n_a_n_b};

inline const char *to_string(RunStatistic s) {
    switch (s) {
        case RunStatistic::s_a: return "S_a";
        case RunStatistic::s_b: return "S_b";
        case RunStatistic::s0_a: return "S0_a";
        case RunStatistic::s0_b: return "S0_b";
        case RunStatistic::s_a_s_b: return "S_a*S_b";
        case RunStatistic::s_a_s0_b: return "S_a*S0_b";
        case RunStatistic::s0_a_s_b: return "S0_a*S_b";
        case RunStatistic::s0_a_s0_b: return "S0_a*S0_b";
        case RunStatistic::sigma_a: return "Sigma_a";
        case RunStatistic::sigma_b: return "Sigma_b";
        case RunStatistic::n_a: return "N_a";
        case RunStatistic::n_b: return "N_b";
        case RunStatistic::sigma_a_sigma_b: return "Sigma_a*Sigma_b";
        case RunStatistic::sigma_a_n_b: return "Sigma_a*N_b";
        case RunStatistic::n_a_sigma_b: return "N_a*Sigma_b";
        case RunStatistic::n_a_n_b: return "N_a*N_b";
    }
    return "?";
}

inline double run_value(const RunOutcome &r, RunStatistic s) {
    switch (s) {
        case RunStatistic::s_a: return r.s_a();
        case RunStatistic::s_b: return r.s_b();
        case RunStatistic::s0_a: return r.s0_a();
        case RunStatistic::s0_b: return r.s0_b();
        case RunStatistic::s_a_s_b: return r.s_a() * r.s_b();
        case RunStatistic::s_a_s0_b: return r.s_a() * r.s0_b();
        case RunStatistic::s0_a_s_b: return r.s0_a() * r.s_b();
        case RunStatistic::s0_a_s0_b: return r.s0_a() * r.s0_b();
        case RunStatistic::sigma_a: return r.sigma_a();
        case RunStatistic::sigma_b: return r.sigma_b();
        case RunStatistic::n_a: return r.n_a();
        case RunStatistic::n_b: return r.n_b();
        case RunStatistic::sigma_a_sigma_b: return r.sigma_a() * r.sigma_b();
        case RunStatistic::sigma_a_n_b: return r.sigma_a() * r.n_b();
        case RunStatistic::n_a_sigma_b: return static_cast<double>(r.n_a()) * r.sigma_b();
        case RunStatistic::n_a_n_b: return static_cast<double>(r.n_a()) * r.n_b();
    }
    return 0.0;
}

/// Exact expectation of a statistic, normalized by the state's norm.
inline double exact_statistic(const JointMoments &m, RunStatistic s) {
    double v = 0;
    switch (s) {
        case RunStatistic::s_a: v = m.s_a; break;
        case RunStatistic::s_b: v = m.s_b; break;
        case RunStatistic::s0_a: v = m.s0_a; break;
        case RunStatistic::s0_b: v = m.s0_b; break;
        case RunStatistic::s_a_s_b: v = m.s_a_s_b; break;
        case RunStatistic::s_a_s0_b: v = m.s_a_s0_b; break;
        case RunStatistic::s0_a_s_b: v = m.s0_a_s_b; break;
        case RunStatistic::s0_a_s0_b: v = m.s0_a_s0_b; break;
        case RunStatistic::sigma_a: v = m.sigma_a; break;
        case RunStatistic::sigma_b: v = m.sigma_b; break;
        case RunStatistic::n_a: v = m.n_a; break;
        case RunStatistic::n_b: v = m.n_b; break;
        case RunStatistic::sigma_a_sigma_b: v = m.sigma_a_sigma_b; break;
        case RunStatistic::sigma_a_n_b: v = m.sigma_a_n_b; break;
        case RunStatistic::n_a_sigma_b: v = m.n_a_sigma_b; break;
        case RunStatistic::n_a_n_b: v = m.n_a_n_b; break;
    }
    return v / m.norm;
}

struct EstimatorReport {
    double estimate = 0;
    double std_error = 0;
    std::size_t shots = 0;
    std::uint64_t seed = 0;
};

/// Sample mean of the per-run statistic; standard error = sample std / sqrt(shots).
inline EstimatorReport estimate_correlator(const RunBatch &batch, RunStatistic stat) {
    const std::size_t n = batch.runs.size();
    if (n < 2) throw InvalidArgument("estimate_correlator requires at least 2 runs");
    double mean = 0, m2 = 0;
    std::size_t k = 0;
    for (const auto &r : batch.runs) {
        const double x = run_value(r, stat);
        ++k;
        const double d = x - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (x - mean);
    }
    const double var = m2 / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n)), n, batch.seed};
}

/// G = <Sigma_a Sigma_b> / (<N_a><N_b>) with a delta-method standard error.
inline EstimatorReport estimate_intensity_correlation(const RunBatch &batch) {
    const std::size_t n = batch.runs.size();
    if (n < 2) throw InvalidArgument("estimate_intensity_correlation requires at least 2 runs");
    double mx = 0, my = 0, mz = 0;
    for (const auto &r : batch.runs) {
        mx += r.sigma_a() * r.sigma_b();
        my += r.n_a();
        mz += r.n_b();
    }
    const double inv = 1.0 / static_cast<double>(n);
    mx *= inv;
    my *= inv;
    mz *= inv;
    if (my == 0.0 || mz == 0.0) throw UndefinedResult("intensity correlation undefined: a beam registered no photons");
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto &r : batch.runs) {
        const Eigen::Vector3d d(r.sigma_a() * r.sigma_b() - mx, r.n_a() - my, r.n_b() - mz);
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(n - 1);
    const double g = mx / (my * mz);
    const Eigen::Vector3d grad(1.0 / (my * mz), -g / my, -g / mz);
    const double var = grad.dot(cov * grad) / static_cast<double>(n);
    return {g, std::sqrt(std::max(0.0, var)), n, batch.seed};
}

}  // namespace stokeslab
