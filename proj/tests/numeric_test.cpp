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
#include <cstdlib>
#include <stdexcept>

#include "stokeslab/numeric.hpp"
#include "stokeslab/parallel.hpp"

namespace {

using namespace stokeslab;

TEST(Bisect, FindsRoot) {
    const double r = bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14);
    EXPECT_NEAR(r, std::sqrt(2.0), 1e-13);
    EXPECT_EQ(bisect([](double x) { return x; }, 0.0, 1.0), 0.0);
}

TEST(Bisect, NoSignChangeThrows) {
    try {
        bisect([](double x) { return 1.0 + x * x; }, -1.0, 1.0);
        FAIL() << "expected BracketingError";
    } catch (const BracketingError &e) {
        EXPECT_EQ(e.f_lo(), 2.0);
        EXPECT_EQ(e.f_hi(), 2.0);
        EXPECT_EQ(std::string(e.kind()), "bracketing");
    }
    EXPECT_THROW(bisect([](double x) { return x; }, 1.0, 1.0), InvalidArgument);
    EXPECT_THROW(bisect([](double) { return std::nan(""); }, 0.0, 1.0), BracketingError);
}

TEST(NelderMead, Rosenbrock) {
    auto f = [](const std::vector<double> &x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const MinimizeResult r = nelder_mead(f, {-1.2, 1.0}, 0.5, 1e-20, 50000);
    EXPECT_NEAR(r.x[0], 1.0, 1e-5);
    EXPECT_NEAR(r.x[1], 1.0, 1e-5);
    EXPECT_LT(r.value, 1e-10);
}

TEST(NelderMead, Quadratic4d) {
    auto f = [](const std::vector<double> &x) {
        double s = 0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (i + 1.0) * std::pow(x[i] - 0.1 * i, 2);
        return s;
    };
    const MinimizeResult r = nelder_mead(f, {1, 1, 1, 1}, 0.3);
    EXPECT_TRUE(r.converged);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.x[i], 0.1 * i, 1e-5);
}

TEST(Parallel, PreservesOrder) {
    for (int jobs : {1, 2, 5}) {
        const auto out = parallel_map(100, jobs, [](std::size_t i) { return static_cast<int>(i * i); });
        ASSERT_EQ(out.size(), 100u);
        for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
    }
    EXPECT_TRUE(parallel_map(0, 4, [](std::size_t) { return 1; }).empty());
}

TEST(Parallel, RethrowsWorkerException) {
    auto fn = [](std::size_t i) -> int {
        if (i == 7) throw InvalidArgument("boom");
        return 0;
    };
    EXPECT_THROW(parallel_map(20, 3, fn), InvalidArgument);
    EXPECT_THROW(parallel_map(20, 1, fn), InvalidArgument);
}

TEST(Parallel, DefaultJobsFromEnvironment) {
    const char *old = std::getenv("STOKESLAB_JOBS");
    const std::string saved = old ? old : "";
    setenv("STOKESLAB_JOBS", "3", 1);
    EXPECT_EQ(default_jobs(), 3);
    setenv("STOKESLAB_JOBS", "zero", 1);
    EXPECT_THROW(default_jobs(), InvalidArgument);
    setenv("STOKESLAB_JOBS", "0", 1);
    EXPECT_THROW(default_jobs(), InvalidArgument);
    unsetenv("STOKESLAB_JOBS");
    EXPECT_GE(default_jobs(), 1);
    if (old) setenv("STOKESLAB_JOBS", saved.c_str(), 1);
}

}  // namespace
