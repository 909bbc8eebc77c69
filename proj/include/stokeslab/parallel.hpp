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
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "stokeslab/error.hpp"

namespace stokeslab {

/// STOKESLAB_JOBS if set, else the hardware concurrency (at least 1).
inline int default_jobs() {
    if (const char *env = std::getenv("STOKESLAB_JOBS"); env != nullptr && *env != '\0') {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1 || v > 4096) throw InvalidArgument("STOKESLAB_JOBS must be a positive integer");
        return static_cast<int>(v);
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// out[i] = fn(i) for i in [0, count), evaluated on up to `jobs` threads.
/// The result order follows the index regardless of completion order. The
/// first exception thrown by any task is rethrown after all threads join.
template <class Fn>
auto parallel_map(std::size_t count, int jobs, Fn &&fn) -> std::vector<std::invoke_result_t<Fn &, std::size_t>> {
    using T = std::invoke_result_t<Fn &, std::size_t>;
    std::vector<T> out(count);
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count);
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) threads.emplace_back(work);
    work();
    for (auto &t : threads) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace stokeslab
