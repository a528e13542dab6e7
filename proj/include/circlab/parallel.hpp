// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace circlab
{

/*!
 * Call fn(i) for i in [0, count) on up to `workers` threads that pull
 * indices from a shared counter. The first exception thrown is rethrown
 * after all threads finish; remaining indices are skipped.
 */
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn)
{
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        for (;;)
        {
            std::size_t const i = next.fetch_add(1);
            if (i >= count || failed.load())
                return;
            try
            {
                fn(i);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                failed = true;
            }
        }
    };

    auto const threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads <= 1 || count <= 1)
    {
        work();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(threads, count); ++w)
            pool.emplace_back(work);
    }
    if (error)
        std::rethrow_exception(error);
}

}  // namespace circlab
