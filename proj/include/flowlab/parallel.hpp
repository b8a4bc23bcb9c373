#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace flowlab
{
    /// Runs fn(i) for i in [0, count). Each worker owns a contiguous block, so
    /// results written to slot i do not depend on the worker count.
    template <typename Fn>
    void parallelFor(std::size_t count, int workers, Fn&& fn)
    {
        const std::size_t nthreads =
            std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), std::max<std::size_t>(count, 1));
        if (nthreads <= 1)
        {
            for (std::size_t i = 0; i < count; ++i) fn(i);
            return;
        }

        std::exception_ptr failure;
        std::mutex failureMutex;
        std::vector<std::jthread> pool;
        pool.reserve(nthreads);
        const std::size_t block = (count + nthreads - 1) / nthreads;
        for (std::size_t w = 0; w < nthreads; ++w)
        {
            const std::size_t begin = w * block;
            const std::size_t end = std::min(count, begin + block);
            pool.emplace_back([&, begin, end] {
                try
                {
                    for (std::size_t i = begin; i < end; ++i) fn(i);
                }
                catch (...)
                {
                    std::lock_guard lock(failureMutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        pool.clear();
        if (failure) std::rethrow_exception(failure);
    }
} // namespace flowlab
