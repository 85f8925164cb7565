///
/// \file parallel.hpp
///
/// Minimal static-partition parallel loop over independent work items.
///
#ifndef HEISLAB_PARALLEL_HPP
#define HEISLAB_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace heislab
{

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; the first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn)
{
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::exception_ptr first;
    std::mutex m;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers)
            {
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard lock(m);
                    if (!first)
                        first = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (first)
        std::rethrow_exception(first);
}

} // namespace heislab

#endif
