#include "nfmimo/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace nfmimo
{
    std::size_t thread_count()
    {
        if (const char *env = std::getenv("NFMIMO_THREADS"))
        {
            try
            {
                const long n = std::stol(env);
                if (n > 0)
                    return static_cast<std::size_t>(n);
            }
            catch (const std::exception &)
            {
            }
        }
        return std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }

    void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn)
    {
        const std::size_t workers = std::min(thread_count(), n);
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }

        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
        {
            const std::size_t begin = n * w / workers, end = n * (w + 1) / workers;
            pool.emplace_back([&, begin, end] {
                try
                {
                    for (std::size_t i = begin; i < end; ++i)
                        fn(i);
                }
                catch (...)
                {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            });
        }
        pool.clear();
        if (failure)
            std::rethrow_exception(failure);
    }
}
