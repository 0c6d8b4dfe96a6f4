#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace extcharts {

// Formal sums over F2 are kept as sorted, deduplicated vectors; adding twice
// cancels.  All element types compare with operator<.

template <typename T>
void sort_reduce_mod2(std::vector<T>& v)
{
    std::sort(v.begin(), v.end());
    std::vector<T> out;
    out.reserve(v.size());
    for (size_t i = 0; i < v.size();) {
        size_t j = i;
        while (j < v.size() && !(v[i] < v[j]))
            ++j;
        if ((j - i) & 1)
            out.push_back(v[i]);
        i = j;
    }
    v.swap(out);
}

template <typename T>
std::vector<T> add_mod2(const std::vector<T>& a, const std::vector<T>& b)
{
    std::vector<T> out;
    out.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

template <typename T>
void add_to_mod2(std::vector<T>& a, const std::vector<T>& b)
{
    a = add_mod2(a, b);
}

class ComputeError : public std::runtime_error {
public:
    explicit ComputeError(const std::string& what) : std::runtime_error(what) {}
};

// Global parallelism cap, set once by the CLI --threads flag.
inline int& thread_cap()
{
    static int cap = 0; /* 0 = hardware default */
    return cap;
}

inline int effective_threads()
{
    int cap = thread_cap();
    int hw = (int)std::thread::hardware_concurrency();
    if (hw <= 0)
        hw = 1;
    return cap > 0 ? std::min(cap, hw) : hw;
}

// Runs fn(i) for i in [0, n).  Tasks must be independent; results must not
// depend on scheduling order.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn)
{
    int nthreads = effective_threads();
    if (n <= 1 || nthreads <= 1) {
        for (size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    size_t k = std::min((size_t)nthreads, n);
    std::vector<std::exception_ptr> errors(k);
    for (size_t w = 0; w < k; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (;;) {
                    size_t i = next.fetch_add(1);
                    if (i >= n)
                        break;
                    fn(i);
                }
            }
            catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

}  // namespace extcharts
