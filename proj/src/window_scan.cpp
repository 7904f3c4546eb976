#include "ebb/window_scan.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ebb::kernels {

std::vector<double> sliding_range_serial(std::span<const float> x, std::size_t w) {
    const std::size_t n = x.size();
    if (w == 0 || w > n) return {};
    std::vector<double> out(n - w + 1);
    std::deque<std::size_t> hi;  // indices with decreasing values
    std::deque<std::size_t> lo;  // indices with increasing values
    for (std::size_t i = 0; i < n; ++i) {
        while (!hi.empty() && x[hi.back()] <= x[i]) hi.pop_back();
        hi.push_back(i);
        while (!lo.empty() && x[lo.back()] >= x[i]) lo.pop_back();
        lo.push_back(i);
        if (i + 1 < w) continue;
        const std::size_t s = i + 1 - w;
        while (hi.front() < s) hi.pop_front();
        while (lo.front() < s) lo.pop_front();
        out[s] = static_cast<double>(x[hi.front()]) - static_cast<double>(x[lo.front()]);
    }
    return out;
}

std::vector<double> sliding_range_parallel(std::span<const float> x, std::size_t w) {
    const std::size_t n = x.size();
    if (w == 0 || w > n) return {};

    std::vector<float> pre_max(n), pre_min(n), suf_max(n), suf_min(n);
    const auto blocks = static_cast<std::int64_t>((n + w - 1) / w);

#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < blocks; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * w;
        const std::size_t hi = std::min(n, lo + w);
        pre_max[lo] = pre_min[lo] = x[lo];
        for (std::size_t i = lo + 1; i < hi; ++i) {
            pre_max[i] = std::max(pre_max[i - 1], x[i]);
            pre_min[i] = std::min(pre_min[i - 1], x[i]);
        }
        suf_max[hi - 1] = suf_min[hi - 1] = x[hi - 1];
        for (std::size_t i = hi - 1; i-- > lo;) {
            suf_max[i] = std::max(suf_max[i + 1], x[i]);
            suf_min[i] = std::min(suf_min[i + 1], x[i]);
        }
    }

    const auto starts = static_cast<std::int64_t>(n - w + 1);
    std::vector<double> out(static_cast<std::size_t>(starts));
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < starts; ++s) {
        const auto i = static_cast<std::size_t>(s);
        const std::size_t e = i + w - 1;
        const float mx = std::max(suf_max[i], pre_max[e]);
        const float mn = std::min(suf_min[i], pre_min[e]);
        out[i] = static_cast<double>(mx) - static_cast<double>(mn);
    }
    return out;
}

std::vector<double> sliding_range(std::span<const float> x, std::size_t w) {
    constexpr std::size_t kParallelThreshold = 1 << 14;
    return x.size() >= kParallelThreshold ? sliding_range_parallel(x, w)
                                          : sliding_range_serial(x, w);
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace ebb::kernels
