#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ebb::kernels {

/// Sliding-window range: out[s] = max(x[s..s+w)) - min(x[s..s+w)) for every
/// s in [0, n-w]. Empty when w == 0 or w > n. Differences are taken in double.
///
/// Serial reference: monotonic deques, O(n).
std::vector<double> sliding_range_serial(std::span<const float> x, std::size_t w);

/// OpenMP version: van Herk/Gil-Werman block prefix/suffix extrema, O(n),
/// parallel over blocks and then over window starts. Bit-identical to the
/// serial reference.
std::vector<double> sliding_range_parallel(std::span<const float> x, std::size_t w);

/// Dispatches to the parallel kernel for long inputs.
std::vector<double> sliding_range(std::span<const float> x, std::size_t w);

int max_threads();

}  // namespace ebb::kernels
