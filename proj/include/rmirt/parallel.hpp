#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rmirt {

/// Caps the worker count used by the operators. 0 restores the hardware default.
void set_num_threads(int n);
int num_threads() noexcept;

/// Runs body(i) for i in [0, n). Each index must write disjoint output.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Accumulates scattered contributions into `out` (length len).
///
/// Work items [0, n_items) are split into a fixed number of chunks that does
/// not depend on the thread count. Each chunk fills a private buffer and the
/// buffers are summed into `out` in chunk order, so results are bit-identical
/// for any number of workers.
void deterministic_scatter(
    std::size_t n_items, std::span<double> out,
    const std::function<void(std::size_t item, std::span<double> buf)>& body);

}  // namespace rmirt
