#pragma once

#include <cstddef>
#include <functional>

namespace mixncut {

/// Caps the worker count used by library internals. 0 restores the
/// hardware default. Results never depend on this value.
void set_max_threads(unsigned count) noexcept;
unsigned max_threads() noexcept;

/// Runs body(begin, end) over disjoint contiguous blocks of [0, n). Bodies
/// must only write state owned by their block. Calls made from inside a
/// body run serially.
void parallel_for_blocks(std::size_t n, std::size_t min_block,
                         const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace mixncut
