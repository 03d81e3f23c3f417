#pragma once

#include <cstddef>

namespace dpocs {

/// Worker threads used by parallelizable kernels (path-matrix construction).
/// Defaults to 1. Results never depend on this value.
std::size_t thread_count() noexcept;
void set_thread_count(std::size_t n) noexcept;

}  // namespace dpocs
