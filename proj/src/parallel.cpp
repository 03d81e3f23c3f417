#include "dpocs/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace dpocs {

namespace {
std::atomic<std::size_t> g_threads{1};
}

std::size_t thread_count() noexcept { return g_threads.load(); }

void set_thread_count(std::size_t n) noexcept { g_threads.store(std::max<std::size_t>(n, 1)); }

}  // namespace dpocs
