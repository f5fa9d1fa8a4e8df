#pragma once

#include <cstddef>
#include <functional>

namespace klmedian {

/// Worker count used by every parallel loop in the library. Defaults to the
/// number of logical cores. Results never depend on it.
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Calls body(i) for every i in [0, n), split into contiguous chunks across
/// workers. body must only write to slots owned by i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace klmedian
