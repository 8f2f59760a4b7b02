#pragma once

#include <cstddef>
#include <functional>

namespace hlab {

// Worker count used by parallel_for. Starts from HAUSDORFF_LAB_THREADS when set,
// otherwise the hardware concurrency.
std::size_t thread_count();
void set_thread_count(std::size_t count);

// Runs body(i) for i in [0, count) over static contiguous chunks. If any call
// throws, the exception from the lowest failing chunk is rethrown after all
// workers join, so failures are reported deterministically.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace hlab
