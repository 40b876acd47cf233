#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>

namespace rocap {

/// Runs fn(i) for i in [0, n) across up to `threads` workers. Results must
/// be written by index so the outcome is independent of scheduling.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Same, with the worker count from default_thread_count().
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// --threads default: ROCAPKIT_THREADS if set, else hardware concurrency.
unsigned default_thread_count();

/// Stable per-stage sub-seed: FNV-1a of the stage name mixed into the base
/// seed with a splitmix64 finalizer.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stage);

}  // namespace rocap
