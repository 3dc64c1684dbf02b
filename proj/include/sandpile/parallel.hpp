#pragma once

#include <cstddef>
#include <functional>

namespace sandpile {

/// Runs fn(begin, end) over a deterministic partition of [0, count) on
/// `threads` workers. Callers are responsible for making the combined
/// result independent of the partition (pure per-index work).
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace sandpile
