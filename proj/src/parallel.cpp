#include "sandpile/parallel.hpp"

#include <thread>
#include <vector>

namespace sandpile {

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
    if (count == 0) return;
    std::size_t t = threads < 1 ? 1 : static_cast<std::size_t>(threads);
    if (t > count) t = count;
    if (t == 1) {
        fn(0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (std::size_t i = 0; i < t; ++i) {
        std::size_t begin = count * i / t;
        std::size_t end = count * (i + 1) / t;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace sandpile
