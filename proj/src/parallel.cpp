#include "modalbridge/parallel.hpp"

#include <cstdlib>
#include <string>

namespace modalbridge {

namespace {
std::atomic<int> override_workers{0};
}

int worker_count() {
    if (const int forced = override_workers.load(); forced > 0) return forced;
    if (const char* env = std::getenv("MODALBRIDGE_THREADS")) {
        try {
            const int value = std::stoi(env);
            if (value > 0) return value;
        } catch (...) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_worker_count(int workers) noexcept { override_workers.store(workers > 0 ? workers : 0); }

}  // namespace modalbridge
