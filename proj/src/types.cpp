#include "fdde/types.hpp"

#include <cstdlib>
#include <thread>

namespace fdde {

void SystemParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("SystemParams: alpha must lie in (0, 1], got " + std::to_string(alpha));
    if (!(tau1 >= 0.0))
        throw DomainError("SystemParams: tau1 must be >= 0, got " + std::to_string(tau1));
    if (!(tau2 >= 0.0))
        throw DomainError("SystemParams: tau2 must be >= 0, got " + std::to_string(tau2));
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "stable";
        case Verdict::Unstable: return "unstable";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

int worker_thread_count() {
    if (const char* env = std::getenv("FDDE_STAB_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace fdde
