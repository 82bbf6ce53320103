#ifndef PKMECH_EXECUTION_HPP
#define PKMECH_EXECUTION_HPP

#include <cstddef>
#include <exception>
#include <vector>

namespace pkmech {

/// Selects the OpenMP kernel or its serial reference. Both produce identical
/// results; kernels write per-index slots and reduce in index order.
enum class Execution { Serial, Parallel };

/// Run body(i) for i in [0, count). Exceptions are captured per index and the
/// one with the lowest index is rethrown, matching the serial loop.
template <class Body>
void for_each_index(std::size_t count, Execution ex, Body&& body) {
    if (ex == Execution::Serial || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace pkmech

#endif  // PKMECH_EXECUTION_HPP
