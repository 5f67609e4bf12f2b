#pragma once

#include <cstddef>
#include <functional>

// Worker pool used for embarrassingly parallel sweeps (rows of a report,
// members of a data family, sample times of a trajectory). Tasks write to
// preassigned output slots, so results do not depend on the worker count.

namespace psv {

int worker_count();
void set_worker_count(int n);

// Runs fn(i) for i in [0, n). Blocks until done. Exceptions from tasks are
// rethrown (first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace psv
