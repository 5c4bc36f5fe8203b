// sweep.hpp: concurrent evaluation of grid points with one ordered writer

#pragma once

#include <cstddef>
#include <functional>

#include "qcrapp/csv.hpp"

namespace qcr::app {

/// Evaluates `point(i)` for i in [0, n) on `threads` workers and hands each row
/// to `sink` on the calling thread, strictly in index order. The first exception
/// stops further dispatch and is rethrown after the workers join.
void ordered_sweep(std::size_t n, unsigned threads, const std::function<Row(std::size_t)>& point,
                   const std::function<void(std::size_t, const Row&)>& sink);

/// `requested`, or the hardware concurrency when it is 0.
unsigned resolve_threads(unsigned requested);

} // namespace qcr::app
