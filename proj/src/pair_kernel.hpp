#pragma once

#include "trustnet/projection.hpp"

#include <vector>

namespace trustnet::detail {

// Scratch buffer is reused across calls by the pair loops.
PairTest pair_test_with_buffer(const BicmModel& model, const Cooccurrence& pair, TailMethod method,
                               std::vector<double>& buffer);

} // namespace trustnet::detail
