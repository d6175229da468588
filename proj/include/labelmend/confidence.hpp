#pragma once

#include <cstdint>
#include <utility>

#include "labelmend/segnet.hpp"
#include "labelmend/types.hpp"

namespace labelmend {

// Monte-Carlo dropout confidence: the reference prediction comes from the
// network without dropout; pass j (seeded seed^j) agrees at a pixel when its
// argmax matches the reference. CS = agreements / num_passes.
std::pair<ConfidenceMap, LabelMask> confidence_map(const ModelParams& params, const Image& image,
                                                   int num_passes, double p_drop,
                                                   std::uint64_t seed);

} // namespace labelmend
