#include "labelmend/confidence.hpp"

#include <vector>

#include "labelmend/parallel.hpp"

namespace labelmend {

std::pair<ConfidenceMap, LabelMask> confidence_map(const ModelParams& params, const Image& image,
                                                   int num_passes, double p_drop,
                                                   std::uint64_t seed) {
    require(num_passes >= 1, "confidence_map: num_passes must be >= 1");
    const LabelMask reference = predict(params, image);
    const std::size_t n = reference.size();

    // Integer agreement tallies; the sum is order-independent, so passes can
    // run on any schedule.
    std::vector<std::vector<int>> tallies(static_cast<std::size_t>(num_passes));
    parallel_for(static_cast<std::size_t>(num_passes), [&](std::size_t j) {
        const std::uint64_t pass_seed = seed ^ (static_cast<std::uint64_t>(j) + 1);
        const LabelMask pass_pred = argmax_map(forward(params, image, true, p_drop, pass_seed));
        std::vector<int>& tally = tallies[j];
        tally.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            if (pass_pred.data[i] == reference.data[i]) tally[i] = 1;
    });

    std::vector<int> agree(n, 0);
    for (const auto& tally : tallies)
        for (std::size_t i = 0; i < n; ++i) agree[i] += tally[i];

    ConfidenceMap conf;
    conf.height = reference.height;
    conf.width = reference.width;
    conf.num_passes = num_passes;
    conf.data.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        conf.data[i] = static_cast<double>(agree[i]) / static_cast<double>(num_passes);
    return {std::move(conf), reference};
}

} // namespace labelmend
