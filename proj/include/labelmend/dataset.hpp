#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "labelmend/types.hpp"

namespace labelmend {

struct Sample {
    std::string id;
    Image image;
    LabelMask pseudo;
    std::optional<LabelMask> ground_truth;
};

// Samples sorted by id ascending; this order is the canonical tie-break order everywhere.
struct Dataset {
    int height = 0;
    int width = 0;
    int classes = 0;
    std::vector<Sample> samples;

    bool has_ground_truth() const;
};

// Layout: dir/images/<id>.pgm, dir/labels/<id>.pgm, optional dir/ground_truth/<id>.pgm.
Dataset load_dataset(const std::filesystem::path& dir, int classes);

} // namespace labelmend
