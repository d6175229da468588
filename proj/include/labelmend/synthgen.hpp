#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "labelmend/types.hpp"

namespace labelmend {

// Corruption model standing in for an external pseudo-label generator:
// boundary erosion/dilation, punched holes, and false-positive blobs, in a
// mild/severe two-regime mixture. severity 0 reproduces the input exactly.
struct NoiseSpec {
    double severity = 0.5;         // scales every effect
    int boundary_radius_max = 4;   // disk radius cap for erode/dilate (severe regime)
    int hole_count_max = 12;       // missing-region errors, severe regime only
    int blob_count_max = 4;
    double severe_fraction = 0.3;  // probability an image is severely corrupted
};

// 1-3 filled ellipses/rectangles (class 1) on a noisy background; the image
// is the mask after a 3x3 box blur plus seeded noise of amplitude 0.15,
// clamped to [0,1]. Foreground fraction is kept within [0.05, 0.6].
std::vector<std::pair<Image, LabelMask>> gen_shapes(int n, int h, int w, std::uint64_t seed);

// severe_out, when given, reports which regime the seeded draw selected.
LabelMask inject_noise(const LabelMask& gt, const NoiseSpec& spec, std::uint64_t seed,
                       bool* severe_out = nullptr);

struct NoiseReportRow {
    std::string id;
    bool severe = false;
    double disagreement_rate = 0.0; // fraction of pixels differing from gt
};

// Writes images/, labels/ (noisy pseudo), ground_truth/, and noise_report.csv
// under dir. Per-sample seeds are seed ^ index.
std::vector<NoiseReportRow> write_synth_dataset(const std::filesystem::path& dir, int n, int h,
                                                int w, const NoiseSpec& spec, std::uint64_t seed);

} // namespace labelmend
