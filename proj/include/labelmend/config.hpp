#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace labelmend {

// Run configuration. Parsed from `key = value` lines; '#' starts a comment.
struct RunConfig {
    int k = 2;                // class count
    double beta = 0.10;       // forget rate: fraction of images dropped per mini-batch
    double gamma = 0.05;      // pixel-drop quantile
    int num_passes = 100;     // MC dropout passes
    int e_start = 10;         // first epoch with reweighting active
    int epochs = 60;
    int batch_size = 8;
    double lr0 = 0.001;
    double beta1_pre = 0.9;   // Adam first-moment decay, epochs 1..10
    double beta1_post = 0.1;  // and after epoch 10
    double beta2 = 0.999;
    double l2_mu = 1e-4;      // coefficient on the ||W||^2 term
    double tau = 0.8;         // confidence threshold for correction
    double p_drop = 0.1;
    bool train_dropout = false;
    int rounds = 1;           // correction + retrain rounds
    std::uint64_t seed = 42;
    bool ablate_pixel_weights = false;
    bool ablate_image_weights = false;
    bool ablate_retrain = false;
    bool augment = false;     // seeded half-width crop, zero-padded back
    bool ce_sum = false;      // raw-sum CE aggregation instead of per-pixel mean

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);
std::string serialize_config(const RunConfig& config);

} // namespace labelmend
