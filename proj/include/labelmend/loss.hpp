#pragma once

#include <vector>

#include "labelmend/types.hpp"

namespace labelmend {

struct ModelParams; // segnet.hpp

// Per-image CE aggregation. Mean keeps loss magnitudes resolution-independent;
// sum is the raw-sum convention (config key ce_sum).
enum class CeNorm { mean, sum };

// Image weights, one per batch image, in dataset-id order.
struct ImageWeights {
    std::vector<double> lambda; // each 0 or 1
};

// -log(clamp(p_g, 1e-12, 1)).
double ce_pixel(const double* p, int classes, int g);

// Per-pixel CE grid for one image.
std::vector<double> ce_map(const ProbMap& p, const LabelMask& mask);

double ce_image(const ProbMap& p, const LabelMask& mask, CeNorm norm = CeNorm::mean);

// 1 - (1/k) sum_l 2*sum(p_l*g_l) / (sum(p_l^2) + sum(g_l^2) + 1e-12).
double dice_loss(const ProbMap& p, const LabelMask& mask);

// alpha(x) = 0 iff the pixel's CE strictly exceeds the (1-gamma) quantile,
// taken as the value at ascending rank ceil((1-gamma)*n). Ties at the
// quantile keep weight 1.
WeightMap pixel_weights(const std::vector<double>& ce_grid, int height, int width, double gamma);

// lambda = 1 for the ceil((1-beta)*B) images with smallest CE; ties broken
// by position (earlier kept first). Inputs are expected in dataset-id order.
ImageWeights image_weights(const std::vector<double>& batch_ce, double beta);

struct LossItem {
    const ProbMap* probs = nullptr;
    const LabelMask* mask = nullptr;
    const WeightMap* alpha = nullptr;
    double lambda = 1.0;
};

// sum_images lambda * (ce_alpha + dice) + mu * sum(params^2); the CE term is
// sum_x alpha(x)*ce(x), divided by the pixel count under CeNorm::mean.
double total_loss(const std::vector<LossItem>& batch, const ModelParams& params, double mu,
                  CeNorm norm = CeNorm::mean);

// The two pieces total_loss is built from, exposed for reuse by the trainer.
double weighted_data_loss(const LossItem& item, CeNorm norm);
double params_squared_sum(const ModelParams& params);

} // namespace labelmend
