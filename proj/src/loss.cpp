#include "labelmend/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "labelmend/segnet.hpp"

namespace labelmend {

namespace {

void check_dims(const ProbMap& p, const LabelMask& mask) {
    require(p.height == mask.height && p.width == mask.width,
            "loss: probability map and mask dimensions differ");
}

// ceil with a nudge so values that are exact integers in real arithmetic do
// not round up from float error (e.g. 0.95*100 -> 95, never 96).
std::size_t ceil_count(double x) {
    const double nudged = std::ceil(x - 1e-9);
    return nudged <= 0 ? 0 : static_cast<std::size_t>(nudged);
}

} // namespace

double ce_pixel(const double* p, int classes, int g) {
    (void)classes;
    return -std::log(std::clamp(p[g], 1e-12, 1.0));
}

std::vector<double> ce_map(const ProbMap& p, const LabelMask& mask) {
    check_dims(p, mask);
    const std::size_t n = p.pixels();
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = ce_pixel(&p.data[i * p.classes], p.classes, mask.data[i]);
    return grid;
}

double ce_image(const ProbMap& p, const LabelMask& mask, CeNorm norm) {
    const std::vector<double> grid = ce_map(p, mask);
    const double sum = std::accumulate(grid.begin(), grid.end(), 0.0);
    return norm == CeNorm::mean ? sum / static_cast<double>(grid.size()) : sum;
}

double dice_loss(const ProbMap& p, const LabelMask& mask) {
    check_dims(p, mask);
    const int k = p.classes;
    const std::size_t n = p.pixels();
    std::vector<double> inter(k, 0.0), p_sq(k, 0.0), g_sq(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* px = &p.data[i * k];
        const int g = mask.data[i];
        for (int l = 0; l < k; ++l) p_sq[l] += px[l] * px[l];
        inter[g] += px[g];
        g_sq[g] += 1.0;
    }
    double acc = 0.0;
    for (int l = 0; l < k; ++l) acc += 2.0 * inter[l] / (p_sq[l] + g_sq[l] + 1e-12);
    return 1.0 - acc / k;
}

WeightMap pixel_weights(const std::vector<double>& ce_grid, int height, int width, double gamma) {
    require(!ce_grid.empty(), "pixel_weights: empty grid");
    require(ce_grid.size() == static_cast<std::size_t>(height) * width,
            "pixel_weights: grid size does not match dimensions");
    const std::size_t n = ce_grid.size();
    const std::size_t rank = std::clamp<std::size_t>(ceil_count((1.0 - gamma) * n), 1, n);

    std::vector<double> sorted(ce_grid);
    std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
    const double q = sorted[rank - 1];

    WeightMap w;
    w.height = height;
    w.width = width;
    w.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) w.data[i] = ce_grid[i] > q ? 0 : 1;
    return w;
}

ImageWeights image_weights(const std::vector<double>& batch_ce, double beta) {
    require(!batch_ce.empty(), "image_weights: empty batch");
    const std::size_t b = batch_ce.size();
    const std::size_t keep = std::clamp<std::size_t>(ceil_count((1.0 - beta) * b), 1, b);

    std::vector<std::size_t> order(b);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t c) { return batch_ce[a] < batch_ce[c]; });

    ImageWeights w;
    w.lambda.assign(b, 0.0);
    for (std::size_t i = 0; i < keep; ++i) w.lambda[order[i]] = 1.0;
    return w;
}

double weighted_data_loss(const LossItem& item, CeNorm norm) {
    const ProbMap& p = *item.probs;
    const LabelMask& mask = *item.mask;
    check_dims(p, mask);
    require(item.alpha->height == p.height && item.alpha->width == p.width,
            "loss: weight map dimensions differ");
    const std::size_t n = p.pixels();
    double ce = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (item.alpha->data[i])
            ce += ce_pixel(&p.data[i * p.classes], p.classes, mask.data[i]);
    }
    if (norm == CeNorm::mean) ce /= static_cast<double>(n);
    return ce + dice_loss(p, mask);
}

double params_squared_sum(const ModelParams& params) {
    double acc = 0.0;
    for (const ConvBlock& blk : params.conv) {
        for (const double v : blk.w) acc += v * v;
        for (const double v : blk.b) acc += v * v;
    }
    return acc;
}

double total_loss(const std::vector<LossItem>& batch, const ModelParams& params, double mu,
                  CeNorm norm) {
    double acc = 0.0;
    for (const LossItem& item : batch) {
        if (item.lambda != 0.0) acc += item.lambda * weighted_data_loss(item, norm);
    }
    return acc + mu * params_squared_sum(params);
}

} // namespace labelmend
