#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "labelmend/config.hpp"
#include "labelmend/loss.hpp"
#include "labelmend/types.hpp"

namespace labelmend {

// Channel-major activation grid: v[(c*h + y)*w + x].
struct Tensor {
    int c = 0, h = 0, w = 0;
    std::vector<double> v;

    void resize(int c_, int h_, int w_) {
        c = c_; h = h_; w = w_;
        v.assign(static_cast<std::size_t>(c) * h * w, 0.0);
    }
    double& at(int ci, int y, int x) { return v[(static_cast<std::size_t>(ci) * h + y) * w + x]; }
    double at(int ci, int y, int x) const { return v[(static_cast<std::size_t>(ci) * h + y) * w + x]; }
};

// One convolution's parameters. Kernel layout is [kh][kw][in][out] row-major,
// matching the serialized block shape.
struct ConvBlock {
    int kh = 0, kw = 0, in_ch = 0, out_ch = 0;
    std::vector<double> w;
    std::vector<double> b;

    std::size_t w_size() const { return static_cast<std::size_t>(kh) * kw * in_ch * out_ch; }
};

// Fixed two-level U-Net: enc1 (1->8->8, pool), enc2 (8->16->16, pool),
// bottleneck (16->32), up1 (48->16), up2 (24->8), 1x1 head (8->k).
// Zero padding preserves spatial size; upsampling is 2x nearest.
inline constexpr int kConvCount = 8;

struct ModelParams {
    int classes = 2;
    std::array<ConvBlock, kConvCount> conv;
};

// Shape-congruent with the ModelParams it differentiates.
using Gradients = ModelParams;

ModelParams init_params(int k, std::uint64_t seed);
Gradients zero_gradients(const ModelParams& params);
std::size_t param_count(const ModelParams& params);

struct DropoutOpts {
    bool on = false;
    double p_drop = 0.0;
    std::uint64_t pass_seed = 0;
};

// All intermediates of one forward pass, kept for the exact backward pass.
// Reusing one cache across calls avoids reallocation.
struct PassCache {
    std::array<Tensor, kConvCount> conv_in; // post-dropout conv inputs
    std::array<std::vector<std::uint8_t>, kConvCount> keep; // empty = no dropout
    double keep_scale = 1.0;
    std::array<Tensor, kConvCount> pre; // conv outputs before ReLU (head: logits)
    std::array<Tensor, kConvCount> act;
    Tensor pool1, pool2;
    std::vector<std::uint8_t> pool1_arg, pool2_arg; // winning offset in each 2x2 window
    Tensor up1, up2;
    Tensor cat1, cat2;
    ProbMap probs;
};

void forward_pass(const ModelParams& params, const Image& image, const DropoutOpts& dropout,
                  PassCache& cache);

ProbMap forward(const ModelParams& params, const Image& image, bool dropout_on, double p_drop,
                std::uint64_t pass_seed);

// Per-pixel argmax; ties break toward the smaller class index.
LabelMask argmax_map(const ProbMap& probs);
LabelMask predict(const ModelParams& params, const Image& image);

// Adds this image's data-term gradient (lambda * (weighted CE + dice), with
// alpha/lambda held constant) into `accum` and returns the matching loss.
double backward_pass(const ModelParams& params, const PassCache& cache, const LabelMask& mask,
                     const WeightMap& alpha, double lambda, CeNorm norm, Gradients& accum);

struct BackwardItem {
    const Image* image = nullptr;
    const LabelMask* mask = nullptr;
    const WeightMap* alpha = nullptr;
    double lambda = 1.0;
};

struct BackwardResult {
    double loss = 0.0;
    Gradients grads;
};

// Exact gradient of total_loss over the batch, including the 2*mu*W term.
// Dropout (when config.train_dropout) derives per-image pass seeds from
// step_seed, so a repeated call reproduces the same stochastic loss.
BackwardResult backward(const ModelParams& params, const std::vector<BackwardItem>& batch,
                        const RunConfig& config, std::uint64_t step_seed = 0);

// Model file: magic "SEGW1", then per block (architecture order, kernel then
// bias): u32 LE rank, u32 LE dims, raw f64 LE payload.
void save_model(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_model(const std::filesystem::path& path);

} // namespace labelmend
