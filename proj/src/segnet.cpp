#include "labelmend/segnet.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "labelmend/parallel.hpp"
#include "labelmend/rng.hpp"

namespace labelmend {

namespace {

struct ConvSpec {
    int in_ch, out_ch, k;
};

std::array<ConvSpec, kConvCount> arch_for(int classes) {
    return {{{1, 8, 3},
             {8, 8, 3},
             {8, 16, 3},
             {16, 16, 3},
             {16, 32, 3},
             {48, 16, 3},
             {24, 8, 3},
             {8, classes, 1}}};
}

// --- primitive layers ----------------------------------------------------

void conv_forward(const Tensor& in, const ConvBlock& blk, Tensor& out) {
    out.resize(blk.out_ch, in.h, in.w);
    const int pad = blk.kh / 2;
    const int oc = blk.out_ch, ic = blk.in_ch, h = in.h, w = in.w;
    std::vector<double> acc(oc);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int co = 0; co < oc; ++co) acc[co] = blk.b[co];
            for (int ky = 0; ky < blk.kh; ++ky) {
                const int yy = y + ky - pad;
                if (yy < 0 || yy >= h) continue;
                for (int kx = 0; kx < blk.kw; ++kx) {
                    const int xx = x + kx - pad;
                    if (xx < 0 || xx >= w) continue;
                    const double* wk = &blk.w[(static_cast<std::size_t>(ky) * blk.kw + kx) * ic * oc];
                    for (int ci = 0; ci < ic; ++ci) {
                        const double a = in.at(ci, yy, xx);
                        const double* wrow = wk + static_cast<std::size_t>(ci) * oc;
                        for (int co = 0; co < oc; ++co) acc[co] += a * wrow[co];
                    }
                }
            }
            for (int co = 0; co < oc; ++co) out.at(co, y, x) = acc[co];
        }
    }
}

// Accumulates dW/db into gblk and the input gradient into g_in.
void conv_backward(const Tensor& in, const ConvBlock& blk, const Tensor& g_out, ConvBlock& gblk,
                   Tensor& g_in) {
    g_in.resize(in.c, in.h, in.w);
    const int pad = blk.kh / 2;
    const int oc = blk.out_ch, ic = blk.in_ch, h = in.h, w = in.w;
    std::vector<double> gpix(oc);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int co = 0; co < oc; ++co) {
                gpix[co] = g_out.at(co, y, x);
                gblk.b[co] += gpix[co];
            }
            for (int ky = 0; ky < blk.kh; ++ky) {
                const int yy = y + ky - pad;
                if (yy < 0 || yy >= h) continue;
                for (int kx = 0; kx < blk.kw; ++kx) {
                    const int xx = x + kx - pad;
                    if (xx < 0 || xx >= w) continue;
                    const std::size_t base = (static_cast<std::size_t>(ky) * blk.kw + kx) * ic * oc;
                    for (int ci = 0; ci < ic; ++ci) {
                        const double a = in.at(ci, yy, xx);
                        const double* wrow = &blk.w[base + static_cast<std::size_t>(ci) * oc];
                        double* dwrow = &gblk.w[base + static_cast<std::size_t>(ci) * oc];
                        double s = 0.0;
                        for (int co = 0; co < oc; ++co) {
                            dwrow[co] += a * gpix[co];
                            s += wrow[co] * gpix[co];
                        }
                        g_in.at(ci, yy, xx) += s;
                    }
                }
            }
        }
    }
}

void relu_forward(const Tensor& pre, Tensor& act) {
    act.resize(pre.c, pre.h, pre.w);
    for (std::size_t i = 0; i < pre.v.size(); ++i) act.v[i] = pre.v[i] > 0.0 ? pre.v[i] : 0.0;
}

void relu_backward(const Tensor& pre, Tensor& grad) {
    for (std::size_t i = 0; i < grad.v.size(); ++i)
        if (pre.v[i] <= 0.0) grad.v[i] = 0.0;
}

// 2x2 max pool, stride 2; arg records the winning offset (first maximum in
// row-major window order, so ties are deterministic).
void maxpool_forward(const Tensor& in, Tensor& out, std::vector<std::uint8_t>& arg) {
    out.resize(in.c, in.h / 2, in.w / 2);
    arg.assign(out.v.size(), 0);
    std::size_t idx = 0;
    for (int ci = 0; ci < in.c; ++ci) {
        for (int y = 0; y < out.h; ++y) {
            for (int x = 0; x < out.w; ++x, ++idx) {
                double best = in.at(ci, 2 * y, 2 * x);
                std::uint8_t best_off = 0;
                for (std::uint8_t off = 1; off < 4; ++off) {
                    const double v = in.at(ci, 2 * y + off / 2, 2 * x + off % 2);
                    if (v > best) {
                        best = v;
                        best_off = off;
                    }
                }
                out.v[idx] = best;
                arg[idx] = best_off;
            }
        }
    }
}

void maxpool_backward(const Tensor& g_out, const std::vector<std::uint8_t>& arg, Tensor& g_in) {
    // g_in must be pre-sized to the pooled input's shape; contributions add
    // into it so a skip-connection gradient can be accumulated first.
    std::size_t idx = 0;
    for (int ci = 0; ci < g_out.c; ++ci) {
        for (int y = 0; y < g_out.h; ++y) {
            for (int x = 0; x < g_out.w; ++x, ++idx) {
                const std::uint8_t off = arg[idx];
                g_in.at(ci, 2 * y + off / 2, 2 * x + off % 2) += g_out.v[idx];
            }
        }
    }
}

void upsample_forward(const Tensor& in, Tensor& out) {
    out.resize(in.c, in.h * 2, in.w * 2);
    for (int ci = 0; ci < in.c; ++ci)
        for (int y = 0; y < out.h; ++y)
            for (int x = 0; x < out.w; ++x) out.at(ci, y, x) = in.at(ci, y / 2, x / 2);
}

void upsample_backward(const Tensor& g_out, Tensor& g_in, int in_h, int in_w) {
    g_in.resize(g_out.c, in_h, in_w);
    for (int ci = 0; ci < g_out.c; ++ci)
        for (int y = 0; y < g_out.h; ++y)
            for (int x = 0; x < g_out.w; ++x) g_in.at(ci, y / 2, x / 2) += g_out.at(ci, y, x);
}

// Upsampled features first, then the skip connection.
void concat_forward(const Tensor& a, const Tensor& b, Tensor& out) {
    out.resize(a.c + b.c, a.h, a.w);
    std::memcpy(out.v.data(), a.v.data(), a.v.size() * sizeof(double));
    std::memcpy(out.v.data() + a.v.size(), b.v.data(), b.v.size() * sizeof(double));
}

void concat_backward(const Tensor& g_out, int a_channels, Tensor& g_a, Tensor& g_b) {
    const int b_channels = g_out.c - a_channels;
    g_a.resize(a_channels, g_out.h, g_out.w);
    g_b.resize(b_channels, g_out.h, g_out.w);
    std::memcpy(g_a.v.data(), g_out.v.data(), g_a.v.size() * sizeof(double));
    std::memcpy(g_b.v.data(), g_out.v.data() + g_a.v.size(), g_b.v.size() * sizeof(double));
}

void apply_dropout(const Tensor& in, int conv_index, const DropoutOpts& opts,
                   std::vector<std::uint8_t>& keep, double scale, Tensor& out) {
    out.resize(in.c, in.h, in.w);
    if (!opts.on || opts.p_drop <= 0.0) {
        keep.clear();
        out.v = in.v;
        return;
    }
    auto rng = make_rng(derive_seed(opts.pass_seed, static_cast<std::uint64_t>(conv_index)));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    keep.resize(in.v.size());
    for (std::size_t i = 0; i < in.v.size(); ++i) {
        keep[i] = uni(rng) >= opts.p_drop ? 1 : 0;
        out.v[i] = keep[i] ? in.v[i] * scale : 0.0;
    }
}

void dropout_backward(const std::vector<std::uint8_t>& keep, double scale, Tensor& grad) {
    if (keep.empty()) return;
    for (std::size_t i = 0; i < grad.v.size(); ++i) grad.v[i] = keep[i] ? grad.v[i] * scale : 0.0;
}

void softmax_channels(const Tensor& logits, ProbMap& probs) {
    probs.height = logits.h;
    probs.width = logits.w;
    probs.classes = logits.c;
    probs.data.resize(static_cast<std::size_t>(logits.h) * logits.w * logits.c);
    const int k = logits.c;
    const std::size_t plane = static_cast<std::size_t>(logits.h) * logits.w;
    for (std::size_t i = 0; i < plane; ++i) {
        double m = logits.v[i];
        for (int l = 1; l < k; ++l) m = std::max(m, logits.v[l * plane + i]);
        double sum = 0.0;
        for (int l = 0; l < k; ++l) {
            const double e = std::exp(logits.v[l * plane + i] - m);
            probs.data[i * k + l] = e;
            sum += e;
        }
        for (int l = 0; l < k; ++l) probs.data[i * k + l] /= sum;
    }
}

} // namespace

// --- parameters -----------------------------------------------------------

ModelParams init_params(int k, std::uint64_t seed) {
    require(k >= 2, "init_params: k must be >= 2");
    ModelParams params;
    params.classes = k;
    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto arch = arch_for(k);
    for (int i = 0; i < kConvCount; ++i) {
        ConvBlock& blk = params.conv[i];
        blk.kh = blk.kw = arch[i].k;
        blk.in_ch = arch[i].in_ch;
        blk.out_ch = arch[i].out_ch;
        const double stddev = std::sqrt(2.0 / (blk.kh * blk.kw * blk.in_ch));
        blk.w.resize(blk.w_size());
        for (double& v : blk.w) v = gauss(rng) * stddev;
        blk.b.assign(blk.out_ch, 0.0);
    }
    return params;
}

Gradients zero_gradients(const ModelParams& params) {
    Gradients g = params;
    for (ConvBlock& blk : g.conv) {
        std::fill(blk.w.begin(), blk.w.end(), 0.0);
        std::fill(blk.b.begin(), blk.b.end(), 0.0);
    }
    return g;
}

std::size_t param_count(const ModelParams& params) {
    std::size_t n = 0;
    for (const ConvBlock& blk : params.conv) n += blk.w.size() + blk.b.size();
    return n;
}

// --- forward ---------------------------------------------------------------

void forward_pass(const ModelParams& params, const Image& image, const DropoutOpts& dropout,
                  PassCache& cache) {
    require(image.height % 4 == 0 && image.width % 4 == 0,
            "forward: image dimensions must be divisible by 4");
    const int h = image.height, w = image.width;
    cache.keep_scale = (dropout.on && dropout.p_drop > 0.0) ? 1.0 / (1.0 - dropout.p_drop) : 1.0;

    Tensor input;
    input.resize(1, h, w);
    input.v = image.data;

    const auto conv_layer = [&](int i, const Tensor& in) -> const Tensor& {
        apply_dropout(in, i, dropout, cache.keep[i], cache.keep_scale, cache.conv_in[i]);
        conv_forward(cache.conv_in[i], params.conv[i], cache.pre[i]);
        if (i < kConvCount - 1) {
            relu_forward(cache.pre[i], cache.act[i]);
            return cache.act[i];
        }
        return cache.pre[i]; // head stays linear; softmax follows
    };

    const Tensor& a0 = conv_layer(0, input);
    const Tensor& a1 = conv_layer(1, a0);
    maxpool_forward(a1, cache.pool1, cache.pool1_arg);
    const Tensor& a2 = conv_layer(2, cache.pool1);
    const Tensor& a3 = conv_layer(3, a2);
    maxpool_forward(a3, cache.pool2, cache.pool2_arg);
    const Tensor& a4 = conv_layer(4, cache.pool2);
    upsample_forward(a4, cache.up1);
    concat_forward(cache.up1, a3, cache.cat1);
    const Tensor& a5 = conv_layer(5, cache.cat1);
    upsample_forward(a5, cache.up2);
    concat_forward(cache.up2, a1, cache.cat2);
    const Tensor& a6 = conv_layer(6, cache.cat2);
    const Tensor& logits = conv_layer(7, a6);
    softmax_channels(logits, cache.probs);
}

ProbMap forward(const ModelParams& params, const Image& image, bool dropout_on, double p_drop,
                std::uint64_t pass_seed) {
    PassCache cache;
    forward_pass(params, image, {dropout_on, p_drop, pass_seed}, cache);
    return std::move(cache.probs);
}

LabelMask argmax_map(const ProbMap& probs) {
    LabelMask mask;
    mask.height = probs.height;
    mask.width = probs.width;
    mask.classes = probs.classes;
    mask.provenance = Provenance::prediction;
    mask.data.resize(probs.pixels());
    for (std::size_t i = 0; i < mask.data.size(); ++i) {
        const double* p = &probs.data[i * probs.classes];
        int best = 0;
        for (int l = 1; l < probs.classes; ++l)
            if (p[l] > p[best]) best = l;
        mask.data[i] = static_cast<std::uint8_t>(best);
    }
    return mask;
}

LabelMask predict(const ModelParams& params, const Image& image) {
    return argmax_map(forward(params, image, false, 0.0, 0));
}

// --- backward --------------------------------------------------------------

double backward_pass(const ModelParams& params, const PassCache& cache, const LabelMask& mask,
                     const WeightMap& alpha, double lambda, CeNorm norm, Gradients& accum) {
    const ProbMap& probs = cache.probs;
    require(mask.height == probs.height && mask.width == probs.width,
            "backward: mask dimensions differ from forward output");
    require(alpha.height == probs.height && alpha.width == probs.width,
            "backward: weight map dimensions differ from forward output");
    LossItem item{&probs, &mask, &alpha, lambda};
    if (lambda == 0.0) return 0.0; // nothing flows back
    const double loss = lambda * weighted_data_loss(item, norm);

    const int k = probs.classes;
    const int h = probs.height, w = probs.width;
    const std::size_t n = probs.pixels();
    const double ce_factor = norm == CeNorm::mean ? 1.0 / static_cast<double>(n) : 1.0;

    // Dice per-class sums.
    std::vector<double> inter(k, 0.0), p_sq(k, 0.0), g_cnt(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* px = &probs.data[i * k];
        const int g = mask.data[i];
        for (int l = 0; l < k; ++l) p_sq[l] += px[l] * px[l];
        inter[g] += px[g];
        g_cnt[g] += 1.0;
    }
    std::vector<double> num(k), den(k);
    for (int l = 0; l < k; ++l) {
        num[l] = 2.0 * inter[l];
        den[l] = p_sq[l] + g_cnt[l] + 1e-12;
    }

    // dL/dlogits via dL/dp and the softmax Jacobian.
    Tensor g_logits;
    g_logits.resize(k, h, w);
    const std::size_t plane = n;
    std::vector<double> dp(k);
    for (std::size_t i = 0; i < n; ++i) {
        const double* px = &probs.data[i * k];
        const int g = mask.data[i];
        for (int l = 0; l < k; ++l) {
            const double ind = l == g ? 1.0 : 0.0;
            dp[l] = lambda * (-(1.0 / k) * (2.0 * ind * den[l] - num[l] * 2.0 * px[l]) /
                              (den[l] * den[l]));
        }
        if (alpha.data[i] && px[g] > 1e-12)
            dp[g] += lambda * ce_factor * (-1.0 / px[g]); // clamp region has zero slope
        double dot = 0.0;
        for (int l = 0; l < k; ++l) dot += dp[l] * px[l];
        for (int l = 0; l < k; ++l) g_logits.v[l * plane + i] = px[l] * (dp[l] - dot);
    }

    // Walk the network in reverse, mirroring forward_pass.
    Tensor g_in, g_a, g_b;
    Tensor g_cur = std::move(g_logits);

    const auto conv_layer_back = [&](int i, Tensor& g_out) {
        if (i < kConvCount - 1) relu_backward(cache.pre[i], g_out);
        conv_backward(cache.conv_in[i], params.conv[i], g_out, accum.conv[i], g_in);
        dropout_backward(cache.keep[i], cache.keep_scale, g_in);
        std::swap(g_cur, g_in);
    };

    conv_layer_back(7, g_cur); // head (no ReLU)
    conv_layer_back(6, g_cur); // g_cur = d cat2
    concat_backward(g_cur, cache.up2.c, g_a, g_b); // g_a: up2, g_b: skip to act[1]
    Tensor g_skip_a1 = std::move(g_b);
    upsample_backward(g_a, g_cur, cache.act[5].h, cache.act[5].w);
    conv_layer_back(5, g_cur); // g_cur = d cat1
    concat_backward(g_cur, cache.up1.c, g_a, g_b); // g_b: skip to act[3]
    Tensor g_skip_a3 = std::move(g_b);
    upsample_backward(g_a, g_cur, cache.act[4].h, cache.act[4].w);
    conv_layer_back(4, g_cur); // g_cur = d pool2
    g_a = std::move(g_skip_a3); // seed with skip gradient, pool adds into it
    maxpool_backward(g_cur, cache.pool2_arg, g_a);
    g_cur = std::move(g_a);
    conv_layer_back(3, g_cur);
    conv_layer_back(2, g_cur); // g_cur = d pool1
    g_a = std::move(g_skip_a1);
    maxpool_backward(g_cur, cache.pool1_arg, g_a);
    g_cur = std::move(g_a);
    conv_layer_back(1, g_cur);
    conv_layer_back(0, g_cur);

    return loss;
}

BackwardResult backward(const ModelParams& params, const std::vector<BackwardItem>& batch,
                        const RunConfig& config, std::uint64_t step_seed) {
    for (const BackwardItem& it : batch) {
        require(it.image != nullptr && it.mask != nullptr && it.alpha != nullptr,
                "backward: incomplete batch item");
        require(it.image->height == batch.front().image->height &&
                    it.image->width == batch.front().image->width,
                "backward: batch images must share dimensions");
    }

    BackwardResult result;
    result.grads = zero_gradients(params);
    const CeNorm norm = config.ce_sum ? CeNorm::sum : CeNorm::mean;

    // Per-image gradients are computed independently, then reduced in batch
    // (dataset-id) order so the sum is bit-identical at any thread count.
    std::vector<Gradients> partial(batch.size());
    std::vector<double> losses(batch.size(), 0.0);
    parallel_for(batch.size(), [&](std::size_t i) {
        const BackwardItem& it = batch[i];
        PassCache cache;
        DropoutOpts opts{config.train_dropout, config.p_drop,
                         derive_seed(step_seed, static_cast<std::uint64_t>(i))};
        forward_pass(params, *it.image, opts, cache);
        partial[i] = zero_gradients(params);
        losses[i] = backward_pass(params, cache, *it.mask, *it.alpha, it.lambda, norm, partial[i]);
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
        result.loss += losses[i];
        for (int b = 0; b < kConvCount; ++b) {
            for (std::size_t j = 0; j < partial[i].conv[b].w.size(); ++j)
                result.grads.conv[b].w[j] += partial[i].conv[b].w[j];
            for (std::size_t j = 0; j < partial[i].conv[b].b.size(); ++j)
                result.grads.conv[b].b[j] += partial[i].conv[b].b[j];
        }
    }

    // L2 term: mu * sum(params^2) contributes 2*mu*param.
    const double mu = config.l2_mu;
    result.loss += mu * params_squared_sum(params);
    for (int b = 0; b < kConvCount; ++b) {
        for (std::size_t j = 0; j < params.conv[b].w.size(); ++j)
            result.grads.conv[b].w[j] += 2.0 * mu * params.conv[b].w[j];
        for (std::size_t j = 0; j < params.conv[b].b.size(); ++j)
            result.grads.conv[b].b[j] += 2.0 * mu * params.conv[b].b[j];
    }
    return result;
}

// --- serialization ---------------------------------------------------------

namespace {

constexpr char kMagic[5] = {'S', 'E', 'G', 'W', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t read_u32(std::istream& in, const std::filesystem::path& path) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    if (!in) throw std::runtime_error("model: truncated file " + path.string());
    return v;
}

void write_block(std::ostream& out, const std::vector<std::uint32_t>& dims,
                 const std::vector<double>& data) {
    write_u32(out, static_cast<std::uint32_t>(dims.size()));
    for (const std::uint32_t d : dims) write_u32(out, d);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double)));
}

std::vector<double> read_block(std::istream& in, const std::filesystem::path& path,
                               const std::vector<std::uint32_t>& expect_dims) {
    const std::uint32_t rank = read_u32(in, path);
    if (rank != expect_dims.size())
        throw std::runtime_error("model: unexpected block rank in " + path.string());
    std::size_t count = 1;
    for (std::size_t i = 0; i < rank; ++i) {
        const std::uint32_t d = read_u32(in, path);
        if (d != expect_dims[i])
            throw std::runtime_error("model: block shape mismatch in " + path.string());
        count *= d;
    }
    std::vector<double> data(count);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double))
        throw std::runtime_error("model: truncated file " + path.string());
    return data;
}

} // namespace

void save_model(const ModelParams& params, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("model: cannot write " + path.string());
    out.write(kMagic, sizeof(kMagic));
    for (const ConvBlock& blk : params.conv) {
        write_block(out,
                    {static_cast<std::uint32_t>(blk.kh), static_cast<std::uint32_t>(blk.kw),
                     static_cast<std::uint32_t>(blk.in_ch), static_cast<std::uint32_t>(blk.out_ch)},
                    blk.w);
        write_block(out, {static_cast<std::uint32_t>(blk.out_ch)}, blk.b);
    }
    if (!out) throw std::runtime_error("model: write failed for " + path.string());
}

ModelParams load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("model: cannot open " + path.string());
    char magic[5];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("model: bad magic in " + path.string());

    // The head block determines k; every block is then validated against the
    // fixed architecture. Peek at k by reading blocks for k=2 first is not
    // possible, so read the whole stream block-by-block with deferred check.
    // All shapes except the head are k-independent.
    ModelParams params;
    const auto arch2 = arch_for(2);
    for (int i = 0; i < kConvCount; ++i) {
        ConvBlock& blk = params.conv[i];
        blk.kh = blk.kw = arch2[i].k;
        blk.in_ch = arch2[i].in_ch;
        if (i < kConvCount - 1) {
            blk.out_ch = arch2[i].out_ch;
            blk.w = read_block(in, path,
                               {static_cast<std::uint32_t>(blk.kh), static_cast<std::uint32_t>(blk.kw),
                                static_cast<std::uint32_t>(blk.in_ch),
                                static_cast<std::uint32_t>(blk.out_ch)});
            blk.b = read_block(in, path, {static_cast<std::uint32_t>(blk.out_ch)});
        } else {
            // Head: rank, kh, kw, in are fixed; out is the class count.
            const std::uint32_t rank = read_u32(in, path);
            if (rank != 4) throw std::runtime_error("model: unexpected block rank in " + path.string());
            const std::uint32_t kh = read_u32(in, path), kw = read_u32(in, path),
                                ic = read_u32(in, path), oc = read_u32(in, path);
            if (kh != 1 || kw != 1 || ic != static_cast<std::uint32_t>(blk.in_ch) || oc < 2)
                throw std::runtime_error("model: head block shape mismatch in " + path.string());
            blk.out_ch = static_cast<int>(oc);
            params.classes = blk.out_ch;
            blk.w.resize(blk.w_size());
            in.read(reinterpret_cast<char*>(blk.w.data()),
                    static_cast<std::streamsize>(blk.w.size() * sizeof(double)));
            if (static_cast<std::size_t>(in.gcount()) != blk.w.size() * sizeof(double))
                throw std::runtime_error("model: truncated file " + path.string());
            blk.b = read_block(in, path, {oc});
        }
    }
    if (in.peek() != EOF)
        throw std::runtime_error("model: trailing bytes in " + path.string());
    return params;
}

} // namespace labelmend
