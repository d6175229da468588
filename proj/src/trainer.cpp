#include "labelmend/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "labelmend/confidence.hpp"
#include "labelmend/loss.hpp"
#include "labelmend/parallel.hpp"
#include "labelmend/pgm.hpp"
#include "labelmend/rng.hpp"

namespace labelmend {

namespace fs = std::filesystem;

namespace {

// Seed-stream tags keeping shuffle, step, confidence, and crop draws apart.
constexpr std::uint64_t kShuffleStream = 0x7368756666ULL;
constexpr std::uint64_t kStepStream = 0x73746570ULL;
constexpr std::uint64_t kConfStream = 0x636f6e66ULL;
constexpr std::uint64_t kCropStream = 0x63726f70ULL;

std::string csv_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

void accumulate(Gradients& into, const Gradients& from) {
    for (int b = 0; b < kConvCount; ++b) {
        for (std::size_t j = 0; j < from.conv[b].w.size(); ++j)
            into.conv[b].w[j] += from.conv[b].w[j];
        for (std::size_t j = 0; j < from.conv[b].b.size(); ++j)
            into.conv[b].b[j] += from.conv[b].b[j];
    }
}

// Seeded half-width crop kept in place, zero-padded outside; image and label
// are cropped together.
void crop_half_width(Image& image, LabelMask& label, std::uint64_t seed) {
    const int w = image.width;
    const int cw = w / 2;
    auto rng = make_rng(seed);
    const int x0 = std::uniform_int_distribution<int>(0, w - cw)(rng);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x >= x0 && x < x0 + cw) continue;
            image.at(y, x) = 0.0;
            label.at(y, x) = 0;
        }
    }
}

} // namespace

OptimizerState make_optimizer_state(const ModelParams& params) {
    OptimizerState state;
    state.m = zero_gradients(params);
    state.v = zero_gradients(params);
    return state;
}

void adam_step(ModelParams& params, const Gradients& grads, OptimizerState& state, double lr,
               double beta1, double beta2) {
    ++state.t;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
    const double eps = 1e-8;
    for (int b = 0; b < kConvCount; ++b) {
        const auto update = [&](double& w, double& m, double& v, double g) {
            m = beta1 * m + (1.0 - beta1) * g;
            v = beta2 * v + (1.0 - beta2) * g * g;
            const double mhat = m / bc1;
            const double vhat = v / bc2;
            w -= lr * mhat / (std::sqrt(vhat) + eps);
        };
        for (std::size_t j = 0; j < params.conv[b].w.size(); ++j)
            update(params.conv[b].w[j], state.m.conv[b].w[j], state.v.conv[b].w[j],
                   grads.conv[b].w[j]);
        for (std::size_t j = 0; j < params.conv[b].b.size(); ++j)
            update(params.conv[b].b[j], state.m.conv[b].b[j], state.v.conv[b].b[j],
                   grads.conv[b].b[j]);
    }
}

double lr_schedule(int epoch, double lr0, int total_epochs) {
    require(epoch >= 1 && epoch <= total_epochs, "lr_schedule: epoch out of range");
    if (total_epochs <= 10 || epoch <= 10) return lr0;
    return lr0 * static_cast<double>(total_epochs - epoch) / static_cast<double>(total_epochs - 10);
}

std::pair<ModelParams, TrainHistory> train(const Dataset& dataset,
                                           const std::vector<LabelMask>& labels,
                                           const RunConfig& config, std::uint64_t seed) {
    require(!dataset.samples.empty(), "train: empty dataset");
    require(labels.size() == dataset.samples.size(),
            "train: need exactly one label mask per dataset sample");
    for (std::size_t i = 0; i < labels.size(); ++i)
        require(labels[i].height == dataset.height && labels[i].width == dataset.width,
                "train: label dimensions differ from dataset for id '" + dataset.samples[i].id + "'");

    const CeNorm norm = config.ce_sum ? CeNorm::sum : CeNorm::mean;
    ModelParams params = init_params(config.k, seed);
    OptimizerState opt = make_optimizer_state(params);
    TrainHistory history;

    const std::size_t n_samples = dataset.samples.size();
    std::vector<std::size_t> order(n_samples);

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const double lr = lr_schedule(epoch, config.lr0, config.epochs);
        const double beta1 = epoch <= 10 ? config.beta1_pre : config.beta1_post;
        const bool reweight = epoch >= config.e_start;

        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(),
                     make_rng(derive_seed(seed, kShuffleStream, static_cast<std::uint64_t>(epoch))));

        EpochStats stats;
        stats.epoch = epoch;
        stats.lr = lr;
        double loss_sum = 0.0;
        int batch_count = 0;

        for (std::size_t start = 0; start < n_samples; start += config.batch_size) {
            const std::size_t end = std::min(n_samples, start + config.batch_size);
            std::vector<std::size_t> chunk(order.begin() + start, order.begin() + end);
            // The shuffle decides membership only; within the batch, samples
            // stay in dataset-id order (the canonical tie-break order).
            std::sort(chunk.begin(), chunk.end());
            const std::size_t b = chunk.size();

            const std::uint64_t step_seed =
                derive_seed(seed, kStepStream,
                            static_cast<std::uint64_t>(epoch) * 1'000'000 + start);

            std::vector<Image> images(b);
            std::vector<LabelMask> masks(b);
            for (std::size_t p = 0; p < b; ++p) {
                images[p] = dataset.samples[chunk[p]].image;
                masks[p] = labels[chunk[p]];
                if (config.augment)
                    crop_half_width(images[p], masks[p],
                                    derive_seed(step_seed, kCropStream, static_cast<std::uint64_t>(p)));
            }

            // One stochastic forward per image; its CE map drives the weights
            // and its cache drives the gradient, so both see the same pass.
            std::vector<PassCache> caches(b);
            std::vector<std::vector<double>> ce_grids(b);
            parallel_for(b, [&](std::size_t p) {
                const DropoutOpts opts{config.train_dropout, config.p_drop,
                                       derive_seed(step_seed, static_cast<std::uint64_t>(p))};
                forward_pass(params, images[p], opts, caches[p]);
                ce_grids[p] = ce_map(caches[p].probs, masks[p]);
            });

            std::vector<WeightMap> alpha(b);
            std::vector<double> lambda(b, 1.0);
            std::vector<double> batch_ce(b);
            for (std::size_t p = 0; p < b; ++p) {
                const double sum = std::accumulate(ce_grids[p].begin(), ce_grids[p].end(), 0.0);
                batch_ce[p] = norm == CeNorm::mean ? sum / ce_grids[p].size() : sum;
                if (reweight && !config.ablate_pixel_weights)
                    alpha[p] = pixel_weights(ce_grids[p], dataset.height, dataset.width, config.gamma);
                else
                    alpha[p] = ones_weights(dataset.height, dataset.width);
            }
            if (reweight && !config.ablate_image_weights)
                lambda = image_weights(batch_ce, config.beta).lambda;

            for (std::size_t p = 0; p < b; ++p) {
                if (lambda[p] == 0.0) ++stats.lambda_zero_images;
                for (const auto a : alpha[p].data)
                    if (a == 0) ++stats.alpha_zero_pixels;
            }

            // Per-image gradients reduced in dataset-id order.
            std::vector<Gradients> partial(b);
            std::vector<double> losses(b, 0.0);
            parallel_for(b, [&](std::size_t p) {
                partial[p] = zero_gradients(params);
                losses[p] = backward_pass(params, caches[p], masks[p], alpha[p], lambda[p], norm,
                                          partial[p]);
            });
            Gradients grads = zero_gradients(params);
            double loss = 0.0;
            for (std::size_t p = 0; p < b; ++p) {
                loss += losses[p];
                accumulate(grads, partial[p]);
            }
            loss += config.l2_mu * params_squared_sum(params);
            for (int blk = 0; blk < kConvCount; ++blk) {
                for (std::size_t j = 0; j < params.conv[blk].w.size(); ++j)
                    grads.conv[blk].w[j] += 2.0 * config.l2_mu * params.conv[blk].w[j];
                for (std::size_t j = 0; j < params.conv[blk].b.size(); ++j)
                    grads.conv[blk].b[j] += 2.0 * config.l2_mu * params.conv[blk].b[j];
            }

            adam_step(params, grads, opt, lr, beta1, config.beta2);
            loss_sum += loss;
            ++batch_count;
        }

        stats.mean_loss = loss_sum / batch_count;
        history.epochs.push_back(stats);
    }
    return {std::move(params), std::move(history)};
}

// --- pipeline ---------------------------------------------------------------

std::vector<LabelMask> pseudo_labels(const Dataset& dataset) {
    std::vector<LabelMask> labels;
    labels.reserve(dataset.samples.size());
    for (const Sample& s : dataset.samples) labels.push_back(s.pseudo);
    return labels;
}

std::vector<LabelMask> ground_truth_labels(const Dataset& dataset) {
    std::vector<LabelMask> labels;
    labels.reserve(dataset.samples.size());
    for (const Sample& s : dataset.samples) {
        require(s.ground_truth.has_value(),
                "dataset: sample '" + s.id + "' has no ground truth");
        labels.push_back(*s.ground_truth);
    }
    return labels;
}

namespace {

void write_history_csv(const TrainHistory& history, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("trainer: cannot write " + path.string());
    out << "epoch,mean_loss,lr,lambda_zero_images,alpha_zero_pixels\n";
    for (const EpochStats& e : history.epochs) {
        char loss[32], lr[32];
        std::snprintf(loss, sizeof(loss), "%.9g", e.mean_loss);
        std::snprintf(lr, sizeof(lr), "%.9g", e.lr);
        out << e.epoch << "," << loss << "," << lr << "," << e.lambda_zero_images << ","
            << e.alpha_zero_pixels << "\n";
    }
}

void write_corrections_csv(const std::vector<CorrectionLogEntry>& log, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("trainer: cannot write " + path.string());
    out << "id,candidates,corrected,mean_cs_corrected\n";
    for (const CorrectionLogEntry& e : log) {
        char cs[32];
        std::snprintf(cs, sizeof(cs), "%.6f", e.mean_cs_corrected);
        out << e.id << "," << e.candidates << "," << e.corrected << "," << cs << "\n";
    }
}

} // namespace

ModelParams stage_train(const Dataset& dataset, const std::vector<LabelMask>& labels,
                        const RunConfig& config, std::uint64_t seed, const fs::path& run_dir,
                        int round) {
    auto [params, history] = train(dataset, labels, config, seed);
    fs::create_directories(run_dir);
    const std::string tag = round >= 0 ? "round" + std::to_string(round) : "clean";
    save_model(params, run_dir / ("model_" + tag + ".bin"));
    write_history_csv(history, run_dir / ("history_" + tag + ".csv"));
    return std::move(params);
}

CorrectionOutput stage_correct(const ModelParams& model, const Dataset& dataset,
                               const std::vector<LabelMask>& labels, const RunConfig& config,
                               int round, const fs::path& run_dir) {
    require(labels.size() == dataset.samples.size(), "stage_correct: label/id mismatch");
    fs::create_directories(run_dir / "confidence");
    fs::create_directories(run_dir / "corrected_labels");

    CorrectionOutput out;
    out.labels.resize(dataset.samples.size());
    out.log.resize(dataset.samples.size());
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const Sample& s = dataset.samples[i];
        const std::uint64_t conf_seed =
            derive_seed(config.seed, kConfStream, derive_seed(static_cast<std::uint64_t>(round), i));
        auto [conf, reference] =
            confidence_map(model, s.image, config.num_passes, config.p_drop, conf_seed);
        auto [corrected, log] = correct_labels(labels[i], reference, conf, config.tau);
        log.id = s.id;
        write_pgm(conf, run_dir / "confidence" / (s.id + ".pgm"));
        write_pgm(corrected, run_dir / "corrected_labels" / (s.id + ".pgm"));
        out.labels[i] = std::move(corrected);
        out.log[i] = log;
    }
    write_corrections_csv(out.log, run_dir / "corrections.csv");
    return out;
}

void write_metrics_csv(const std::vector<StageMetrics>& stages, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("trainer: cannot write " + path.string());
    out << "stage,class,tp,fp,tn,fn,acc,dice\n";
    for (const StageMetrics& stage : stages) {
        for (const ClassRates& r : stage.rows) {
            out << stage.stage << "," << r.cls;
            if (r.defined) {
                out << "," << csv_pct(r.tp) << "," << csv_pct(r.fp) << "," << csv_pct(r.tn) << ","
                    << csv_pct(r.fn) << "," << csv_pct(r.acc) << "," << csv_pct(r.dice) << "\n";
            } else {
                out << ",,,,,,\n";
            }
        }
    }
}

namespace {

StageMetrics masks_stage(const std::string& name, const std::vector<LabelMask>& candidates,
                         const Dataset& dataset) {
    PixelCounts counts(dataset.classes);
    for (std::size_t i = 0; i < dataset.samples.size(); ++i)
        counts.add(candidates[i], *dataset.samples[i].ground_truth);
    return {name, class_rates(counts)};
}

StageMetrics predictions_stage(const std::string& name, const ModelParams& model,
                               const Dataset& eval_ds) {
    PixelCounts counts(eval_ds.classes);
    std::vector<LabelMask> preds(eval_ds.samples.size());
    parallel_for(eval_ds.samples.size(),
                 [&](std::size_t i) { preds[i] = predict(model, eval_ds.samples[i].image); });
    for (std::size_t i = 0; i < eval_ds.samples.size(); ++i)
        counts.add(preds[i], *eval_ds.samples[i].ground_truth);
    return {name, class_rates(counts)};
}

} // namespace

PipelineReport run_pipeline(const Dataset& dataset, const Dataset* test_ds,
                            const RunConfig& config, const fs::path& run_dir,
                            bool clean_baseline) {
    require(!dataset.samples.empty(), "pipeline: empty dataset");
    PipelineReport report;
    report.config = config;
    report.run_dir = run_dir;

    fs::create_directories(run_dir);
    {
        std::ofstream cfg(run_dir / "config.txt", std::ios::trunc);
        cfg << serialize_config(config);
    }

    const bool train_gt = dataset.has_ground_truth();
    const Dataset& eval_ds = test_ds != nullptr ? *test_ds : dataset;
    const bool eval_gt = eval_ds.has_ground_truth();
    if (!train_gt)
        report.warnings.push_back("no ground_truth/ in training data: label-quality stages omitted");
    if (!eval_gt)
        report.warnings.push_back("no ground_truth/ in evaluation data: prediction stages omitted");

    const auto timed = [&report](const std::string& name, const auto& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        report.timings_sec.emplace_back(name, std::chrono::duration<double>(t1 - t0).count());
    };

    std::vector<LabelMask> labels = pseudo_labels(dataset);
    if (train_gt) report.stages.push_back(masks_stage("pseudo", labels, dataset));

    ModelParams model_first;
    timed("train_round0", [&] {
        model_first = stage_train(dataset, labels, config, config.seed, run_dir, 0);
    });
    ++report.trainings;
    report.train_init_seeds.push_back(config.seed);

    ModelParams model_final = model_first;
    for (int round = 1; round <= config.rounds; ++round) {
        CorrectionOutput corrected;
        timed("correct_round" + std::to_string(round), [&] {
            corrected = stage_correct(model_final, dataset, labels, config, round, run_dir);
        });
        ++report.corrections;
        labels = std::move(corrected.labels);

        if (config.ablate_retrain) break;

        timed("train_round" + std::to_string(round), [&] {
            model_final = stage_train(dataset, labels, config, config.seed + round, run_dir, round);
        });
        ++report.trainings;
        report.train_init_seeds.push_back(config.seed + round);
    }
    if (report.corrections > 0 && train_gt)
        report.stages.push_back(masks_stage("corrected", labels, dataset));

    if (eval_gt) {
        timed("evaluate", [&] {
            report.stages.push_back(predictions_stage("pred_noisy", model_first, eval_ds));
            if (report.corrections > 0)
                report.stages.push_back(predictions_stage("pred_corrected", model_final, eval_ds));
        });
    }

    if (clean_baseline) {
        ModelParams model_clean;
        timed("train_clean", [&] {
            model_clean = stage_train(dataset, ground_truth_labels(dataset), config,
                                      config.seed + config.rounds + 1, run_dir, -1);
        });
        ++report.trainings;
        report.train_init_seeds.push_back(config.seed + config.rounds + 1);
        if (eval_gt) report.stages.push_back(predictions_stage("pred_clean", model_clean, eval_ds));
    }

    write_metrics_csv(report.stages, run_dir / "metrics.csv");
    return report;
}

} // namespace labelmend
