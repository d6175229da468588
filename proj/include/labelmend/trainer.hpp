#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "labelmend/config.hpp"
#include "labelmend/correct.hpp"
#include "labelmend/dataset.hpp"
#include "labelmend/metrics.hpp"
#include "labelmend/segnet.hpp"

namespace labelmend {

struct OptimizerState {
    Gradients m; // first moment
    Gradients v; // second moment
    long t = 0;
};

OptimizerState make_optimizer_state(const ModelParams& params);

// Bias-corrected Adam with epsilon 1e-8.
void adam_step(ModelParams& params, const Gradients& grads, OptimizerState& state, double lr,
               double beta1, double beta2);

// lr0 through epoch 10, then linear decay of the remaining-epoch fraction:
// lr0 * (E - epoch) / (E - 10). Constant when E <= 10.
double lr_schedule(int epoch, double lr0, int total_epochs);

struct EpochStats {
    int epoch = 0;
    double mean_loss = 0.0;
    double lr = 0.0;
    long lambda_zero_images = 0;
    long alpha_zero_pixels = 0;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
};

// One full training run from a fresh seeded initialization. labels[i] is the
// training target for dataset sample i. Reweighting (alpha, lambda) starts at
// epoch e_start and is recomputed from the current model every mini-batch.
std::pair<ModelParams, TrainHistory> train(const Dataset& dataset,
                                           const std::vector<LabelMask>& labels,
                                           const RunConfig& config, std::uint64_t seed);

// --- pipeline stages (the CLI stage commands call exactly these) -----------

// Trains and persists model_round<r>.bin + history_round<r>.csv.
ModelParams stage_train(const Dataset& dataset, const std::vector<LabelMask>& labels,
                        const RunConfig& config, std::uint64_t seed,
                        const std::filesystem::path& run_dir, int round);

struct CorrectionOutput {
    std::vector<LabelMask> labels;
    std::vector<CorrectionLogEntry> log;
};

// MC-dropout confidence per training image, then the two-condition correction.
// Persists confidence/<id>.pgm, corrected_labels/<id>.pgm and corrections.csv.
CorrectionOutput stage_correct(const ModelParams& model, const Dataset& dataset,
                               const std::vector<LabelMask>& labels, const RunConfig& config,
                               int round, const std::filesystem::path& run_dir);

struct StageMetrics {
    std::string stage; // pseudo | corrected | pred_noisy | pred_corrected | pred_clean
    std::vector<ClassRates> rows;
};

struct PipelineReport {
    RunConfig config;
    std::filesystem::path run_dir;
    std::vector<StageMetrics> stages;
    std::vector<std::pair<std::string, double>> timings_sec;
    std::vector<std::string> warnings;
    int trainings = 0;
    int corrections = 0;
    std::vector<std::uint64_t> train_init_seeds; // one per training, fresh per round
};

// Round 0 trains on the pseudo labels; each further round corrects the labels
// with the previous model and retrains from scratch on seed + round.
// test_ds, when given, is the held-out set for the pred_* stages.
// clean_baseline additionally trains on the ground truth (pred_clean stage).
PipelineReport run_pipeline(const Dataset& dataset, const Dataset* test_ds,
                            const RunConfig& config, const std::filesystem::path& run_dir,
                            bool clean_baseline = false);

std::vector<LabelMask> pseudo_labels(const Dataset& dataset);
std::vector<LabelMask> ground_truth_labels(const Dataset& dataset);

void write_metrics_csv(const std::vector<StageMetrics>& stages, const std::filesystem::path& path);

} // namespace labelmend
