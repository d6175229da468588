// labelmend: pseudo-label correction pipeline for segmentation at desk scale.
// Subcommands cover dataset synthesis, the full pipeline, its individual
// stages, evaluation, hyperparameter sweeps, and module ablations.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "labelmend/confidence.hpp"
#include "labelmend/config.hpp"
#include "labelmend/correct.hpp"
#include "labelmend/dataset.hpp"
#include "labelmend/metrics.hpp"
#include "labelmend/pgm.hpp"
#include "labelmend/segnet.hpp"
#include "labelmend/synthgen.hpp"
#include "labelmend/trainer.hpp"

namespace fs = std::filesystem;
using namespace labelmend;

namespace {

struct SizeArg {
    int height = 32;
    int width = 32;
};

bool parse_size(const std::string& text, SizeArg& out) {
    const auto x = text.find('x');
    if (x == std::string::npos) return false;
    try {
        std::size_t used = 0;
        out.width = std::stoi(text.substr(0, x), &used);
        if (used != x) return false;
        out.height = std::stoi(text.substr(x + 1), &used);
        if (used != text.size() - x - 1) return false;
    } catch (const std::exception&) {
        return false;
    }
    return out.width > 0 && out.height > 0;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                      std::optional<std::uint64_t> seed_override) {
    RunConfig cfg = path.empty() ? RunConfig{} : parse_config(path);
    for (const std::string& kv : overrides)
        cfg = parse_config_text(serialize_config(cfg) + kv + "\n");
    if (seed_override) cfg.seed = *seed_override;
    return cfg;
}

std::vector<LabelMask> load_labels_dir(const Dataset& ds, const fs::path& dir, int k) {
    std::vector<LabelMask> labels;
    labels.reserve(ds.samples.size());
    for (const Sample& s : ds.samples) {
        LabelMask m = read_pgm_mask(dir / (s.id + ".pgm"), k);
        m.provenance = Provenance::pseudo;
        require(m.height == ds.height && m.width == ds.width,
                "labels: dimension mismatch for id '" + s.id + "'");
        labels.push_back(std::move(m));
    }
    return labels;
}

void print_stage_rows(const StageMetrics& stage) {
    for (const ClassRates& r : stage.rows) {
        if (!r.defined) {
            std::printf("%-14s class %d: undefined (empty ground-truth class)\n",
                        stage.stage.c_str(), r.cls);
            continue;
        }
        std::printf("%-14s class %d: TP %.2f  FP %.2f  TN %.2f  FN %.2f  Acc %.2f  Dice %.2f\n",
                    stage.stage.c_str(), r.cls, r.tp, r.fp, r.tn, r.fn, r.acc, r.dice);
    }
}

void print_report(const PipelineReport& report) {
    for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
    for (const StageMetrics& stage : report.stages) print_stage_rows(stage);
    for (const auto& [name, sec] : report.timings_sec)
        std::printf("%-14s %.1f s\n", name.c_str(), sec);
    std::printf("run directory: %s\n", report.run_dir.string().c_str());
}

void write_run_config(const RunConfig& cfg, const fs::path& run_dir) {
    fs::create_directories(run_dir);
    std::ofstream out(run_dir / "config.txt", std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (run_dir / "config.txt").string());
    out << serialize_config(cfg);
}

// The stage used for sweep/ablation scoring: the final model's predictions.
const StageMetrics* final_pred_stage(const PipelineReport& report) {
    const StageMetrics* found = nullptr;
    for (const StageMetrics& s : report.stages)
        if (s.stage == "pred_corrected" || (found == nullptr && s.stage == "pred_noisy")) found = &s;
    return found;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-label correction pipeline for segmentation"};
    app.require_subcommand(1);

    // --- synth --------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "generate a synthetic noisy-label dataset");
    std::string synth_out;
    int synth_n = 64;
    std::string synth_size = "32x32";
    NoiseSpec noise;
    std::uint64_t synth_seed = 42;
    synth->add_option("--out", synth_out, "output dataset directory")->required();
    synth->add_option("--n", synth_n, "number of samples")->check(CLI::PositiveNumber);
    synth->add_option("--size", synth_size, "image size HxW (divisible by 4)");
    synth->add_option("--severity", noise.severity, "noise severity")->check(CLI::Range(0.0, 1.0));
    synth->add_option("--severe-frac", noise.severe_fraction, "fraction of severe images")
        ->check(CLI::Range(0.0, 1.0));
    synth->add_option("--boundary-radius-max", noise.boundary_radius_max)->check(CLI::PositiveNumber);
    synth->add_option("--hole-max", noise.hole_count_max)->check(CLI::NonNegativeNumber);
    synth->add_option("--blob-max", noise.blob_count_max)->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", synth_seed, "generator seed");

    // --- shared pipeline-ish flags -------------------------------------------
    std::string data_dir, test_dir, config_path, run_dir, labels_arg, model_path, candidate_dir;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed_override;
    bool clean_baseline = false;
    double tau_flag = -1.0;
    int round_flag = 1;
    std::string sweep_param, sweep_values, eval_out;

    const auto add_common = [&](CLI::App* cmd, bool with_config) {
        cmd->add_option("--data", data_dir, "dataset directory")->required();
        if (with_config) {
            cmd->add_option("--config", config_path, "run configuration file");
            cmd->add_option("--set", overrides, "override a config key, e.g. --set beta=0.2");
            cmd->add_option_function<std::uint64_t>(
                "--seed", [&](std::uint64_t s) { seed_override = s; }, "override the config seed");
        }
    };

    auto* pipeline = app.add_subcommand("pipeline", "full correct-and-retrain pipeline");
    add_common(pipeline, true);
    pipeline->add_option("--test", test_dir, "held-out dataset for prediction metrics");
    pipeline->add_option("--run", run_dir, "run output directory")->required();
    pipeline->add_flag("--clean-baseline", clean_baseline,
                       "also train on ground truth (pred_clean stage)");

    auto* train_cmd = app.add_subcommand("train", "train a single round on given labels");
    add_common(train_cmd, true);
    train_cmd->add_option("--run", run_dir, "run output directory")->required();
    train_cmd->add_option("--labels", labels_arg,
                          "training labels: 'pseudo', 'ground_truth', or a mask directory");

    auto* correct_cmd = app.add_subcommand("correct", "confidence maps + label correction");
    add_common(correct_cmd, true);
    correct_cmd->add_option("--run", run_dir, "run output directory")->required();
    correct_cmd->add_option("--model", model_path, "trained model file")->required();
    correct_cmd->add_option("--labels", labels_arg, "labels to correct (default: dataset pseudo)");
    correct_cmd->add_option("--tau", tau_flag,
                            "confidence threshold override (values > 1 disable correction)");
    correct_cmd->add_option("--round", round_flag, "round index for seeding")->check(CLI::PositiveNumber);

    auto* retrain_cmd = app.add_subcommand("retrain", "train from scratch on corrected labels");
    add_common(retrain_cmd, true);
    retrain_cmd->add_option("--run", run_dir, "run output directory")->required();
    retrain_cmd->add_option("--labels", labels_arg, "corrected label directory")->required();
    retrain_cmd->add_option("--round", round_flag, "round index (seed offset and file names)")
        ->check(CLI::PositiveNumber);

    auto* eval_cmd = app.add_subcommand("eval", "compare masks or predictions to ground truth");
    add_common(eval_cmd, false);
    int eval_k = 2;
    eval_cmd->add_option("--candidate", candidate_dir, "directory of candidate masks");
    eval_cmd->add_option("--model", model_path, "model whose predictions to evaluate");
    eval_cmd->add_option("--out", eval_out, "also write rows to this CSV");
    eval_cmd->add_option("--k", eval_k, "class count")->check(CLI::Range(2, 255));

    auto* sweep_cmd = app.add_subcommand("sweep", "run the pipeline across parameter values");
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--test", test_dir, "held-out dataset for prediction metrics");
    sweep_cmd->add_option("--run", run_dir, "run output directory")->required();
    sweep_cmd->add_option("--param", sweep_param, "beta | num_passes | tau")->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();

    auto* ablate_cmd = app.add_subcommand("ablate", "full model vs module ablations");
    add_common(ablate_cmd, true);
    ablate_cmd->add_option("--test", test_dir, "held-out dataset for prediction metrics");
    ablate_cmd->add_option("--run", run_dir, "run output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) {
            SizeArg size;
            if (!parse_size(synth_size, size)) {
                std::cerr << "error: --size must look like 32x32\n";
                return 2;
            }
            if (size.height % 4 != 0 || size.width % 4 != 0) {
                std::cerr << "error: --size dimensions must be divisible by 4\n";
                return 2;
            }
            write_synth_dataset(synth_out, synth_n, size.height, size.width, noise, synth_seed);
            std::printf("wrote %d samples to %s\n", synth_n, synth_out.c_str());
            return 0;
        }

        RunConfig cfg = load_config(config_path, overrides, seed_override);

        if (pipeline->parsed() || sweep_cmd->parsed() || ablate_cmd->parsed()) {
            const Dataset ds = load_dataset(data_dir, cfg.k);
            std::optional<Dataset> test;
            if (!test_dir.empty()) test = load_dataset(test_dir, cfg.k);
            const Dataset* test_ptr = test ? &*test : nullptr;

            if (pipeline->parsed()) {
                print_report(run_pipeline(ds, test_ptr, cfg, run_dir, clean_baseline));
                return 0;
            }

            if (sweep_cmd->parsed()) {
                if (sweep_param != "beta" && sweep_param != "num_passes" && sweep_param != "tau") {
                    std::cerr << "error: --param must be beta, num_passes, or tau\n";
                    return 2;
                }
                std::vector<std::string> values;
                for (std::size_t pos = 0; pos < sweep_values.size();) {
                    const auto comma = sweep_values.find(',', pos);
                    const auto end = comma == std::string::npos ? sweep_values.size() : comma;
                    if (end > pos) values.push_back(sweep_values.substr(pos, end - pos));
                    pos = end + 1;
                }
                if (values.empty()) {
                    std::cerr << "error: --values is empty\n";
                    return 2;
                }
                fs::create_directories(run_dir);
                std::ofstream csv(fs::path(run_dir) / "sweep.csv", std::ios::trunc);
                csv << "value,class,acc,dice\n";
                for (const std::string& value : values) {
                    RunConfig swept = parse_config_text(serialize_config(cfg) + sweep_param + " = " +
                                                        value + "\n");
                    const fs::path sub = fs::path(run_dir) / (sweep_param + "_" + value);
                    const PipelineReport report = run_pipeline(ds, test_ptr, swept, sub, false);
                    const StageMetrics* stage = final_pred_stage(report);
                    require(stage != nullptr, "sweep: no prediction stage (missing ground truth?)");
                    for (const ClassRates& r : stage->rows) {
                        char acc[32], dice[32];
                        std::snprintf(acc, sizeof(acc), "%.2f", r.acc);
                        std::snprintf(dice, sizeof(dice), "%.2f", r.dice);
                        csv << value << "," << r.cls << "," << acc << "," << dice << "\n";
                    }
                    std::printf("%s = %s done\n", sweep_param.c_str(), value.c_str());
                }
                return 0;
            }

            // ablate: full model and the three module removals of the ablation table.
            struct AblationCase {
                const char* name;
                bool no_pixel, no_image, no_retrain;
            };
            const AblationCase cases[] = {{"full", false, false, false},
                                          {"no_pixel_weights", true, false, false},
                                          {"no_image_weights", false, true, false},
                                          {"no_retraining", false, false, true}};
            fs::create_directories(run_dir);
            std::ofstream csv(fs::path(run_dir) / "ablation.csv", std::ios::trunc);
            csv << "configuration,class,acc,dice\n";
            for (const AblationCase& c : cases) {
                RunConfig ablated = cfg;
                ablated.ablate_pixel_weights = c.no_pixel;
                ablated.ablate_image_weights = c.no_image;
                ablated.ablate_retrain = c.no_retrain;
                const PipelineReport report =
                    run_pipeline(ds, test_ptr, ablated, fs::path(run_dir) / c.name, false);
                const StageMetrics* stage = final_pred_stage(report);
                require(stage != nullptr, "ablate: no prediction stage (missing ground truth?)");
                for (const ClassRates& r : stage->rows) {
                    char acc[32], dice[32];
                    std::snprintf(acc, sizeof(acc), "%.2f", r.acc);
                    std::snprintf(dice, sizeof(dice), "%.2f", r.dice);
                    csv << c.name << "," << r.cls << "," << acc << "," << dice << "\n";
                }
                std::printf("%s done\n", c.name);
            }
            return 0;
        }

        if (train_cmd->parsed()) {
            const Dataset ds = load_dataset(data_dir, cfg.k);
            std::vector<LabelMask> labels;
            if (labels_arg.empty() || labels_arg == "pseudo")
                labels = pseudo_labels(ds);
            else if (labels_arg == "ground_truth")
                labels = ground_truth_labels(ds);
            else
                labels = load_labels_dir(ds, labels_arg, cfg.k);
            write_run_config(cfg, run_dir);
            stage_train(ds, labels, cfg, cfg.seed, run_dir, 0);
            std::printf("trained model_round0.bin in %s\n", run_dir.c_str());
            return 0;
        }

        if (correct_cmd->parsed()) {
            const Dataset ds = load_dataset(data_dir, cfg.k);
            if (tau_flag >= 0.0) cfg.tau = tau_flag; // may exceed 1: correction becomes a no-op
            const ModelParams model = load_model(model_path);
            std::vector<LabelMask> labels = labels_arg.empty()
                                                ? pseudo_labels(ds)
                                                : load_labels_dir(ds, labels_arg, cfg.k);
            write_run_config(cfg, run_dir);
            const CorrectionOutput out = stage_correct(model, ds, labels, cfg, round_flag, run_dir);
            long corrected = 0;
            for (const CorrectionLogEntry& e : out.log) corrected += e.corrected;
            std::printf("corrected %ld pixels across %zu images\n", corrected, out.log.size());
            return 0;
        }

        if (retrain_cmd->parsed()) {
            const Dataset ds = load_dataset(data_dir, cfg.k);
            const std::vector<LabelMask> labels = load_labels_dir(ds, labels_arg, cfg.k);
            write_run_config(cfg, run_dir);
            stage_train(ds, labels, cfg, cfg.seed + round_flag, run_dir, round_flag);
            std::printf("trained model_round%d.bin in %s\n", round_flag, run_dir.c_str());
            return 0;
        }

        // eval
        {
            cfg.k = eval_k;
            const Dataset ds = load_dataset(data_dir, cfg.k);
            if (candidate_dir.empty() == model_path.empty()) {
                std::cerr << "error: eval needs exactly one of --candidate or --model\n";
                return 2;
            }
            if (!ds.has_ground_truth()) {
                std::cerr << "warning: no ground_truth/ in " << data_dir << "; nothing to compare\n";
                return 0;
            }
            PixelCounts counts(cfg.k);
            if (!candidate_dir.empty()) {
                for (const Sample& s : ds.samples) {
                    LabelMask cand = read_pgm_mask(fs::path(candidate_dir) / (s.id + ".pgm"), cfg.k);
                    counts.add(cand, *s.ground_truth);
                }
            } else {
                const ModelParams model = load_model(model_path);
                for (const Sample& s : ds.samples) counts.add(predict(model, s.image), *s.ground_truth);
            }
            const StageMetrics stage{"eval", class_rates(counts)};
            print_stage_rows(stage);
            if (!eval_out.empty()) write_metrics_csv({stage}, eval_out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
