#pragma once

#include <cstdint>
#include <vector>

#include "labelmend/types.hpp"

namespace labelmend {

// Pooled per-class pixel counts. Dataset-level metrics divide after pooling
// (micro-average), so images with tiny foregrounds cannot dominate.
struct PixelCounts {
    int classes = 0;
    std::vector<long long> cand; // candidate/prediction pixels per class
    std::vector<long long> gt;   // ground-truth pixels per class
    std::vector<long long> match; // pixels where cand == gt == class
    long long total = 0;

    explicit PixelCounts(int k = 0);
    void add(const LabelMask& candidate, const LabelMask& ground_truth);
};

// Table-1 style accounting, binary masks only. tp+fn and fp+tn each sum to
// 100% (tp,fn normalized by ground-truth foreground; fp,tn by background).
struct LabelQuality {
    double tp_rate = 0.0, fp_rate = 0.0, tn_rate = 0.0, fn_rate = 0.0; // percentages
};

LabelQuality label_quality(const PixelCounts& counts);
LabelQuality label_quality(const LabelMask& candidate, const LabelMask& ground_truth);

// Per-class recall ("accuracy") and Dice, as percentages.
struct ClassScore {
    int cls = 0;
    bool defined = true; // false when the ground truth lacks this class
    double accuracy = 0.0;
    double dice = 0.0;
};

struct SegScore {
    std::vector<ClassScore> per_class;
};

SegScore seg_score(const PixelCounts& counts);
SegScore seg_score(const LabelMask& pred, const LabelMask& ground_truth);

// One-vs-rest rates per class, the row shape of metrics.csv.
struct ClassRates {
    int cls = 0;
    bool defined = true;
    double tp = 0.0, fp = 0.0, tn = 0.0, fn = 0.0, acc = 0.0, dice = 0.0; // percentages
};

std::vector<ClassRates> class_rates(const PixelCounts& counts);

} // namespace labelmend
