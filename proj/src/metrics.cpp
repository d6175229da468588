#include "labelmend/metrics.hpp"

#include <string>

namespace labelmend {

PixelCounts::PixelCounts(int k)
    : classes(k), cand(k, 0), gt(k, 0), match(k, 0) {}

void PixelCounts::add(const LabelMask& candidate, const LabelMask& ground_truth) {
    require(ground_truth.provenance == Provenance::ground_truth,
            "metrics: reference mask must have ground_truth provenance");
    require(candidate.height == ground_truth.height && candidate.width == ground_truth.width,
            "metrics: mask dimensions differ");
    if (classes == 0) {
        classes = candidate.classes;
        cand.assign(classes, 0);
        gt.assign(classes, 0);
        match.assign(classes, 0);
    }
    for (std::size_t i = 0; i < candidate.data.size(); ++i) {
        const int c = candidate.data[i];
        const int g = ground_truth.data[i];
        ++cand[c];
        ++gt[g];
        if (c == g) ++match[c];
        ++total;
    }
}

LabelQuality label_quality(const PixelCounts& counts) {
    require(counts.classes == 2, "label_quality: defined for binary masks only");
    const long long fg = counts.gt[1], bg = counts.gt[0];
    if (fg == 0) throw std::runtime_error("label_quality: ground truth has no class-1 pixels");
    if (bg == 0) throw std::runtime_error("label_quality: ground truth has no class-0 pixels");
    const long long tp = counts.match[1];
    const long long fp = counts.cand[1] - counts.match[1];
    LabelQuality q;
    q.tp_rate = 100.0 * tp / fg;
    q.fn_rate = 100.0 - q.tp_rate;
    q.fp_rate = 100.0 * fp / bg;
    q.tn_rate = 100.0 - q.fp_rate;
    return q;
}

LabelQuality label_quality(const LabelMask& candidate, const LabelMask& ground_truth) {
    PixelCounts counts(candidate.classes);
    counts.add(candidate, ground_truth);
    return label_quality(counts);
}

SegScore seg_score(const PixelCounts& counts) {
    SegScore score;
    for (int l = 0; l < counts.classes; ++l) {
        ClassScore cs;
        cs.cls = l;
        if (counts.gt[l] == 0) {
            cs.defined = false;
        } else {
            cs.accuracy = 100.0 * counts.match[l] / counts.gt[l];
            cs.dice = 100.0 * 2.0 * counts.match[l] / (counts.cand[l] + counts.gt[l]);
        }
        score.per_class.push_back(cs);
    }
    return score;
}

SegScore seg_score(const LabelMask& pred, const LabelMask& ground_truth) {
    PixelCounts counts(pred.classes);
    counts.add(pred, ground_truth);
    return seg_score(counts);
}

std::vector<ClassRates> class_rates(const PixelCounts& counts) {
    std::vector<ClassRates> rows;
    for (int l = 0; l < counts.classes; ++l) {
        ClassRates r;
        r.cls = l;
        const long long pos = counts.gt[l];
        const long long neg = counts.total - pos;
        if (pos == 0 || neg == 0) {
            r.defined = false;
            rows.push_back(r);
            continue;
        }
        const long long tp = counts.match[l];
        const long long fp = counts.cand[l] - counts.match[l];
        r.tp = 100.0 * tp / pos;
        r.fn = 100.0 - r.tp;
        r.fp = 100.0 * fp / neg;
        r.tn = 100.0 - r.fp;
        r.acc = r.tp; // per-class accuracy is class recall
        r.dice = 100.0 * 2.0 * tp / (counts.cand[l] + pos);
        rows.push_back(r);
    }
    return rows;
}

} // namespace labelmend
