#pragma once

#include <string>
#include <utility>

#include "labelmend/types.hpp"

namespace labelmend {

// Audit trail for one image's correction.
struct CorrectionLogEntry {
    std::string id;
    long candidates = 0;       // pixels where pseudo and reference disagree
    long corrected = 0;        // of those, pixels with CS >= tau
    double mean_cs_corrected = 0.0;
};

// Flips pseudo[x] to reference_pred[x] exactly when the labels disagree and
// the confidence clears tau. Everything else is copied through.
std::pair<LabelMask, CorrectionLogEntry> correct_labels(const LabelMask& pseudo,
                                                        const LabelMask& reference_pred,
                                                        const ConfidenceMap& conf, double tau);

} // namespace labelmend
