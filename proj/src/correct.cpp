#include "labelmend/correct.hpp"

namespace labelmend {

std::pair<LabelMask, CorrectionLogEntry> correct_labels(const LabelMask& pseudo,
                                                        const LabelMask& reference_pred,
                                                        const ConfidenceMap& conf, double tau) {
    require(pseudo.height == reference_pred.height && pseudo.width == reference_pred.width &&
                pseudo.height == conf.height && pseudo.width == conf.width,
            "correct_labels: mask/prediction/confidence dimensions differ");
    require(pseudo.provenance == Provenance::pseudo || pseudo.provenance == Provenance::corrected,
            "correct_labels: input mask must be a pseudo or corrected label");

    LabelMask out = pseudo;
    out.provenance = Provenance::corrected;
    CorrectionLogEntry log;
    double cs_sum = 0.0;
    for (std::size_t i = 0; i < pseudo.data.size(); ++i) {
        if (pseudo.data[i] == reference_pred.data[i]) continue;
        ++log.candidates;
        if (conf.data[i] >= tau) {
            out.data[i] = reference_pred.data[i];
            ++log.corrected;
            cs_sum += conf.data[i];
        }
    }
    log.mean_cs_corrected = log.corrected > 0 ? cs_sum / log.corrected : 0.0;
    return {std::move(out), log};
}

} // namespace labelmend
