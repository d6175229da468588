#include "labelmend/types.hpp"

namespace labelmend {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::ground_truth: return "ground_truth";
        case Provenance::pseudo: return "pseudo";
        case Provenance::corrected: return "corrected";
        case Provenance::prediction: return "prediction";
    }
    return "unknown";
}

WeightMap ones_weights(int height, int width) {
    WeightMap w;
    w.height = height;
    w.width = width;
    w.data.assign(static_cast<std::size_t>(height) * width, 1);
    return w;
}

} // namespace labelmend
