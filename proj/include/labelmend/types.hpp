#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace labelmend {

// Who produced a mask. Arithmetic never depends on it; tests and reports do.
enum class Provenance : std::uint8_t { ground_truth, pseudo, corrected, prediction };

std::string to_string(Provenance p);

// H×W grayscale intensities in [0,1], row-major.
struct Image {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    double& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
};

// H×W per-pixel class indices in {0..classes-1}.
struct LabelMask {
    int height = 0;
    int width = 0;
    int classes = 2;
    std::vector<std::uint8_t> data;
    Provenance provenance = Provenance::ground_truth;

    std::uint8_t& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
};

// H×W×k per-pixel class probabilities; each pixel's k-vector sums to 1.
struct ProbMap {
    int height = 0;
    int width = 0;
    int classes = 0;
    std::vector<double> data; // data[(y*width + x)*classes + l]

    double& at(int y, int x, int l) {
        return data[(static_cast<std::size_t>(y) * width + x) * classes + l];
    }
    double at(int y, int x, int l) const {
        return data[(static_cast<std::size_t>(y) * width + x) * classes + l];
    }
    std::size_t pixels() const { return static_cast<std::size_t>(height) * width; }
};

// Per-pixel binary weight alpha(x).
struct WeightMap {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;

    std::uint8_t& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
};

WeightMap ones_weights(int height, int width);

// Per-pixel confidence scores; every value is an exact multiple of 1/num_passes.
struct ConfidenceMap {
    int height = 0;
    int width = 0;
    int num_passes = 0;
    std::vector<double> data;

    double& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
};

inline void require(bool cond, const std::string& message) {
    if (!cond) throw std::runtime_error(message);
}

} // namespace labelmend
