#pragma once

#include <filesystem>

#include "labelmend/types.hpp"

namespace labelmend {

// Binary PGM (P5, maxval <= 255) is the single raster format of the project.

Image read_pgm_image(const std::filesystem::path& path);
LabelMask read_pgm_mask(const std::filesystem::path& path, int classes);

void write_pgm(const Image& image, const std::filesystem::path& path);
void write_pgm(const LabelMask& mask, const std::filesystem::path& path);
void write_pgm(const ConfidenceMap& conf, const std::filesystem::path& path);

} // namespace labelmend
