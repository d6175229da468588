#include "labelmend/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "labelmend/pgm.hpp"
#include "labelmend/rng.hpp"

namespace labelmend {

namespace {

using Rng = std::mt19937_64;

int uniform_int(Rng& rng, int lo, int hi) { // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

void paint_ellipse(LabelMask& mask, double cx, double cy, double rx, double ry) {
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            const double dx = (x - cx) / rx, dy = (y - cy) / ry;
            if (dx * dx + dy * dy <= 1.0) mask.at(y, x) = 1;
        }
    }
}

void paint_rect(LabelMask& mask, int x0, int y0, int x1, int y1) {
    for (int y = std::max(0, y0); y <= std::min(mask.height - 1, y1); ++y)
        for (int x = std::max(0, x0); x <= std::min(mask.width - 1, x1); ++x) mask.at(y, x) = 1;
}

double foreground_fraction(const LabelMask& mask) {
    long fg = 0;
    for (const auto v : mask.data) fg += v;
    return static_cast<double>(fg) / mask.data.size();
}

LabelMask draw_mask(Rng& rng, int h, int w) {
    LabelMask mask;
    mask.height = h;
    mask.width = w;
    mask.classes = 2;
    mask.provenance = Provenance::ground_truth;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        mask.data.assign(static_cast<std::size_t>(h) * w, 0);
        const int shapes = uniform_int(rng, 1, 3);
        for (int s = 0; s < shapes; ++s) {
            if (uniform_int(rng, 0, 1) == 0) {
                const double cx = uniform_real(rng, 0.2 * w, 0.8 * w);
                const double cy = uniform_real(rng, 0.2 * h, 0.8 * h);
                const double rx = uniform_real(rng, 0.10 * w, 0.30 * w);
                const double ry = uniform_real(rng, 0.10 * h, 0.30 * h);
                paint_ellipse(mask, cx, cy, rx, ry);
            } else {
                const int x0 = uniform_int(rng, 0, w - 3);
                const int y0 = uniform_int(rng, 0, h - 3);
                const int x1 = x0 + uniform_int(rng, std::max(2, w / 8), std::max(2, (2 * w) / 5));
                const int y1 = y0 + uniform_int(rng, std::max(2, h / 8), std::max(2, (2 * h) / 5));
                paint_rect(mask, x0, y0, x1, y1);
            }
        }
        const double frac = foreground_fraction(mask);
        if (frac >= 0.05 && frac <= 0.6) return mask;
    }
    throw std::runtime_error("gen_shapes: could not reach target foreground fraction");
}

Image render_image(Rng& rng, const LabelMask& mask) {
    const int h = mask.height, w = mask.width;
    Image img;
    img.height = h;
    img.width = w;
    img.data.resize(mask.data.size());
    // 3x3 box blur over the binary mask; the window truncates at borders.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double sum = 0.0;
            int count = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int yy = y + dy, xx = x + dx;
                    if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                    sum += mask.at(yy, xx);
                    ++count;
                }
            }
            img.at(y, x) = sum / count;
        }
    }
    for (double& v : img.data)
        v = std::clamp(v + uniform_real(rng, -0.15, 0.15), 0.0, 1.0);
    return img;
}

std::vector<std::pair<int, int>> disk_offsets(int radius) {
    std::vector<std::pair<int, int>> offs;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dy * dy + dx * dx <= radius * radius) offs.emplace_back(dy, dx);
    return offs;
}

// Morphology with out-of-bounds treated as background.
void morph(LabelMask& mask, int radius, bool dilate) {
    if (radius <= 0) return;
    const auto offs = disk_offsets(radius);
    const LabelMask src = mask;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            bool any_fg = false, all_fg = true;
            for (const auto& [dy, dx] : offs) {
                const int yy = y + dy, xx = x + dx;
                const bool fg =
                    yy >= 0 && yy < mask.height && xx >= 0 && xx < mask.width && src.at(yy, xx) == 1;
                any_fg |= fg;
                all_fg &= fg;
            }
            mask.at(y, x) = dilate ? (any_fg ? 1 : 0) : (all_fg ? 1 : 0);
        }
    }
}

void paint_disk(LabelMask& mask, int cy, int cx, int radius, std::uint8_t value) {
    for (const auto& [dy, dx] : disk_offsets(radius)) {
        const int yy = cy + dy, xx = cx + dx;
        if (yy >= 0 && yy < mask.height && xx >= 0 && xx < mask.width) mask.at(yy, xx) = value;
    }
}

// Picks a seeded pixel of the wanted class; falls back to any pixel when the
// class is absent.
std::pair<int, int> pick_pixel(Rng& rng, const LabelMask& mask, std::uint8_t wanted) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        const int y = uniform_int(rng, 0, mask.height - 1);
        const int x = uniform_int(rng, 0, mask.width - 1);
        if (mask.at(y, x) == wanted) return {y, x};
    }
    return {uniform_int(rng, 0, mask.height - 1), uniform_int(rng, 0, mask.width - 1)};
}

} // namespace

std::vector<std::pair<Image, LabelMask>> gen_shapes(int n, int h, int w, std::uint64_t seed) {
    require(n >= 1, "gen_shapes: n must be >= 1");
    require(h % 4 == 0 && w % 4 == 0, "gen_shapes: dimensions must be divisible by 4");
    std::vector<std::pair<Image, LabelMask>> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        Rng rng = make_rng(derive_seed(seed ^ static_cast<std::uint64_t>(i), 0));
        LabelMask mask = draw_mask(rng, h, w);
        Image img = render_image(rng, mask);
        out.emplace_back(std::move(img), std::move(mask));
    }
    return out;
}

LabelMask inject_noise(const LabelMask& gt, const NoiseSpec& spec, std::uint64_t seed,
                       bool* severe_out) {
    require(gt.provenance == Provenance::ground_truth,
            "inject_noise: input must be a ground-truth mask");
    LabelMask out = gt;
    out.provenance = Provenance::pseudo;
    if (severe_out) *severe_out = false;
    if (spec.severity <= 0.0) return out;

    Rng rng = make_rng(mix64(seed));
    const bool severe = uniform_real(rng, 0.0, 1.0) < spec.severe_fraction;
    if (severe_out) *severe_out = severe;

    const int radius_cap =
        severe ? std::max(1, static_cast<int>(std::lround(spec.boundary_radius_max * spec.severity)))
               : 1;
    const int radius = severe ? uniform_int(rng, 1, radius_cap) : uniform_int(rng, 0, 1);
    const bool dilate = uniform_int(rng, 0, 1) == 1;
    morph(out, radius, dilate);

    if (severe) {
        const int hole_cap = static_cast<int>(std::lround(spec.hole_count_max * spec.severity));
        const int holes = hole_cap > 0 ? uniform_int(rng, 0, hole_cap) : 0;
        for (int i = 0; i < holes; ++i) {
            const auto [cy, cx] = pick_pixel(rng, out, 1);
            const int r = uniform_int(rng, 1, std::max(1, static_cast<int>(std::lround(8 * spec.severity))));
            paint_disk(out, cy, cx, r, 0);
        }
    }

    const int blob_cap = static_cast<int>(std::lround(spec.blob_count_max * spec.severity));
    const int blobs = blob_cap > 0 ? uniform_int(rng, 0, blob_cap) : 0;
    for (int i = 0; i < blobs; ++i) {
        const auto [cy, cx] = pick_pixel(rng, out, 0);
        const int r = uniform_int(rng, 1, std::max(1, static_cast<int>(std::lround(2 * spec.severity))));
        paint_disk(out, cy, cx, r, 1);
    }
    return out;
}

std::vector<NoiseReportRow> write_synth_dataset(const std::filesystem::path& dir, int n, int h,
                                                int w, const NoiseSpec& spec, std::uint64_t seed) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "images");
    fs::create_directories(dir / "labels");
    fs::create_directories(dir / "ground_truth");

    const auto samples = gen_shapes(n, h, w, seed);
    std::vector<NoiseReportRow> report;
    report.reserve(n);
    for (int i = 0; i < n; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "%04d", i);
        const auto& [img, gt] = samples[i];

        // Shape and noise streams share the per-sample seed ^ index base but
        // branch on a stream tag so their draws stay uncorrelated.
        const std::uint64_t noise_seed = derive_seed(seed ^ static_cast<std::uint64_t>(i), 1);
        bool severe = false;
        LabelMask pseudo = inject_noise(gt, spec, noise_seed, &severe);

        long diff = 0;
        for (std::size_t p = 0; p < gt.data.size(); ++p)
            if (gt.data[p] != pseudo.data[p]) ++diff;

        write_pgm(img, dir / "images" / (std::string(id) + ".pgm"));
        write_pgm(pseudo, dir / "labels" / (std::string(id) + ".pgm"));
        write_pgm(gt, dir / "ground_truth" / (std::string(id) + ".pgm"));
        report.push_back({id, severe, static_cast<double>(diff) / gt.data.size()});
    }

    std::ofstream csv(dir / "noise_report.csv", std::ios::trunc);
    if (!csv) throw std::runtime_error("synth: cannot write noise_report.csv under " + dir.string());
    csv << "id,regime,disagreement_rate\n";
    for (const auto& row : report) {
        char rate[32];
        std::snprintf(rate, sizeof(rate), "%.6f", row.disagreement_rate);
        csv << row.id << "," << (row.severe ? "severe" : "mild") << "," << rate << "\n";
    }
    return report;
}

} // namespace labelmend
