#include "labelmend/dataset.hpp"

#include <algorithm>

#include "labelmend/pgm.hpp"

namespace labelmend {

namespace fs = std::filesystem;

bool Dataset::has_ground_truth() const {
    return !samples.empty() &&
           std::all_of(samples.begin(), samples.end(),
                       [](const Sample& s) { return s.ground_truth.has_value(); });
}

Dataset load_dataset(const fs::path& dir, int classes) {
    const fs::path images_dir = dir / "images";
    const fs::path labels_dir = dir / "labels";
    const fs::path gt_dir = dir / "ground_truth";
    if (!fs::is_directory(images_dir))
        throw std::runtime_error("dataset: missing images/ under " + dir.string());

    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(images_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm")
            ids.push_back(entry.path().stem().string());
    }
    if (ids.empty()) throw std::runtime_error("dataset: empty dataset in " + dir.string());
    // Canonical order is a pure function of the ids, not of filesystem enumeration.
    std::sort(ids.begin(), ids.end());

    Dataset ds;
    ds.classes = classes;
    for (const std::string& id : ids) {
        Sample s;
        s.id = id;
        s.image = read_pgm_image(images_dir / (id + ".pgm"));

        const fs::path label_path = labels_dir / (id + ".pgm");
        if (!fs::exists(label_path))
            throw std::runtime_error("dataset: missing label for id '" + id + "' (" +
                                     label_path.string() + ")");
        s.pseudo = read_pgm_mask(label_path, classes);
        s.pseudo.provenance = Provenance::pseudo;

        const fs::path gt_path = gt_dir / (id + ".pgm");
        if (fs::exists(gt_path)) {
            s.ground_truth = read_pgm_mask(gt_path, classes);
            s.ground_truth->provenance = Provenance::ground_truth;
        }

        if (ds.samples.empty()) {
            ds.height = s.image.height;
            ds.width = s.image.width;
        }
        const auto check_dims = [&](int h, int w, const char* what) {
            if (h != ds.height || w != ds.width)
                throw std::runtime_error("dataset: dimension mismatch for id '" + id + "' (" +
                                         what + " is " + std::to_string(w) + "x" +
                                         std::to_string(h) + ", expected " +
                                         std::to_string(ds.width) + "x" +
                                         std::to_string(ds.height) + ")");
        };
        check_dims(s.image.height, s.image.width, "image");
        check_dims(s.pseudo.height, s.pseudo.width, "label");
        if (s.ground_truth) check_dims(s.ground_truth->height, s.ground_truth->width, "ground_truth");

        ds.samples.push_back(std::move(s));
    }
    return ds;
}

} // namespace labelmend
