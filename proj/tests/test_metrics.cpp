#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "labelmend/metrics.hpp"

#include "test_helpers.hpp"

using namespace labelmend;
using namespace testutil;

namespace {

LabelMask mask_of(std::vector<std::uint8_t> data, int h, int w,
                  Provenance prov = Provenance::ground_truth) {
    LabelMask m;
    m.height = h;
    m.width = w;
    m.classes = 2;
    m.provenance = prov;
    m.data = std::move(data);
    return m;
}

} // namespace

TEST_CASE("perfect and degenerate candidates") {
    const LabelMask gt = mask_of({0, 1, 1, 0}, 2, 2);
    LabelMask cand = gt;
    cand.provenance = Provenance::pseudo;

    const LabelQuality perfect = label_quality(cand, gt);
    CHECK(perfect.tp_rate == 100.0);
    CHECK(perfect.fp_rate == 0.0);
    CHECK(perfect.tn_rate == 100.0);
    CHECK(perfect.fn_rate == 0.0);

    const LabelQuality all_fg = label_quality(mask_of({1, 1, 1, 1}, 2, 2, Provenance::pseudo), gt);
    CHECK(all_fg.tp_rate == 100.0);
    CHECK(all_fg.fp_rate == 100.0);
}

TEST_CASE("label quality sum constraints hold for random masks") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const LabelMask gt = random_mask(10, 10, 2, derive_seed(seed, 1), Provenance::ground_truth);
        const LabelMask cand = random_mask(10, 10, 2, derive_seed(seed, 2), Provenance::pseudo);
        const bool has_both = std::count(gt.data.begin(), gt.data.end(), 1) > 0 &&
                              std::count(gt.data.begin(), gt.data.end(), 0) > 0;
        if (!has_both) continue;
        const LabelQuality q = label_quality(cand, gt);
        CHECK(q.tp_rate + q.fn_rate == doctest::Approx(100.0).epsilon(1e-9));
        CHECK(q.fp_rate + q.tn_rate == doctest::Approx(100.0).epsilon(1e-9));
    }
}

TEST_CASE("label quality is permutation invariant and errors on empty classes") {
    const LabelMask gt = mask_of({0, 1, 1, 0, 1, 0}, 2, 3);
    const LabelMask cand = mask_of({1, 1, 0, 0, 1, 1}, 2, 3, Provenance::pseudo);
    const LabelQuality q = label_quality(cand, gt);

    std::vector<std::size_t> perm = {5, 2, 0, 4, 1, 3};
    std::vector<std::uint8_t> gt_p(6), cand_p(6);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        gt_p[i] = gt.data[perm[i]];
        cand_p[i] = cand.data[perm[i]];
    }
    const LabelQuality qp = label_quality(mask_of(cand_p, 2, 3, Provenance::pseudo),
                                          mask_of(gt_p, 2, 3));
    CHECK(q.tp_rate == qp.tp_rate);
    CHECK(q.fp_rate == qp.fp_rate);

    CHECK_THROWS_WITH_AS(label_quality(cand, mask_of({0, 0, 0, 0, 0, 0}, 2, 3)),
                         doctest::Contains("class-1"), std::runtime_error);
    CHECK_THROWS_WITH_AS(label_quality(cand, mask_of({1, 1, 1, 1, 1, 1}, 2, 3)),
                         doctest::Contains("class-0"), std::runtime_error);
}

TEST_CASE("seg_score examples") {
    const LabelMask gt = mask_of({0, 1, 1, 0}, 2, 2);
    LabelMask pred = gt;
    pred.provenance = Provenance::prediction;
    const SegScore perfect = seg_score(pred, gt);
    for (const ClassScore& cs : perfect.per_class) {
        CHECK(cs.defined);
        CHECK(cs.accuracy == 100.0);
        CHECK(cs.dice == 100.0);
    }

    // pred fg = {a, b}, gt fg = {b, c}: fg dice = 2*1/(2+2) = 50%.
    const LabelMask pred4 = mask_of({1, 1, 0, 0}, 2, 2, Provenance::prediction);
    const LabelMask gt4 = mask_of({0, 1, 1, 0}, 2, 2);
    const SegScore s = seg_score(pred4, gt4);
    CHECK(s.per_class[1].dice == 50.0);
    CHECK(s.per_class[1].accuracy == 50.0);

    // Disjoint equal-size foregrounds on a background-free grid.
    const LabelMask left = mask_of({1, 1, 0, 0}, 1, 4, Provenance::prediction);
    const LabelMask right = mask_of({0, 0, 1, 1}, 1, 4);
    const SegScore disjoint = seg_score(left, right);
    CHECK(disjoint.per_class[1].dice == 0.0);
    CHECK(disjoint.per_class[1].accuracy == 0.0);

    // Empty ground-truth class is flagged undefined rather than an error.
    const SegScore undef = seg_score(mask_of({0, 0, 1, 0}, 2, 2, Provenance::prediction),
                                     mask_of({0, 0, 0, 0}, 2, 2));
    CHECK_FALSE(undef.per_class[1].defined);
    CHECK(undef.per_class[0].defined);
}

TEST_CASE("dice is symmetric in its arguments; accuracy is not") {
    const LabelMask a_raw = random_mask(8, 8, 2, 5);
    const LabelMask b_raw = random_mask(8, 8, 2, 6);
    LabelMask a_gt = a_raw, b_gt = b_raw;
    a_gt.provenance = b_gt.provenance = Provenance::ground_truth;
    LabelMask a_cand = a_raw, b_cand = b_raw;
    a_cand.provenance = b_cand.provenance = Provenance::prediction;

    const SegScore ab = seg_score(a_cand, b_gt);
    const SegScore ba = seg_score(b_cand, a_gt);
    for (int l = 0; l < 2; ++l) CHECK(ab.per_class[l].dice == doctest::Approx(ba.per_class[l].dice));
    bool acc_differs = false;
    for (int l = 0; l < 2; ++l)
        if (ab.per_class[l].accuracy != ba.per_class[l].accuracy) acc_differs = true;
    CHECK(acc_differs); // documented asymmetry for these masks
}

TEST_CASE("pooling counts across a dataset before dividing") {
    PixelCounts counts(2);
    counts.add(mask_of({1, 1, 0, 0}, 2, 2, Provenance::pseudo), mask_of({1, 0, 0, 0}, 2, 2));
    counts.add(mask_of({1, 1, 1, 1}, 2, 2, Provenance::pseudo), mask_of({1, 1, 1, 0}, 2, 2));
    // Pooled: gt fg = 4, candidate hits 4 of them -> TP 100%; gt bg = 4,
    // candidate claims 2 of those -> FP 50%.
    const LabelQuality q = label_quality(counts);
    CHECK(q.tp_rate == 100.0);
    CHECK(q.fp_rate == 50.0);

    const auto rates = class_rates(counts);
    REQUIRE(rates.size() == 2);
    CHECK(rates[1].tp == 100.0);
    CHECK(rates[1].fp == 50.0);
    CHECK(rates[1].acc == rates[1].tp);
}
