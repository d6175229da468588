#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "labelmend/pgm.hpp"

#include "test_helpers.hpp"

using namespace labelmend;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "labelmend_pgm_test";
    fs::create_directories(dir);
    return dir;
}

void write_bytes(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("read_pgm scales image bytes to [0,1]") {
    const fs::path path = temp_dir() / "img.pgm";
    write_bytes(path, std::string("P5\n2 2\n255\n") + '\x00' + '\xff' + '\x80' + '\x40');
    const Image img = read_pgm_image(path);
    CHECK(img.height == 2);
    CHECK(img.width == 2);
    CHECK(img.data[0] == 0.0);
    CHECK(img.data[1] == 1.0);
    CHECK(img.data[2] == doctest::Approx(128.0 / 255.0).epsilon(1e-15));
    CHECK(img.data[3] == doctest::Approx(64.0 / 255.0).epsilon(1e-15));
}

TEST_CASE("read_pgm rejects wrong magic, truncation, large maxval, bad mask values") {
    const fs::path dir = temp_dir();
    write_bytes(dir / "p6.pgm", std::string("P6\n2 2\n255\n") + std::string(12, 'x'));
    CHECK_THROWS_WITH_AS(read_pgm_image(dir / "p6.pgm"),
                         doctest::Contains("unsupported magic"), std::runtime_error);

    write_bytes(dir / "short.pgm", std::string("P5\n4 4\n255\n") + std::string(3, 'x'));
    CHECK_THROWS_WITH_AS(read_pgm_image(dir / "short.pgm"),
                         doctest::Contains("truncated payload"), std::runtime_error);

    write_bytes(dir / "wide.pgm", std::string("P5\n1 1\n65535\n") + std::string(2, 'x'));
    CHECK_THROWS_WITH_AS(read_pgm_image(dir / "wide.pgm"), doctest::Contains("maxval"),
                         std::runtime_error);

    write_bytes(dir / "mask.pgm", std::string("P5\n2 1\n255\n") + '\x00' + '\x05');
    CHECK_THROWS_WITH_AS(read_pgm_mask(dir / "mask.pgm", 2), doctest::Contains("mask value"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(read_pgm_mask(dir / "mask.pgm", 2), doctest::Contains("mask.pgm"),
                         std::runtime_error);
}

TEST_CASE("write_pgm quantization rules") {
    const fs::path dir = temp_dir();

    ConfidenceMap conf;
    conf.height = 1;
    conf.width = 1;
    conf.num_passes = 4;
    conf.data = {0.75};
    write_pgm(conf, dir / "conf.pgm");
    std::ifstream in(dir / "conf.pgm", std::ios::binary);
    std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(static_cast<unsigned char>(contents.back()) == 191); // round(0.75*255)

    Image img;
    img.height = 1;
    img.width = 1;
    img.data = {1.0};
    write_pgm(img, dir / "one.pgm");
    std::ifstream in2(dir / "one.pgm", std::ios::binary);
    std::string c2((std::istreambuf_iterator<char>(in2)), std::istreambuf_iterator<char>());
    CHECK(static_cast<unsigned char>(c2.back()) == 255);

    LabelMask mask;
    mask.height = 1;
    mask.width = 1;
    mask.classes = 2;
    mask.data = {1};
    write_pgm(mask, dir / "m.pgm");
    std::ifstream in3(dir / "m.pgm", std::ios::binary);
    std::string c3((std::istreambuf_iterator<char>(in3)), std::istreambuf_iterator<char>());
    CHECK(static_cast<unsigned char>(c3.back()) == 1); // verbatim class index
}

TEST_CASE("mask and quantized image round-trip through pgm") {
    const fs::path dir = temp_dir();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const LabelMask mask = testutil::random_mask(8, 12, 4, seed);
        write_pgm(mask, dir / "rt.pgm");
        const LabelMask back = read_pgm_mask(dir / "rt.pgm", 4);
        CHECK(back.data == mask.data);
        CHECK(back.height == mask.height);
        CHECK(back.width == mask.width);

        // Byte-quantized images survive a second trip exactly.
        const Image img = testutil::random_image(6, 10, seed);
        write_pgm(img, dir / "img_rt.pgm");
        const Image once = read_pgm_image(dir / "img_rt.pgm");
        write_pgm(once, dir / "img_rt2.pgm");
        const Image twice = read_pgm_image(dir / "img_rt2.pgm");
        CHECK(once.data == twice.data);
    }
}
