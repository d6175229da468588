#include "labelmend/pgm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

namespace labelmend {
namespace {

// Reads one whitespace/comment-separated header token.
std::string next_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (c == '#') in.unget();
    return tok;
}

int parse_header_int(std::istream& in, const std::filesystem::path& path, const char* what) {
    const std::string tok = next_token(in);
    try {
        std::size_t used = 0;
        const int value = std::stoi(tok, &used);
        if (used != tok.size() || value <= 0) throw std::invalid_argument(tok);
        return value;
    } catch (const std::exception&) {
        throw std::runtime_error("pgm: malformed " + std::string(what) + " in " + path.string());
    }
}

struct RawPgm {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bytes;
};

RawPgm read_raw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("pgm: cannot open " + path.string());

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5')
        throw std::runtime_error("pgm: unsupported magic in " + path.string());

    RawPgm raw;
    raw.width = parse_header_int(in, path, "width");
    raw.height = parse_header_int(in, path, "height");
    const int maxval = parse_header_int(in, path, "maxval");
    if (maxval > 255) throw std::runtime_error("pgm: maxval > 255 in " + path.string());

    // Header ends with exactly one whitespace byte before the payload.
    raw.bytes.resize(static_cast<std::size_t>(raw.width) * raw.height);
    in.read(reinterpret_cast<char*>(raw.bytes.data()),
            static_cast<std::streamsize>(raw.bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.bytes.size())
        throw std::runtime_error("pgm: truncated payload in " + path.string());
    return raw;
}

void write_raw(const std::filesystem::path& path, int width, int height,
               const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("pgm: cannot write " + path.string());
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("pgm: write failed for " + path.string());
}

} // namespace

Image read_pgm_image(const std::filesystem::path& path) {
    const RawPgm raw = read_raw(path);
    Image img;
    img.height = raw.height;
    img.width = raw.width;
    img.data.resize(raw.bytes.size());
    for (std::size_t i = 0; i < raw.bytes.size(); ++i) img.data[i] = raw.bytes[i] / 255.0;
    return img;
}

LabelMask read_pgm_mask(const std::filesystem::path& path, int classes) {
    const RawPgm raw = read_raw(path);
    LabelMask mask;
    mask.height = raw.height;
    mask.width = raw.width;
    mask.classes = classes;
    mask.data = raw.bytes;
    for (const std::uint8_t b : raw.bytes) {
        if (b >= classes)
            throw std::runtime_error("pgm: mask value " + std::to_string(int(b)) +
                                     " >= k=" + std::to_string(classes) + " in " + path.string());
    }
    return mask;
}

void write_pgm(const Image& image, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(image.data.size());
    for (std::size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = static_cast<std::uint8_t>(std::lround(image.data[i] * 255.0));
    write_raw(path, image.width, image.height, bytes);
}

void write_pgm(const LabelMask& mask, const std::filesystem::path& path) {
    write_raw(path, mask.width, mask.height, mask.data);
}

void write_pgm(const ConfidenceMap& conf, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(conf.data.size());
    for (std::size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = static_cast<std::uint8_t>(std::lround(conf.data[i] * 255.0));
    write_raw(path, conf.width, conf.height, bytes);
}

} // namespace labelmend
