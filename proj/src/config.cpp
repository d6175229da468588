#include "labelmend/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace labelmend {
namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& key, const std::string& why) {
    throw std::runtime_error("config: key '" + key + "': " + why);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) fail(key, "malformed number '" + value + "'");
        return v;
    } catch (const std::invalid_argument&) {
        fail(key, "malformed number '" + value + "'");
    } catch (const std::out_of_range&) {
        fail(key, "number out of range '" + value + "'");
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) fail(key, "malformed integer '" + value + "'");
        return v;
    } catch (const std::invalid_argument&) {
        fail(key, "malformed integer '" + value + "'");
    } catch (const std::out_of_range&) {
        fail(key, "integer out of range '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    fail(key, "expected true/false, got '" + value + "'");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;

    const auto rate = [](double lo, double hi_excl) {
        return [lo, hi_excl](const std::string& key, double v) {
            if (!(v >= lo && v < hi_excl))
                fail(key, "value " + format_double(v) + " outside [" + format_double(lo) + "," +
                              format_double(hi_excl) + ")");
        };
    };
    const auto at_least = [](long long lo) {
        return [lo](const std::string& key, long long v) {
            if (v < lo) fail(key, "value " + std::to_string(v) + " < " + std::to_string(lo));
        };
    };

    using Setter = std::function<void(const std::string& key, const std::string& value)>;
    const std::map<std::string, Setter> setters = {
        {"k", [&](const std::string& k, const std::string& v) {
             const long long x = parse_int(k, v); at_least(2)(k, x); cfg.k = static_cast<int>(x); }},
        {"beta", [&](const std::string& k, const std::string& v) {
             cfg.beta = parse_double(k, v); rate(0.0, 1.0)(k, cfg.beta); }},
        {"gamma", [&](const std::string& k, const std::string& v) {
             cfg.gamma = parse_double(k, v); rate(0.0, 1.0)(k, cfg.gamma); }},
        {"num_passes", [&](const std::string& k, const std::string& v) {
             const long long x = parse_int(k, v); at_least(1)(k, x); cfg.num_passes = static_cast<int>(x); }},
        {"e_start", [&](const std::string& k, const std::string& v) {
             const long long x = parse_int(k, v); at_least(1)(k, x); cfg.e_start = static_cast<int>(x); }},
        {"epochs", [&](const std::string& k, const std::string& v) {
             const long long x = parse_int(k, v); at_least(1)(k, x); cfg.epochs = static_cast<int>(x); }},
        {"batch_size", [&](const std::string& k, const std::string& v) {
             const long long x = parse_int(k, v); at_least(1)(k, x); cfg.batch_size = static_cast<int>(x); }},
        {"lr0", [&](const std::string& k, const std::string& v) {
             cfg.lr0 = parse_double(k, v);
             if (!(cfg.lr0 > 0)) fail(k, "step size must be positive"); }},
        {"beta1_pre", [&](const std::string& k, const std::string& v) {
             cfg.beta1_pre = parse_double(k, v); rate(0.0, 1.0)(k, cfg.beta1_pre); }},
        {"beta1_post", [&](const std::string& k, const std::string& v) {
             cfg.beta1_post = parse_double(k, v); rate(0.0, 1.0)(k, cfg.beta1_post); }},
        {"beta2", [&](const std::string& k, const std::string& v) {
             cfg.beta2 = parse_double(k, v); rate(0.0, 1.0)(k, cfg.beta2); }},
        {"l2_mu", [&](const std::string& k, const std::string& v) {
             cfg.l2_mu = parse_double(k, v);
             if (cfg.l2_mu < 0) fail(k, "coefficient must be >= 0"); }},
        {"tau", [&](const std::string& k, const std::string& v) {
             cfg.tau = parse_double(k, v); rate(0.0, 1.0)(k, cfg.tau); }},
        {"p_drop", [&](const std::string& k, const std::string& v) {
             cfg.p_drop = parse_double(k, v); rate(0.0, 1.0)(k, cfg.p_drop); }},
        {"train_dropout", [&](const std::string& k, const std::string& v) {
             cfg.train_dropout = parse_bool(k, v); }},
        {"rounds", [&](const std::string& k, const std::string& v) {
             const long long x = parse_int(k, v); at_least(0)(k, x); cfg.rounds = static_cast<int>(x); }},
        {"seed", [&](const std::string& k, const std::string& v) {
             try {
                 std::size_t used = 0;
                 if (!v.empty() && v[0] == '-') {
                     cfg.seed = static_cast<std::uint64_t>(std::stoll(v, &used));
                 } else {
                     cfg.seed = std::stoull(v, &used);
                 }
                 if (used != v.size()) fail(k, "malformed integer '" + v + "'");
             } catch (const std::invalid_argument&) {
                 fail(k, "malformed integer '" + v + "'");
             } catch (const std::out_of_range&) {
                 fail(k, "integer out of range '" + v + "'");
             } }},
        {"ablate_pixel_weights", [&](const std::string& k, const std::string& v) {
             cfg.ablate_pixel_weights = parse_bool(k, v); }},
        {"ablate_image_weights", [&](const std::string& k, const std::string& v) {
             cfg.ablate_image_weights = parse_bool(k, v); }},
        {"ablate_retrain", [&](const std::string& k, const std::string& v) {
             cfg.ablate_retrain = parse_bool(k, v); }},
        {"augment", [&](const std::string& k, const std::string& v) {
             cfg.augment = parse_bool(k, v); }},
        {"ce_sum", [&](const std::string& k, const std::string& v) {
             cfg.ce_sum = parse_bool(k, v); }},
    };

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) fail(key, "unknown key");
        it->second(key, value);
    }
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    out << "k = " << c.k << "\n";
    out << "beta = " << format_double(c.beta) << "\n";
    out << "gamma = " << format_double(c.gamma) << "\n";
    out << "num_passes = " << c.num_passes << "\n";
    out << "e_start = " << c.e_start << "\n";
    out << "epochs = " << c.epochs << "\n";
    out << "batch_size = " << c.batch_size << "\n";
    out << "lr0 = " << format_double(c.lr0) << "\n";
    out << "beta1_pre = " << format_double(c.beta1_pre) << "\n";
    out << "beta1_post = " << format_double(c.beta1_post) << "\n";
    out << "beta2 = " << format_double(c.beta2) << "\n";
    out << "l2_mu = " << format_double(c.l2_mu) << "\n";
    out << "tau = " << format_double(c.tau) << "\n";
    out << "p_drop = " << format_double(c.p_drop) << "\n";
    out << "train_dropout = " << (c.train_dropout ? "true" : "false") << "\n";
    out << "rounds = " << c.rounds << "\n";
    out << "seed = " << c.seed << "\n";
    out << "ablate_pixel_weights = " << (c.ablate_pixel_weights ? "true" : "false") << "\n";
    out << "ablate_image_weights = " << (c.ablate_image_weights ? "true" : "false") << "\n";
    out << "ablate_retrain = " << (c.ablate_retrain ? "true" : "false") << "\n";
    out << "augment = " << (c.augment ? "true" : "false") << "\n";
    out << "ce_sum = " << (c.ce_sum ? "true" : "false") << "\n";
    return out.str();
}

} // namespace labelmend
