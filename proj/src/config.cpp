#include "tierforge/config.hpp"

#include <cstdlib>
#include <fstream>

namespace tierforge {

void PipelineConfig::validate() const {
    blur.validate();
    lime.validate();
    if (gamma1_lo > gamma1_hi || gamma2_lo > gamma2_hi || noise_shot_lo > noise_shot_hi ||
        noise_read_lo > noise_read_hi)
        throw Error(Errc::bad_argument, "PipelineConfig: parameter range lo > hi");
    if (gamma1_lo < 1.0) throw Error(Errc::bad_argument, "PipelineConfig: gamma1 range must stay >= 1");
    if (gamma2_lo < 1.0) throw Error(Errc::bad_argument, "PipelineConfig: gamma2 range must stay >= 1");
    if (noise_shot_lo < 0.0 || noise_read_lo < 0.0)
        throw Error(Errc::bad_argument, "PipelineConfig: noise ranges must be non-negative");
    if ((resize_w == 0) != (resize_h == 0) || (crop_w == 0) != (crop_h == 0))
        throw Error(Errc::bad_argument, "PipelineConfig: resize/crop need both dimensions");
    if (resize_w < 0 || crop_w < 0 || threads < 0)
        throw Error(Errc::bad_argument, "PipelineConfig: negative dimension");
    if (bit_depth != 8 && bit_depth != 16)
        throw Error(Errc::bad_argument, "PipelineConfig: bit_depth must be 8 or 16");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw Error(Errc::schema_error, "config: bad number for " + key + ": " + s);
    return v;
}

int to_int(const std::string& s, const std::string& key) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw Error(Errc::schema_error, "config: bad integer for " + key + ": " + s);
    return static_cast<int>(v);
}

std::uint64_t to_u64(const std::string& s, const std::string& key) {
    char* end = nullptr;
    const std::uint64_t v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw Error(Errc::schema_error, "config: bad integer for " + key + ": " + s);
    return v;
}

} // namespace

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::file_not_found, "load_config: cannot open: " + path);

    PipelineConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::schema_error,
                        "config: expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "input_root") cfg.input_root = val;
        else if (key == "output_root") cfg.output_root = val;
        else if (key == "resize_w") cfg.resize_w = to_int(val, key);
        else if (key == "resize_h") cfg.resize_h = to_int(val, key);
        else if (key == "crop_w") cfg.crop_w = to_int(val, key);
        else if (key == "crop_h") cfg.crop_h = to_int(val, key);
        else if (key == "window_len") cfg.blur.window_len = to_int(val, key);
        else if (key == "interp_factor") cfg.blur.interp_factor = to_int(val, key);
        else if (key == "crf_kind") {
            if (val == "identity") cfg.blur.crf = CameraResponse::identity();
            else if (val == "gamma") cfg.blur.crf.kind = CameraResponse::Kind::gamma;
            else throw Error(Errc::schema_error, "config: crf_kind must be identity or gamma");
        } else if (key == "crf_gamma") cfg.blur.crf.gamma_value = to_double(val, key);
        else if (key == "lime_alpha") cfg.lime.alpha = to_double(val, key);
        else if (key == "lime_weight_strategy") {
            if (val == "uniform") cfg.lime.weight_strategy = WeightStrategy::uniform;
            else if (val == "gradient-inverse") cfg.lime.weight_strategy = WeightStrategy::gradient_inverse;
            else throw Error(Errc::schema_error, "config: unknown weight strategy: " + val);
        } else if (key == "lime_weight_eps") cfg.lime.weight_eps = to_double(val, key);
        else if (key == "lime_mu0") cfg.lime.mu0 = to_double(val, key);
        else if (key == "lime_rho") cfg.lime.rho = to_double(val, key);
        else if (key == "lime_max_iter") cfg.lime.max_iter = to_int(val, key);
        else if (key == "lime_tol") cfg.lime.tol = to_double(val, key);
        else if (key == "gamma1_lo") cfg.gamma1_lo = to_double(val, key);
        else if (key == "gamma1_hi") cfg.gamma1_hi = to_double(val, key);
        else if (key == "gamma2_lo") cfg.gamma2_lo = to_double(val, key);
        else if (key == "gamma2_hi") cfg.gamma2_hi = to_double(val, key);
        else if (key == "noise_shot_lo") cfg.noise_shot_lo = to_double(val, key);
        else if (key == "noise_shot_hi") cfg.noise_shot_hi = to_double(val, key);
        else if (key == "noise_read_lo") cfg.noise_read_lo = to_double(val, key);
        else if (key == "noise_read_hi") cfg.noise_read_hi = to_double(val, key);
        else if (key == "noise_domain") {
            if (val == "linear") cfg.noise_domain = NoiseDomain::linear;
            else if (val == "display") cfg.noise_domain = NoiseDomain::display;
            else throw Error(Errc::schema_error, "config: noise_domain must be linear or display");
        } else if (key == "master_seed") cfg.master_seed = to_u64(val, key);
        else if (key == "threads") cfg.threads = to_int(val, key);
        else if (key == "bit_depth") cfg.bit_depth = to_int(val, key);
        else throw Error(Errc::schema_error, "config: unknown key: " + key);
    }
    cfg.validate();
    return cfg;
}

} // namespace tierforge
