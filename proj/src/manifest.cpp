#include "tierforge/manifest.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tierforge {

namespace {

std::string hex_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw Error(Errc::schema_error, "manifest: bad float for " + key + ": " + s);
    return v;
}

std::uint64_t parse_u64(const std::string& s, const std::string& key) {
    char* end = nullptr;
    const std::uint64_t v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw Error(Errc::schema_error, "manifest: bad integer for " + key + ": " + s);
    return v;
}

int parse_int(const std::string& s, const std::string& key) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw Error(Errc::schema_error, "manifest: bad integer for " + key + ": " + s);
    return static_cast<int>(v);
}

} // namespace

void write_manifest(const SceneManifest& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::io_failure, "write_manifest: cannot open: " + path);

    out << "tierforge_manifest_version " << m.schema_version << '\n';
    out << "scene_id " << m.scene_id << '\n';
    out << "source_path " << m.source_path << '\n';
    out << "toolkit_version " << m.toolkit_version << '\n';
    out << "stage_order " << m.stage_order << '\n';
    out << "scene_index " << m.scene_index << '\n';
    out << "master_seed " << m.master_seed << '\n';
    out << "resize_w " << m.resize_w << '\n';
    out << "resize_h " << m.resize_h << '\n';
    out << "crop_w " << m.crop_w << '\n';
    out << "crop_h " << m.crop_h << '\n';
    out << "window_len " << m.window_len << '\n';
    out << "interp_factor " << m.interp_factor << '\n';
    out << "crf_kind " << m.crf_kind << '\n';
    out << "crf_gamma " << hex_double(m.crf_gamma) << '\n';
    out << "lime_alpha " << hex_double(m.lime_alpha) << '\n';
    out << "lime_weight_strategy " << m.lime_weight_strategy << '\n';
    out << "lime_weight_eps " << hex_double(m.lime_weight_eps) << '\n';
    out << "lime_mu0 " << hex_double(m.lime_mu0) << '\n';
    out << "lime_rho " << hex_double(m.lime_rho) << '\n';
    out << "lime_max_iter " << m.lime_max_iter << '\n';
    out << "lime_tol " << hex_double(m.lime_tol) << '\n';
    out << "gamma1 " << hex_double(m.gamma1) << '\n';
    out << "gamma2 " << hex_double(m.gamma2) << '\n';
    out << "noise_shot " << hex_double(m.noise_shot) << '\n';
    out << "noise_read " << hex_double(m.noise_read) << '\n';
    out << "noise_domain " << m.noise_domain << '\n';
    out << "noise_seed " << m.noise_seed << '\n';
    out << "bit_depth " << m.bit_depth << '\n';
    out << "pair_count " << m.pair_count << '\n';
    for (std::size_t i = 0; i < m.alm_converged.size(); ++i)
        out << "alm_converged " << i << ' ' << m.alm_converged[i] << '\n';
    for (std::size_t i = 0; i < m.pair_paths.size(); ++i)
        out << "pair " << i << ' ' << m.pair_paths[i][0] << ' ' << m.pair_paths[i][1] << ' '
            << m.pair_paths[i][2] << ' ' << m.pair_paths[i][3] << '\n';
    if (!out) throw Error(Errc::io_failure, "write_manifest: write failed: " + path);
}

SceneManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::file_not_found, "read_manifest: cannot open: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw Error(Errc::schema_error, "read_manifest: empty file: " + path);
    {
        std::istringstream hdr(line);
        std::string key;
        int version = -1;
        hdr >> key >> version;
        if (key != "tierforge_manifest_version" || version != kManifestSchemaVersion)
            throw Error(Errc::schema_error, "read_manifest: schema version mismatch: " + line);
    }

    SceneManifest m;
    m.schema_version = kManifestSchemaVersion;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t sp = line.find(' ');
        if (sp == std::string::npos)
            throw Error(Errc::schema_error, "read_manifest: malformed line: " + line);
        const std::string key = line.substr(0, sp);
        const std::string rest = line.substr(sp + 1);

        if (key == "scene_id") m.scene_id = rest;
        else if (key == "source_path") m.source_path = rest;
        else if (key == "toolkit_version") m.toolkit_version = rest;
        else if (key == "stage_order") m.stage_order = rest;
        else if (key == "scene_index") m.scene_index = parse_int(rest, key);
        else if (key == "master_seed") m.master_seed = parse_u64(rest, key);
        else if (key == "resize_w") m.resize_w = parse_int(rest, key);
        else if (key == "resize_h") m.resize_h = parse_int(rest, key);
        else if (key == "crop_w") m.crop_w = parse_int(rest, key);
        else if (key == "crop_h") m.crop_h = parse_int(rest, key);
        else if (key == "window_len") m.window_len = parse_int(rest, key);
        else if (key == "interp_factor") m.interp_factor = parse_int(rest, key);
        else if (key == "crf_kind") m.crf_kind = rest;
        else if (key == "crf_gamma") m.crf_gamma = parse_double(rest, key);
        else if (key == "lime_alpha") m.lime_alpha = parse_double(rest, key);
        else if (key == "lime_weight_strategy") m.lime_weight_strategy = rest;
        else if (key == "lime_weight_eps") m.lime_weight_eps = parse_double(rest, key);
        else if (key == "lime_mu0") m.lime_mu0 = parse_double(rest, key);
        else if (key == "lime_rho") m.lime_rho = parse_double(rest, key);
        else if (key == "lime_max_iter") m.lime_max_iter = parse_int(rest, key);
        else if (key == "lime_tol") m.lime_tol = parse_double(rest, key);
        else if (key == "gamma1") m.gamma1 = parse_double(rest, key);
        else if (key == "gamma2") m.gamma2 = parse_double(rest, key);
        else if (key == "noise_shot") m.noise_shot = parse_double(rest, key);
        else if (key == "noise_read") m.noise_read = parse_double(rest, key);
        else if (key == "noise_domain") m.noise_domain = rest;
        else if (key == "noise_seed") m.noise_seed = parse_u64(rest, key);
        else if (key == "bit_depth") m.bit_depth = parse_int(rest, key);
        else if (key == "pair_count") m.pair_count = parse_int(rest, key);
        else if (key == "alm_converged") {
            std::istringstream ss(rest);
            std::size_t idx;
            int flag;
            if (!(ss >> idx >> flag) || idx != m.alm_converged.size())
                throw Error(Errc::schema_error, "read_manifest: bad alm_converged line: " + line);
            m.alm_converged.push_back(flag);
        } else if (key == "pair") {
            std::istringstream ss(rest);
            std::size_t idx;
            std::array<std::string, 4> paths;
            if (!(ss >> idx >> paths[0] >> paths[1] >> paths[2] >> paths[3]) || idx != m.pair_paths.size())
                throw Error(Errc::schema_error, "read_manifest: bad pair line: " + line);
            m.pair_paths.push_back(paths);
        } else {
            throw Error(Errc::schema_error, "read_manifest: unknown field: " + key);
        }
    }

    if (m.scene_id.empty() || m.pair_count < 0 ||
        m.pair_paths.size() != static_cast<std::size_t>(m.pair_count) ||
        m.alm_converged.size() != static_cast<std::size_t>(m.pair_count))
        throw Error(Errc::schema_error, "read_manifest: incomplete manifest: " + path);
    return m;
}

} // namespace tierforge
