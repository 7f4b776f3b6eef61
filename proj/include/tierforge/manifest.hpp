#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tierforge/errors.hpp"

namespace tierforge {

inline constexpr int kManifestSchemaVersion = 1;

// Everything needed to regenerate one scene bit-identically: the parameters
// actually sampled, the seeds, and the emitted file layout. Line-delimited
// "key value" text; floating-point fields are hexfloat encoded so the round
// trip is exact.
struct SceneManifest {
    int schema_version = kManifestSchemaVersion;
    std::string scene_id;
    std::string source_path;
    std::string toolkit_version;
    std::string stage_order; // fixed processing order, recorded for audit

    int scene_index = 0;
    std::uint64_t master_seed = 0;

    int resize_w = 0, resize_h = 0; // 0 = stage skipped
    int crop_w = 0, crop_h = 0;
    int window_len = 160;
    int interp_factor = 32;

    std::string crf_kind = "gamma"; // identity | gamma
    double crf_gamma = 2.2;

    double lime_alpha = 0.15;
    std::string lime_weight_strategy = "uniform"; // uniform | gradient-inverse
    double lime_weight_eps = 0.1;
    double lime_mu0 = 0.05;
    double lime_rho = 1.3;
    int lime_max_iter = 200;
    double lime_tol = 1e-5;

    double gamma1 = 2.5;
    double gamma2 = 1.1;

    double noise_shot = 0.01;
    double noise_read = 1e-4;
    std::string noise_domain = "linear"; // linear | display
    std::uint64_t noise_seed = 0;

    int bit_depth = 16;
    int pair_count = 0;
    std::vector<int> alm_converged;                       // one flag per pair
    std::vector<std::array<std::string, 4>> pair_paths;   // input, gt1, gt2, gt3 (relative)

    bool operator==(const SceneManifest&) const = default;
};

void write_manifest(const SceneManifest& m, const std::string& path);

// Rejects unknown keys, missing required keys and schema-version mismatches
// with Errc::schema_error.
SceneManifest read_manifest(const std::string& path);

} // namespace tierforge
