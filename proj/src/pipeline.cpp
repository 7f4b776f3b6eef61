#include "tierforge/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <omp.h>

#include "tierforge/blur.hpp"
#include "tierforge/noise.hpp"
#include "tierforge/png_io.hpp"
#include "tierforge/retinex.hpp"
#include "tierforge/rng.hpp"
#include "tierforge/version.hpp"

namespace fs = std::filesystem;

namespace tierforge {

namespace {

constexpr const char* kStageOrder = "resize,crop,interpolate,blur,retinex,noise";
const char* kTierDirs[4] = {"input", "gt1", "gt2", "gt3"};

CameraResponse crf_from(const SceneManifest& m) {
    if (m.crf_kind == "identity") return CameraResponse::identity();
    if (m.crf_kind == "gamma") return CameraResponse::gamma(m.crf_gamma);
    throw Error(Errc::schema_error, "manifest: unknown crf_kind: " + m.crf_kind);
}

LimeParams lime_from(const SceneManifest& m) {
    LimeParams p;
    p.alpha = m.lime_alpha;
    if (m.lime_weight_strategy == "uniform") p.weight_strategy = WeightStrategy::uniform;
    else if (m.lime_weight_strategy == "gradient-inverse") p.weight_strategy = WeightStrategy::gradient_inverse;
    else throw Error(Errc::schema_error, "manifest: unknown weight strategy: " + m.lime_weight_strategy);
    p.weight_eps = m.lime_weight_eps;
    p.mu0 = m.lime_mu0;
    p.rho = m.lime_rho;
    p.max_iter = m.lime_max_iter;
    p.tol = m.lime_tol;
    return p;
}

std::string pair_name(int idx) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d.png", idx);
    return buf;
}

} // namespace

FrameSequence load_sequence(const std::string& dir) {
    if (!fs::is_directory(dir))
        throw Error(Errc::file_not_found, "load_sequence: not a directory: " + dir);
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png") names.push_back(entry.path().string());
    }
    if (names.empty()) throw Error(Errc::file_not_found, "load_sequence: no PNG frames in: " + dir);
    std::sort(names.begin(), names.end());

    FrameSequence seq;
    seq.frames.resize(names.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(names.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) seq.frames[i] = load_frame(names[i]);
    seq.validate();
    return seq;
}

SceneManifest resolve_scene_params(const PipelineConfig& cfg, int scene_index,
                                   const std::string& scene_id, const std::string& source_path) {
    cfg.validate();
    SceneManifest m;
    m.scene_id = scene_id;
    m.source_path = source_path;
    m.toolkit_version = kToolkitVersion;
    m.stage_order = kStageOrder;
    m.scene_index = scene_index;
    m.master_seed = cfg.master_seed;
    m.resize_w = cfg.resize_w;
    m.resize_h = cfg.resize_h;
    m.crop_w = cfg.crop_w;
    m.crop_h = cfg.crop_h;
    m.window_len = cfg.blur.window_len;
    m.interp_factor = cfg.blur.interp_factor;
    m.crf_kind = cfg.blur.crf.kind == CameraResponse::Kind::identity ? "identity" : "gamma";
    m.crf_gamma = cfg.blur.crf.gamma_value;
    m.lime_alpha = cfg.lime.alpha;
    m.lime_weight_strategy =
        cfg.lime.weight_strategy == WeightStrategy::uniform ? "uniform" : "gradient-inverse";
    m.lime_weight_eps = cfg.lime.weight_eps;
    m.lime_mu0 = cfg.lime.mu0;
    m.lime_rho = cfg.lime.rho;
    m.lime_max_iter = cfg.lime.max_iter;
    m.lime_tol = cfg.lime.tol;
    m.noise_domain = cfg.noise_domain == NoiseDomain::linear ? "linear" : "display";
    m.bit_depth = cfg.bit_depth;

    const std::uint64_t stream = rng::derive_seed(cfg.master_seed, static_cast<std::uint64_t>(scene_index));
    m.gamma1 = rng::uniform_range(stream, 0, cfg.gamma1_lo, cfg.gamma1_hi);
    m.gamma2 = rng::uniform_range(stream, 1, cfg.gamma2_lo, cfg.gamma2_hi);
    m.noise_shot = rng::uniform_range(stream, 2, cfg.noise_shot_lo, cfg.noise_shot_hi);
    m.noise_read = rng::uniform_range(stream, 3, cfg.noise_read_lo, cfg.noise_read_hi);
    m.noise_seed = rng::hash(stream, 4);
    return m;
}

SceneResult process_scene(const FrameSequence& seq, SceneManifest manifest) {
    seq.validate();
    FrameSequence work;
    work.frame_rate = seq.frame_rate;

    if (manifest.resize_w > 0 || manifest.crop_w > 0) {
        work.frames.resize(seq.frames.size());
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(seq.frames.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            Frame f = seq.frames[i];
            if (manifest.resize_w > 0) f = resize_bilinear(f, manifest.resize_w, manifest.resize_h);
            if (manifest.crop_w > 0) f = center_crop(f, manifest.crop_w, manifest.crop_h);
            work.frames[i] = std::move(f);
        }
    } else {
        work.frames = seq.frames;
    }

    if (manifest.interp_factor > 1) work = interpolate_sequence(work, manifest.interp_factor);

    BlurConfig blur_cfg;
    blur_cfg.window_len = manifest.window_len;
    blur_cfg.interp_factor = manifest.interp_factor;
    blur_cfg.crf = crf_from(manifest);
    const std::vector<BlurPair> pairs = make_pairs(work, blur_cfg);

    const LimeParams lime = lime_from(manifest);
    const GammaParams gamma{manifest.gamma1, manifest.gamma2};
    const CameraResponse crf = blur_cfg.crf;

    SceneResult result;
    result.triplets.resize(pairs.size());
    manifest.pair_count = static_cast<int>(pairs.size());
    manifest.alm_converged.assign(pairs.size(), 0);
    manifest.pair_paths.resize(pairs.size());

    const std::ptrdiff_t n_pairs = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < n_pairs; ++k) {
        const Frame& blurry = pairs[k].blurry;

        const IlluminationMap t_hat = init_illumination(blurry);
        LimeResult lime_res = refine_illumination_alm(t_hat, lime);
        // Illumination below the max-channel estimate would make reflectance
        // exceed 1 and the degrade clamp would break tier consistency; keep
        // the refined map floored at the estimate.
        for (std::size_t i = 0; i < t_hat.data.size(); ++i)
            lime_res.refined.data[i] = std::max(lime_res.refined.data[i], t_hat.data[i]);
        const RetinexDecomposition decomp = decompose(blurry, lime_res.refined);
        Frame lowlight = degrade(decomp, gamma);

        NoiseParams noise;
        noise.shot = manifest.noise_shot;
        noise.read = manifest.noise_read;
        noise.domain = manifest.noise_domain == "linear" ? NoiseDomain::linear : NoiseDomain::display;
        noise.seed = rng::derive_seed(manifest.noise_seed, static_cast<std::uint64_t>(k));
        Frame noisy = add_signal_dependent_noise(lowlight, noise, crf);

        TierTriplet& t = result.triplets[k];
        t.input = std::move(noisy);
        t.gt_tier1 = std::move(lowlight);
        t.gt_tier2 = blurry;
        t.gt_tier3 = pairs[k].sharp;

        manifest.alm_converged[k] = lime_res.converged ? 1 : 0;
        const std::string name = pair_name(static_cast<int>(k));
        for (int d = 0; d < 4; ++d)
            manifest.pair_paths[k][d] = std::string(kTierDirs[d]) + "/" + name;
    }

    result.manifest = std::move(manifest);
    return result;
}

SceneResult degrade_scene(const FrameSequence& seq, const PipelineConfig& cfg, int scene_index,
                          const std::string& scene_id, const std::string& source_path) {
    char fallback[32];
    std::snprintf(fallback, sizeof(fallback), "scene_%03d", scene_index);
    SceneManifest m = resolve_scene_params(cfg, scene_index, scene_id.empty() ? fallback : scene_id,
                                           source_path);
    return process_scene(seq, std::move(m));
}

void write_scene_outputs(const SceneResult& result, const std::string& output_root) {
    const SceneManifest& m = result.manifest;
    const fs::path scene_dir = fs::path(output_root) / m.scene_id;
    for (const char* d : kTierDirs) fs::create_directories(scene_dir / d);

    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(result.triplets.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const TierTriplet& t = result.triplets[k];
        const Frame* frames[4] = {&t.input, &t.gt_tier1, &t.gt_tier2, &t.gt_tier3};
        for (int d = 0; d < 4; ++d)
            save_frame(*frames[d], (scene_dir / m.pair_paths[k][d]).string(), m.bit_depth);
    }
    write_manifest(m, (scene_dir / "manifest.txt").string());
}

SceneResult replay_manifest(const std::string& manifest_path) {
    const SceneManifest recorded = read_manifest(manifest_path);
    const FrameSequence seq = load_sequence(recorded.source_path);

    SceneManifest fresh = recorded;
    fresh.pair_count = 0;
    fresh.alm_converged.clear();
    fresh.pair_paths.clear();

    SceneResult result = process_scene(seq, std::move(fresh));
    if (!(result.manifest == recorded))
        throw Error(Errc::schema_error,
                    "replay_manifest: regenerated bookkeeping differs from recorded manifest");
    return result;
}

RunSummary run_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    if (!fs::is_directory(cfg.input_root))
        throw Error(Errc::file_not_found, "run_pipeline: input root not found: " + cfg.input_root);

    std::vector<fs::path> scene_dirs;
    for (const auto& entry : fs::directory_iterator(cfg.input_root))
        if (entry.is_directory()) scene_dirs.push_back(entry.path());
    std::sort(scene_dirs.begin(), scene_dirs.end());
    if (scene_dirs.empty())
        throw Error(Errc::file_not_found, "run_pipeline: no scene directories in: " + cfg.input_root);

    const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
    const int n = static_cast<int>(scene_dirs.size());
    std::vector<std::string> manifest_paths(n);
    std::vector<int> pair_counts(n, 0);
    std::vector<std::exception_ptr> errors(n);

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < n; ++i) {
        try {
            const FrameSequence seq = load_sequence(scene_dirs[i].string());
            const SceneResult result =
                degrade_scene(seq, cfg, i, scene_dirs[i].filename().string(), scene_dirs[i].string());
            write_scene_outputs(result, cfg.output_root);
            manifest_paths[i] =
                (fs::path(cfg.output_root) / result.manifest.scene_id / "manifest.txt").string();
            pair_counts[i] = result.manifest.pair_count;
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (int i = 0; i < n; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);

    RunSummary summary;
    summary.scenes = n;
    for (int i = 0; i < n; ++i) summary.pairs += pair_counts[i];
    summary.manifest_paths = std::move(manifest_paths);
    return summary;
}

} // namespace tierforge
