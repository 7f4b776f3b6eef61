#pragma once

#include <string>
#include <vector>

#include "tierforge/config.hpp"
#include "tierforge/frame.hpp"
#include "tierforge/manifest.hpp"

namespace tierforge {

// One training sample: degraded input plus the three progressive targets.
struct TierTriplet {
    Frame input;    // lowlight + blur + noise
    Frame gt_tier1; // lowlight + blur (denoise-only target)
    Frame gt_tier2; // blur (enhance + denoise target)
    Frame gt_tier3; // clean middle frame (full target)
};

struct SceneResult {
    std::vector<TierTriplet> triplets;
    SceneManifest manifest;
};

// Numbered-PNG directory, sorted by filename.
FrameSequence load_sequence(const std::string& dir);

// Samples the per-scene parameters from the config ranges using a stream
// derived from (master_seed, scene_index) and records them.
SceneManifest resolve_scene_params(const PipelineConfig& cfg, int scene_index,
                                   const std::string& scene_id, const std::string& source_path);

// Runs resize -> crop -> interpolate -> blur -> retinex degrade -> noise with
// the already-resolved parameters; fills pair bookkeeping in the manifest.
SceneResult process_scene(const FrameSequence& seq, SceneManifest manifest);

// resolve_scene_params + process_scene.
SceneResult degrade_scene(const FrameSequence& seq, const PipelineConfig& cfg, int scene_index,
                          const std::string& scene_id = "", const std::string& source_path = "");

// Writes <output_root>/<scene_id>/{input,gt1,gt2,gt3}/NNNN.png plus the
// manifest alongside.
void write_scene_outputs(const SceneResult& result, const std::string& output_root);

// Regenerates a scene from its recorded parameters; no resampling happens.
SceneResult replay_manifest(const std::string& manifest_path);

struct RunSummary {
    int scenes = 0;
    int pairs = 0;
    std::vector<std::string> manifest_paths;
};

// Scans input_root for scene directories (sorted by name), processes them in
// parallel and writes the output tree. The tree depends only on the inputs,
// config and master seed, not on the parallelism degree.
RunSummary run_pipeline(const PipelineConfig& cfg);

} // namespace tierforge
