#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <omp.h>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tierforge/attention.hpp"
#include "tierforge/losses.hpp"
#include "tierforge/pipeline.hpp"
#include "tierforge/png_io.hpp"
#include "tierforge/retinex.hpp"
#include "tierforge/rng.hpp"
#include "tierforge/version.hpp"

namespace fs = std::filesystem;
using namespace tierforge;

namespace {

std::vector<std::string> list_pngs(const std::string& dir) {
    if (!fs::is_directory(dir)) throw Error(Errc::file_not_found, "not a directory: " + dir);
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::string ext = e.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png") names.push_back(e.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

int cmd_degrade(const std::string& config_path, const std::string& replay_path,
                const std::string& output_override, bool seed_given, std::uint64_t seed,
                int threads) {
    if (!replay_path.empty()) {
        if (output_override.empty()) {
            std::cerr << "degrade --replay requires --output\n";
            return 1;
        }
        SceneResult result = replay_manifest(replay_path);
        write_scene_outputs(result, output_override);
        std::cout << "replayed scene " << result.manifest.scene_id << " (" << result.manifest.pair_count
                  << " pairs) into " << output_override << "\n";
        return 0;
    }

    if (config_path.empty()) {
        std::cerr << "degrade requires --config\n";
        return 1;
    }
    PipelineConfig cfg = load_config(config_path);
    if (seed_given) cfg.master_seed = seed;
    if (threads > 0) cfg.threads = threads;
    if (!output_override.empty()) cfg.output_root = output_override;

    const RunSummary summary = run_pipeline(cfg);
    std::cout << "processed " << summary.scenes << " scenes, " << summary.pairs << " tier triplets\n";
    for (const std::string& p : summary.manifest_paths) std::cout << "manifest " << p << "\n";
    return 0;
}

int cmd_metrics(const std::string& dir_a, const std::string& dir_b, const std::string& out_path) {
    const std::vector<std::string> names_a = list_pngs(dir_a);
    const std::vector<std::string> names_b = list_pngs(dir_b);
    if (names_a != names_b)
        throw Error(Errc::bad_argument, "metrics: directories contain different frame sets");
    if (names_a.empty()) throw Error(Errc::bad_argument, "metrics: no frames found");

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty() && out_path != "-") {
        file.open(out_path);
        if (!file) throw Error(Errc::io_failure, "metrics: cannot open: " + out_path);
        out = &file;
    }

    out->precision(12);
    *out << "frame,psnr,ssim,charbonnier\n";
    double sum_psnr = 0.0, sum_ssim = 0.0, sum_charb = 0.0;
    for (const std::string& name : names_a) {
        const Frame a = load_frame((fs::path(dir_a) / name).string());
        const Frame b = load_frame((fs::path(dir_b) / name).string());
        const double p = psnr(a, b);
        const double s = ssim(a, b);
        const double c = charbonnier(a, b);
        sum_psnr += p;
        sum_ssim += s;
        sum_charb += c;
        *out << name << ',' << p << ',' << s << ',' << c << '\n';
    }
    const double n = static_cast<double>(names_a.size());
    *out << "mean," << sum_psnr / n << ',' << sum_ssim / n << ',' << sum_charb / n << '\n';
    return 0;
}

int cmd_loss_sim(const std::string& raw_str, int steps, double lr, int print_every) {
    std::array<double, 3> raw{};
    if (std::sscanf(raw_str.c_str(), "%lf,%lf,%lf", &raw[0], &raw[1], &raw[2]) != 3)
        throw Error(Errc::bad_argument, "loss-sim: --raw expects three comma-separated values");

    SigmaState state;
    state.lr = lr;
    std::printf("step sigma1^2 sigma2^2 sigma3^2 total_loss\n");
    for (int i = 0; i < steps; ++i) {
        state = update_sigmas(state, raw);
        if ((i + 1) % print_every == 0 || i + 1 == steps) {
            const auto sig = state.sigmas();
            const LossBreakdown lb = adaptive_weighted_loss(raw, state);
            std::printf("%d %.6f %.6f %.6f %.6f\n", i + 1, sig[0] * sig[0], sig[1] * sig[1],
                        sig[2] * sig[2], lb.total);
        }
    }
    const auto sig = state.sigmas();
    std::printf("final sigma^2: %.6f %.6f %.6f\n", sig[0] * sig[0], sig[1] * sig[1], sig[2] * sig[2]);
    return 0;
}

bool check(const char* name, bool ok) {
    std::printf("%-44s %s\n", name, ok ? "PASS" : "FAIL");
    return ok;
}

int cmd_attn_check(int trials, std::uint64_t seed) {
    bool all = true;

    // Attention weights are row-stochastic.
    {
        bool ok = true;
        for (int i = 0; i < trials && ok; ++i) {
            const std::uint64_t s = rng::derive_seed(seed, i);
            const int heads = 1 + static_cast<int>(rng::hash(s, 90) % 3);
            const int d = heads * (1 + static_cast<int>(rng::hash(s, 91) % 4));
            const int rows = 1 + static_cast<int>(rng::hash(s, 92) % 6);
            Mat q(rows, d), k(rows, d);
            for (auto& v : q.v) v = rng::uniform_range(s, 1000 + (&v - q.v.data()), -2.0, 2.0);
            for (auto& v : k.v) v = rng::uniform_range(s, 5000 + (&v - k.v.data()), -2.0, 2.0);
            const Mat w = attention_weights(q, k, heads);
            for (int r = 0; r < w.rows && ok; ++r) {
                double sum = 0.0;
                for (int c = 0; c < w.cols; ++c) {
                    if (w.at(r, c) < 0.0) ok = false;
                    sum += w.at(r, c);
                }
                if (std::abs(sum - 1.0) > 1e-6) ok = false;
            }
        }
        all &= check("attention weights row-stochastic", ok);
    }

    // Window partition/reverse round trip is exact.
    {
        bool ok = true;
        for (int i = 0; i < trials && ok; ++i) {
            const std::uint64_t s = rng::derive_seed(seed, 1000 + i);
            const int t = 2 * (1 + static_cast<int>(rng::hash(s, 0) % 2));
            const int h = 1 + static_cast<int>(rng::hash(s, 1) % 9);
            const int w = 1 + static_cast<int>(rng::hash(s, 2) % 9);
            const int c = 1 + static_cast<int>(rng::hash(s, 3) % 4);
            const FeatureTensor x = FeatureTensor::random(t, h, w, c, s);
            const FeatureTensor y = window_reverse(window_partition(x, {2, 4, 4}));
            ok = y.data == x.data;
        }
        all &= check("window partition/reverse exact round trip", ok);
    }

    // Mutual attention swaps with the frames and matches self-attention on
    // identical frames.
    {
        bool swap_ok = true, same_ok = true;
        for (int i = 0; i < trials && (swap_ok || same_ok); ++i) {
            const std::uint64_t s = rng::derive_seed(seed, 2000 + i);
            const int heads = 2;
            const int d = 8, rows = 5;
            auto randmat = [&](std::uint64_t salt) {
                Mat m(rows, d);
                for (std::size_t j = 0; j < m.v.size(); ++j)
                    m.v[j] = rng::uniform_range(s, salt * 10000 + j, -1.0, 1.0);
                return m;
            };
            const Mat q1 = randmat(1), k1 = randmat(2), v1 = randmat(3);
            const Mat q2 = randmat(4), k2 = randmat(5), v2 = randmat(6);
            const Mat yh1 = wmma(q2, k1, v1, heads), yh2 = wmma(q1, k2, v2, heads);
            const Mat sw1 = wmma(q1, k2, v2, heads), sw2 = wmma(q2, k1, v1, heads);
            if (!(sw1.v == yh2.v && sw2.v == yh1.v)) swap_ok = false;
            if (wmma(q1, k1, v1, heads).v != wmsa(q1, k1, v1, heads).v) same_ok = false;
        }
        all &= check("wmma frame-swap symmetry exact", swap_ok);
        all &= check("wmma equals wmsa on identical frames", same_ok);
    }

    // Zeroed output projections make the block an identity map.
    {
        bool ok = true;
        for (int i = 0; i < trials && ok; ++i) {
            const std::uint64_t s = rng::derive_seed(seed, 3000 + i);
            AttentionParams p = AttentionParams::random_init(8, 2, {2, 4, 4}, s);
            p.zero_output_projections();
            const FeatureTensor x = FeatureTensor::random(2, 5, 6, 8, s);
            ok = attention_block(x, p).data == x.data;
        }
        all &= check("zero-projection block is identity", ok);
    }

    std::printf("%s\n", all ? "all attention invariants hold" : "attention invariant FAILURES");
    return all ? 0 : 1;
}

int cmd_lime_solve(const std::string& input, const std::string& out_path, const std::string& trace_path,
                   const LimeParams& params) {
    const Frame frame = load_frame(input);
    const IlluminationMap t_hat = init_illumination(frame);
    const LimeResult res = refine_illumination_alm(t_hat, params);

    std::printf("%s: %d iterations, %s, objective %.9g\n", input.c_str(),
                static_cast<int>(res.trace.size()), res.converged ? "converged" : "max-iter reached",
                res.trace.empty() ? 0.0 : res.trace.back().objective);

    if (!out_path.empty()) {
        Frame gray(res.refined.width, res.refined.height, 1);
        gray.data = res.refined.data;
        for (double& v : gray.data) v = std::clamp(v, 0.0, 1.0);
        save_frame(gray, out_path, 16);
        std::printf("refined illumination written to %s\n", out_path.c_str());
    }
    if (!trace_path.empty()) {
        write_trace_csv(res.trace, trace_path);
        std::printf("trace written to %s\n", trace_path.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tierforge: degradation synthesis and restoration math toolkit"};
    app.set_version_flag("--version", kToolkitVersion);
    app.require_subcommand(1);
    app.fallthrough(); // global --seed/--threads may follow the subcommand

    int threads = 0;
    std::uint64_t seed = 0;
    app.add_option("--threads", threads, "worker thread count (0 = runtime default)");
    auto* seed_opt = app.add_option("--seed", seed, "override the master seed");

    auto* degrade_cmd = app.add_subcommand("degrade", "generate tier-ladder training data");
    std::string config_path, replay_path, output_override;
    degrade_cmd->add_option("--config", config_path, "pipeline config file");
    degrade_cmd->add_option("--replay", replay_path, "regenerate one scene from a manifest");
    degrade_cmd->add_option("--output", output_override, "override the output root");

    auto* metrics_cmd = app.add_subcommand("metrics", "PSNR/SSIM/Charbonnier between two frame trees");
    std::string dir_a, dir_b, csv_out;
    metrics_cmd->add_option("dir_a", dir_a, "first frame directory")->required();
    metrics_cmd->add_option("dir_b", dir_b, "second frame directory")->required();
    metrics_cmd->add_option("--out", csv_out, "CSV output path (default stdout)");

    auto* loss_cmd = app.add_subcommand("loss-sim", "adaptive loss weight convergence demo");
    std::string raw_str = "4,4,4";
    int steps = 5000, print_every = 500;
    double lr = 1e-2;
    loss_cmd->add_option("--raw", raw_str, "three fixed raw losses, comma separated");
    loss_cmd->add_option("--steps", steps, "optimizer steps");
    loss_cmd->add_option("--lr", lr, "Adam learning rate");
    loss_cmd->add_option("--print-every", print_every, "trajectory print stride");

    auto* attn_cmd = app.add_subcommand("attn-check", "run the attention invariant suite");
    int trials = 100;
    attn_cmd->add_option("--trials", trials, "random tensors per property");

    auto* lime_cmd = app.add_subcommand("lime-solve", "refine the illumination map of one image");
    std::string lime_input, lime_out, lime_trace, strategy = "uniform";
    LimeParams lime_params;
    lime_cmd->add_option("input", lime_input, "input PNG")->required();
    lime_cmd->add_option("--out", lime_out, "write refined illumination PNG");
    lime_cmd->add_option("--trace", lime_trace, "write iteration trace CSV");
    lime_cmd->add_option("--alpha", lime_params.alpha, "smoothness weight");
    lime_cmd->add_option("--strategy", strategy, "uniform | gradient-inverse");
    lime_cmd->add_option("--weight-eps", lime_params.weight_eps, "gradient-inverse epsilon");
    lime_cmd->add_option("--mu0", lime_params.mu0, "initial penalty");
    lime_cmd->add_option("--rho", lime_params.rho, "penalty growth");
    lime_cmd->add_option("--max-iter", lime_params.max_iter, "iteration cap");
    lime_cmd->add_option("--tol", lime_params.tol, "primal residual tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    if (threads > 0) omp_set_num_threads(threads);

    try {
        if (degrade_cmd->parsed())
            return cmd_degrade(config_path, replay_path, output_override, seed_opt->count() > 0, seed,
                               threads);
        if (metrics_cmd->parsed()) return cmd_metrics(dir_a, dir_b, csv_out);
        if (loss_cmd->parsed()) return cmd_loss_sim(raw_str, steps, lr, print_every);
        if (attn_cmd->parsed()) return cmd_attn_check(trials, seed_opt->count() > 0 ? seed : 1);
        if (lime_cmd->parsed()) {
            if (strategy == "uniform") lime_params.weight_strategy = WeightStrategy::uniform;
            else if (strategy == "gradient-inverse")
                lime_params.weight_strategy = WeightStrategy::gradient_inverse;
            else throw Error(Errc::bad_argument, "lime-solve: unknown strategy: " + strategy);
            return cmd_lime_solve(lime_input, lime_out, lime_trace, lime_params);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
