#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tierforge/errors.hpp"

namespace tierforge {

// Row-major matrix: rows are tokens, columns are channels.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    const double& at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

Mat matmul(const Mat& a, const Mat& b);

// T x H x W x C activation block, row-major in that order.
struct FeatureTensor {
    int t = 0, h = 0, w = 0, c = 0;
    std::vector<double> data;

    FeatureTensor() = default;
    FeatureTensor(int t_, int h_, int w_, int c_)
        : t(t_), h(h_), w(w_), c(c_),
          data(static_cast<std::size_t>(t_) * h_ * w_ * c_, 0.0) {}

    std::size_t index(int ti, int yi, int xi, int ci) const {
        return ((static_cast<std::size_t>(ti) * h + yi) * w + xi) * c + ci;
    }
    double& at(int ti, int yi, int xi, int ci) { return data[index(ti, yi, xi, ci)]; }
    double at(int ti, int yi, int xi, int ci) const { return data[index(ti, yi, xi, ci)]; }

    static FeatureTensor random(int t, int h, int w, int c, std::uint64_t seed);
};

struct LayerNormParams {
    std::vector<double> gain; // length = normalized width
    std::vector<double> bias;

    static LayerNormParams identity(int width);
};

// Per-row normalization over the trailing dimension, epsilon-stabilized.
void layer_norm(Mat& x, const LayerNormParams& p, double eps = 1e-5);

struct WindowSet {
    std::array<int, 3> window{}; // wT, wH, wW
    int t = 0, h = 0, w = 0, c = 0;    // original dims
    int pt = 0, ph = 0, pw = 0;        // padded dims
    std::vector<std::array<int, 3>> origins; // canonical enumeration order
    std::vector<std::vector<double>> windows; // each wT*wH*wW*c, (t,h,w,c) layout
};

// Tiles into disjoint windows; h/w are reflect-padded, t repeat-padded to
// multiples of the window dims.
WindowSet window_partition(const FeatureTensor& x, const std::array<int, 3>& window);

// Exact inverse; validates the layout metadata and strips padding.
FeatureTensor window_reverse(const WindowSet& ws);

// Per-head softmax(q k^T / sqrt(d)) weights; rows are (head, query) pairs
// stacked head-major, each row non-negative summing to one.
Mat attention_weights(const Mat& q, const Mat& k, int heads);

// Multi-head scaled dot-product attention, heads concatenated.
Mat wmsa(const Mat& q, const Mat& k, const Mat& v, int heads);

// Mutual attention: queries taken from the paired frame.
Mat wmma(const Mat& q_other, const Mat& k_self, const Mat& v_self, int heads);

enum class BlockKind { mutual_and_self, self_only };

struct AttentionParams {
    int channels = 12;
    int heads = 6;
    std::array<int, 3> window{2, 4, 4}; // wT fixed at 2 for frame pairs
    LayerNormParams ln1, ln2;
    Mat w_q, w_k, w_v;        // c x c projections
    Mat mlp_reduce_mutual;    // 2c x c, reduces concat(Y_hat, Y)
    Mat mlp_reduce_self;      // c x c, used by self-only blocks
    Mat mlp2_in, mlp2_out;    // c x c trailing MLP with GELU between
    std::uint64_t seed = 0;

    // Seeded uniform in [-0.1, 0.1]; layer norms start as identity.
    static AttentionParams random_init(int channels, int heads, const std::array<int, 3>& window,
                                       std::uint64_t seed);

    // Zeroes mlp_reduce_* and mlp2_out; the block becomes the identity map.
    void zero_output_projections();

    void validate() const;
};

// LN -> per-frame Q/K/V -> windowed mutual + self attention -> MLP reduce ->
// residual -> LN -> MLP -> residual. Output shape equals input shape.
// shift cyclically rolls (t,h,w) before partitioning and rolls back after.
FeatureTensor attention_block(const FeatureTensor& z, const AttentionParams& params,
                              BlockKind kind = BlockKind::mutual_and_self,
                              const std::array<int, 3>& shift = {0, 0, 0});

// n_mutual blocks with W-MMA + W-MSA followed by m_self W-MSA-only blocks;
// odd-numbered blocks use half-window shifts.
FeatureTensor run_block_stack(const FeatureTensor& z, const AttentionParams& params, int n_mutual,
                              int m_self);

struct FusionParams {
    LayerNormParams ln; // over 2c
    Mat projection;     // 2c x c

    static FusionParams random_init(int channels, std::uint64_t seed);
    static FusionParams selector_first(int channels); // projection [I | 0], identity norm
};

// Channel-concatenates two same-shape tensors, layer-norms over 2c and
// projects back down to c.
FeatureTensor feature_fusion(const FeatureTensor& z_prev_tier, const FeatureTensor& z_curr,
                             const FusionParams& params);

} // namespace tierforge
