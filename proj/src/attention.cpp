#include "tierforge/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tierforge/rng.hpp"

namespace tierforge {

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols != b.rows) throw Error(Errc::dimension_mismatch, "matmul: inner dimensions differ");
    Mat out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const double av = a.at(i, k);
            for (int j = 0; j < b.cols; ++j) out.at(i, j) += av * b.at(k, j);
        }
    return out;
}

FeatureTensor FeatureTensor::random(int t, int h, int w, int c, std::uint64_t seed) {
    FeatureTensor x(t, h, w, c);
    for (std::size_t i = 0; i < x.data.size(); ++i)
        x.data[i] = rng::uniform_range(seed, i, -1.0, 1.0);
    return x;
}

LayerNormParams LayerNormParams::identity(int width) {
    LayerNormParams p;
    p.gain.assign(width, 1.0);
    p.bias.assign(width, 0.0);
    return p;
}

void layer_norm(Mat& x, const LayerNormParams& p, double eps) {
    if (static_cast<int>(p.gain.size()) != x.cols || static_cast<int>(p.bias.size()) != x.cols)
        throw Error(Errc::dimension_mismatch, "layer_norm: affine width mismatch");
    for (int r = 0; r < x.rows; ++r) {
        double mean = 0.0;
        for (int c = 0; c < x.cols; ++c) mean += x.at(r, c);
        mean /= x.cols;
        double var = 0.0;
        for (int c = 0; c < x.cols; ++c) {
            const double d = x.at(r, c) - mean;
            var += d * d;
        }
        var /= x.cols;
        const double inv = 1.0 / std::sqrt(var + eps);
        for (int c = 0; c < x.cols; ++c)
            x.at(r, c) = (x.at(r, c) - mean) * inv * p.gain[c] + p.bias[c];
    }
}

namespace {

// Symmetric reflection (edge included) for spatial padding.
int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - 1 - m;
}

int pad_to(int size, int mult) { return (size + mult - 1) / mult * mult; }

} // namespace

WindowSet window_partition(const FeatureTensor& x, const std::array<int, 3>& window) {
    if (window[0] < 1 || window[1] < 1 || window[2] < 1)
        throw Error(Errc::bad_argument, "window_partition: window dims must be positive");
    if (x.t < 1 || x.h < 1 || x.w < 1 || x.c < 1)
        throw Error(Errc::bad_argument, "window_partition: empty tensor");

    WindowSet ws;
    ws.window = window;
    ws.t = x.t;
    ws.h = x.h;
    ws.w = x.w;
    ws.c = x.c;
    ws.pt = pad_to(x.t, window[0]);
    ws.ph = pad_to(x.h, window[1]);
    ws.pw = pad_to(x.w, window[2]);

    const int nt = ws.pt / window[0], nh = ws.ph / window[1], nw = ws.pw / window[2];
    ws.origins.reserve(static_cast<std::size_t>(nt) * nh * nw);
    ws.windows.reserve(ws.origins.capacity());

    for (int bt = 0; bt < nt; ++bt)
        for (int by = 0; by < nh; ++by)
            for (int bx = 0; bx < nw; ++bx) {
                std::vector<double> win(static_cast<std::size_t>(window[0]) * window[1] * window[2] * x.c);
                std::size_t o = 0;
                for (int dt = 0; dt < window[0]; ++dt) {
                    const int ti = std::min(bt * window[0] + dt, x.t - 1); // repeat-pad in time
                    for (int dy = 0; dy < window[1]; ++dy) {
                        const int yi = reflect_index(by * window[1] + dy, x.h);
                        for (int dx = 0; dx < window[2]; ++dx) {
                            const int xi = reflect_index(bx * window[2] + dx, x.w);
                            for (int ci = 0; ci < x.c; ++ci) win[o++] = x.at(ti, yi, xi, ci);
                        }
                    }
                }
                ws.origins.push_back({bt * window[0], by * window[1], bx * window[2]});
                ws.windows.push_back(std::move(win));
            }
    return ws;
}

FeatureTensor window_reverse(const WindowSet& ws) {
    const auto& win = ws.window;
    if (win[0] < 1 || win[1] < 1 || win[2] < 1 || ws.t < 1 || ws.h < 1 || ws.w < 1 || ws.c < 1)
        throw Error(Errc::invalid_metadata, "window_reverse: corrupt dimensions");
    if (ws.pt % win[0] != 0 || ws.ph % win[1] != 0 || ws.pw % win[2] != 0 || ws.pt < ws.t ||
        ws.ph < ws.h || ws.pw < ws.w)
        throw Error(Errc::invalid_metadata, "window_reverse: padded dims inconsistent with window");

    const int nt = ws.pt / win[0], nh = ws.ph / win[1], nw = ws.pw / win[2];
    const std::size_t expected = static_cast<std::size_t>(nt) * nh * nw;
    if (ws.windows.size() != expected || ws.origins.size() != expected)
        throw Error(Errc::invalid_metadata, "window_reverse: window count mismatch");

    const std::size_t win_len = static_cast<std::size_t>(win[0]) * win[1] * win[2] * ws.c;
    std::size_t idx = 0;
    for (int bt = 0; bt < nt; ++bt)
        for (int by = 0; by < nh; ++by)
            for (int bx = 0; bx < nw; ++bx, ++idx) {
                const std::array<int, 3> want{bt * win[0], by * win[1], bx * win[2]};
                if (ws.origins[idx] != want)
                    throw Error(Errc::invalid_metadata, "window_reverse: origin out of canonical order");
                if (ws.windows[idx].size() != win_len)
                    throw Error(Errc::invalid_metadata, "window_reverse: window size mismatch");
            }

    FeatureTensor out(ws.t, ws.h, ws.w, ws.c);
    idx = 0;
    for (int bt = 0; bt < nt; ++bt)
        for (int by = 0; by < nh; ++by)
            for (int bx = 0; bx < nw; ++bx, ++idx) {
                const auto& w = ws.windows[idx];
                std::size_t o = 0;
                for (int dt = 0; dt < win[0]; ++dt) {
                    const int ti = bt * win[0] + dt;
                    for (int dy = 0; dy < win[1]; ++dy) {
                        const int yi = by * win[1] + dy;
                        for (int dx = 0; dx < win[2]; ++dx) {
                            const int xi = bx * win[2] + dx;
                            if (ti < ws.t && yi < ws.h && xi < ws.w) {
                                for (int ci = 0; ci < ws.c; ++ci)
                                    out.at(ti, yi, xi, ci) = w[o + ci];
                            }
                            o += ws.c;
                        }
                    }
                }
            }
    return out;
}

Mat attention_weights(const Mat& q, const Mat& k, int heads) {
    if (heads < 1 || q.cols != k.cols || q.cols % heads != 0)
        throw Error(Errc::dimension_mismatch, "attention_weights: dims not divisible by heads");
    const int d = q.cols / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));

    Mat weights(heads * q.rows, k.rows);
    for (int hd = 0; hd < heads; ++hd) {
        const int off = hd * d;
        for (int i = 0; i < q.rows; ++i) {
            double* row = &weights.at(hd * q.rows + i, 0);
            double m = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < k.rows; ++j) {
                double dot = 0.0;
                for (int x = 0; x < d; ++x) dot += q.at(i, off + x) * k.at(j, off + x);
                row[j] = dot * scale;
                m = std::max(m, row[j]);
            }
            double denom = 0.0;
            for (int j = 0; j < k.rows; ++j) {
                row[j] = std::exp(row[j] - m);
                denom += row[j];
            }
            for (int j = 0; j < k.rows; ++j) row[j] /= denom;
        }
    }
    return weights;
}

Mat wmsa(const Mat& q, const Mat& k, const Mat& v, int heads) {
    if (k.rows != v.rows || q.cols != k.cols || q.cols != v.cols)
        throw Error(Errc::dimension_mismatch, "wmsa: shape mismatch");
    const Mat weights = attention_weights(q, k, heads);
    const int d = q.cols / heads;

    Mat out(q.rows, q.cols);
    for (int hd = 0; hd < heads; ++hd) {
        const int off = hd * d;
        for (int i = 0; i < q.rows; ++i) {
            const double* row = &weights.at(hd * q.rows + i, 0);
            for (int x = 0; x < d; ++x) {
                double acc = 0.0;
                for (int j = 0; j < v.rows; ++j) acc += row[j] * v.at(j, off + x);
                out.at(i, off + x) = acc;
            }
        }
    }
    return out;
}

Mat wmma(const Mat& q_other, const Mat& k_self, const Mat& v_self, int heads) {
    return wmsa(q_other, k_self, v_self, heads);
}

AttentionParams AttentionParams::random_init(int channels, int heads, const std::array<int, 3>& window,
                                             std::uint64_t seed) {
    AttentionParams p;
    p.channels = channels;
    p.heads = heads;
    p.window = window;
    p.seed = seed;
    p.ln1 = LayerNormParams::identity(channels);
    p.ln2 = LayerNormParams::identity(channels);

    std::uint64_t counter = 0;
    auto fill = [&](Mat& m, int r, int c) {
        m = Mat(r, c);
        for (double& v : m.v) v = rng::uniform_range(seed, counter++, -0.1, 0.1);
    };
    fill(p.w_q, channels, channels);
    fill(p.w_k, channels, channels);
    fill(p.w_v, channels, channels);
    fill(p.mlp_reduce_mutual, 2 * channels, channels);
    fill(p.mlp_reduce_self, channels, channels);
    fill(p.mlp2_in, channels, channels);
    fill(p.mlp2_out, channels, channels);
    p.validate();
    return p;
}

void AttentionParams::zero_output_projections() {
    std::fill(mlp_reduce_mutual.v.begin(), mlp_reduce_mutual.v.end(), 0.0);
    std::fill(mlp_reduce_self.v.begin(), mlp_reduce_self.v.end(), 0.0);
    std::fill(mlp2_out.v.begin(), mlp2_out.v.end(), 0.0);
}

void AttentionParams::validate() const {
    if (channels < 1 || heads < 1 || channels % heads != 0)
        throw Error(Errc::bad_argument, "AttentionParams: channels must divide by heads");
    if (window[0] != 2)
        throw Error(Errc::bad_argument, "AttentionParams: temporal window must be 2 (frame pairs)");
    if (window[1] < 1 || window[2] < 1)
        throw Error(Errc::bad_argument, "AttentionParams: window dims must be positive");
    auto expect = [](const Mat& m, int r, int c, const char* name) {
        if (m.rows != r || m.cols != c)
            throw Error(Errc::bad_argument, std::string("AttentionParams: bad shape for ") + name);
    };
    expect(w_q, channels, channels, "w_q");
    expect(w_k, channels, channels, "w_k");
    expect(w_v, channels, channels, "w_v");
    expect(mlp_reduce_mutual, 2 * channels, channels, "mlp_reduce_mutual");
    expect(mlp_reduce_self, channels, channels, "mlp_reduce_self");
    expect(mlp2_in, channels, channels, "mlp2_in");
    expect(mlp2_out, channels, channels, "mlp2_out");
}

namespace {

double gelu(double x) {
    return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2));
}

FeatureTensor roll(const FeatureTensor& x, const std::array<int, 3>& shift) {
    if (shift == std::array<int, 3>{0, 0, 0}) return x;
    FeatureTensor out(x.t, x.h, x.w, x.c);
    auto wrap = [](int i, int s, int n) {
        int m = (i + s) % n;
        if (m < 0) m += n;
        return m;
    };
    for (int ti = 0; ti < x.t; ++ti)
        for (int yi = 0; yi < x.h; ++yi)
            for (int xi = 0; xi < x.w; ++xi) {
                const std::size_t src = x.index(ti, yi, xi, 0);
                const std::size_t dst =
                    out.index(wrap(ti, shift[0], x.t), wrap(yi, shift[1], x.h), wrap(xi, shift[2], x.w), 0);
                for (int ci = 0; ci < x.c; ++ci) out.data[dst + ci] = x.data[src + ci];
            }
    return out;
}

} // namespace

FeatureTensor attention_block(const FeatureTensor& z, const AttentionParams& params, BlockKind kind,
                              const std::array<int, 3>& shift) {
    params.validate();
    if (z.t % 2 != 0) throw Error(Errc::bad_argument, "attention_block: t must be even (frame pairs)");
    if (z.c != params.channels) throw Error(Errc::dimension_mismatch, "attention_block: channel mismatch");

    const FeatureTensor rolled = roll(z, shift);

    // LN over channels for every token.
    const int tokens = rolled.t * rolled.h * rolled.w;
    Mat x(tokens, rolled.c);
    std::copy(rolled.data.begin(), rolled.data.end(), x.v.begin());
    layer_norm(x, params.ln1);
    FeatureTensor normed(rolled.t, rolled.h, rolled.w, rolled.c);
    std::copy(x.v.begin(), x.v.end(), normed.data.begin());

    WindowSet ws = window_partition(normed, params.window);
    const int half = params.window[1] * params.window[2]; // tokens per frame in a window
    const int c = params.channels;

    // Attended features per token: Y_hat (mutual) and Y (self).
    FeatureTensor y_hat_t(rolled.t, rolled.h, rolled.w, c);
    FeatureTensor y_t(rolled.t, rolled.h, rolled.w, c);

    const std::ptrdiff_t n_windows = static_cast<std::ptrdiff_t>(ws.windows.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t wi = 0; wi < n_windows; ++wi) {
        Mat tok(2 * half, c);
        std::copy(ws.windows[wi].begin(), ws.windows[wi].end(), tok.v.begin());

        Mat frame1(half, c), frame2(half, c);
        std::copy(tok.v.begin(), tok.v.begin() + static_cast<std::ptrdiff_t>(half) * c, frame1.v.begin());
        std::copy(tok.v.begin() + static_cast<std::ptrdiff_t>(half) * c, tok.v.end(), frame2.v.begin());

        const Mat q1 = matmul(frame1, params.w_q), k1 = matmul(frame1, params.w_k), v1 = matmul(frame1, params.w_v);
        const Mat q2 = matmul(frame2, params.w_q), k2 = matmul(frame2, params.w_k), v2 = matmul(frame2, params.w_v);

        const Mat y1 = wmsa(q1, k1, v1, params.heads);
        const Mat y2 = wmsa(q2, k2, v2, params.heads);
        Mat yh1, yh2;
        if (kind == BlockKind::mutual_and_self) {
            yh1 = wmma(q2, k1, v1, params.heads);
            yh2 = wmma(q1, k2, v2, params.heads);
        }

        // Scatter back into full tensors, skipping padded positions.
        const auto& org = ws.origins[wi];
        for (int row = 0; row < 2 * half; ++row) {
            const int dt = row / half;
            const int rem = row - dt * half;
            const int dy = rem / params.window[2];
            const int dx = rem - dy * params.window[2];
            const int ti = org[0] + dt, yi = org[1] + dy, xi = org[2] + dx;
            if (ti >= rolled.t || yi >= rolled.h || xi >= rolled.w) continue;
            const Mat& y_src = dt == 0 ? y1 : y2;
            for (int ci = 0; ci < c; ++ci) y_t.at(ti, yi, xi, ci) = y_src.at(rem, ci);
            if (kind == BlockKind::mutual_and_self) {
                const Mat& yh_src = dt == 0 ? yh1 : yh2;
                for (int ci = 0; ci < c; ++ci) y_hat_t.at(ti, yi, xi, ci) = yh_src.at(rem, ci);
            }
        }
    }

    // MLP reduction + residual.
    FeatureTensor z_hat(rolled.t, rolled.h, rolled.w, c);
    const std::ptrdiff_t n_tokens = tokens;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t tk = 0; tk < n_tokens; ++tk) {
        const std::size_t base = static_cast<std::size_t>(tk) * c;
        for (int co = 0; co < c; ++co) {
            double acc = 0.0;
            if (kind == BlockKind::mutual_and_self) {
                for (int ci = 0; ci < c; ++ci) {
                    acc += y_hat_t.data[base + ci] * params.mlp_reduce_mutual.at(ci, co);
                    acc += y_t.data[base + ci] * params.mlp_reduce_mutual.at(c + ci, co);
                }
            } else {
                for (int ci = 0; ci < c; ++ci) acc += y_t.data[base + ci] * params.mlp_reduce_self.at(ci, co);
            }
            z_hat.data[base + co] = acc + rolled.data[base + co];
        }
    }

    // Trailing LN -> MLP -> residual.
    Mat x2(tokens, c);
    std::copy(z_hat.data.begin(), z_hat.data.end(), x2.v.begin());
    layer_norm(x2, params.ln2);
    FeatureTensor out(rolled.t, rolled.h, rolled.w, c);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t tk = 0; tk < n_tokens; ++tk) {
        const std::size_t base = static_cast<std::size_t>(tk) * c;
        std::vector<double> hidden(c, 0.0);
        for (int co = 0; co < c; ++co) {
            double acc = 0.0;
            for (int ci = 0; ci < c; ++ci) acc += x2.v[base + ci] * params.mlp2_in.at(ci, co);
            hidden[co] = gelu(acc);
        }
        for (int co = 0; co < c; ++co) {
            double acc = 0.0;
            for (int ci = 0; ci < c; ++ci) acc += hidden[ci] * params.mlp2_out.at(ci, co);
            out.data[base + co] = acc + z_hat.data[base + co];
        }
    }

    const std::array<int, 3> unshift{-shift[0], -shift[1], -shift[2]};
    return roll(out, unshift);
}

FeatureTensor run_block_stack(const FeatureTensor& z, const AttentionParams& params, int n_mutual,
                              int m_self) {
    if (n_mutual < 0 || m_self < 0)
        throw Error(Errc::bad_argument, "run_block_stack: block counts must be non-negative");
    FeatureTensor cur = z;
    const std::array<int, 3> half_shift{0, params.window[1] / 2, params.window[2] / 2};
    for (int i = 0; i < n_mutual + m_self; ++i) {
        const BlockKind kind = i < n_mutual ? BlockKind::mutual_and_self : BlockKind::self_only;
        const auto shift = (i % 2 == 1) ? half_shift : std::array<int, 3>{0, 0, 0};
        cur = attention_block(cur, params, kind, shift);
    }
    return cur;
}

FusionParams FusionParams::random_init(int channels, std::uint64_t seed) {
    FusionParams p;
    p.ln = LayerNormParams::identity(2 * channels);
    p.projection = Mat(2 * channels, channels);
    for (std::size_t i = 0; i < p.projection.v.size(); ++i)
        p.projection.v[i] = rng::uniform_range(seed, i, -0.1, 0.1);
    return p;
}

FusionParams FusionParams::selector_first(int channels) {
    FusionParams p;
    p.ln = LayerNormParams::identity(2 * channels);
    p.projection = Mat(2 * channels, channels);
    for (int i = 0; i < channels; ++i) p.projection.at(i, i) = 1.0;
    return p;
}

FeatureTensor feature_fusion(const FeatureTensor& z_prev_tier, const FeatureTensor& z_curr,
                             const FusionParams& params) {
    if (z_prev_tier.t != z_curr.t || z_prev_tier.h != z_curr.h || z_prev_tier.w != z_curr.w ||
        z_prev_tier.c != z_curr.c)
        throw Error(Errc::dimension_mismatch, "feature_fusion: tensor shapes differ");
    const int c = z_prev_tier.c;
    if (params.projection.rows != 2 * c || params.projection.cols != c)
        throw Error(Errc::dimension_mismatch, "feature_fusion: projection shape mismatch");

    const int tokens = z_prev_tier.t * z_prev_tier.h * z_prev_tier.w;
    Mat cat(tokens, 2 * c);
    for (int tk = 0; tk < tokens; ++tk) {
        const std::size_t base = static_cast<std::size_t>(tk) * c;
        for (int ci = 0; ci < c; ++ci) {
            cat.at(tk, ci) = z_prev_tier.data[base + ci];
            cat.at(tk, c + ci) = z_curr.data[base + ci];
        }
    }
    layer_norm(cat, params.ln);
    const Mat projected = matmul(cat, params.projection);

    FeatureTensor out(z_prev_tier.t, z_prev_tier.h, z_prev_tier.w, c);
    std::copy(projected.v.begin(), projected.v.end(), out.data.begin());
    return out;
}

} // namespace tierforge
