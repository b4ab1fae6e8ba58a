#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "devent/random.hpp"
#include "devent/tensor.hpp"

namespace devent {

/// Time-major sequence: one Vec per timestep.
using Seq = std::vector<Vec>;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Numerically safe softmax (max subtraction). Output sums to 1 within 1e-12.
inline Vec softmax(const Vec& logits) {
    if (logits.empty()) throw std::invalid_argument("softmax: empty input");
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    Vec out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

/// -log(probs[target]); probability clamped below at 1e-12 so a saturated
/// softmax yields a large finite loss instead of inf.
inline double cross_entropy(const Vec& probs, std::size_t target) {
    if (target >= probs.size()) throw std::invalid_argument("cross_entropy: target out of range");
    double sum = 0.0;
    for (double p : probs) sum += p;
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("cross_entropy: probabilities do not sum to 1");
    return -std::log(std::max(probs[target], 1e-12));
}

/// Sum of squared differences over all elements (the training loss).
inline double reconstruction_loss(const Tensor& original, const Tensor& reconstruction) {
    require_same_shape(original, reconstruction, "reconstruction_loss");
    double acc = 0.0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        double d = original[i] - reconstruction[i];
        acc += d * d;
    }
    return acc;
}

/// Mean absolute error, reported alongside the squared loss.
inline double mean_absolute_error(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mean_absolute_error");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return acc / static_cast<double>(a.size());
}

/// weights·input + bias. weights is {out, in}.
inline Vec dense_forward(const Tensor& weights, const Vec& bias, const Vec& input) {
    if (weights.rank() != 2 || weights.shape[1] != input.size() || weights.shape[0] != bias.size()) {
        throw std::invalid_argument("dense_forward: dimension mismatch");
    }
    const std::size_t out_w = weights.shape[0];
    const std::size_t in_w = weights.shape[1];
    Vec out(bias);
    for (std::size_t r = 0; r < out_w; ++r) {
        const double* row = weights.values.data() + r * in_w;
        double acc = 0.0;
        for (std::size_t c = 0; c < in_w; ++c) acc += row[c] * input[c];
        out[r] += acc;
    }
    return out;
}

/// Valid (no padding) correlation, stride 1. kernels is {out_ch, in_ch, k};
/// input is time-major with in_ch channels per step.
inline Seq conv1d_forward(const Tensor& kernels, const Vec& bias, const Seq& input) {
    if (kernels.rank() != 3) throw std::invalid_argument("conv1d_forward: kernels must be rank 3");
    const std::size_t out_ch = kernels.shape[0];
    const std::size_t in_ch = kernels.shape[1];
    const std::size_t k = kernels.shape[2];
    if (bias.size() != out_ch) throw std::invalid_argument("conv1d_forward: bias size mismatch");
    if (input.empty() || k > input.size()) {
        throw std::invalid_argument("conv1d_forward: kernel longer than input");
    }
    for (const Vec& step : input) {
        if (step.size() != in_ch) throw std::invalid_argument("conv1d_forward: channel count mismatch");
    }
    const std::size_t out_len = input.size() - k + 1;
    Seq out(out_len, Vec(out_ch));
    for (std::size_t t = 0; t < out_len; ++t) {
        for (std::size_t oc = 0; oc < out_ch; ++oc) {
            double acc = bias[oc];
            for (std::size_t ic = 0; ic < in_ch; ++ic) {
                for (std::size_t j = 0; j < k; ++j) acc += kernels(oc, ic, j) * input[t + j][ic];
            }
            out[t][oc] = acc;
        }
    }
    return out;
}

/// Trainable tensor plus its gradient and Adam moments.
struct Param {
    Tensor value;
    Tensor grad;
    Tensor m;
    Tensor v;
    std::uint64_t step = 0;

    Param() = default;
    explicit Param(std::vector<std::size_t> shape)
        : value(shape), grad(shape), m(shape), v(std::move(shape)) {}

    void zero_grad() { grad.fill(0.0); }
};

inline void glorot_init(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : t.values) v = rng.uniform(-s, s);
}

// ---------------------------------------------------------------------------
// Layers. forward() caches the activations of the most recent call;
// backward() consumes that cache and accumulates into Param::grad, so each
// forward must be paired with its backward before the next forward.
// ---------------------------------------------------------------------------

class Dense {
public:
    Dense() = default;
    Dense(std::size_t in_w, std::size_t out_w) : W({out_w, in_w}), b({out_w}) {}

    void init(Rng& rng) { glorot_init(W.value, in_width(), out_width(), rng); }

    std::size_t in_width() const { return W.value.shape[1]; }
    std::size_t out_width() const { return W.value.shape[0]; }

    Vec forward(const Vec& x) {
        cache_x_ = x;
        return dense_forward(W.value, b.value.values, x);
    }

    Vec backward(const Vec& dy) {
        const std::size_t out_w = out_width();
        const std::size_t in_w = in_width();
        if (dy.size() != out_w) throw std::invalid_argument("Dense::backward: gradient size mismatch");
        Vec dx(in_w, 0.0);
        for (std::size_t r = 0; r < out_w; ++r) {
            const double g = dy[r];
            b.grad[r] += g;
            double* wg = W.grad.values.data() + r * in_w;
            const double* wv = W.value.values.data() + r * in_w;
            for (std::size_t c = 0; c < in_w; ++c) {
                wg[c] += g * cache_x_[c];
                dx[c] += g * wv[c];
            }
        }
        return dx;
    }

    Param W;
    Param b;

private:
    Vec cache_x_;
};

/// Elementwise tanh with cached output.
class Tanh {
public:
    Vec forward(const Vec& x) {
        cache_y_.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) cache_y_[i] = std::tanh(x[i]);
        return cache_y_;
    }

    Vec backward(const Vec& dy) {
        Vec dx(dy.size());
        for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * (1.0 - cache_y_[i] * cache_y_[i]);
        return dx;
    }

private:
    Vec cache_y_;
};

class Conv1d {
public:
    Conv1d() = default;
    Conv1d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel)
        : W({out_ch, in_ch, kernel}), b({out_ch}) {}

    void init(Rng& rng) {
        glorot_init(W.value, in_channels() * kernel(), out_channels() * kernel(), rng);
    }

    std::size_t in_channels() const { return W.value.shape[1]; }
    std::size_t out_channels() const { return W.value.shape[0]; }
    std::size_t kernel() const { return W.value.shape[2]; }

    Seq forward(const Seq& x) {
        cache_x_ = x;
        return conv1d_forward(W.value, b.value.values, x);
    }

    Seq backward(const Seq& dy) {
        const std::size_t out_ch = out_channels();
        const std::size_t in_ch = in_channels();
        const std::size_t k = kernel();
        Seq dx(cache_x_.size(), Vec(in_ch, 0.0));
        for (std::size_t t = 0; t < dy.size(); ++t) {
            for (std::size_t oc = 0; oc < out_ch; ++oc) {
                const double g = dy[t][oc];
                b.grad[oc] += g;
                for (std::size_t ic = 0; ic < in_ch; ++ic) {
                    for (std::size_t j = 0; j < k; ++j) {
                        W.grad(oc, ic, j) += g * cache_x_[t + j][ic];
                        dx[t + j][ic] += g * W.value(oc, ic, j);
                    }
                }
            }
        }
        return dx;
    }

    Param W;
    Param b;

private:
    Seq cache_x_;
};

/// Single LSTM layer. Gates are fused row blocks [input, forget, candidate,
/// output] of the {4H, in} and {4H, H} weight matrices.
class Lstm {
public:
    struct State {
        Vec h;
        Vec c;
    };

    Lstm() = default;
    Lstm(std::size_t in_w, std::size_t hidden_w)
        : Wx({4 * hidden_w, in_w}), Wh({4 * hidden_w, hidden_w}), b({4 * hidden_w}) {}

    void init(Rng& rng) {
        const std::size_t h = hidden_width();
        const double sx = std::sqrt(6.0 / static_cast<double>(in_width() + h));
        const double sh = std::sqrt(6.0 / static_cast<double>(h + h));
        for (double& v : Wx.value.values) v = rng.uniform(-sx, sx);
        for (double& v : Wh.value.values) v = rng.uniform(-sh, sh);
        // forget-gate bias starts at 1 so early training does not erase state
        for (std::size_t i = h; i < 2 * h; ++i) b.value[i] = 1.0;
    }

    std::size_t in_width() const { return Wx.value.shape[1]; }
    std::size_t hidden_width() const { return Wh.value.shape[1]; }

    /// One cell update. Pure; does not touch the training cache.
    State step(const Vec& x, const State& prev) const {
        Gates gt = gates(x, prev.h);
        const std::size_t hw = hidden_width();
        State out{Vec(hw), Vec(hw)};
        for (std::size_t u = 0; u < hw; ++u) {
            out.c[u] = gt.f[u] * prev.c[u] + gt.i[u] * gt.g[u];
            out.h[u] = gt.o[u] * std::tanh(out.c[u]);
        }
        return out;
    }

    static State zero_state(std::size_t hidden_w) { return {Vec(hidden_w, 0.0), Vec(hidden_w, 0.0)}; }

    /// Run the full sequence, returning h_1..h_T. h0/c0 default to zeros.
    Seq forward(const Seq& xs, const Vec* h0 = nullptr, const Vec* c0 = nullptr) {
        const std::size_t hw = hidden_width();
        if (h0 && h0->size() != hw) throw std::invalid_argument("Lstm::forward: h0 width mismatch");
        if (c0 && c0->size() != hw) throw std::invalid_argument("Lstm::forward: c0 width mismatch");
        cache_.clear();
        cache_.reserve(xs.size());
        State st{h0 ? *h0 : Vec(hw, 0.0), c0 ? *c0 : Vec(hw, 0.0)};
        Seq hs;
        hs.reserve(xs.size());
        for (const Vec& x : xs) {
            StepCache sc;
            sc.x = x;
            sc.h_prev = st.h;
            sc.c_prev = st.c;
            Gates gt = gates(x, st.h);
            sc.i = std::move(gt.i);
            sc.f = std::move(gt.f);
            sc.g = std::move(gt.g);
            sc.o = std::move(gt.o);
            sc.c.resize(hw);
            sc.tanh_c.resize(hw);
            for (std::size_t u = 0; u < hw; ++u) {
                sc.c[u] = sc.f[u] * sc.c_prev[u] + sc.i[u] * sc.g[u];
                sc.tanh_c[u] = std::tanh(sc.c[u]);
            }
            st.c = sc.c;
            st.h.resize(hw);
            for (std::size_t u = 0; u < hw; ++u) st.h[u] = sc.o[u] * sc.tanh_c[u];
            hs.push_back(st.h);
            cache_.push_back(std::move(sc));
        }
        return hs;
    }

    /// Backprop through time. dhs[t] is the external gradient on h_t.
    /// Returns per-step input gradients; optionally exposes the gradients on
    /// the initial state (used when a latent vector seeds h0).
    Seq backward(const Seq& dhs, Vec* dh0 = nullptr, Vec* dc0 = nullptr) {
        const std::size_t T = cache_.size();
        if (dhs.size() != T) throw std::invalid_argument("Lstm::backward: sequence length mismatch");
        const std::size_t hw = hidden_width();
        const std::size_t iw = in_width();
        Seq dxs(T, Vec(iw, 0.0));
        Vec dh(hw, 0.0);
        Vec dc(hw, 0.0);
        Vec dz(4 * hw);
        for (std::size_t ti = T; ti-- > 0;) {
            const StepCache& sc = cache_[ti];
            for (std::size_t u = 0; u < hw; ++u) dh[u] += dhs[ti][u];
            for (std::size_t u = 0; u < hw; ++u) {
                const double tc = sc.tanh_c[u];
                const double d_o = dh[u] * tc;
                dc[u] += dh[u] * sc.o[u] * (1.0 - tc * tc);
                const double d_i = dc[u] * sc.g[u];
                const double d_f = dc[u] * sc.c_prev[u];
                const double d_g = dc[u] * sc.i[u];
                dz[u] = d_i * sc.i[u] * (1.0 - sc.i[u]);
                dz[hw + u] = d_f * sc.f[u] * (1.0 - sc.f[u]);
                dz[2 * hw + u] = d_g * (1.0 - sc.g[u] * sc.g[u]);
                dz[3 * hw + u] = d_o * sc.o[u] * (1.0 - sc.o[u]);
                dc[u] *= sc.f[u];  // becomes dc_prev
            }
            for (std::size_t r = 0; r < 4 * hw; ++r) {
                const double g = dz[r];
                b.grad[r] += g;
                double* wxg = Wx.grad.values.data() + r * iw;
                const double* wxv = Wx.value.values.data() + r * iw;
                for (std::size_t c = 0; c < iw; ++c) {
                    wxg[c] += g * sc.x[c];
                    dxs[ti][c] += g * wxv[c];
                }
                double* whg = Wh.grad.values.data() + r * hw;
                for (std::size_t c = 0; c < hw; ++c) whg[c] += g * sc.h_prev[c];
            }
            // dh_prev = Wh^T dz
            std::fill(dh.begin(), dh.end(), 0.0);
            for (std::size_t r = 0; r < 4 * hw; ++r) {
                const double g = dz[r];
                const double* whv = Wh.value.values.data() + r * hw;
                for (std::size_t c = 0; c < hw; ++c) dh[c] += g * whv[c];
            }
        }
        if (dh0) *dh0 = dh;
        if (dc0) *dc0 = dc;
        return dxs;
    }

    Param Wx;
    Param Wh;
    Param b;

private:
    struct Gates {
        Vec i, f, g, o;
    };

    struct StepCache {
        Vec x, h_prev, c_prev, i, f, g, o, c, tanh_c;
    };

    Gates gates(const Vec& x, const Vec& h_prev) const {
        const std::size_t hw = hidden_width();
        const std::size_t iw = in_width();
        if (x.size() != iw) throw std::invalid_argument("Lstm: input width mismatch");
        if (h_prev.size() != hw) throw std::invalid_argument("Lstm: hidden width mismatch");
        Vec z(b.value.values);
        for (std::size_t r = 0; r < 4 * hw; ++r) {
            const double* wx = Wx.value.values.data() + r * iw;
            double acc = 0.0;
            for (std::size_t c = 0; c < iw; ++c) acc += wx[c] * x[c];
            const double* wh = Wh.value.values.data() + r * hw;
            for (std::size_t c = 0; c < hw; ++c) acc += wh[c] * h_prev[c];
            z[r] += acc;
        }
        Gates gt{Vec(hw), Vec(hw), Vec(hw), Vec(hw)};
        for (std::size_t u = 0; u < hw; ++u) {
            gt.i[u] = sigmoid(z[u]);
            gt.f[u] = sigmoid(z[hw + u]);
            gt.g[u] = std::tanh(z[2 * hw + u]);
            gt.o[u] = sigmoid(z[3 * hw + u]);
        }
        return gt;
    }

    std::vector<StepCache> cache_;
};

}  // namespace devent
