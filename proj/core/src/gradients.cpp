#include "rnl/gradients.hpp"

#include <algorithm>
#include <cmath>

namespace rnl {

namespace {

// row * M for a row vector
Vec64 row_times_mat(const Vec64& row, const Mat64& M) {
    if (row.size() != M.rows) throw DimError("row_times_mat: dimension mismatch");
    Vec64 out(M.cols, 0.0);
    for (std::size_t i = 0; i < M.rows; ++i) {
        const double r = row[i];
        if (r == 0.0) continue;
        for (std::size_t j = 0; j < M.cols; ++j) out[j] += r * M(i, j);
    }
    return out;
}

void add_outer(Mat64& M, const Vec64& u, const Vec64& v) {
    for (std::size_t i = 0; i < M.rows; ++i)
        for (std::size_t j = 0; j < M.cols; ++j) M(i, j) += u[i] * v[j];
}

Vec64 mat_t_vec(const Mat64& M, const Vec64& v) {
    Vec64 out(M.cols, 0.0);
    for (std::size_t i = 0; i < M.rows; ++i) {
        const double vi = v[i];
        if (vi == 0.0) continue;
        for (std::size_t j = 0; j < M.cols; ++j) out[j] += M(i, j) * vi;
    }
    return out;
}

MapGrads zero_map_grads(const AffineSigmaMap& m) {
    return {Mat64(m.W.rows, m.W.cols), Mat64(m.W_tilde.rows, m.W_tilde.cols),
            Vec64(m.b.size(), 0.0), Vec64(m.b_tilde.size(), 0.0)};
}

} // namespace

// Backward through y = W_tilde * s(W x + b) + b_tilde. Returns d/dx and
// accumulates parameter gradients.
Vec64 map_backward(const AffineSigmaMap& m, const Vec64& x, const Vec64& dy, MapGrads& g) {
    Vec64 a = matvec(m.W, x);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += m.b[i];
    Vec64 s = a;
    if (!m.affine_only)
        for (double& v : s) v = m.act.eval(v);

    add_outer(g.dW_tilde, dy, s);
    for (std::size_t i = 0; i < dy.size(); ++i) g.db_tilde[i] += dy[i];

    Vec64 da = mat_t_vec(m.W_tilde, dy);
    if (!m.affine_only)
        for (std::size_t i = 0; i < da.size(); ++i) da[i] *= m.act.deriv(a[i]);

    add_outer(g.dW, da, x);
    for (std::size_t i = 0; i < da.size(); ++i) g.db[i] += da[i];
    return mat_t_vec(m.W, da);
}

InputGradient input_gradient(const ResNetModel& model, const Vec64& x, std::size_t out_row) {
    if (out_row >= model.n_out)
        throw std::invalid_argument("input_gradient: output row out of range");
    auto [y, trace] = forward(model, x);
    (void)y;

    InputGradient result;
    result.per_layer.reserve(model.depth());
    for (std::size_t l = 0; l < model.depth(); ++l) {
        LayerJacobian lj;
        lj.raw_df = model.layers[l].raw_jacobian(trace.preacts[l]);
        lj.D = lj.raw_df;
        for (auto& v : lj.D.a) v *= model.delta;
        for (std::size_t i = 0; i < lj.D.rows; ++i) lj.D(i, i) += model.eps;
        result.per_layer.push_back(std::move(lj));
    }

    const Mat64 d_out = model.output.jacobian(trace.states.back());
    Vec64 row(model.n_hid);
    for (std::size_t j = 0; j < model.n_hid; ++j) row[j] = d_out(out_row, j);

    for (std::size_t l = model.depth(); l-- > 0;)
        row = row_times_mat(row, result.per_layer[l].D);

    const Mat64 d_in = model.input.jacobian(x);
    result.grad = row_times_mat(row, d_in);
    check_finite(result.grad, "input_gradient");
    return result;
}

InputGradient input_gradient(const ResNetModel& model, const Vec64& x) {
    if (model.n_out != 1)
        throw std::invalid_argument(
            "input_gradient: scalar output required (select an output row)");
    return input_gradient(model, x, 0);
}

Vec64 fd_gradient(const ResNetModel& model, const Vec64& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("fd_gradient: h > 0 required");
    if (model.n_out != 1) throw std::invalid_argument("fd_gradient: scalar output required");
    Vec64 g(x.size());
    Vec64 xp = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        const double fp = forward(model, xp).first[0];
        xp[i] = x[i] - h;
        const double fm = forward(model, xp).first[0];
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

ParamGrads zero_grads(const ResNetModel& model) {
    ParamGrads g;
    g.input = zero_map_grads(model.input);
    g.output = zero_map_grads(model.output);
    g.layers.reserve(model.depth());
    for (const ResidualLayer& lay : model.layers)
        g.layers.push_back({Mat64(lay.W.rows, lay.W.cols),
                            Mat64(lay.W_tilde.rows, lay.W_tilde.cols),
                            Vec64(lay.b.size(), 0.0), Vec64(lay.b_tilde.size(), 0.0)});
    return g;
}

double scalar_loss(double y, double target, Loss loss) {
    if (loss == Loss::Mse) {
        const double d = y - target;
        return d * d;
    }
    const double p = std::clamp(y, 1e-12, 1.0 - 1e-12);
    return -(target * std::log(p) + (1.0 - target) * std::log1p(-p));
}

bool bce_shortcut_applies(const ResNetModel& model) {
    // Sigmoid output with structural identity tilde part: seed the backward
    // pass at the pre-sigmoid value with (p - t), which stays finite where
    // the generic chain dy * sigma'(u) underflows for saturated outputs.
    const AffineSigmaMap& out = model.output;
    if (out.affine_only || out.act.kind != Act::Sigmoid) return false;
    if (out.out_dim() != 1 || out.mid_dim() != 1 || !out.tilde_fixed) return false;
    return out.W_tilde(0, 0) == 1.0 && out.b_tilde[0] == 0.0;
}

ParamGrads param_gradient(const ResNetModel& model, const std::vector<Vec64>& xs,
                          const std::vector<double>& targets, Loss loss) {
    if (xs.empty()) throw std::invalid_argument("param_gradient: empty batch");
    if (xs.size() != targets.size())
        throw std::invalid_argument("param_gradient: batch/target size mismatch");
    if (model.n_out != 1) throw std::invalid_argument("param_gradient: scalar output required");
    const bool shortcut = bce_shortcut_applies(model);
    if (loss == Loss::Bce && !shortcut && model.output.act.kind != Act::Sigmoid)
        throw std::invalid_argument("param_gradient: bce requires a sigmoid output transform");

    ParamGrads g = zero_grads(model);
    const double inv_n = 1.0 / static_cast<double>(xs.size());

    for (std::size_t s = 0; s < xs.size(); ++s) {
        auto [y, trace] = forward(model, xs[s]);
        const double t = targets[s];

        Vec64 dh(model.n_hid, 0.0);
        if (loss == Loss::Bce && shortcut) {
            // d(loss)/d(pre-sigmoid) = p - t, scaled by the batch mean
            const double p = y[0];
            const double du = (p - t) * inv_n;
            const Vec64& hL = trace.states.back();
            // output map is sigmoid(w . h + b) with fixed unit tilde part
            for (std::size_t j = 0; j < model.n_hid; ++j)
                g.output.dW(0, j) += du * hL[j];
            g.output.db[0] += du;
            dh = mat_t_vec(model.output.W, Vec64{du});
        } else {
            double dy;
            if (loss == Loss::Mse) {
                dy = 2.0 * (y[0] - t) * inv_n;
            } else {
                const double p = std::clamp(y[0], 1e-12, 1.0 - 1e-12);
                dy = (p - t) / (p * (1.0 - p)) * inv_n;
            }
            dh = map_backward(model.output, trace.states.back(), Vec64{dy}, g.output);
        }

        for (std::size_t l = model.depth(); l-- > 0;) {
            const ResidualLayer& lay = model.layers[l];
            const Vec64& h_prev = trace.states[l];
            const Vec64& a = trace.preacts[l];

            Vec64 dr(model.n_hid);
            for (std::size_t i = 0; i < model.n_hid; ++i) dr[i] = model.delta * dh[i];

            Vec64 z(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) z[i] = lay.act.eval(a[i]);

            add_outer(g.layers[l].dW_tilde, dr, z);
            for (std::size_t i = 0; i < dr.size(); ++i) g.layers[l].db_tilde[i] += dr[i];

            Vec64 da = mat_t_vec(lay.W_tilde, dr);
            for (std::size_t i = 0; i < da.size(); ++i) da[i] *= lay.act.deriv(a[i]);

            add_outer(g.layers[l].dW, da, h_prev);
            for (std::size_t i = 0; i < da.size(); ++i) g.layers[l].db[i] += da[i];

            Vec64 dskip = mat_t_vec(lay.W, da);
            for (std::size_t i = 0; i < model.n_hid; ++i)
                dh[i] = model.eps * dh[i] + dskip[i];
        }

        map_backward(model.input, xs[s], dh, g.input);
    }
    return g;
}

double loss_value(const ResNetModel& model, const std::vector<Vec64>& xs,
                  const std::vector<double>& targets, Loss loss) {
    if (xs.empty() || xs.size() != targets.size())
        throw std::invalid_argument("loss_value: bad batch");
    double total = 0.0;
    for (std::size_t s = 0; s < xs.size(); ++s)
        total += scalar_loss(forward(model, xs[s]).first[0], targets[s], loss);
    return total / static_cast<double>(xs.size());
}

} // namespace rnl
