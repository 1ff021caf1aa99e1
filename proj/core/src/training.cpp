#include "rnl/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "rnl/rng.hpp"

namespace rnl {

// ---- datasets -------------------------------------------------------------

std::string dataset_kind_name(DatasetKind k) {
    switch (k) {
    case DatasetKind::Quad1D: return "quad1d";
    case DatasetKind::Circle2D: return "circle";
    default: return "xor";
    }
}

DatasetKind dataset_kind_from_name(const std::string& name) {
    if (name == "quad1d") return DatasetKind::Quad1D;
    if (name == "circle") return DatasetKind::Circle2D;
    if (name == "xor") return DatasetKind::Xor2D;
    throw std::invalid_argument("unknown dataset kind: " + name);
}

double psi_circle(double x0, double x1) { return x0 * x0 + x1 * x1 - 0.5; }
double psi_xor(double x0, double x1) { return x1 * x1 - x0 * x0 - 0.5; }

Dataset make_dataset(DatasetKind kind, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("make_dataset: n >= 1 required");
    Rng rng(substream(seed, 0xda7a, static_cast<std::uint64_t>(kind), n));
    Dataset d;
    d.kind = kind;
    d.inputs.reserve(n);
    d.targets.reserve(n);

    if (kind == DatasetKind::Quad1D) {
        d.domain = {{-1.0}, {1.0}};
        for (std::size_t i = 0; i < n; ++i) {
            const double x = rng.uniform(-1.0, 1.0);
            d.inputs.push_back({x});
            d.targets.push_back(x * x);
        }
        return d;
    }

    d.domain = {{-2.5, -2.5}, {2.5, 2.5}};
    const auto psi = kind == DatasetKind::Circle2D ? psi_circle : psi_xor;
    for (std::size_t i = 0; i < n; ++i) {
        double x0, x1, v;
        // margin band: redraw points too close to the label threshold
        do {
            x0 = rng.uniform(-2.5, 2.5);
            x1 = rng.uniform(-2.5, 2.5);
            v = psi(x0, x1);
        } while (std::abs(v - 0.5) < 0.05);
        d.inputs.push_back({x0, x1});
        d.targets.push_back(v > 0.5 ? 1.0 : 0.0);
    }
    return d;
}

std::string dataset_csv(const Dataset& data) {
    std::ostringstream os;
    os.precision(17);
    const bool cls = data.classification();
    if (data.inputs.empty()) return cls ? "x0,x1,label\n" : "x0,target\n";
    const std::size_t dim = data.inputs.front().size();
    for (std::size_t d = 0; d < dim; ++d) os << (d ? ",x" : "x") << d;
    os << (cls ? ",label\n" : ",target\n");
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            if (d) os << ',';
            os << data.inputs[i][d];
        }
        if (cls)
            os << ',' << static_cast<int>(data.targets[i]) << '\n';
        else
            os << ',' << data.targets[i] << '\n';
    }
    return os.str();
}

// ---- initialization ---------------------------------------------------------

namespace {

void draw_matrix(Mat64& M, Rng& rng) {
    if (M.rows == 1 && M.cols == 1) {
        M(0, 0) = rng.normal();
        return;
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(M.rows + M.cols));
    for (double& v : M.a) v = rng.uniform(-bound, bound);
}

void draw_map(AffineSigmaMap& m, Rng& rng) {
    if (m.frozen) return;
    draw_matrix(m.W, rng);
    std::fill(m.b.begin(), m.b.end(), 0.0);
    if (!m.tilde_fixed) {
        draw_matrix(m.W_tilde, rng);
        std::fill(m.b_tilde.begin(), m.b_tilde.end(), 0.0);
    }
}

} // namespace

ResNetModel xavier_init(ResNetModel skeleton, std::uint64_t seed) {
    skeleton.validate();
    Rng rng(substream(seed, 0x1a17, 0, 0));
    draw_map(skeleton.input, rng);
    for (ResidualLayer& lay : skeleton.layers) {
        draw_matrix(lay.W, rng);
        std::fill(lay.b.begin(), lay.b.end(), 0.0);
        if (!lay.tilde_fixed) {
            draw_matrix(lay.W_tilde, rng);
            std::fill(lay.b_tilde.begin(), lay.b_tilde.end(), 0.0);
        }
    }
    draw_map(skeleton.output, rng);
    return skeleton;
}

// ---- optimizer ---------------------------------------------------------------

void adam_step(AdamState& state, const Vec64& grads, Vec64& params, double lr,
               const AdamParams& ap) {
    if (grads.size() != params.size()) throw DimError("adam_step: grads/params size mismatch");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size()) throw DimError("adam_step: state shape mismatch");

    state.t += 1;
    const double c1 = 1.0 - std::pow(ap.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(ap.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = ap.beta1 * state.m[i] + (1.0 - ap.beta1) * grads[i];
        state.v[i] = ap.beta2 * state.v[i] + (1.0 - ap.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / c1;
        const double vhat = state.v[i] / c2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + ap.eps_hat);
    }
}

// ---- parameter flattening ------------------------------------------------------

namespace {

void push_mat(Vec64& out, const Mat64& M) { out.insert(out.end(), M.a.begin(), M.a.end()); }
void push_vec(Vec64& out, const Vec64& v) { out.insert(out.end(), v.begin(), v.end()); }

std::size_t pull_mat(Mat64& M, const Vec64& in, std::size_t pos) {
    std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(pos), M.a.size(), M.a.begin());
    return pos + M.a.size();
}

std::size_t pull_vec(Vec64& v, const Vec64& in, std::size_t pos) {
    std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(pos), v.size(), v.begin());
    return pos + v.size();
}

// Trainable parameters in a fixed traversal order: input map, then per layer
// (W, b [, W_tilde, b_tilde] [, gamma, beta]), then output map.
Vec64 flatten_params(const ResNetModel& m, const BatchNormState* bn) {
    Vec64 out;
    const auto map_params = [&](const AffineSigmaMap& t) {
        if (t.frozen) return;
        push_mat(out, t.W);
        push_vec(out, t.b);
        if (!t.tilde_fixed) {
            push_mat(out, t.W_tilde);
            push_vec(out, t.b_tilde);
        }
    };
    map_params(m.input);
    for (std::size_t l = 0; l < m.depth(); ++l) {
        const ResidualLayer& lay = m.layers[l];
        push_mat(out, lay.W);
        push_vec(out, lay.b);
        if (!lay.tilde_fixed) {
            push_mat(out, lay.W_tilde);
            push_vec(out, lay.b_tilde);
        }
        if (bn) {
            push_vec(out, bn->gamma[l]);
            push_vec(out, bn->beta[l]);
        }
    }
    map_params(m.output);
    return out;
}

void scatter_params(ResNetModel& m, BatchNormState* bn, const Vec64& flat) {
    std::size_t pos = 0;
    const auto map_params = [&](AffineSigmaMap& t) {
        if (t.frozen) return;
        pos = pull_mat(t.W, flat, pos);
        pos = pull_vec(t.b, flat, pos);
        if (!t.tilde_fixed) {
            pos = pull_mat(t.W_tilde, flat, pos);
            pos = pull_vec(t.b_tilde, flat, pos);
        }
    };
    map_params(m.input);
    for (std::size_t l = 0; l < m.depth(); ++l) {
        ResidualLayer& lay = m.layers[l];
        pos = pull_mat(lay.W, flat, pos);
        pos = pull_vec(lay.b, flat, pos);
        if (!lay.tilde_fixed) {
            pos = pull_mat(lay.W_tilde, flat, pos);
            pos = pull_vec(lay.b_tilde, flat, pos);
        }
        if (bn) {
            pos = pull_vec(bn->gamma[l], flat, pos);
            pos = pull_vec(bn->beta[l], flat, pos);
        }
    }
    map_params(m.output);
    if (pos != flat.size()) throw DimError("scatter_params: flat vector size mismatch");
}

struct BnGrads {
    std::vector<Vec64> dgamma, dbeta;
};

Vec64 flatten_grads(const ParamGrads& g, const ResNetModel& m, const BnGrads* bng) {
    Vec64 out;
    const auto map_grads = [&](const MapGrads& mg, const AffineSigmaMap& t) {
        if (t.frozen) return;
        push_mat(out, mg.dW);
        push_vec(out, mg.db);
        if (!t.tilde_fixed) {
            push_mat(out, mg.dW_tilde);
            push_vec(out, mg.db_tilde);
        }
    };
    map_grads(g.input, m.input);
    for (std::size_t l = 0; l < m.depth(); ++l) {
        push_mat(out, g.layers[l].dW);
        push_vec(out, g.layers[l].db);
        if (!m.layers[l].tilde_fixed) {
            push_mat(out, g.layers[l].dW_tilde);
            push_vec(out, g.layers[l].db_tilde);
        }
        if (bng) {
            push_vec(out, bng->dgamma[l]);
            push_vec(out, bng->dbeta[l]);
        }
    }
    map_grads(g.output, m.output);
    return out;
}

} // namespace

// ---- batch norm -----------------------------------------------------------------

BatchNormState BatchNormState::init(const ResNetModel& model) {
    BatchNormState st;
    for (const ResidualLayer& lay : model.layers) {
        st.gamma.emplace_back(lay.m(), 1.0);
        st.beta.emplace_back(lay.m(), 0.0);
        st.mean.emplace_back(lay.m(), 0.0);
        st.var.emplace_back(lay.m(), 1.0);
    }
    return st;
}

Vec64 batch_norm_apply(const Vec64& a, const Vec64& mean, const Vec64& var, const Vec64& gamma,
                       const Vec64& beta, double eps_f) {
    if (a.size() != mean.size() || a.size() != var.size() || a.size() != gamma.size() ||
        a.size() != beta.size())
        throw DimError("batch_norm_apply: size mismatch");
    Vec64 out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j)
        out[j] = gamma[j] * (a[j] - mean[j]) / std::sqrt(var[j] + eps_f) + beta[j];
    return out;
}

ResNetModel fold_batch_norm(const ResNetModel& model, const BatchNormState& stats) {
    if (!stats.frozen)
        throw std::logic_error("fold_batch_norm: statistics were never frozen");
    if (stats.gamma.size() != model.depth())
        throw DimError("fold_batch_norm: state depth mismatch");
    ResNetModel out = model;
    for (std::size_t l = 0; l < model.depth(); ++l) {
        ResidualLayer& lay = out.layers[l];
        if (stats.gamma[l].size() != lay.m()) throw DimError("fold_batch_norm: width mismatch");
        for (std::size_t j = 0; j < lay.m(); ++j) {
            const double scale = stats.gamma[l][j] / std::sqrt(stats.var[l][j] + stats.eps_f);
            for (std::size_t k = 0; k < lay.W.cols; ++k) lay.W(j, k) *= scale;
            lay.b[j] = scale * (lay.b[j] - stats.mean[l][j]) + stats.beta[l][j];
        }
    }
    return out;
}

namespace {

// Forward tape for one train-mode batch: states, raw and normalized
// pre-activations, and the per-layer batch statistics actually used.
struct BnTape {
    std::vector<std::vector<Vec64>> h;    // (L+1) x B
    std::vector<std::vector<Vec64>> a;    // L x B raw pre-activations
    std::vector<std::vector<Vec64>> xhat; // L x B
    std::vector<std::vector<Vec64>> ahat; // L x B after gain/shift
    std::vector<std::vector<Vec64>> z;    // L x B activations
    std::vector<Vec64> mu, var, invstd;   // per layer
    Vec64 y;                              // scalar outputs
};

void bn_batch_forward(const ResNetModel& model, const BatchNormState& bn,
                      const std::vector<Vec64>& xs, BnTape& tape) {
    const std::size_t L = model.depth();
    const std::size_t B = xs.size();
    tape.h.assign(L + 1, std::vector<Vec64>(B));
    tape.a.assign(L, std::vector<Vec64>(B));
    tape.xhat.assign(L, std::vector<Vec64>(B));
    tape.ahat.assign(L, std::vector<Vec64>(B));
    tape.z.assign(L, std::vector<Vec64>(B));
    tape.mu.assign(L, {});
    tape.var.assign(L, {});
    tape.invstd.assign(L, {});
    tape.y.assign(B, 0.0);

    for (std::size_t s = 0; s < B; ++s) tape.h[0][s] = model.input.eval(xs[s]);

    for (std::size_t l = 0; l < L; ++l) {
        const ResidualLayer& lay = model.layers[l];
        const std::size_t m = lay.m();
        for (std::size_t s = 0; s < B; ++s) {
            Vec64 a = matvec(lay.W, tape.h[l][s]);
            for (std::size_t j = 0; j < m; ++j) a[j] += lay.b[j];
            tape.a[l][s] = std::move(a);
        }
        Vec64 mu(m, 0.0), var(m, 0.0), invstd(m, 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t s = 0; s < B; ++s) acc += tape.a[l][s][j];
            mu[j] = acc / static_cast<double>(B);
            double sq = 0.0;
            for (std::size_t s = 0; s < B; ++s) {
                const double d = tape.a[l][s][j] - mu[j];
                sq += d * d;
            }
            var[j] = sq / static_cast<double>(B);
            invstd[j] = 1.0 / std::sqrt(var[j] + bn.eps_f);
        }
        for (std::size_t s = 0; s < B; ++s) {
            Vec64 xh(m), ah(m), z(m);
            for (std::size_t j = 0; j < m; ++j) {
                xh[j] = (tape.a[l][s][j] - mu[j]) * invstd[j];
                ah[j] = bn.gamma[l][j] * xh[j] + bn.beta[l][j];
                z[j] = lay.act.eval(ah[j]);
            }
            Vec64 r = matvec(lay.W_tilde, z);
            Vec64 next(model.n_hid);
            for (std::size_t j = 0; j < model.n_hid; ++j)
                next[j] = model.eps * tape.h[l][s][j] + model.delta * (r[j] + lay.b_tilde[j]);
            tape.xhat[l][s] = std::move(xh);
            tape.ahat[l][s] = std::move(ah);
            tape.z[l][s] = std::move(z);
            tape.h[l + 1][s] = std::move(next);
        }
        tape.mu[l] = std::move(mu);
        tape.var[l] = std::move(var);
        tape.invstd[l] = std::move(invstd);
    }

    for (std::size_t s = 0; s < B; ++s) tape.y[s] = model.output.eval(tape.h[L][s])[0];
}

// Mean-loss gradient of one train-mode batch, batch statistics included in
// the differentiation.
double bn_batch_gradient(const ResNetModel& model, const BatchNormState& bn,
                         const std::vector<Vec64>& xs, const Vec64& ts, Loss loss,
                         ParamGrads& g, BnGrads& bng) {
    const std::size_t L = model.depth();
    const std::size_t B = xs.size();
    BnTape tape;
    bn_batch_forward(model, bn, xs, tape);

    double loss_sum = 0.0;
    for (std::size_t s = 0; s < B; ++s) loss_sum += scalar_loss(tape.y[s], ts[s], loss);
    const double inv_b = 1.0 / static_cast<double>(B);

    const bool shortcut = loss == Loss::Bce && bce_shortcut_applies(model);
    std::vector<Vec64> dh(B);
    for (std::size_t s = 0; s < B; ++s) {
        const double y = tape.y[s];
        if (shortcut) {
            const double du = (y - ts[s]) * inv_b;
            for (std::size_t j = 0; j < model.n_hid; ++j)
                g.output.dW(0, j) += du * tape.h[L][s][j];
            g.output.db[0] += du;
            Vec64 d(model.n_hid);
            for (std::size_t j = 0; j < model.n_hid; ++j) d[j] = model.output.W(0, j) * du;
            dh[s] = std::move(d);
        } else {
            double dy;
            if (loss == Loss::Mse) {
                dy = 2.0 * (y - ts[s]) * inv_b;
            } else {
                const double p = std::clamp(y, 1e-12, 1.0 - 1e-12);
                dy = (p - ts[s]) / (p * (1.0 - p)) * inv_b;
            }
            dh[s] = map_backward(model.output, tape.h[L][s], Vec64{dy}, g.output);
        }
    }

    for (std::size_t l = L; l-- > 0;) {
        const ResidualLayer& lay = model.layers[l];
        const std::size_t m = lay.m();

        std::vector<Vec64> dahat(B, Vec64(m, 0.0));
        for (std::size_t s = 0; s < B; ++s) {
            Vec64 dr(m, 0.0);
            for (std::size_t j = 0; j < model.n_hid; ++j) {
                const double d = model.delta * dh[s][j];
                if (d == 0.0) continue;
                g.layers[l].db_tilde[j] += d;
                for (std::size_t k = 0; k < m; ++k) {
                    g.layers[l].dW_tilde(j, k) += d * tape.z[l][s][k];
                    dr[k] += lay.W_tilde(j, k) * d;
                }
            }
            for (std::size_t k = 0; k < m; ++k)
                dahat[s][k] = dr[k] * lay.act.deriv(tape.ahat[l][s][k]);
        }

        // batch-norm backward, per feature
        std::vector<Vec64> da(B, Vec64(m, 0.0));
        for (std::size_t j = 0; j < m; ++j) {
            double s1 = 0.0, s2 = 0.0;
            for (std::size_t s = 0; s < B; ++s) {
                const double dxh = dahat[s][j] * bn.gamma[l][j];
                bng.dgamma[l][j] += dahat[s][j] * tape.xhat[l][s][j];
                bng.dbeta[l][j] += dahat[s][j];
                s1 += dxh;
                s2 += dxh * tape.xhat[l][s][j];
            }
            const double scale = tape.invstd[l][j] * inv_b;
            for (std::size_t s = 0; s < B; ++s) {
                const double dxh = dahat[s][j] * bn.gamma[l][j];
                da[s][j] = scale * (static_cast<double>(B) * dxh - s1 -
                                    tape.xhat[l][s][j] * s2);
            }
        }

        for (std::size_t s = 0; s < B; ++s) {
            for (std::size_t j = 0; j < m; ++j) {
                const double d = da[s][j];
                if (d == 0.0) continue;
                g.layers[l].db[j] += d;
                for (std::size_t k = 0; k < model.n_hid; ++k)
                    g.layers[l].dW(j, k) += d * tape.h[l][s][k];
            }
            Vec64 prev(model.n_hid);
            for (std::size_t k = 0; k < model.n_hid; ++k) {
                double acc = model.eps * dh[s][k];
                for (std::size_t j = 0; j < m; ++j) acc += lay.W(j, k) * da[s][j];
                prev[k] = acc;
            }
            dh[s] = std::move(prev);
        }
    }

    if (!model.input.frozen)
        for (std::size_t s = 0; s < B; ++s) map_backward(model.input, xs[s], dh[s], g.input);

    return loss_sum * inv_b;
}

} // namespace

void freeze_batch_norm(const ResNetModel& model, BatchNormState& stats,
                       const std::vector<Vec64>& inputs) {
    if (inputs.empty()) throw std::invalid_argument("freeze_batch_norm: empty input set");
    BnTape tape;
    bn_batch_forward(model, stats, inputs, tape);
    stats.mean = tape.mu;
    stats.var = tape.var;
    stats.frozen = true;
}

// ---- training loop ---------------------------------------------------------------

namespace {

double train_mode_accuracy(const ResNetModel& model, const BatchNormState* bn,
                           const Dataset& data, double threshold) {
    Vec64 outputs(data.size());
    if (bn) {
        BnTape tape;
        bn_batch_forward(model, *bn, data.inputs, tape);
        outputs = tape.y;
    } else {
        for (std::size_t i = 0; i < data.size(); ++i)
            outputs[i] = forward(model, data.inputs[i]).first[0];
    }
    std::size_t hit = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if ((outputs[i] > threshold) == (data.targets[i] == 1.0)) ++hit;
    return static_cast<double>(hit) / static_cast<double>(data.size());
}

} // namespace

double classification_accuracy(const ResNetModel& model, const Dataset& data, double threshold) {
    if (!data.classification())
        throw std::invalid_argument("classification_accuracy: classification dataset required");
    return train_mode_accuracy(model, nullptr, data, threshold);
}

std::pair<ResNetModel, TrainRecord> train(const ResNetModel& model, const Dataset& data,
                                          const TrainConfig& cfg) {
    model.validate();
    if (model.n_out != 1) throw std::invalid_argument("train: scalar-output model required");
    if (data.size() == 0) throw std::invalid_argument("train: empty dataset");
    if (!(cfg.lr > 0.0)) throw std::invalid_argument("train: lr > 0 required");
    const bool cls = data.classification();
    if ((cfg.loss == Loss::Mse) == cls)
        throw std::invalid_argument("train: loss does not match dataset kind");

    const std::size_t n = data.size();
    const std::size_t bs = cfg.batch_size == 0 ? n : cfg.batch_size;
    if (bs > n) throw std::invalid_argument("train: batch size exceeds dataset size");

    const auto t0 = std::chrono::steady_clock::now();

    ResNetModel work = model;
    std::optional<BatchNormState> bn;
    if (cfg.batch_norm) bn = BatchNormState::init(work);
    BatchNormState* bnp = bn ? &*bn : nullptr;

    Vec64 flat = flatten_params(work, bnp);
    const Vec64 flat0 = flat;
    AdamState ast;
    TrainRecord rec;

    std::vector<std::size_t> order(n);
    std::vector<Vec64> xs;
    Vec64 ts;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        Rng er(substream(cfg.seed, 1000 + epoch, 0, 0));
        er.shuffle(order);

        double loss_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t b0 = 0; b0 < n; b0 += bs, ++batch_index) {
            const std::size_t b1 = std::min(n, b0 + bs);
            xs.clear();
            ts.clear();
            for (std::size_t i = b0; i < b1; ++i) {
                xs.push_back(data.inputs[order[i]]);
                ts.push_back(data.targets[order[i]]);
            }

            double batch_loss;
            Vec64 grads;
            if (bnp) {
                ParamGrads g = zero_grads(work);
                BnGrads bng;
                for (const ResidualLayer& lay : work.layers) {
                    bng.dgamma.emplace_back(lay.m(), 0.0);
                    bng.dbeta.emplace_back(lay.m(), 0.0);
                }
                batch_loss = bn_batch_gradient(work, *bnp, xs, ts, cfg.loss, g, bng);
                grads = flatten_grads(g, work, &bng);
            } else {
                batch_loss = loss_value(work, xs, ts, cfg.loss);
                ParamGrads g = param_gradient(work, xs, ts, cfg.loss);
                grads = flatten_grads(g, work, nullptr);
            }
            if (!std::isfinite(batch_loss))
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_index));

            loss_sum += batch_loss * static_cast<double>(b1 - b0);
            adam_step(ast, grads, flat, cfg.lr, cfg.adam);
            scatter_params(work, bnp, flat);
        }
        rec.epoch_loss.push_back(loss_sum / static_cast<double>(n));
        if (cls) rec.epoch_accuracy.push_back(train_mode_accuracy(work, bnp, data, 0.5));
    }

    std::size_t flips = 0;
    for (std::size_t i = 0; i < flat.size(); ++i)
        if (flat0[i] * flat[i] < 0.0) ++flips;
    rec.sign_flip_fraction =
        flat.empty() ? 0.0 : static_cast<double>(flips) / static_cast<double>(flat.size());

    ResNetModel result = work;
    if (bnp) {
        freeze_batch_norm(work, *bnp, data.inputs);
        result = fold_batch_norm(work, *bnp);
    }
    rec.final_accuracy = cls ? classification_accuracy(result, data, 0.5)
                             : std::numeric_limits<double>::quiet_NaN();
    rec.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(result), std::move(rec)};
}

std::string train_record_csv(const TrainRecord& rec) {
    std::ostringstream os;
    os.precision(17);
    const bool with_acc = !rec.epoch_accuracy.empty();
    os << (with_acc ? "epoch,loss,accuracy\n" : "epoch,loss\n");
    for (std::size_t e = 0; e < rec.epoch_loss.size(); ++e) {
        os << e << ',' << rec.epoch_loss[e];
        if (with_acc) os << ',' << rec.epoch_accuracy[e];
        os << '\n';
    }
    return os.str();
}

// ---- experiment architectures ------------------------------------------------------

ResNetModel make_1d_regressor(double eps, double delta, std::size_t L) {
    ResNetModel m;
    m.eps = eps;
    m.delta = delta;
    m.n_in = m.n_hid = m.n_out = 1;
    m.input = AffineSigmaMap::identity(1);
    for (std::size_t l = 0; l < L; ++l) {
        ResidualLayer lay;
        lay.W = Mat64(1, 1);
        lay.b = Vec64(1, 0.0);
        lay.W_tilde = Mat64::identity(1);
        lay.b_tilde = Vec64(1, 0.0);
        lay.act = Activation{Act::Tanh};
        lay.tilde_fixed = true;
        m.layers.push_back(std::move(lay));
    }
    AffineSigmaMap out;
    out.W = Mat64(1, 1);
    out.b = Vec64(1, 0.0);
    out.W_tilde = Mat64::identity(1);
    out.b_tilde = Vec64(1, 0.0);
    out.affine_only = true;
    out.tilde_fixed = true;
    m.output = out;
    m.validate();
    return m;
}

ResNetModel make_2d_classifier(double eps, double delta, std::size_t L, std::size_t n_hid) {
    ResNetModel m;
    m.eps = eps;
    m.delta = delta;
    m.n_in = 2;
    m.n_hid = n_hid;
    m.n_out = 1;

    AffineSigmaMap in;
    in.W = Mat64(n_hid, 2);
    in.b = Vec64(n_hid, 0.0);
    in.W_tilde = Mat64::identity(n_hid);
    in.b_tilde = Vec64(n_hid, 0.0);
    in.act = Activation{Act::Tanh};
    in.tilde_fixed = true;
    m.input = in;

    for (std::size_t l = 0; l < L; ++l) {
        ResidualLayer lay;
        lay.W = Mat64(n_hid, n_hid);
        lay.b = Vec64(n_hid, 0.0);
        lay.W_tilde = Mat64::identity(n_hid);
        lay.b_tilde = Vec64(n_hid, 0.0);
        lay.act = Activation{Act::Tanh};
        lay.tilde_fixed = true;
        m.layers.push_back(std::move(lay));
    }

    AffineSigmaMap out;
    out.W = Mat64(1, n_hid);
    out.b = Vec64(1, 0.0);
    out.W_tilde = Mat64::identity(1);
    out.b_tilde = Vec64(1, 0.0);
    out.act = Activation{Act::Sigmoid};
    out.tilde_fixed = true;
    m.output = out;

    m.validate();
    return m;
}

} // namespace rnl
