#include "rnl/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "rnl/gradients.hpp"

namespace rnl {

namespace {

Mat64 rand_mat(Rng& rng, std::size_t r, std::size_t c, double range) {
    Mat64 M(r, c);
    for (double& v : M.a) v = rng.uniform(-range, range);
    return M;
}

Vec64 rand_vec(Rng& rng, std::size_t n, double range) {
    Vec64 v(n);
    for (double& x : v) x = rng.uniform(-range, range);
    return v;
}

// 2x2 with determinant bounded away from zero relative to the entry range.
Mat64 rand_invertible2(Rng& rng, double range) {
    for (int tries = 0; tries < 1000; ++tries) {
        Mat64 M = rand_mat(rng, 2, 2, range);
        const double det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
        if (std::abs(det) >= 0.25 * range * range) return M;
    }
    throw NumericError("rand_invertible2: rejection cap reached");
}

ResNetModel sample_square_full_rank(Rng& rng, const ModelSampler& opt) {
    const double w = opt.weight_range;
    ResNetModel m;
    m.eps = rng.uniform(opt.eps_lo, opt.eps_hi);
    m.delta = rng.uniform(opt.delta_lo, opt.delta_hi);
    m.n_in = m.n_hid = 2;
    m.n_out = 1;

    AffineSigmaMap in;
    in.W = rand_invertible2(rng, w);
    in.b = rand_vec(rng, 2, 0.5 * w);
    in.W_tilde = rand_invertible2(rng, w);
    in.b_tilde = rand_vec(rng, 2, 0.5 * w);
    in.act = Activation{Act::Tanh};
    m.input = in;

    const std::size_t L = 1 + rng.bounded(opt.depth_max);
    for (std::size_t l = 0; l < L; ++l) {
        ResidualLayer lay;
        lay.W = rand_invertible2(rng, w);
        lay.b = rand_vec(rng, 2, 0.5 * w);
        lay.W_tilde = rand_invertible2(rng, w);
        lay.b_tilde = rand_vec(rng, 2, 0.5 * w);
        lay.act = Activation{Act::Tanh};
        m.layers.push_back(std::move(lay));
    }

    AffineSigmaMap out;
    do {
        out.W = rand_mat(rng, 1, 2, w);
    } while (std::abs(out.W(0, 0)) + std::abs(out.W(0, 1)) < 0.3 * w);
    out.b = rand_vec(rng, 1, 0.5 * w);
    out.W_tilde = Mat64(1, 1);
    do {
        out.W_tilde(0, 0) = rng.uniform(-w, w);
    } while (std::abs(out.W_tilde(0, 0)) < 0.3 * w);
    out.b_tilde = rand_vec(rng, 1, 0.5 * w);
    out.act = Activation{Act::Tanh};
    m.output = out;

    m.validate();
    return m;
}

} // namespace

ResNetModel sample_canonical_model(Rng& rng, const ModelSampler& opt) {
    if (opt.square_full_rank) return sample_square_full_rank(rng, opt);

    const double w = opt.weight_range;
    ResNetModel m;
    m.eps = rng.uniform(opt.eps_lo, opt.eps_hi);
    m.delta = rng.uniform(opt.delta_lo, opt.delta_hi);
    m.n_in = 1 + rng.bounded(opt.n_in_max);
    m.n_hid = 1 + rng.bounded(opt.n_hid_max);
    m.n_out = 1;
    const Activation act{opt.allow_sigmoid && rng.bounded(2) ? Act::Sigmoid : Act::Tanh};

    AffineSigmaMap in;
    in.act = act;
    if (opt.allow_affine_input && rng.bounded(4) == 0) {
        const std::size_t mid = 1 + rng.bounded(3);
        in.W = rand_mat(rng, mid, m.n_in, w);
        in.b = rand_vec(rng, mid, w);
        in.W_tilde = rand_mat(rng, m.n_hid, mid, w);
        in.b_tilde = rand_vec(rng, m.n_hid, w);
        in.affine_only = true;
    } else {
        const std::size_t mid = 1 + rng.bounded(4);
        in.W = rand_mat(rng, mid, m.n_in, w);
        in.b = rand_vec(rng, mid, w);
        in.W_tilde = rand_mat(rng, m.n_hid, mid, w);
        in.b_tilde = rand_vec(rng, m.n_hid, w);
    }
    m.input = in;

    const std::size_t L = 1 + rng.bounded(opt.depth_max);
    for (std::size_t l = 0; l < L; ++l) {
        ResidualLayer lay;
        const std::size_t ml = 1 + rng.bounded(opt.n_hid_max);
        lay.W = rand_mat(rng, ml, m.n_hid, w);
        lay.b = rand_vec(rng, ml, w);
        lay.W_tilde = rand_mat(rng, m.n_hid, ml, w);
        lay.b_tilde = rand_vec(rng, m.n_hid, w);
        lay.act = act;
        m.layers.push_back(std::move(lay));
    }

    AffineSigmaMap out;
    out.act = act;
    const std::size_t mid = 1 + rng.bounded(3);
    out.W = rand_mat(rng, mid, m.n_hid, w);
    out.b = rand_vec(rng, mid, w);
    out.W_tilde = rand_mat(rng, 1, mid, w);
    out.b_tilde = rand_vec(rng, 1, w);
    out.affine_only = rng.bounded(2) == 0;
    m.output = out;

    m.validate();
    return m;
}

std::pair<ResNetModel, Vec64> sample_model_with_probe(Rng& rng, const ModelSampler& opt,
                                                      double grad_floor) {
    for (int tries = 0; tries < 500; ++tries) {
        ResNetModel m = sample_canonical_model(rng, opt);
        Vec64 x(m.n_in);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        const Vec64 g = input_gradient(m, x).grad;
        if (inf_norm_vec(g) > grad_floor) return {std::move(m), std::move(x)};
    }
    throw NumericError("sample_model_with_probe: rejection cap reached");
}

NeuralOdeSpec sample_autonomous_spec(Rng& rng, std::size_t n_hid_max) {
    const std::size_t n = 1 + rng.bounded(n_hid_max);

    ResidualLayer k;
    k.W = rand_mat(rng, n, n, 1.0);
    k.W_tilde = rand_mat(rng, n, n, 1.0);
    // rescale so the inf-norms land in (0, 1]
    for (Mat64* M : {&k.W, &k.W_tilde}) {
        const double norm = inf_norm_mat(*M);
        if (norm > 0.0) {
            const double target = rng.uniform(0.4, 1.0);
            for (double& v : M->a) v *= target / norm;
        }
    }
    k.b = rand_vec(rng, n, 0.5);
    k.b_tilde = rand_vec(rng, n, 0.5);
    k.act = Activation{Act::Tanh};

    NeuralOdeSpec spec;
    spec.knots = {std::move(k)};
    spec.knot_times = {0.0};
    spec.horizon_T = rng.uniform(0.3, 1.0);
    spec.lin_coeff = 0.0;

    AffineSigmaMap in;
    in.W = rand_mat(rng, n, 1, 1.0);
    in.b = rand_vec(rng, n, 0.5);
    in.W_tilde = Mat64::identity(n);
    in.b_tilde = Vec64(n, 0.0);
    in.affine_only = true;
    in.tilde_fixed = true;
    spec.input = in;

    AffineSigmaMap out;
    out.W = rand_mat(rng, 1, n, 1.0);
    out.b = rand_vec(rng, 1, 0.5);
    out.W_tilde = Mat64::identity(1);
    out.b_tilde = Vec64(1, 0.0);
    out.affine_only = true;
    out.tilde_fixed = true;
    spec.output = out;

    return spec;
}

} // namespace rnl
