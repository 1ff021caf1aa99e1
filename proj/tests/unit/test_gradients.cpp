#include <doctest.h>

#include <cmath>

#include "rnl/gradients.hpp"
#include "rnl/numerics.hpp"
#include "rnl/rng.hpp"
#include "rnl/sampling.hpp"
#include "rnl/training.hpp"

using namespace rnl;

namespace {

ResNetModel scalar_model(double eps, double delta, double w, double b) {
    ResNetModel m;
    m.eps = eps;
    m.delta = delta;
    m.n_in = m.n_hid = m.n_out = 1;
    m.input = AffineSigmaMap::identity(1);
    m.output = AffineSigmaMap::identity(1);
    ResidualLayer lay;
    lay.W = Mat64(1, 1);
    lay.W(0, 0) = w;
    lay.W_tilde = Mat64::identity(1);
    lay.b = {b};
    lay.b_tilde = {0.0};
    lay.act = activation_from_name("tanh");
    m.layers.push_back(lay);
    m.validate();
    return m;
}

} // namespace

TEST_SUITE("gradients") {

TEST_CASE("one-layer input gradient matches the closed form") {
    const ResNetModel m = scalar_model(2.0, 0.5, 1.0, 0.0);
    for (double x : {-0.7, 0.0, 0.3, 0.9}) {
        const double t = std::tanh(x);
        const double want = 2.0 + 0.5 * (1.0 - t * t);
        CHECK(input_gradient(m, {x}).grad[0] == doctest::Approx(want).epsilon(1e-14));
        CHECK(fd_gradient(m, {x})[0] == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("reverse mode agrees with central differences on random models") {
    Rng rng(77);
    ModelSampler opt;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        Rng draw = substream(77, 0, static_cast<uint64_t>(trial));
        auto [m, x] = sample_model_with_probe(draw, opt);
        const Vec64 exact = input_gradient(m, x).grad;
        const Vec64 fd = fd_gradient(m, x);
        Vec64 diff(exact.size());
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = exact[i] - fd[i];
        worst = std::max(worst, inf_norm_vec(diff) / inf_norm_vec(exact));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("output rows differentiate independently") {
    // two-row affine output reading the same hidden state with weights 1 and 2
    ResNetModel m = scalar_model(1.0, 1.0, 0.8, 0.1);
    Mat64 Wt(2, 1);
    Wt(0, 0) = 1.0;
    Wt(1, 0) = 2.0;
    m.output = AffineSigmaMap::affine(Wt, {0.0, 0.0});
    m.n_out = 2;
    m.validate();

    const Vec64 g0 = input_gradient(m, {0.4}, 0).grad;
    const Vec64 g1 = input_gradient(m, {0.4}, 1).grad;
    CHECK(g1[0] == doctest::Approx(2.0 * g0[0]).epsilon(1e-14));
}

TEST_CASE("per-layer jacobians multiply out to the input gradient") {
    Rng rng(78);
    ModelSampler opt;
    opt.n_in_max = 3;
    auto [m, x] = sample_model_with_probe(rng, opt);
    const InputGradient res = input_gradient(m, x);
    REQUIRE(res.per_layer.size() == m.depth());
    for (const LayerJacobian& lj : res.per_layer) {
        // D = eps*I + delta*raw_df, entrywise
        REQUIRE(lj.D.rows == m.n_hid);
        for (std::size_t i = 0; i < lj.D.rows; ++i)
            for (std::size_t j = 0; j < lj.D.cols; ++j) {
                const double want = (i == j ? m.eps : 0.0) + m.delta * lj.raw_df(i, j);
                CHECK(lj.D(i, j) == doctest::Approx(want).epsilon(1e-13));
            }
    }
}

TEST_CASE("parameter gradients match finite differences of the mse loss") {
    ResNetModel m = xavier_init(make_1d_regressor(1.0, 0.5, 2), 5);
    std::vector<Vec64> xs{{0.2}, {-0.4}, {0.7}};
    std::vector<double> ts{0.04, 0.16, 0.49};

    const ParamGrads g = param_gradient(m, xs, ts, Loss::Mse);
    const double h = 1e-6;

    auto fd_of = [&](double* slot) {
        const double keep = *slot;
        *slot = keep + h;
        const double up = loss_value(m, xs, ts, Loss::Mse);
        *slot = keep - h;
        const double dn = loss_value(m, xs, ts, Loss::Mse);
        *slot = keep;
        return (up - dn) / (2.0 * h);
    };

    CHECK(g.layers[0].dW(0, 0) ==
          doctest::Approx(fd_of(&m.layers[0].W(0, 0))).epsilon(1e-5));
    CHECK(g.layers[0].db[0] == doctest::Approx(fd_of(&m.layers[0].b[0])).epsilon(1e-5));
    CHECK(g.layers[1].dW(0, 0) ==
          doctest::Approx(fd_of(&m.layers[1].W(0, 0))).epsilon(1e-5));
    // output transform is affine with a trainable W_tilde row
    CHECK(g.output.dW_tilde(0, 0) ==
          doctest::Approx(fd_of(&m.output.W_tilde(0, 0))).epsilon(1e-5));
}

TEST_CASE("parameter gradients match finite differences of the bce loss") {
    ResNetModel m = xavier_init(make_2d_classifier(1.0, 0.3, 3, 2), 6);
    REQUIRE(bce_shortcut_applies(m));
    std::vector<Vec64> xs{{0.5, -1.0}, {-0.2, 0.3}, {1.5, 0.8}, {-1.2, -0.4}};
    std::vector<double> ts{1.0, 0.0, 1.0, 0.0};

    const ParamGrads g = param_gradient(m, xs, ts, Loss::Bce);
    const double h = 1e-6;

    auto fd_of = [&](double* slot) {
        const double keep = *slot;
        *slot = keep + h;
        const double up = loss_value(m, xs, ts, Loss::Bce);
        *slot = keep - h;
        const double dn = loss_value(m, xs, ts, Loss::Bce);
        *slot = keep;
        return (up - dn) / (2.0 * h);
    };

    CHECK(g.layers[1].dW(0, 1) ==
          doctest::Approx(fd_of(&m.layers[1].W(0, 1))).epsilon(1e-4));
    CHECK(g.layers[2].db[1] == doctest::Approx(fd_of(&m.layers[2].b[1])).epsilon(1e-4));
    CHECK(g.input.dW(1, 0) == doctest::Approx(fd_of(&m.input.W(1, 0))).epsilon(1e-4));
    CHECK(g.output.dW(0, 0) == doctest::Approx(fd_of(&m.output.W(0, 0))).epsilon(1e-4));
}

TEST_CASE("map_backward returns the chain-rule pullback") {
    Rng rng(79);
    AffineSigmaMap map;
    map.W = Mat64(2, 2);
    map.W_tilde = Mat64(2, 2);
    for (double& v : map.W.a) v = rng.uniform(-1.0, 1.0);
    for (double& v : map.W_tilde.a) v = rng.uniform(-1.0, 1.0);
    map.b = {0.1, -0.2};
    map.b_tilde = {0.0, 0.3};
    map.act = activation_from_name("tanh");

    const Vec64 x{0.4, -0.6};
    const Vec64 dy{1.0, -0.5};
    MapGrads g;
    g.dW = Mat64(2, 2);
    g.dW_tilde = Mat64(2, 2);
    g.db = Vec64(2, 0.0);
    g.db_tilde = Vec64(2, 0.0);
    const Vec64 dx = map_backward(map, x, dy, g);

    // dx must equal J^T dy
    const Mat64 J = map.jacobian(x);
    for (std::size_t i = 0; i < 2; ++i) {
        const double want = J(0, i) * dy[0] + J(1, i) * dy[1];
        CHECK(dx[i] == doctest::Approx(want).epsilon(1e-13));
    }
    // db_tilde is dy itself
    CHECK(g.db_tilde[0] == doctest::Approx(1.0));
    CHECK(g.db_tilde[1] == doctest::Approx(-0.5));
}

TEST_CASE("gradient scales linearly with the output transform") {
    ResNetModel m = scalar_model(1.0, 0.7, 1.3, -0.2);
    const double base = input_gradient(m, {0.25}).grad[0];
    Mat64 Wt(1, 1);
    Wt(0, 0) = 3.0;
    m.output = AffineSigmaMap::affine(Wt, {0.0});
    m.validate();
    CHECK(input_gradient(m, {0.25}).grad[0] == doctest::Approx(3.0 * base).epsilon(1e-13));
}

} // TEST_SUITE
