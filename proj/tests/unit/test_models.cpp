#include <doctest.h>

#include <cmath>

#include "rnl/models.hpp"
#include "rnl/rng.hpp"
#include "rnl/sampling.hpp"

using namespace rnl;

namespace {

ResidualLayer scalar_tanh_layer(double w, double b) {
    ResidualLayer lay;
    lay.W = Mat64(1, 1);
    lay.W(0, 0) = w;
    lay.W_tilde = Mat64::identity(1);
    lay.b = {b};
    lay.b_tilde = {0.0};
    lay.act = activation_from_name("tanh");
    return lay;
}

// eps*x + delta*tanh(w x + b) with identity input/output transforms
ResNetModel scalar_model(double eps, double delta, double w, double b) {
    ResNetModel m;
    m.eps = eps;
    m.delta = delta;
    m.n_in = m.n_hid = m.n_out = 1;
    m.input = AffineSigmaMap::identity(1);
    m.output = AffineSigmaMap::identity(1);
    m.layers.push_back(scalar_tanh_layer(w, b));
    m.validate();
    return m;
}

} // namespace

TEST_SUITE("models") {

TEST_CASE("one-layer forward matches the closed form") {
    const ResNetModel m = scalar_model(2.0, 0.5, 1.0, 0.0);
    for (double x : {-0.9, -0.3, 0.0, 0.3, 1.1}) {
        const double want = 2.0 * x + 0.5 * std::tanh(x);
        const double got = forward(m, {x}).first[0];
        CHECK(got == doctest::Approx(want).epsilon(1e-15));
    }
}

TEST_CASE("forward trace exposes hidden states and preactivations") {
    const ResNetModel m = scalar_model(1.0, 1.0, 2.0, 0.1);
    const auto [y, trace] = forward(m, {0.4});
    REQUIRE(trace.states.size() == 2); // h_0 and h_1
    REQUIRE(trace.preacts.size() == 1);
    CHECK(trace.states[0][0] == doctest::Approx(0.4));
    CHECK(trace.preacts[0][0] == doctest::Approx(2.0 * 0.4 + 0.1));
    CHECK(y[0] == doctest::Approx(0.4 + std::tanh(0.9)).epsilon(1e-15));
}

TEST_CASE("recurrence and unrolled sum agree on random models") {
    Rng rng(21);
    ModelSampler opt;
    for (int trial = 0; trial < 20; ++trial) {
        const ResNetModel m = sample_canonical_model(rng, opt);
        for (int k = 0; k < 3; ++k) {
            Vec64 x(m.n_in);
            for (double& v : x) v = rng.uniform(-1.0, 1.0);
            const Vec64 a = forward(m, x).first;
            const Vec64 b = forward_unrolled(m, x);
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i)
                CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("euler discretization samples knots at left endpoints") {
    NeuralOdeSpec spec;
    spec.knots = {scalar_tanh_layer(0.5, 0.0), scalar_tanh_layer(-1.5, 0.2)};
    spec.knot_times = {0.0, 0.5};
    spec.horizon_T = 1.0;
    spec.lin_coeff = -0.8;
    spec.input = AffineSigmaMap::identity(1);
    spec.output = AffineSigmaMap::identity(1);

    const ResNetModel m = euler_discretize(spec, 4);
    REQUIRE(m.depth() == 4);
    CHECK(m.delta == doctest::Approx(0.25));
    CHECK(m.eps == doctest::Approx(1.0 + 0.25 * -0.8));
    // steps start at t = 0, 0.25, 0.5, 0.75
    CHECK(m.layers[0].W(0, 0) == 0.5);
    CHECK(m.layers[1].W(0, 0) == 0.5);
    CHECK(m.layers[2].W(0, 0) == -1.5);
    CHECK(m.layers[3].W(0, 0) == -1.5);
}

TEST_CASE("embedding a model and rediscretizing is the identity") {
    Rng rng(33);
    ModelSampler opt;
    for (int trial = 0; trial < 10; ++trial) {
        const ResNetModel m = sample_canonical_model(rng, opt);
        const NeuralOdeSpec spec = embed_resnet_as_node(m);
        const ResNetModel back = euler_discretize(spec, m.depth());
        CHECK(back.eps == doctest::Approx(m.eps).epsilon(1e-14));
        CHECK(back.delta == doctest::Approx(m.delta).epsilon(1e-14));
        REQUIRE(back.depth() == m.depth());
        for (std::size_t l = 0; l < m.depth(); ++l)
            CHECK(back.layers[l].W.a == m.layers[l].W.a);

        Vec64 x(m.n_in);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        const Vec64 ya = forward(m, x).first;
        const Vec64 yb = forward(back, x).first;
        for (std::size_t i = 0; i < ya.size(); ++i)
            CHECK(ya[i] == doctest::Approx(yb[i]).epsilon(1e-12));
    }
}

TEST_CASE("rk4 integrates a linear field to the exponential") {
    NeuralOdeSpec spec;
    ResidualLayer knot = scalar_tanh_layer(1.0, 0.0);
    knot.W_tilde = Mat64(1, 1); // zero: field reduces to lin_coeff * h
    spec.knots = {knot};
    spec.knot_times = {0.0};
    spec.horizon_T = 1.0;
    spec.lin_coeff = -0.8;
    spec.input = AffineSigmaMap::identity(1);
    spec.output = AffineSigmaMap::identity(1);

    const double got = integrate_node(spec, {0.7}, 1000, OdeMethod::Rk4)[0];
    const double want = 0.7 * std::exp(-0.8);
    CHECK(got == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("euler converges to the same exponential from above order") {
    NeuralOdeSpec spec;
    ResidualLayer knot = scalar_tanh_layer(1.0, 0.0);
    knot.W_tilde = Mat64(1, 1);
    spec.knots = {knot};
    spec.knot_times = {0.0};
    spec.horizon_T = 1.0;
    spec.lin_coeff = -0.8;
    spec.input = AffineSigmaMap::identity(1);
    spec.output = AffineSigmaMap::identity(1);

    const double want = 0.7 * std::exp(-0.8);
    const double e10 = std::abs(forward(euler_discretize(spec, 10), {0.7}).first[0] - want);
    const double e20 = std::abs(forward(euler_discretize(spec, 20), {0.7}).first[0] - want);
    CHECK(e20 < e10);
    CHECK(e10 / e20 == doctest::Approx(2.0).epsilon(0.15)); // first order in the step
}

TEST_CASE("the eps=0 limit object is the plain composition") {
    const ResNetModel m = scalar_model(2.0, 0.5, 1.0, 0.0);
    const ResNetModel limit = resnet_to_mlp(m);
    CHECK(limit.eps == 0.0);
    for (double x : {-0.5, 0.2, 0.8}) {
        const double want = 0.5 * std::tanh(x);
        CHECK(forward(limit, {x}).first[0] == doctest::Approx(want).epsilon(1e-15));
    }
}

TEST_CASE("json round-trip preserves the map exactly") {
    Rng rng(44);
    ModelSampler opt;
    const ResNetModel m = sample_canonical_model(rng, opt);
    const ResNetModel back = model_from_json(to_json(m));
    CHECK(back.eps == m.eps);
    CHECK(back.delta == m.delta);
    CHECK(back.n_in == m.n_in);
    CHECK(back.depth() == m.depth());
    Vec64 x(m.n_in);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    CHECK(forward(back, x).first == forward(m, x).first);
}

TEST_CASE("validate rejects a broken shape chain") {
    ResNetModel m = scalar_model(1.0, 1.0, 1.0, 0.0);
    m.layers[0].b = {0.0, 0.0};
    CHECK_THROWS_AS(m.validate(), DimError);
}

TEST_CASE("activation values and global bounds") {
    const Activation th = activation_from_name("tanh");
    const Activation sg = activation_from_name("sigmoid");
    CHECK(th.eval(0.3) == doctest::Approx(std::tanh(0.3)));
    CHECK(th.deriv(0.3) == doctest::Approx(1.0 - std::tanh(0.3) * std::tanh(0.3)));
    CHECK(sg.eval(0.0) == doctest::Approx(0.5));
    CHECK(sg.deriv(0.0) == doctest::Approx(0.25));
    CHECK(th.K() == 1.0);
    CHECK(sg.K() == 0.25);
    CHECK(th.S() == 1.0);
    CHECK(sg.S() == 1.0);
    CHECK_THROWS_AS(activation_from_name("relu"), std::invalid_argument);
}

} // TEST_SUITE
