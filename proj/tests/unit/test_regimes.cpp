#include <doctest.h>

#include <cmath>

#include "rnl/gradients.hpp"
#include "rnl/regimes.hpp"
#include "rnl/rng.hpp"
#include "rnl/sampling.hpp"

using namespace rnl;

namespace {

ResNetModel scalar_model(double eps, double delta, double w, double b,
                         double w_tilde = 1.0) {
    ResNetModel m;
    m.eps = eps;
    m.delta = delta;
    m.n_in = m.n_hid = m.n_out = 1;
    m.input = AffineSigmaMap::identity(1);
    m.output = AffineSigmaMap::identity(1);
    ResidualLayer lay;
    lay.W = Mat64(1, 1);
    lay.W(0, 0) = w;
    lay.W_tilde = Mat64(1, 1);
    lay.W_tilde(0, 0) = w_tilde;
    lay.b = {b};
    lay.b_tilde = {0.0};
    lay.act = activation_from_name("tanh");
    m.layers.push_back(lay);
    m.validate();
    return m;
}

ResNetModel bare_prefix() {
    ResNetModel m;
    m.eps = 1.0;
    m.delta = 2.0;
    m.n_in = m.n_hid = m.n_out = 1;
    m.input = AffineSigmaMap::identity(1);
    m.output = AffineSigmaMap::identity(1);
    m.validate();
    return m;
}

} // namespace

TEST_SUITE("regimes") {

TEST_CASE("invdtanh inverts the tanh derivative") {
    // arccosh(sqrt(2)) = ln(1 + sqrt(2))
    CHECK(invdtanh(0.5) == doctest::Approx(std::log(1.0 + std::sqrt(2.0))).epsilon(1e-14));
    for (double v : {0.1, 0.35, 0.8, 0.99}) {
        const double y = invdtanh(v);
        const double t = std::tanh(y);
        CHECK(1.0 - t * t == doctest::Approx(v).epsilon(1e-12));
    }
    CHECK(invdtanh(1.0) == doctest::Approx(0.0));
}

TEST_CASE("constructed bias values hit the derivative zero") {
    const ResNetModel prefix = bare_prefix(); // alpha = 2
    const double alpha = 2.0, W = -1.0, target = 0.2;
    const CriticalConstruction c = construct_critical_point(alpha, W, target, prefix);
    CHECK(c.b_plus == doctest::Approx(std::log(1.0 + std::sqrt(2.0)) + 0.2).epsilon(1e-13));

    for (bool plus : {true, false}) {
        const ResNetModel m = append_constructed_layer(prefix, c, plus);
        const double g = input_gradient(m, {target}).grad[0];
        CHECK(std::abs(g) < 1e-12);
    }
}

TEST_CASE("construction rejects inadmissible slopes") {
    const ResNetModel prefix = bare_prefix();
    // W must satisfy W <= -1/alpha < 0
    CHECK_THROWS_AS(construct_critical_point(2.0, -0.1, 0.0, prefix), std::invalid_argument);
    CHECK_THROWS_AS(construct_critical_point(2.0, 0.5, 0.0, prefix), std::invalid_argument);
}

TEST_CASE("small alpha lands on the skip-dominated exclusion") {
    // alpha = 0.05, nu_max = |W W_tilde| = 1, K_sigma = 1: alpha < 1
    const ResNetModel m = scalar_model(1.0, 0.05, 1.0, 0.0);
    const RegimeReport rep = classify_regime(m, Box{{-1.0}, {1.0}});
    CHECK(rep.node_side_excluded);
    CHECK(rep.verdict == RegimeVerdict::NoCriticalPointsNodeSide);
    CHECK(rep.threshold_lo == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(regime_verdict_name(rep.verdict) == "NoCriticalPointsNodeSide");
}

TEST_CASE("large alpha lands on the residual-dominated exclusion") {
    // one layer, so the preactivation range and hence k_sigma do not depend
    // on delta; push alpha past 1/(nu_min k_sigma)
    const ResNetModel probe = scalar_model(1.0, 1.0, 0.8, 0.0);
    const RegimeReport first = classify_regime(probe, Box{{-1.0}, {1.0}});
    REQUIRE(std::isfinite(first.threshold_hi));

    const ResNetModel m = scalar_model(1.0, 2.5 * first.threshold_hi, 0.8, 0.0);
    const RegimeReport rep = classify_regime(m, Box{{-1.0}, {1.0}});
    CHECK(rep.mlp_side_excluded);
    CHECK(rep.verdict == RegimeVerdict::NoCriticalPointsMlpSide);
}

TEST_CASE("the in-between band stays indeterminate") {
    const ResNetModel m = scalar_model(1.0, 1.0, 1.0, 0.0);
    const RegimeReport rep = classify_regime(m, Box{{-1.0}, {1.0}});
    CHECK_FALSE(rep.node_side_excluded);
    CHECK(rep.verdict == RegimeVerdict::Indeterminate);
}

TEST_CASE("augmented models are rejected outright") {
    // hidden channel wider than the input: 1 -> 2
    ResNetModel wide;
    wide.eps = 1.0;
    wide.delta = 0.1;
    wide.n_in = 1;
    wide.n_hid = 2;
    wide.n_out = 1;
    AffineSigmaMap in;
    in.W = Mat64(2, 1);
    in.W(0, 0) = 1.0;
    in.W(1, 0) = -1.0;
    in.W_tilde = Mat64::identity(2);
    in.b = {0.0, 0.0};
    in.b_tilde = {0.0, 0.0};
    in.act = activation_from_name("tanh");
    wide.input = in;
    Mat64 Wt(1, 2);
    Wt(0, 0) = 1.0;
    Wt(0, 1) = 1.0;
    wide.output = AffineSigmaMap::affine(Wt, {0.0});
    ResidualLayer lay;
    lay.W = Mat64(2, 2);
    lay.W(0, 0) = 0.5;
    lay.W(1, 1) = 0.5;
    lay.W_tilde = Mat64::identity(2);
    lay.b = {0.0, 0.0};
    lay.b_tilde = {0.0, 0.0};
    lay.act = activation_from_name("tanh");
    wide.layers.push_back(lay);
    wide.validate();

    CHECK_THROWS_AS(classify_regime(wide, Box{{-1.0}, {1.0}}), std::invalid_argument);
}

TEST_CASE("a pure skip chain is excluded trivially") {
    const ResNetModel m = scalar_model(1.0, 0.0, 1.0, 0.0);
    const RegimeReport rep = classify_regime(m, Box{{-1.0}, {1.0}});
    CHECK(rep.verdict == RegimeVerdict::NoCriticalPointsNodeSide);
}

TEST_CASE("the eps = 0 limit routes to the feedforward criterion") {
    Rng rng(55);
    ModelSampler opt;
    opt.square_full_rank = true;
    ResNetModel m = sample_canonical_model(rng, opt);
    m.eps = 0.0;
    const RegimeReport rep = classify_regime(m, Box{rnl::Vec64(m.n_in, -1.0), rnl::Vec64(m.n_in, 1.0)});
    CHECK(rep.verdict == RegimeVerdict::NoCriticalPointsMlpSide);
}

TEST_CASE("sampled derivative floor never undercuts the certified one") {
    Rng rng(56);
    ModelSampler opt;
    opt.n_in_max = 2;
    opt.n_hid_max = 2;
    for (int trial = 0; trial < 5; ++trial) {
        ResNetModel m = sample_canonical_model(rng, opt);
        if (m.n_in < m.n_hid) continue; // exclusion machinery wants non-augmented
        const Box box{rnl::Vec64(m.n_in, -1.0), rnl::Vec64(m.n_in, 1.0)};
        const RegimeConstants consts = compute_constants(m, box);
        const double sampled = empirical_k_sigma(m, box, 128, 99);
        CHECK(sampled >= consts.k_sigma - 1e-12);
    }
}

TEST_CASE("pointwise rank check flags the constructed degeneracy") {
    const ResNetModel prefix = bare_prefix();
    const CriticalConstruction c = construct_critical_point(2.0, -1.0, 0.2, prefix);
    const ResNetModel m = append_constructed_layer(prefix, c, true);

    const auto checks = pointwise_full_rank_check(m, {{0.2}, {0.9}});
    REQUIRE(checks.size() == 2);
    REQUIRE(checks[0].size() == 1);
    CHECK_FALSE(checks[0][0].full_rank); // at the target the shift hits an eigenvalue
    CHECK(checks[1][0].full_rank);
    CHECK(checks[0][0].det_shift < 1e-10);
}

TEST_CASE("report serializes with finite stand-ins") {
    const ResNetModel m = scalar_model(1.0, 0.05, 1.0, 0.0);
    const RegimeReport rep = classify_regime(m, Box{{-1.0}, {1.0}});
    const std::string j = rep.to_json();
    CHECK(j.find("verdict") != std::string::npos);
    CHECK(j.find("NoCriticalPointsNodeSide") != std::string::npos);
    CHECK(j.find("nan") == std::string::npos);
}

} // TEST_SUITE
