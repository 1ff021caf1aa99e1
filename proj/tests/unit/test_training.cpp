#include <doctest.h>

#include <cmath>

#include "rnl/gradients.hpp"
#include "rnl/numerics.hpp"
#include "rnl/training.hpp"

using namespace rnl;

TEST_SUITE("training") {

TEST_CASE("dataset kinds round-trip by name") {
    for (DatasetKind k : {DatasetKind::Quad1D, DatasetKind::Circle2D, DatasetKind::Xor2D})
        CHECK(dataset_kind_from_name(dataset_kind_name(k)) == k);
    CHECK_THROWS_AS(dataset_kind_from_name("spiral"), std::invalid_argument);
}

TEST_CASE("quadratic samples pair x with its square") {
    const Dataset d = make_dataset(DatasetKind::Quad1D, 300, 7);
    REQUIRE(d.size() == 300);
    CHECK_FALSE(d.classification());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double x = d.inputs[i][0];
        CHECK(x >= -1.0);
        CHECK(x < 1.0);
        CHECK(d.targets[i] == x * x);
    }
}

TEST_CASE("planar samples respect labels and the margin band") {
    for (DatasetKind kind : {DatasetKind::Circle2D, DatasetKind::Xor2D}) {
        const Dataset d = make_dataset(kind, 500, 11);
        REQUIRE(d.size() == 500);
        CHECK(d.classification());
        std::size_t ones = 0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double x0 = d.inputs[i][0], x1 = d.inputs[i][1];
            CHECK(std::abs(x0) <= 2.5);
            CHECK(std::abs(x1) <= 2.5);
            const double psi =
                kind == DatasetKind::Circle2D ? psi_circle(x0, x1) : psi_xor(x0, x1);
            CHECK(std::abs(psi - 0.5) >= 0.05); // margin band is resampled away
            const int label = psi > 0.5 ? 1 : 0;
            CHECK(d.targets[i] == label);
            ones += static_cast<std::size_t>(label);
        }
        CHECK(ones > 50);
        CHECK(ones < 450);
    }
    // same seed, same draw
    const Dataset a = make_dataset(DatasetKind::Circle2D, 100, 3);
    const Dataset b = make_dataset(DatasetKind::Circle2D, 100, 3);
    CHECK(a.inputs == b.inputs);
}

TEST_CASE("the separating surfaces are the documented quadrics") {
    CHECK(psi_circle(1.0, 0.0) == doctest::Approx(0.5));
    CHECK(psi_circle(0.0, 0.0) == doctest::Approx(-0.5));
    CHECK(psi_xor(0.0, 1.0) == doctest::Approx(0.5));
    CHECK(psi_xor(1.0, 0.0) == doctest::Approx(-1.5));
}

TEST_CASE("dataset csv has one row per point plus a header") {
    const Dataset d = make_dataset(DatasetKind::Quad1D, 10, 1);
    const std::string csv = dataset_csv(d);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
}

TEST_CASE("initialization draws inside the xavier window") {
    const ResNetModel skel = make_2d_classifier(1.0, 0.1, 4, 2);
    const ResNetModel m = xavier_init(skel, 9);
    const double bound = std::sqrt(6.0 / 4.0); // 2x2 blocks
    for (const ResidualLayer& lay : m.layers) {
        for (double v : lay.W.a) {
            CHECK(std::abs(v) <= bound);
            CHECK(v != 0.0);
        }
        for (double v : lay.b) CHECK(v == 0.0);
        // fixed tilde parts stay at the skeleton values
        CHECK(lay.W_tilde.a == skel.layers[0].W_tilde.a);
    }
    // distinct seeds give distinct draws
    const ResNetModel m2 = xavier_init(skel, 10);
    CHECK(m.layers[0].W.a != m2.layers[0].W.a);
}

TEST_CASE("scalar weights are drawn from the normal law") {
    const ResNetModel skel = make_1d_regressor(1.0, 0.5, 8);
    const ResNetModel m = xavier_init(skel, 13);
    // 1x1 draws can leave the xavier window; with 8 layers at least one does
    double maxabs = 0.0;
    for (const ResidualLayer& lay : m.layers)
        maxabs = std::max(maxabs, std::abs(lay.W(0, 0)));
    CHECK(maxabs > std::sqrt(6.0 / 2.0) * 0.99 * 0.0 + 1.0); // some draw beyond 1
}

TEST_CASE("adam matches a two-step hand recurrence") {
    AdamState st;
    AdamParams ap;
    Vec64 p{0.0};
    adam_step(st, {1.0}, p, 0.1, ap);

    // closed form, first step
    double m = 0.1, v = 0.001;
    double mh = m / (1.0 - 0.9), vh = v / (1.0 - 0.999);
    double want = -0.1 * mh / (std::sqrt(vh) + 1e-8);
    CHECK(p[0] == doctest::Approx(want).epsilon(1e-15));

    adam_step(st, {0.5}, p, 0.1, ap);
    m = 0.9 * m + 0.1 * 0.5;
    v = 0.999 * v + 0.001 * 0.25;
    mh = m / (1.0 - 0.81);
    vh = v / (1.0 - 0.999 * 0.999);
    want += -0.1 * mh / (std::sqrt(vh) + 1e-8);
    CHECK(p[0] == doctest::Approx(want).epsilon(1e-14));
    CHECK(st.t == 2);
}

TEST_CASE("adam rejects shape drift") {
    AdamState st;
    AdamParams ap;
    Vec64 p{0.0, 0.0};
    adam_step(st, {1.0, 1.0}, p, 0.1, ap);
    Vec64 q{0.0};
    CHECK_THROWS_AS(adam_step(st, {1.0}, q, 0.1, ap), DimError);
}

TEST_CASE("normalization folds into the affine parameters exactly") {
    const ResNetModel m = xavier_init(make_2d_classifier(1.0, 0.5, 3, 2), 17);
    const Dataset d = make_dataset(DatasetKind::Circle2D, 64, 19);

    BatchNormState stats = BatchNormState::init(m);
    freeze_batch_norm(m, stats, d.inputs);
    REQUIRE(stats.frozen);
    const ResNetModel folded = fold_batch_norm(m, stats);

    for (std::size_t i = 0; i < 8; ++i) {
        const Vec64& x = d.inputs[i];
        // manual eval with explicit normalization of each preactivation
        Vec64 h = m.input.eval(x);
        for (std::size_t l = 0; l < m.depth(); ++l) {
            const ResidualLayer& lay = m.layers[l];
            Vec64 a = matvec(lay.W, h);
            for (std::size_t j = 0; j < a.size(); ++j) a[j] += lay.b[j];
            const Vec64 ah = batch_norm_apply(a, stats.mean[l], stats.var[l], stats.gamma[l],
                                              stats.beta[l]);
            Vec64 z(ah.size());
            for (std::size_t j = 0; j < ah.size(); ++j) z[j] = lay.act.eval(ah[j]);
            Vec64 r = matvec(lay.W_tilde, z);
            for (std::size_t j = 0; j < r.size(); ++j) r[j] += lay.b_tilde[j];
            for (std::size_t j = 0; j < h.size(); ++j) h[j] = m.eps * h[j] + m.delta * r[j];
        }
        const double want = m.output.eval(h)[0];
        const double got = forward(folded, x).first[0];
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("folding requires frozen statistics") {
    const ResNetModel m = make_2d_classifier(1.0, 0.5, 2, 2);
    BatchNormState stats = BatchNormState::init(m);
    CHECK_THROWS_AS(fold_batch_norm(m, stats), std::logic_error);
}

TEST_CASE("training shrinks the regression loss deterministically") {
    const Dataset d = make_dataset(DatasetKind::Quad1D, 60, 23);
    const ResNetModel skel = make_1d_regressor(1.0, 0.5, 3);
    TrainConfig cfg;
    cfg.seed = 4;
    cfg.epochs = 40;
    cfg.loss = Loss::Mse;

    auto [m1, r1] = train(xavier_init(skel, 4), d, cfg);
    REQUIRE(r1.epoch_loss.size() == 40);
    CHECK(r1.epoch_loss.back() < r1.epoch_loss.front());
    CHECK(r1.epoch_accuracy.empty());
    CHECK(std::isnan(r1.final_accuracy));
    CHECK(r1.wall_time_sec >= 0.0);
    CHECK(r1.sign_flip_fraction >= 0.0);
    CHECK(r1.sign_flip_fraction <= 1.0);

    auto [m2, r2] = train(xavier_init(skel, 4), d, cfg);
    CHECK(r1.epoch_loss == r2.epoch_loss);
    CHECK(forward(m1, {0.3}).first[0] == forward(m2, {0.3}).first[0]);

    cfg.seed = 5;
    auto [m3, r3] = train(xavier_init(skel, 5), d, cfg);
    CHECK(r1.epoch_loss != r3.epoch_loss);
}

TEST_CASE("classification training tracks accuracy and folds the result") {
    const Dataset d = make_dataset(DatasetKind::Circle2D, 160, 29);
    const ResNetModel skel = make_2d_classifier(1.0, 0.5, 4, 2);
    TrainConfig cfg;
    cfg.seed = 2;
    cfg.epochs = 25;
    cfg.batch_size = 32;
    cfg.loss = Loss::Bce;
    cfg.batch_norm = true;

    auto [m, rec] = train(xavier_init(skel, 2), d, cfg);
    REQUIRE(rec.epoch_accuracy.size() == 25);
    CHECK(rec.final_accuracy >= 0.0);
    CHECK(rec.final_accuracy <= 1.0);
    CHECK(rec.final_accuracy == doctest::Approx(classification_accuracy(m, d)));
    CHECK(rec.epoch_loss.back() < rec.epoch_loss.front());
    // outputs are probabilities
    const double p = forward(m, d.inputs[0]).first[0];
    CHECK(p > 0.0);
    CHECK(p < 1.0);
}

TEST_CASE("loss and dataset kind must agree") {
    const Dataset d = make_dataset(DatasetKind::Circle2D, 50, 1);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.loss = Loss::Mse;
    CHECK_THROWS_AS(train(make_2d_classifier(1.0, 0.5, 2, 2), d, cfg),
                    std::invalid_argument);

    const Dataset q = make_dataset(DatasetKind::Quad1D, 50, 1);
    cfg.loss = Loss::Bce;
    CHECK_THROWS_AS(train(make_1d_regressor(1.0, 0.5, 2), q, cfg), std::invalid_argument);
}

TEST_CASE("record csv carries the accuracy column only when it exists") {
    TrainRecord rec;
    rec.epoch_loss = {0.5, 0.25};
    CHECK(train_record_csv(rec).rfind("epoch,loss\n", 0) == 0);
    rec.epoch_accuracy = {0.5, 0.75};
    CHECK(train_record_csv(rec).rfind("epoch,loss,accuracy\n", 0) == 0);
}

TEST_CASE("skeleton factories build the documented shapes") {
    const ResNetModel r = make_1d_regressor(0.8, 0.2, 6);
    CHECK(r.n_in == 1);
    CHECK(r.n_hid == 1);
    CHECK(r.n_out == 1);
    CHECK(r.depth() == 6);
    CHECK(r.eps == 0.8);
    CHECK(forward(r, {0.0}).first[0] == 0.0); // zero weights, zero biases

    const ResNetModel c = make_2d_classifier(1.0, 1.0, 10, 2);
    CHECK(c.n_in == 2);
    CHECK(c.n_hid == 2);
    CHECK(c.depth() == 10);
    CHECK(bce_shortcut_applies(c));
    CHECK(c.non_augmented());
}

} // TEST_SUITE
