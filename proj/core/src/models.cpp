#include "rnl/models.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rnl {

double Activation::eval(double y) const {
    if (kind == Act::Tanh) return std::tanh(y);
    return 1.0 / (1.0 + std::exp(-y));
}

double Activation::deriv(double y) const {
    if (kind == Act::Tanh) {
        const double t = std::tanh(y);
        return 1.0 - t * t;
    }
    const double s = 1.0 / (1.0 + std::exp(-y));
    return s * (1.0 - s);
}

Activation activation_from_name(std::string_view name) {
    if (name == "tanh") return {Act::Tanh};
    if (name == "sigmoid") return {Act::Sigmoid};
    throw std::invalid_argument("unknown activation: " + std::string(name));
}

Vec64 AffineSigmaMap::eval(const Vec64& x) const {
    Vec64 a = matvec(W, x);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    if (!affine_only)
        for (double& v : a) v = act.eval(v);
    Vec64 y = matvec(W_tilde, a);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += b_tilde[i];
    return y;
}

Mat64 AffineSigmaMap::jacobian(const Vec64& x) const {
    if (affine_only) return matmul(W_tilde, W);
    Vec64 a = matvec(W, x);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    // W_tilde * diag(sigma'(a)) * W without forming the diagonal
    Mat64 scaled = W;
    for (std::size_t i = 0; i < scaled.rows; ++i) {
        const double d = act.deriv(a[i]);
        for (std::size_t j = 0; j < scaled.cols; ++j) scaled(i, j) *= d;
    }
    return matmul(W_tilde, scaled);
}

AffineSigmaMap AffineSigmaMap::identity(std::size_t n) {
    AffineSigmaMap m;
    m.W = Mat64::identity(n);
    m.W_tilde = Mat64::identity(n);
    m.b = Vec64(n, 0.0);
    m.b_tilde = Vec64(n, 0.0);
    m.affine_only = true;
    m.tilde_fixed = true;
    m.frozen = true;
    return m;
}

AffineSigmaMap AffineSigmaMap::affine(Mat64 W_tilde, Vec64 b_tilde) {
    AffineSigmaMap m;
    const std::size_t n = W_tilde.cols;
    m.W = Mat64::identity(n);
    m.b = Vec64(n, 0.0);
    m.W_tilde = std::move(W_tilde);
    m.b_tilde = std::move(b_tilde);
    m.affine_only = true;
    return m;
}

Vec64 ResidualLayer::eval(const Vec64& h, Vec64* preact_out) const {
    Vec64 a = matvec(W, h);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    if (preact_out) *preact_out = a;
    for (double& v : a) v = act.eval(v);
    Vec64 r = matvec(W_tilde, a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b_tilde[i];
    return r;
}

Mat64 ResidualLayer::raw_jacobian(const Vec64& preact) const {
    Mat64 scaled = W;
    for (std::size_t i = 0; i < scaled.rows; ++i) {
        const double d = act.deriv(preact[i]);
        for (std::size_t j = 0; j < scaled.cols; ++j) scaled(i, j) *= d;
    }
    return matmul(W_tilde, scaled);
}

double ResNetModel::alpha() const {
    if (eps <= 0.0) throw std::invalid_argument("alpha: undefined for eps <= 0");
    return delta / eps;
}

void ResNetModel::validate() const {
    if (input.in_dim() != n_in) throw DimError("model: input transform width != n_in");
    if (input.out_dim() != n_hid) throw DimError("model: input transform height != n_hid");
    if (output.in_dim() != n_hid) throw DimError("model: output transform width != n_hid");
    if (output.out_dim() != n_out) throw DimError("model: output transform height != n_out");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const ResidualLayer& lay = layers[l];
        const std::size_t m = lay.m();
        if (lay.W.cols != n_hid || lay.W_tilde.rows != n_hid || lay.W_tilde.cols != m ||
            lay.b.size() != m || lay.b_tilde.size() != n_hid)
            throw DimError("model: layer " + std::to_string(l + 1) + " shape chain broken");
        check_finite(lay.W, "model weights");
        check_finite(lay.W_tilde, "model weights");
    }
}

std::pair<Vec64, HiddenTrace> forward(const ResNetModel& model, const Vec64& x) {
    if (x.size() != model.n_in) throw DimError("forward: input dimension mismatch");

    HiddenTrace trace;
    trace.states.reserve(model.depth() + 1);
    trace.preacts.reserve(model.depth());

    Vec64 h = model.input.eval(x);
    check_finite(h, "forward: input transform");
    trace.states.push_back(h);

    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        Vec64 a;
        Vec64 r = model.layers[l].eval(h, &a);
        for (std::size_t i = 0; i < h.size(); ++i) h[i] = model.eps * h[i] + model.delta * r[i];
        for (double v : h)
            if (!std::isfinite(v))
                throw NumericError("forward: non-finite state after layer " +
                                   std::to_string(l + 1));
        trace.preacts.push_back(std::move(a));
        trace.states.push_back(h);
    }

    Vec64 y = model.output.eval(h);
    check_finite(y, "forward: output transform");
    return {std::move(y), std::move(trace)};
}

Vec64 forward_unrolled(const ResNetModel& model, const Vec64& x) {
    if (x.size() != model.n_in) throw DimError("forward_unrolled: input dimension mismatch");

    const Vec64 h0 = model.input.eval(x);
    const std::size_t n = h0.size();

    // Each state is assembled from scratch as
    //   h_l = eps^l h_0 + delta * sum_{j<=l} eps^(l-j) f_j(h_{j-1}),
    // re-using the residual values f_j but never the recurrence.
    std::vector<Vec64> residuals; // f_j(h_{j-1}), j = 1..L
    Vec64 h = h0;
    for (std::size_t l = 1; l <= model.depth(); ++l) {
        residuals.push_back(model.layers[l - 1].eval(h));
        Vec64 next(n, 0.0);
        const double eps_l = std::pow(model.eps, static_cast<double>(l));
        for (std::size_t i = 0; i < n; ++i) next[i] = eps_l * h0[i];
        for (std::size_t j = 1; j <= l; ++j) {
            const double w = model.delta * std::pow(model.eps, static_cast<double>(l - j));
            for (std::size_t i = 0; i < n; ++i) next[i] += w * residuals[j - 1][i];
        }
        h = std::move(next);
        check_finite(h, "forward_unrolled");
    }
    return model.output.eval(h);
}

const ResidualLayer& NeuralOdeSpec::params_at(double t) const {
    if (knots.empty()) throw std::invalid_argument("ode spec: no parameter knots");
    std::size_t k = 0;
    while (k + 1 < knot_times.size() && knot_times[k + 1] <= t) ++k;
    return knots[k];
}

Vec64 NeuralOdeSpec::field(const Vec64& h, double t) const {
    Vec64 f = params_at(t).eval(h);
    if (lin_coeff != 0.0)
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += lin_coeff * h[i];
    return f;
}

Vec64 integrate_node(const NeuralOdeSpec& spec, const Vec64& x, std::size_t steps,
                     OdeMethod method) {
    if (steps == 0) throw std::invalid_argument("integrate_node: steps >= 1 required");
    const double dt = spec.horizon_T / static_cast<double>(steps);

    Vec64 h = spec.input.eval(x);
    const std::size_t n = h.size();
    double t = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
        t = dt * static_cast<double>(s);
        if (method == OdeMethod::Euler) {
            const Vec64 f = spec.field(h, t);
            for (std::size_t i = 0; i < n; ++i) h[i] += dt * f[i];
        } else {
            const Vec64 k1 = spec.field(h, t);
            Vec64 tmp(n);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = h[i] + 0.5 * dt * k1[i];
            const Vec64 k2 = spec.field(tmp, t + 0.5 * dt);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = h[i] + 0.5 * dt * k2[i];
            const Vec64 k3 = spec.field(tmp, t + 0.5 * dt);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = h[i] + dt * k3[i];
            const Vec64 k4 = spec.field(tmp, t + dt);
            for (std::size_t i = 0; i < n; ++i)
                h[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        for (double v : h)
            if (!std::isfinite(v))
                throw NumericError("integrate_node: non-finite state at t = " +
                                   std::to_string(t + dt));
    }
    return spec.output.eval(h);
}

ResNetModel euler_discretize(const NeuralOdeSpec& spec, std::size_t L) {
    if (L == 0) throw std::invalid_argument("euler_discretize: L >= 1 required");
    const double delta = spec.horizon_T / static_cast<double>(L);

    ResNetModel model;
    model.delta = delta;
    model.eps = 1.0 + delta * spec.lin_coeff;
    model.input = spec.input;
    model.output = spec.output;
    model.n_in = spec.input.in_dim();
    model.n_hid = spec.n_hid();
    model.n_out = spec.output.out_dim();
    model.layers.reserve(L);
    for (std::size_t l = 1; l <= L; ++l) {
        const double t = delta * static_cast<double>(l - 1);
        model.layers.push_back(spec.params_at(t));
    }
    return model;
}

NeuralOdeSpec embed_resnet_as_node(const ResNetModel& model) {
    if (model.delta <= 0.0)
        throw std::invalid_argument("embed_resnet_as_node: delta > 0 required");
    if (model.depth() == 0)
        throw std::invalid_argument("embed_resnet_as_node: at least one layer required");
    const std::size_t m0 = model.layers.front().m();
    for (const ResidualLayer& lay : model.layers)
        if (lay.m() != m0)
            throw std::invalid_argument("embed_resnet_as_node: layers must share one shape");

    NeuralOdeSpec spec;
    spec.knots = model.layers;
    spec.knot_times.resize(model.depth());
    for (std::size_t l = 0; l < model.depth(); ++l)
        spec.knot_times[l] = model.delta * static_cast<double>(l);
    spec.horizon_T = model.delta * static_cast<double>(model.depth());
    spec.lin_coeff = (model.eps - 1.0) / model.delta;
    spec.input = model.input;
    spec.output = model.output;
    return spec;
}

ResNetModel resnet_to_mlp(const ResNetModel& model) {
    ResNetModel mlp = model;
    mlp.eps = 0.0;
    return mlp;
}

namespace {

using nlohmann::json;

json map_to_json(const AffineSigmaMap& m) {
    return json{{"W", m.W.a},
                {"W_tilde", m.W_tilde.a},
                {"b", m.b},
                {"b_tilde", m.b_tilde},
                {"affine_only", m.affine_only}};
}

Mat64 mat_from_flat(const std::vector<double>& flat, std::size_t rows, std::size_t cols,
                    const char* what) {
    if (flat.size() != rows * cols)
        throw DimError(std::string(what) + ": matrix entry count does not match shape");
    Mat64 M(rows, cols);
    M.a = flat;
    return M;
}

AffineSigmaMap map_from_json(const json& j, std::size_t in_dim, std::size_t out_dim,
                             Activation act, const char* what) {
    AffineSigmaMap m;
    m.act = act;
    m.affine_only = j.at("affine_only").get<bool>();
    m.b = j.at("b").get<Vec64>();
    m.b_tilde = j.at("b_tilde").get<Vec64>();
    const std::size_t mid = m.b.size();
    if (m.b_tilde.size() != out_dim)
        throw DimError(std::string(what) + ": b_tilde length != output dimension");
    m.W = mat_from_flat(j.at("W").get<std::vector<double>>(), mid, in_dim, what);
    m.W_tilde = mat_from_flat(j.at("W_tilde").get<std::vector<double>>(), out_dim, mid, what);
    return m;
}

} // namespace

std::string to_json(const ResNetModel& model) {
    json j;
    j["eps"] = model.eps;
    j["delta"] = model.delta;
    j["n_in"] = model.n_in;
    j["n_hid"] = model.n_hid;
    j["n_out"] = model.n_out;
    j["activation"] = model.layers.empty() ? model.input.act.name()
                                           : model.layers.front().act.name();
    j["input"] = map_to_json(model.input);
    j["output"] = map_to_json(model.output);
    j["layers"] = json::array();
    for (const ResidualLayer& lay : model.layers)
        j["layers"].push_back(json{{"W", lay.W.a},
                                   {"W_tilde", lay.W_tilde.a},
                                   {"b", lay.b},
                                   {"b_tilde", lay.b_tilde}});
    return j.dump(2);
}

ResNetModel model_from_json(const std::string& text) {
    json j = json::parse(text);
    ResNetModel model;
    model.eps = j.at("eps").get<double>();
    model.delta = j.at("delta").get<double>();
    model.n_in = j.at("n_in").get<std::size_t>();
    model.n_hid = j.at("n_hid").get<std::size_t>();
    model.n_out = j.at("n_out").get<std::size_t>();
    const Activation act = activation_from_name(j.at("activation").get<std::string>());

    model.input = map_from_json(j.at("input"), model.n_in, model.n_hid, act, "input");
    model.output = map_from_json(j.at("output"), model.n_hid, model.n_out, act, "output");
    for (const json& lj : j.at("layers")) {
        ResidualLayer lay;
        lay.act = act;
        lay.b = lj.at("b").get<Vec64>();
        lay.b_tilde = lj.at("b_tilde").get<Vec64>();
        const std::size_t m = lay.b.size();
        if (lay.b_tilde.size() != model.n_hid)
            throw DimError("layer: b_tilde length != n_hid");
        lay.W = mat_from_flat(lj.at("W").get<std::vector<double>>(), m, model.n_hid, "layer");
        lay.W_tilde =
            mat_from_flat(lj.at("W_tilde").get<std::vector<double>>(), model.n_hid, m, "layer");
        model.layers.push_back(std::move(lay));
    }
    model.validate();
    return model;
}

void save_model(const ResNetModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << to_json(model) << '\n';
}

ResNetModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

} // namespace rnl
