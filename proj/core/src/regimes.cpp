#include "rnl/regimes.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "rnl/rng.hpp"

namespace rnl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double map_abs_bound_on_box(const AffineSigmaMap& m, const Box& domain) {
    // Nonlinear maps are globally bounded by the tilde parts alone. Affine
    // maps get the exact interval bound of |C x + d| over the box.
    if (!m.affine_only) return inf_norm_mat(m.W_tilde) * m.act.S() + inf_norm_vec(m.b_tilde);

    const Mat64 C = matmul(m.W_tilde, m.W);
    Vec64 d = matvec(m.W_tilde, m.b);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += m.b_tilde[i];

    double bound = 0.0;
    for (std::size_t i = 0; i < C.rows; ++i) {
        double center = d[i];
        double radius = 0.0;
        for (std::size_t j = 0; j < C.cols; ++j) {
            const double mid = 0.5 * (domain.lo[j] + domain.hi[j]);
            const double rad = 0.5 * (domain.hi[j] - domain.lo[j]);
            center += C(i, j) * mid;
            radius += std::abs(C(i, j)) * rad;
        }
        bound = std::max(bound, std::abs(center) + radius);
    }
    return bound;
}

// Lower bound of |sigma'| on [-A, A]; both admitted activations have an even
// derivative that decreases in |y|, so the bound is attained at A.
double deriv_floor(const Activation& act, double A) {
    return act.deriv(A);
}

} // namespace

double invdtanh(double v) {
    if (!(v > 0.0) || v > 1.0)
        throw std::invalid_argument("invdtanh: argument must lie in (0, 1]");
    return std::acosh(1.0 / std::sqrt(v));
}

RegimeConstants compute_constants(const ResNetModel& model, const Box& domain) {
    if (domain.dim() != model.n_in)
        throw DimError("compute_constants: domain dimension != n_in");
    if (model.depth() == 0)
        throw std::invalid_argument("compute_constants: model has no layers");

    RegimeConstants c;
    const Activation act = model.layers.front().act;
    c.K_sigma = act.K();
    c.S_sigma = act.S();
    c.alpha = model.eps > 0.0 ? model.delta / model.eps : kInf;

    c.nu_max = 0.0;
    c.nu_min = kInf;
    for (const ResidualLayer& lay : model.layers) {
        const SpectralSummary s = spectral_summary(matmul(lay.W, lay.W_tilde));
        c.nu_max = std::max(c.nu_max, s.sigma_max);
        c.nu_min = std::min(c.nu_min, s.sigma_min);
        c.omega_inf = std::max(c.omega_inf, inf_norm_mat(lay.W));
        c.omega_tilde_inf = std::max(c.omega_tilde_inf, inf_norm_mat(lay.W_tilde));
        c.beta_tilde_inf = std::max(c.beta_tilde_inf, inf_norm_vec(lay.b_tilde));
    }

    // Worst-case pre-activation magnitude per layer. For eps < 1 the
    // geometric sum gives the uniform state bound H0 + delta*S_f/(1-eps);
    // for eps >= 1 the states may grow, so the bound is propagated layer by
    // layer.
    const double H0 = map_abs_bound_on_box(model.input, domain);
    const double S_f = c.omega_tilde_inf * c.S_sigma + c.beta_tilde_inf;

    c.k_sigma = kInf;
    double hidden_max = H0;
    if (model.eps < 1.0) {
        const double H = H0 + model.delta * S_f / (1.0 - model.eps);
        hidden_max = H;
        for (const ResidualLayer& lay : model.layers) {
            const double A = inf_norm_mat(lay.W) * H + inf_norm_vec(lay.b);
            c.k_sigma = std::min(c.k_sigma, deriv_floor(act, A));
        }
    } else {
        double H = H0;
        for (const ResidualLayer& lay : model.layers) {
            const double A = inf_norm_mat(lay.W) * H + inf_norm_vec(lay.b);
            c.k_sigma = std::min(c.k_sigma, deriv_floor(act, A));
            const double layer_S = inf_norm_mat(lay.W_tilde) * c.S_sigma + inf_norm_vec(lay.b_tilde);
            H = model.eps * H + model.delta * layer_S;
            hidden_max = std::max(hidden_max, H);
        }
    }
    c.hidden_bound = hidden_max;
    return c;
}

double empirical_k_sigma(const ResNetModel& model, const Box& domain, std::size_t samples,
                         uint64_t seed) {
    Rng rng = substream(seed, 0x6b7369u);
    double lo = kInf;
    for (std::size_t s = 0; s < samples; ++s) {
        Vec64 x(model.n_in);
        for (std::size_t j = 0; j < model.n_in; ++j)
            x[j] = rng.uniform(domain.lo[j], domain.hi[j]);
        const HiddenTrace trace = forward(model, x).second;
        for (std::size_t l = 0; l < model.depth(); ++l)
            for (double a : trace.preacts[l])
                lo = std::min(lo, model.layers[l].act.deriv(a));
    }
    return lo;
}

namespace {

bool sampled_transform_rank_ok(const ResNetModel& model, const Box& domain) {
    // The exclusion arguments need the input transform to have rank n_hid
    // and the output transform full row rank wherever trajectories live.
    // Checked on a deterministic sample; a certifiable check is impossible
    // for arbitrary nonlinear transforms.
    Rng rng = substream(7u, 0xac5u);
    const double tol = 1e-9;
    for (int s = 0; s < 17; ++s) {
        Vec64 x(model.n_in);
        for (std::size_t j = 0; j < model.n_in; ++j)
            x[j] = rng.uniform(domain.lo[j], domain.hi[j]);
        const Mat64 Jin = model.input.jacobian(x);
        if (spectral_summary(Jin).sigma_min <= tol) return false;
        const auto [y, trace] = forward(model, x);
        (void)y;
        const Mat64 Jout = model.output.jacobian(trace.states.back());
        if (spectral_summary(Jout).sigma_min <= tol) return false;
    }
    return true;
}

} // namespace

RegimeReport classify_regime(const ResNetModel& model, const Box& domain) {
    if (!model.non_augmented())
        throw std::invalid_argument(
            "classify_regime: verdict inapplicable for augmented architectures (n_in < n_hid)");
    if (model.eps < 0.0 || model.delta < 0.0)
        throw std::invalid_argument("classify_regime: negative channel parameters");

    RegimeReport rep;
    rep.constants = compute_constants(model, domain);
    rep.assumption_ok = sampled_transform_rank_ok(model, domain);
    rep.rank_precondition_ok = true;
    for (const ResidualLayer& lay : model.layers)
        if (lay.m() > model.n_hid) rep.rank_precondition_ok = false;

    const RegimeConstants& c = rep.constants;
    rep.degenerate_residual = c.nu_max == 0.0;
    rep.threshold_lo = c.nu_max * c.K_sigma > 0.0 ? 1.0 / (c.nu_max * c.K_sigma) : kInf;
    rep.threshold_hi = c.nu_min * c.k_sigma > 0.0 ? 1.0 / (c.nu_min * c.k_sigma) : kInf;

    if (model.delta == 0.0) {
        // Pure skip chain: the map is the composition of the two transforms
        // with a scaling; its gradient never vanishes when the sampled rank
        // check holds. This is the alpha -> 0 limit.
        rep.node_side_excluded = rep.assumption_ok;
        rep.verdict = rep.node_side_excluded ? RegimeVerdict::NoCriticalPointsNodeSide
                                             : RegimeVerdict::Indeterminate;
        return rep;
    }

    if (model.eps == 0.0) {
        // Feedforward limit. The chain-rule product has no identity cushion,
        // so exclusion needs every per-layer factor invertible everywhere:
        // square shapes and weight matrices of full rank (the diagonal
        // derivative factor is positive for the admitted activations).
        bool ok = rep.assumption_ok;
        for (const ResidualLayer& lay : model.layers) {
            if (lay.m() < model.n_hid) ok = false;
            if (!ok) break;
            if (spectral_summary(lay.W).sigma_min <= 1e-12) ok = false;
            if (spectral_summary(lay.W_tilde).sigma_min <= 1e-12) ok = false;
        }
        rep.mlp_side_excluded = ok;
        rep.verdict = ok ? RegimeVerdict::NoCriticalPointsMlpSide : RegimeVerdict::Indeterminate;
        return rep;
    }

    if (rep.assumption_ok) {
        rep.node_side_excluded = c.alpha < rep.threshold_lo;
        rep.mlp_side_excluded =
            rep.rank_precondition_ok && c.nu_min > 0.0 && c.k_sigma > 0.0 &&
            c.alpha > rep.threshold_hi;
    }

    // A simultaneous pass of both strict inequalities would mean the
    // floating-point estimates crossed (analytically impossible); report the
    // raw flags and stay indeterminate in that case.
    if (rep.node_side_excluded && !rep.mlp_side_excluded)
        rep.verdict = RegimeVerdict::NoCriticalPointsNodeSide;
    else if (rep.mlp_side_excluded && !rep.node_side_excluded)
        rep.verdict = RegimeVerdict::NoCriticalPointsMlpSide;
    else
        rep.verdict = RegimeVerdict::Indeterminate;
    return rep;
}

std::vector<std::vector<FullRankCheck>> pointwise_full_rank_check(const ResNetModel& model,
                                                                  const std::vector<Vec64>& xs) {
    if (model.eps <= 0.0 || model.delta <= 0.0)
        throw std::invalid_argument("pointwise_full_rank_check: eps, delta > 0 required");
    const double inv_alpha = model.eps / model.delta;

    std::vector<std::vector<FullRankCheck>> out;
    out.reserve(xs.size());
    for (const Vec64& x : xs) {
        const HiddenTrace trace = forward(model, x).second;
        std::vector<FullRankCheck> per_layer;
        per_layer.reserve(model.depth());
        for (std::size_t l = 0; l < model.depth(); ++l) {
            FullRankCheck chk;
            const Mat64 raw = model.layers[l].raw_jacobian(trace.preacts[l]);
            chk.det_shift = solve_det_shift(raw, inv_alpha);

            Mat64 D = raw;
            for (auto& v : D.a) v *= model.delta;
            for (std::size_t i = 0; i < D.rows; ++i) D(i, i) += model.eps;
            const SpectralSummary s = spectral_summary(D);
            chk.sigma_min_D = s.sigma_min;

            // |det(raw + Id/alpha)| = |det(D)| / delta^n; the scale-aware
            // zero test compares |det(D)| against sigma_max(D)^n.
            const double det_D =
                chk.det_shift * std::pow(model.delta, static_cast<double>(D.rows));
            const double scale = std::pow(s.sigma_max, static_cast<double>(D.rows));
            chk.full_rank = det_D > 1e-10 * scale;
            per_layer.push_back(chk);
        }
        out.push_back(std::move(per_layer));
    }
    return out;
}

CriticalConstruction construct_critical_point(double alpha, double W, double target_x,
                                              const ResNetModel& prefix) {
    if (!(alpha > 0.0)) throw std::invalid_argument("construct_critical_point: alpha > 0");
    if (!(W <= -1.0 / alpha))
        throw std::invalid_argument(
            "construct_critical_point: W <= -1/alpha required (no real bias solves the "
            "derivative condition otherwise)");
    if (prefix.n_hid != 1 || prefix.n_in != 1)
        throw std::invalid_argument("construct_critical_point: scalar prefix required");

    const Vec64 x{target_x};
    const auto [y, trace] = forward(prefix, x);
    (void)y;
    const double h_prev = trace.states.back()[0];

    double v = -1.0 / (alpha * W); // in (0, 1] by the precondition
    // W given as -1/alpha can land a few ulps above 1 after the division
    if (v > 1.0 && v < 1.0 + 1e-12) v = 1.0;
    const double ystar = invdtanh(v);

    CriticalConstruction c;
    c.layer_index = prefix.depth() + 1;
    c.W = W;
    c.target_x = target_x;
    c.b_plus = ystar - W * h_prev;
    c.b_minus = -ystar - W * h_prev;
    return c;
}

ResNetModel append_constructed_layer(const ResNetModel& prefix, const CriticalConstruction& c,
                                     bool plus_root) {
    ResNetModel model = prefix;
    ResidualLayer lay;
    lay.act = {Act::Tanh};
    lay.W = Mat64(1, 1);
    lay.W(0, 0) = c.W;
    lay.W_tilde = Mat64::identity(1);
    lay.b = Vec64{plus_root ? c.b_plus : c.b_minus};
    lay.b_tilde = Vec64(1, 0.0);
    lay.tilde_fixed = true;
    model.layers.push_back(std::move(lay));
    return model;
}

namespace {

// JSON has no infinity literal; non-finite report fields become strings.
nlohmann::json json_num(double x) {
    if (std::isfinite(x)) return x;
    return x > 0 ? "inf" : "-inf";
}

} // namespace

std::string regime_verdict_name(RegimeVerdict v) {
    switch (v) {
    case RegimeVerdict::NoCriticalPointsNodeSide: return "NoCriticalPointsNodeSide";
    case RegimeVerdict::NoCriticalPointsMlpSide: return "NoCriticalPointsMlpSide";
    default: return "Indeterminate";
    }
}

std::string RegimeReport::to_json() const {
    nlohmann::json j;
    j["constants"] = {{"K_sigma", constants.K_sigma},
                      {"S_sigma", constants.S_sigma},
                      {"k_sigma", json_num(constants.k_sigma)},
                      {"nu_max", constants.nu_max},
                      {"nu_min", json_num(constants.nu_min)},
                      {"omega_inf", constants.omega_inf},
                      {"omega_tilde_inf", constants.omega_tilde_inf},
                      {"beta_tilde_inf", constants.beta_tilde_inf},
                      {"alpha", json_num(constants.alpha)},
                      {"hidden_bound", json_num(constants.hidden_bound)}};
    j["node_side_excluded"] = node_side_excluded;
    j["mlp_side_excluded"] = mlp_side_excluded;
    j["threshold_lo"] = json_num(threshold_lo);
    j["threshold_hi"] = json_num(threshold_hi);
    j["degenerate_residual"] = degenerate_residual;
    j["rank_precondition_ok"] = rank_precondition_ok;
    j["assumption_ok"] = assumption_ok;
    j["verdict"] = regime_verdict_name(verdict);
    return j.dump(2);
}

} // namespace rnl
