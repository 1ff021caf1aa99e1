#include "rnl/bounds.hpp"

#include <cmath>
#include <sstream>

namespace rnl {

double euler_bound_general(const EulerBoundInputs& in) {
    if (in.K_theta < 0.0 || in.M_theta < 0.0 || in.T < 0.0 || in.delta < 0.0)
        throw std::invalid_argument("euler_bound_general: negative constant");
    if (in.K_theta == 0.0) return in.K_lambda_tilde * in.M_theta * in.delta * in.T / 2.0;
    return in.K_lambda_tilde * (in.M_theta * in.delta / (2.0 * in.K_theta)) *
           std::expm1(in.K_theta * in.T);
}

double euler_bound_canonical(const CanonicalFieldConstants& c, double K_lambda_tilde, double T,
                             double delta) {
    EulerBoundInputs in;
    in.K_lambda_tilde = K_lambda_tilde;
    in.K_theta = c.K_sigma * c.omega_tilde_inf * c.omega_inf;
    in.M_theta = c.omega_tilde_inf * c.K_sigma * (c.omega_tilde_inf * c.S_sigma + c.beta_tilde_inf);
    in.T = T;
    in.delta = delta;
    return euler_bound_general(in);
}

double mlp_bound_explicit(const MlpBoundInputs& in) {
    if (!(in.eps > 0.0) || !(in.eps < 1.0))
        throw std::invalid_argument("mlp_bound_explicit: eps must lie strictly in (0, 1)");
    if (in.L == 0) throw std::invalid_argument("mlp_bound_explicit: L >= 1 required");

    const double dK = in.delta * in.K_f;
    const double hidden = in.S_lambda + in.delta * in.S_f / (1.0 - in.eps);

    double geo = 0.0; // sum_{j=0}^{L-2} (delta K_f)^j, empty for L = 1
    double pow_j = 1.0;
    for (std::size_t j = 0; j + 1 < in.L; ++j) {
        geo += pow_j;
        pow_j *= dK;
    }
    const double lead = std::pow(dK, static_cast<double>(in.L - 1)) * in.S_lambda;
    return in.eps * in.K_lambda_tilde * (lead + hidden * geo);
}

CanonicalMlpConstants mlp_bound_canonical_constants(Activation act, double omega_inf,
                                                    double omega_tilde_inf,
                                                    double beta_tilde_inf) {
    if (omega_inf < 0.0 || omega_tilde_inf < 0.0 || beta_tilde_inf < 0.0)
        throw std::invalid_argument("mlp_bound_canonical_constants: negative bound");
    CanonicalMlpConstants c;
    c.S_f = omega_tilde_inf * act.S() + beta_tilde_inf;
    c.S_lambda = c.S_f;
    c.K_f = omega_tilde_inf * act.K() * omega_inf;
    c.K_lambda_tilde = c.K_f;
    return c;
}

double empirical_sup_distance(const Evaluator& A, const Evaluator& B, const Box& domain,
                              const std::vector<std::size_t>& resolution) {
    const std::size_t dim = domain.dim();
    if (resolution.size() != dim)
        throw DimError("empirical_sup_distance: resolution/domain rank mismatch");
    for (std::size_t r : resolution)
        if (r < 2) throw std::invalid_argument("empirical_sup_distance: resolution >= 2");

    std::size_t total = 1;
    for (std::size_t r : resolution) total *= r;

    double worst = 0.0;
    std::vector<std::size_t> idx(dim, 0);
    Vec64 x(dim);
    for (std::size_t flat = 0; flat < total; ++flat) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double t = static_cast<double>(idx[d]) / static_cast<double>(resolution[d] - 1);
            x[d] = domain.lo[d] + t * (domain.hi[d] - domain.lo[d]);
        }
        const Vec64 ya = A(x);
        const Vec64 yb = B(x);
        if (ya.size() != yb.size())
            throw DimError("empirical_sup_distance: evaluator output dims differ");
        for (std::size_t i = 0; i < ya.size(); ++i)
            worst = std::max(worst, std::abs(ya[i] - yb[i]));

        for (std::size_t d = dim; d-- > 0;) {
            if (++idx[d] < resolution[d]) break;
            idx[d] = 0;
        }
    }
    return worst;
}

BoundReport make_bound_report(std::string kind, double eps_or_delta, std::size_t L,
                              double theoretical, double empirical, std::size_t samples,
                              Box domain) {
    BoundReport r;
    r.kind = std::move(kind);
    r.eps_or_delta = eps_or_delta;
    r.L = L;
    r.theoretical = theoretical;
    r.empirical = empirical;
    r.margin = theoretical - empirical;
    r.samples = samples;
    r.domain = std::move(domain);
    return r;
}

std::string bound_report_csv_header() {
    return "kind,eps_or_delta,L,theoretical,empirical,margin,pass";
}

std::string to_csv_row(const BoundReport& r) {
    std::ostringstream os;
    os.precision(12);
    os << r.kind << ',' << r.eps_or_delta << ',' << r.L << ',' << r.theoretical << ','
       << r.empirical << ',' << r.margin << ',' << (r.pass() ? "1" : "0");
    return os.str();
}

CanonicalFieldConstants field_constants(const NeuralOdeSpec& spec) {
    if (spec.knots.empty()) throw std::invalid_argument("field_constants: no knots");
    CanonicalFieldConstants c;
    c.S_sigma = spec.knots.front().act.S();
    c.K_sigma = spec.knots.front().act.K();
    for (const ResidualLayer& k : spec.knots) {
        c.omega_inf = std::max(c.omega_inf, inf_norm_mat(k.W));
        c.omega_tilde_inf = std::max(c.omega_tilde_inf, inf_norm_mat(k.W_tilde));
        c.beta_tilde_inf = std::max(c.beta_tilde_inf, inf_norm_vec(k.b_tilde));
    }
    return c;
}

double map_lipschitz_inf(const AffineSigmaMap& m) {
    if (m.affine_only) return inf_norm_mat(matmul(m.W_tilde, m.W));
    return inf_norm_mat(m.W_tilde) * m.act.K() * inf_norm_mat(m.W);
}

} // namespace rnl
