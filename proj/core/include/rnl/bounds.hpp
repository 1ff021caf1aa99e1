#pragma once

#include <functional>

#include "rnl/models.hpp"

namespace rnl {

// Constants of a canonical vector field W_tilde*sigma(W h + b) + b_tilde,
// taken uniformly over the parameter knots.
struct CanonicalFieldConstants {
    double omega_inf = 0.0;
    double omega_tilde_inf = 0.0;
    double beta_tilde_inf = 0.0;
    double S_sigma = 0.0;
    double K_sigma = 0.0;
};

struct EulerBoundInputs {
    double K_lambda_tilde = 0.0; // Lipschitz constant of the output transform
    double K_theta = 0.0;        // Lipschitz constant of the field in h
    double M_theta = 0.0;        // bound on the second time derivative of the flow
    double T = 0.0;
    double delta = 0.0;
    CanonicalFieldConstants canonical;
};

// K_lt * (M_theta*delta / (2 K_theta)) * (e^(K_theta*T) - 1); the K_theta = 0
// case returns the continuous extension K_lt * M_theta*delta*T/2.
double euler_bound_general(const EulerBoundInputs& in);

// Same bound with the canonical-field constants substituted in:
// K_theta = K_sigma*omega_tilde*omega, M_theta = omega_tilde*K_sigma*
// (omega_tilde*S_sigma + beta_tilde).
double euler_bound_canonical(const CanonicalFieldConstants& c, double K_lambda_tilde, double T,
                             double delta);

struct MlpBoundInputs {
    double eps = 0.0; // in (0, 1), strict
    double delta = 0.0;
    std::size_t L = 1;
    double S_f = 0.0;
    double K_f = 0.0;
    double S_lambda = 0.0;
    double K_lambda_tilde = 0.0;
};

// Distance between the skip network and its eps = 0 feedforward limit:
//   eps * K_lt * ((delta K_f)^(L-1) S_l + (S_l + delta S_f/(1-eps)) *
//                 sum_{j=0}^{L-2} (delta K_f)^j)
// with the empty-sum convention at L = 1.
double mlp_bound_explicit(const MlpBoundInputs& in);

struct CanonicalMlpConstants {
    double S_f = 0.0;
    double K_f = 0.0;
    double S_lambda = 0.0;
    double K_lambda_tilde = 0.0;
};

// For canonical layers and transforms sharing the same weight bounds:
// S_f = S_lambda = omega_tilde*S_sigma + beta_tilde,
// K_f = K_lambda_tilde = omega_tilde*K_sigma*omega.
CanonicalMlpConstants mlp_bound_canonical_constants(Activation act, double omega_inf,
                                                    double omega_tilde_inf,
                                                    double beta_tilde_inf);

using Evaluator = std::function<Vec64(const Vec64&)>;

// Max over a uniform lattice (box corners included) of the output distance
// in the max norm. A grid lower bound of the true sup: it can only
// under-report, which strengthens any bound-certification pass.
double empirical_sup_distance(const Evaluator& A, const Evaluator& B, const Box& domain,
                              const std::vector<std::size_t>& resolution);

struct BoundReport {
    std::string kind; // "euler" or "mlp"
    double eps_or_delta = 0.0;
    std::size_t L = 0;
    double theoretical = 0.0;
    double empirical = 0.0;
    double margin = 0.0;
    std::size_t samples = 0;
    Box domain;

    bool pass() const { return margin >= 0.0; }
};

BoundReport make_bound_report(std::string kind, double eps_or_delta, std::size_t L,
                              double theoretical, double empirical, std::size_t samples,
                              Box domain);

std::string bound_report_csv_header();
std::string to_csv_row(const BoundReport& r);

// Constants read off concrete objects, for convenience in sweeps.
CanonicalFieldConstants field_constants(const NeuralOdeSpec& spec);
double map_lipschitz_inf(const AffineSigmaMap& m);

} // namespace rnl
