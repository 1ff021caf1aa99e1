#pragma once

#include "rnl/gradients.hpp"

namespace rnl {

// Certified constants of a canonical model over a box domain. nu_max/nu_min
// bound the singular values of the layer products W_l * W_tilde_l; k_sigma is
// a certified lower bound on the activation derivative along any trajectory
// started in the domain (worst-case pre-activation propagation, never a
// sampled estimate).
struct RegimeConstants {
    double K_sigma = 0.0;
    double S_sigma = 0.0;
    double k_sigma = 0.0;
    double nu_max = 0.0;
    double nu_min = 0.0;
    double omega_inf = 0.0;
    double omega_tilde_inf = 0.0;
    double beta_tilde_inf = 0.0;
    double alpha = 0.0;     // +inf for eps == 0
    double hidden_bound = 0.0; // certified sup bound on all hidden states
};

enum class RegimeVerdict { NoCriticalPointsNodeSide, NoCriticalPointsMlpSide, Indeterminate };

std::string regime_verdict_name(RegimeVerdict v);

struct RegimeReport {
    RegimeConstants constants;
    bool node_side_excluded = false;
    bool mlp_side_excluded = false;
    RegimeVerdict verdict = RegimeVerdict::Indeterminate;
    double threshold_lo = 0.0; // 1/(nu_max * K_sigma); +inf when degenerate
    double threshold_hi = 0.0; // 1/(nu_min * k_sigma); +inf when degenerate
    bool degenerate_residual = false; // nu_max == 0 (no nonlinear branch at all)
    bool rank_precondition_ok = false; // n_hid >= m_l for every layer
    bool assumption_ok = false;        // sampled full-rank check of the transforms

    std::string to_json() const;
};

RegimeConstants compute_constants(const ResNetModel& model, const Box& domain);

// Sampled (non-certified) lower derivative estimate, reported for context
// next to the certified k_sigma; never used in verdicts.
double empirical_k_sigma(const ResNetModel& model, const Box& domain, std::size_t samples = 256,
                         uint64_t seed = 0);

// Issues the two one-sided exclusion verdicts:
//   alpha < 1/(nu_max*K_sigma)  -> no critical points (skip-dominated side)
//   alpha > 1/(nu_min*k_sigma)  -> no critical points (residual-dominated side)
// eps = 0 routes to the exact feedforward criterion, delta = 0 to the affine
// chain. Throws std::invalid_argument for augmented models (n_in < n_hid),
// where no exclusion statement applies.
RegimeReport classify_regime(const ResNetModel& model, const Box& domain);

struct FullRankCheck {
    bool full_rank = true;
    double det_shift = 0.0;   // |det(raw_df + (1/alpha) Id)|
    double sigma_min_D = 0.0; // smallest singular value of eps*Id + delta*raw_df
};

// Per sample point and per layer: is -1/alpha numerically an eigenvalue of
// the raw layer Jacobian (scale-aware determinant test)?
std::vector<std::vector<FullRankCheck>> pointwise_full_rank_check(const ResNetModel& model,
                                                                  const std::vector<Vec64>& xs);

// Inverse of y -> 1 - tanh(y)^2 on [0, inf): arccosh(v^(-1/2)), v in (0, 1].
double invdtanh(double v);

// Bias choices that zero the derivative of a scalar tanh layer appended to
// `prefix` at target_x: b = +-invdtanh(-1/(alpha W)) - W * h_prev(target_x).
// Requires W <= -1/alpha < 0.
struct CriticalConstruction {
    std::size_t layer_index = 0; // 1-based position of the appended layer
    double W = 0.0;
    double b_plus = 0.0;
    double b_minus = 0.0;
    double target_x = 0.0;
};

CriticalConstruction construct_critical_point(double alpha, double W, double target_x,
                                              const ResNetModel& prefix);

// Assembles prefix plus the constructed layer (unit tilde part) into a full
// scalar model whose input gradient vanishes at the target.
ResNetModel append_constructed_layer(const ResNetModel& prefix, const CriticalConstruction& c,
                                     bool plus_root = true);

} // namespace rnl
