#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "rnl/numerics.hpp"

namespace rnl {

// Component-wise activations. ReLU-type functions are deliberately absent:
// every admitted activation is bounded, globally Lipschitz, and has a
// strictly positive derivative, which the analysis modules rely on.
enum class Act { Tanh, Sigmoid };

struct Activation {
    Act kind = Act::Tanh;

    double eval(double y) const;
    double deriv(double y) const;

    // global bounds: |sigma| <= S(), |sigma'| <= K()
    double S() const { return 1.0; }
    double K() const { return kind == Act::Tanh ? 1.0 : 0.25; }

    const char* name() const { return kind == Act::Tanh ? "tanh" : "sigmoid"; }
};

Activation activation_from_name(std::string_view name);

// Input/output transform W_tilde * sigma(W x + b) + b_tilde, or the plain
// affine variant W_tilde * (W x + b) + b_tilde when affine_only is set.
struct AffineSigmaMap {
    Mat64 W;       // mid x in
    Mat64 W_tilde; // out x mid
    Vec64 b;       // mid
    Vec64 b_tilde; // out
    Activation act;
    bool affine_only = false;
    // Structural tilde parts (identity/zero) are excluded from training.
    bool tilde_fixed = false;
    // Entirely non-trainable map (e.g. a fixed identity embedding).
    bool frozen = false;

    std::size_t in_dim() const { return W.cols; }
    std::size_t mid_dim() const { return W.rows; }
    std::size_t out_dim() const { return W_tilde.rows; }

    Vec64 eval(const Vec64& x) const;
    Mat64 jacobian(const Vec64& x) const;

    static AffineSigmaMap identity(std::size_t n);
    static AffineSigmaMap affine(Mat64 W_tilde, Vec64 b_tilde);
};

// One residual branch W_tilde * sigma(W h + b) + b_tilde with W of shape
// m x n_hid and W_tilde of shape n_hid x m.
struct ResidualLayer {
    Mat64 W;
    Mat64 W_tilde;
    Vec64 b;
    Vec64 b_tilde;
    Activation act;
    bool tilde_fixed = false;

    std::size_t m() const { return W.rows; }

    Vec64 eval(const Vec64& h, Vec64* preact_out = nullptr) const;
    // W_tilde * diag(sigma'(preact)) * W
    Mat64 raw_jacobian(const Vec64& preact) const;
};

// Hidden states h_0..h_L and pre-activations a_1..a_L of one forward pass.
struct HiddenTrace {
    std::vector<Vec64> states;
    std::vector<Vec64> preacts;
};

// The two-parameter residual network h_l = eps*h_{l-1} + delta*f_l(h_{l-1}).
// eps = 0 and delta = 0 are representable limit objects (plain feedforward
// composition and pure skip chain respectively).
struct ResNetModel {
    double eps = 1.0;
    double delta = 1.0;
    AffineSigmaMap input;
    std::vector<ResidualLayer> layers;
    AffineSigmaMap output;
    std::size_t n_in = 0;
    std::size_t n_hid = 0;
    std::size_t n_out = 0;

    std::size_t depth() const { return layers.size(); }
    bool non_augmented() const { return n_in >= n_hid; }
    // delta/eps; only defined for eps > 0
    double alpha() const;

    void validate() const;
};

std::pair<Vec64, HiddenTrace> forward(const ResNetModel& model, const Vec64& x);

// Same map assembled from the closed-form sum
//   h_l = eps^l * h_0 + delta * sum_j eps^(l-j) f_j(h_{j-1})
// instead of the recurrence; agrees with forward() to roundoff.
Vec64 forward_unrolled(const ResNetModel& model, const Vec64& x);

// Vector field lin_coeff*h + W_tilde*sigma(W h + b) + b_tilde with
// piecewise-constant parameters over [0, horizon_T]. A single knot makes the
// field autonomous.
struct NeuralOdeSpec {
    std::vector<ResidualLayer> knots;
    std::vector<double> knot_times; // ascending, knot_times[0] == 0
    double horizon_T = 1.0;
    double lin_coeff = 0.0;
    AffineSigmaMap input;
    AffineSigmaMap output;

    std::size_t n_hid() const { return knots.empty() ? 0 : knots.front().W.cols; }
    const ResidualLayer& params_at(double t) const;
    Vec64 field(const Vec64& h, double t) const;
};

enum class OdeMethod { Euler, Rk4 };

// Fixed-step integration of the hidden flow, then the output transform.
Vec64 integrate_node(const NeuralOdeSpec& spec, const Vec64& x, std::size_t steps,
                     OdeMethod method);

// Explicit Euler with step T/L, parameters sampled at the left endpoint of
// each step. The skip coefficient absorbs the linear field term:
// eps = 1 + delta*lin_coeff.
ResNetModel euler_discretize(const NeuralOdeSpec& spec, std::size_t L);

// Inverse construction: represents the network as the flow of
// (eps-1)/delta * h + f(h, theta(t)) over [0, L*delta]. Euler discretization
// with L steps reproduces the network exactly. Requires delta > 0 and layers
// of equal shape.
NeuralOdeSpec embed_resnet_as_node(const ResNetModel& model);

// The eps = 0 limit object: the plain feedforward composition with the same
// layers (the comparison target of the skip-channel proximity bound).
ResNetModel resnet_to_mlp(const ResNetModel& model);

// Flat JSON round-trip. Schema:
// {eps, delta, n_in, n_hid, n_out, activation,
//  input:{W,W_tilde,b,b_tilde,affine_only}, layers:[{W,W_tilde,b,b_tilde}],
//  output:{...}} with matrices as row-major arrays.
std::string to_json(const ResNetModel& model);
ResNetModel model_from_json(const std::string& text);
void save_model(const ResNetModel& model, const std::string& path);
ResNetModel load_model(const std::string& path);

} // namespace rnl
