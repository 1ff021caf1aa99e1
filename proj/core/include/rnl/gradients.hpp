#pragma once

#include "rnl/models.hpp"

namespace rnl {

// Per-layer pieces of the chain-rule product. D = eps*Id + delta*raw_df with
// raw_df = W_tilde * diag(sigma'(a)) * W; the layer map is full rank exactly
// when -eps/delta is not an eigenvalue of raw_df.
struct LayerJacobian {
    Mat64 D;
    Mat64 raw_df;
};

struct InputGradient {
    Vec64 grad; // n_in
    std::vector<LayerJacobian> per_layer;
};

// Exact gradient of the selected scalar output component with respect to the
// input, assembled as the transposed product
//   (d_out * D_L * ... * D_1 * d_in)^T
// from one forward trace. The one-argument form requires n_out == 1;
// multi-output maps are analyzed one output row at a time.
InputGradient input_gradient(const ResNetModel& model, const Vec64& x, std::size_t out_row);
InputGradient input_gradient(const ResNetModel& model, const Vec64& x);

// Central finite differences (Phi(x+h e_i) - Phi(x-h e_i)) / 2h, the
// independent oracle for input_gradient. Requires n_out == 1.
Vec64 fd_gradient(const ResNetModel& model, const Vec64& x, double h = 1e-5);

enum class Loss { Mse, Bce };

struct MapGrads {
    Mat64 dW;
    Mat64 dW_tilde;
    Vec64 db;
    Vec64 db_tilde;
};

struct ParamGrads {
    MapGrads input;
    std::vector<MapGrads> layers;
    MapGrads output;
};

ParamGrads zero_grads(const ResNetModel& model);

// Backpropagates dy through one transform evaluated at x, accumulating its
// parameter gradients into g; returns dL/dx.
Vec64 map_backward(const AffineSigmaMap& m, const Vec64& x, const Vec64& dy, MapGrads& g);

// True when the output transform is sigmoid(w . h + b) with a fixed unit
// tilde part, so bce backward can seed at the pre-sigmoid value.
bool bce_shortcut_applies(const ResNetModel& model);

// Exact reverse-mode gradient of the mean loss over the batch with respect
// to every W, W_tilde, b, b_tilde (input and output transforms included).
// Scalar outputs only. Bce requires a sigmoid output transform.
ParamGrads param_gradient(const ResNetModel& model, const std::vector<Vec64>& xs,
                          const std::vector<double>& targets, Loss loss);

double loss_value(const ResNetModel& model, const std::vector<Vec64>& xs,
                  const std::vector<double>& targets, Loss loss);

double scalar_loss(double y, double target, Loss loss);

} // namespace rnl
