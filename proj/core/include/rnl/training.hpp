#pragma once

// Datasets, initialization, Adam, batch norm, and the training loops for the
// 1D regression and 2D classification experiments.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rnl/common.hpp"
#include "rnl/gradients.hpp"
#include "rnl/models.hpp"

namespace rnl {

enum class DatasetKind { Quad1D, Circle2D, Xor2D };

std::string dataset_kind_name(DatasetKind k);
DatasetKind dataset_kind_from_name(const std::string& name);

double psi_circle(double x0, double x1); // x0^2 + x1^2 - 0.5
double psi_xor(double x0, double x1);    // x1^2 - x0^2 - 0.5

struct Dataset {
    std::vector<Vec64> inputs;
    Vec64 targets; // Quad1D: x^2; classification: 0/1
    DatasetKind kind = DatasetKind::Quad1D;
    Box domain;

    std::size_t size() const { return inputs.size(); }
    bool classification() const { return kind != DatasetKind::Quad1D; }
};

// Quad1D: x ~ U(-1,1), y = x^2. Planar kinds: x ~ U(-2.5,2.5)^2, label 1 iff
// Psi(x) > 0.5; draws with |Psi - 0.5| < 0.05 are rejected so the classes
// stay separated by a margin band.
Dataset make_dataset(DatasetKind kind, std::size_t n, std::uint64_t seed);

// x columns then target/label, one row per point.
std::string dataset_csv(const Dataset& data);

// Draws every trainable weight matrix: 1x1 entries from N(0,1), anything
// larger Xavier-uniform over +-sqrt(6/(fan_in+fan_out)). Biases zero. Frozen
// maps and fixed tilde pairs are left untouched.
ResNetModel xavier_init(ResNetModel skeleton, std::uint64_t seed);

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_hat = 1e-8;
};

struct AdamState {
    Vec64 m, v;
    std::uint64_t t = 0;
};

// One bias-corrected Adam update, in place on params. Empty state is
// initialized to the parameter shape on first use.
void adam_step(AdamState& state, const Vec64& grads, Vec64& params, double lr,
               const AdamParams& ap);

struct TrainConfig {
    std::uint64_t seed = 0;
    double lr = 0.01;
    std::size_t batch_size = 0; // 0 = full batch
    std::size_t epochs = 0;
    Loss loss = Loss::Mse;
    bool batch_norm = false;
    AdamParams adam;
};

struct TrainRecord {
    Vec64 epoch_loss;
    Vec64 epoch_accuracy; // classification only, else empty
    double final_accuracy = 0.0;
    double wall_time_sec = 0.0;
    double sign_flip_fraction = 0.0; // trainable scalars whose sign changed
};

// epoch,loss[,accuracy]
std::string train_record_csv(const TrainRecord& rec);

// Per-layer normalization of residual pre-activations. gamma/beta learn with
// the weights; mean/var hold the statistics of the latest pass, and frozen
// marks them as full-dataset statistics suitable for folding.
struct BatchNormState {
    std::vector<Vec64> gamma, beta, mean, var;
    double eps_f = 1e-5;
    bool frozen = false;

    static BatchNormState init(const ResNetModel& model);
};

Vec64 batch_norm_apply(const Vec64& a, const Vec64& mean, const Vec64& var, const Vec64& gamma,
                       const Vec64& beta, double eps_f);

// Absorbs frozen statistics into (W_l, b_l): the folded model's plain forward
// reproduces the normalized forward under those statistics exactly. Throws
// std::logic_error if the statistics were never frozen.
ResNetModel fold_batch_norm(const ResNetModel& model, const BatchNormState& stats);

// Runs train-mode normalization over the whole dataset once and freezes the
// resulting statistics.
void freeze_batch_norm(const ResNetModel& model, BatchNormState& stats,
                       const std::vector<Vec64>& inputs);

// Seeded shuffled mini-batches, Adam updates, optional batch norm. With batch
// norm enabled the returned model is the folded eval form. Classification
// accuracy uses threshold 0.5. Throws NumericError naming epoch and batch if
// the loss leaves the finite range.
std::pair<ResNetModel, TrainRecord> train(const ResNetModel& model, const Dataset& data,
                                          const TrainConfig& cfg);

double classification_accuracy(const ResNetModel& model, const Dataset& data,
                               double threshold = 0.5);

// Scalar chain for the 1D regression protocol: identity input, L tanh units
// with fixed unit out-weights, trainable affine output.
ResNetModel make_1d_regressor(double eps, double delta, std::size_t L);

// Planar classifier: trainable tanh lift to n_hid, L tanh units with fixed
// identity out-weights, sigmoid readout.
ResNetModel make_2d_classifier(double eps, double delta, std::size_t L, std::size_t n_hid);

} // namespace rnl
