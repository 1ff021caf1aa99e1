#pragma once

// Random model and field generators for randomized checking harnesses.

#include <cstdint>
#include <utility>

#include "rnl/models.hpp"
#include "rnl/rng.hpp"

namespace rnl {

struct ModelSampler {
    std::size_t n_in_max = 4;
    std::size_t n_hid_max = 4;
    std::size_t depth_max = 5;
    double weight_range = 2.0;
    double eps_lo = 0.1, eps_hi = 1.5;
    double delta_lo = 0.1, delta_hi = 1.5;
    bool allow_sigmoid = true;
    bool allow_affine_input = true;
    // Force n_in = n_hid = m_l with well-conditioned square weight blocks and
    // a bounded nonlinear input/output pair, so the eps = 0 companion provably
    // has a nowhere-zero input gradient.
    bool square_full_rank = false;
};

// Scalar-output model with random shapes and weights from the sampler ranges.
ResNetModel sample_canonical_model(Rng& rng, const ModelSampler& opt);

// Model plus probe input; draws are rejected until the input gradient at the
// probe clears grad_floor in the inf-norm, so relative FD comparisons stay
// well conditioned.
std::pair<ResNetModel, Vec64> sample_model_with_probe(Rng& rng, const ModelSampler& opt,
                                                      double grad_floor = 1e-4);

// Autonomous canonical field (single knot, lin_coeff = 0) with
// |W|_inf, |W_tilde|_inf <= 1, horizon T <= 1, scalar input and output maps.
NeuralOdeSpec sample_autonomous_spec(Rng& rng, std::size_t n_hid_max = 3);

} // namespace rnl
