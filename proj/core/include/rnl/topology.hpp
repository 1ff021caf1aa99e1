#pragma once

// Grid-based level-set analysis of scalar maps: connected components of strict
// sub-/super-level sets, boundary contact, tunnel verdicts, critical-point
// search, and an SVG renderer for two-class level-set figures.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "rnl/common.hpp"
#include "rnl/models.hpp"

namespace rnl {

using ScalarField = std::function<double(const Vec64&)>;

// Regular lattice over a box. resolution[d] >= 2 points per axis; component
// analysis supports dim 1 and 2, evaluation any dim. Storage is row-major
// with the last axis fastest.
struct GridDomain {
    Vec64 lo;
    Vec64 hi;
    std::vector<std::size_t> resolution;

    std::size_t dim() const { return resolution.size(); }
    std::size_t total() const;
    double coord(std::size_t axis, std::size_t i) const;
    Vec64 point(std::size_t flat) const;
    std::size_t nearest_index(const Vec64& x) const; // nearest lattice point, clamped
    void validate() const; // throws DimError / std::invalid_argument
};

// field[flat] = f(point(flat)). Throws NumericError naming the lattice index
// on a non-finite value. Parallel over RESNETLAB_THREADS.
Vec64 evaluate_grid(const ScalarField& f, const GridDomain& g);

struct ComponentInfo {
    std::size_t cell_count = 0;
    bool touches_boundary = false;
    bool bounded = false; // == !touches_boundary
};

enum class TunnelVerdict { TunnelPresent, BoundedComponentExists, Empty };

std::string tunnel_verdict_name(TunnelVerdict v);

struct LevelSetReport {
    double level_c = 0.0;
    std::vector<ComponentInfo> components_sub;
    std::vector<ComponentInfo> components_super;
    std::size_t band_cells = 0;
    TunnelVerdict tunnel_verdict = TunnelVerdict::Empty;

    std::string to_json() const;
};

// Components of {f < c} and {f > c} under 4-connectivity (2D) or interval
// adjacency (1D). Cells with |f - c| <= half the max absolute difference to a
// lattice neighbour join the level band instead of either side, so the three
// groups partition the lattice. Verdict: Empty if either strict side has no
// cells; TunnelPresent if neither side owns a bounded component;
// BoundedComponentExists otherwise.
LevelSetReport level_components(const Vec64& field, const GridDomain& g, double c);

// Per-lattice-point view behind level_components. side: -1 strict sub, 0 level
// band, +1 strict super. component[i] indexes the matching side's list (first-
// occurrence order, the same order level_components reports), -1 on band cells.
struct LevelSetLabeling {
    std::vector<int> side;
    std::vector<long> component;
    std::vector<ComponentInfo> components_sub;
    std::vector<ComponentInfo> components_super;
};

LevelSetLabeling label_level_sets(const Vec64& field, const GridDomain& g, double c);

// True iff the boundary lattice values straddle c (min <= c <= max), i.e. the
// level set provably meets the domain boundary on a connected boundary.
bool level_hits_domain_boundary(const Vec64& field, const GridDomain& g, double c);

// 1D interior-containment check on [lo, hi]: true iff every nonempty strict
// sub-/super-level set of the sampled map reaches an endpoint cell; false as
// soon as one nonempty side sits entirely in the interior.
bool tunnel_check_1d(const ScalarField& f, double lo, double hi, double c,
                     std::size_t resolution = 1001);

struct CriticalSearchResult {
    bool found = false;
    Vec64 location;
    double grad_norm = 0.0; // inf-norm of the input gradient at location
    bool refined = false;
    std::string note;
};

// Coarse scan of the input-gradient inf-norm over the lattice, then damped
// Newton on the squared gradient norm from the best few cells (finite-
// difference Hessian, step halving on non-decrease, iterates clamped to the
// box). found iff the refined gradient inf-norm drops below tol.
CriticalSearchResult critical_point_search(const ResNetModel& model, const GridDomain& g,
                                           double tol = 1e-8);

// Threshold on raw outputs maximising 0/1 accuracy for labels in {0, 1} with
// the predict-1-iff-output>c convention. Ties: 0.5 wins if it attains the
// maximum, else the midpoint of the widest optimal threshold interval.
// Single-class input degenerates to the midpoint of the output range.
double decision_boundary_level(const Vec64& outputs, const std::vector<int>& labels);

struct LabeledPoint2D {
    double x0 = 0.0;
    double x1 = 0.0;
    int label = 0;
};

// Self-contained SVG: per-row run-length rectangles coloured by side of c,
// marching-squares contour at c, optional data-point overlay. 2D grids only.
std::string render_level_set_svg(const Vec64& field, const GridDomain& g, double c,
                                 const std::vector<LabeledPoint2D>& points = {});

} // namespace rnl
