#include "rnl/topology.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "parallel.hpp"
#include "rnl/gradients.hpp"

namespace rnl {

namespace {

// ---- lattice helpers --------------------------------------------------

std::vector<std::size_t> unflatten(std::size_t flat, const std::vector<std::size_t>& res) {
    std::vector<std::size_t> idx(res.size());
    for (std::size_t d = res.size(); d-- > 0;) {
        idx[d] = flat % res[d];
        flat /= res[d];
    }
    return idx;
}

bool on_lattice_boundary(const std::vector<std::size_t>& idx, const std::vector<std::size_t>& res) {
    for (std::size_t d = 0; d < idx.size(); ++d)
        if (idx[d] == 0 || idx[d] + 1 == res[d]) return true;
    return false;
}

// Neighbours along each axis (up to 2*dim), returned as flat indices.
template <typename Fn>
void for_each_neighbour(std::size_t flat, const GridDomain& g, Fn&& fn) {
    const auto idx = unflatten(flat, g.resolution);
    std::size_t stride = 1;
    for (std::size_t d = g.dim(); d-- > 0;) {
        if (idx[d] > 0) fn(flat - stride);
        if (idx[d] + 1 < g.resolution[d]) fn(flat + stride);
        stride *= g.resolution[d];
    }
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

// Side assignment: -1 strict sub, +1 strict super, 0 level band. A cell joins
// the band when |f - c| is at most half its largest jump to a neighbour, which
// also absorbs exact hits f == c.
std::vector<int> assign_sides(const Vec64& field, const GridDomain& g, double c) {
    std::vector<int> side(field.size(), 0);
    for (std::size_t i = 0; i < field.size(); ++i) {
        double jump = 0.0;
        for_each_neighbour(i, g, [&](std::size_t j) {
            jump = std::max(jump, std::abs(field[i] - field[j]));
        });
        if (std::abs(field[i] - c) <= 0.5 * jump) continue;
        side[i] = field[i] < c ? -1 : 1;
    }
    return side;
}

std::vector<ComponentInfo> collect_components(const std::vector<int>& side, int want,
                                              const GridDomain& g,
                                              std::vector<long>* label = nullptr) {
    UnionFind uf(side.size());
    for (std::size_t i = 0; i < side.size(); ++i) {
        if (side[i] != want) continue;
        for_each_neighbour(i, g, [&](std::size_t j) {
            if (side[j] == want) uf.unite(i, j);
        });
    }
    std::vector<std::size_t> slot(side.size(), std::numeric_limits<std::size_t>::max());
    std::vector<ComponentInfo> out; // first-occurrence order
    for (std::size_t i = 0; i < side.size(); ++i) {
        if (side[i] != want) continue;
        const std::size_t r = uf.find(i);
        if (slot[r] == std::numeric_limits<std::size_t>::max()) {
            slot[r] = out.size();
            out.push_back({});
        }
        if (label) (*label)[i] = static_cast<long>(slot[r]);
        ComponentInfo& comp = out[slot[r]];
        comp.cell_count += 1;
        if (on_lattice_boundary(unflatten(i, g.resolution), g.resolution))
            comp.touches_boundary = true;
    }
    for (ComponentInfo& comp : out) comp.bounded = !comp.touches_boundary;
    return out;
}

// ---- small dense solve for the Newton step -----------------------------

bool solve_linear(std::vector<double> A, Vec64 rhs, Vec64& out) {
    const std::size_t n = rhs.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(A[r * n + k]) > std::abs(A[piv * n + k])) piv = r;
        if (std::abs(A[piv * n + k]) < 1e-14) return false;
        if (piv != k) {
            for (std::size_t cidx = 0; cidx < n; ++cidx) std::swap(A[k * n + cidx], A[piv * n + cidx]);
            std::swap(rhs[k], rhs[piv]);
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            const double m = A[r * n + k] / A[k * n + k];
            for (std::size_t cidx = k; cidx < n; ++cidx) A[r * n + cidx] -= m * A[k * n + cidx];
            rhs[r] -= m * rhs[k];
        }
    }
    out.assign(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double s = rhs[k];
        for (std::size_t cidx = k + 1; cidx < n; ++cidx) s -= A[k * n + cidx] * out[cidx];
        out[k] = s / A[k * n + k];
        if (!std::isfinite(out[k])) return false;
    }
    return true;
}

} // namespace

// ---- GridDomain ---------------------------------------------------------

std::size_t GridDomain::total() const {
    std::size_t n = 1;
    for (std::size_t r : resolution) n *= r;
    return n;
}

double GridDomain::coord(std::size_t axis, std::size_t i) const {
    const double t = static_cast<double>(i) / static_cast<double>(resolution[axis] - 1);
    return lo[axis] + t * (hi[axis] - lo[axis]);
}

Vec64 GridDomain::point(std::size_t flat) const {
    const auto idx = unflatten(flat, resolution);
    Vec64 x(dim());
    for (std::size_t d = 0; d < dim(); ++d) x[d] = coord(d, idx[d]);
    return x;
}

std::size_t GridDomain::nearest_index(const Vec64& x) const {
    if (x.size() != dim()) throw DimError("GridDomain::nearest_index: rank mismatch");
    std::size_t flat = 0;
    for (std::size_t d = 0; d < dim(); ++d) {
        const double t = (x[d] - lo[d]) / (hi[d] - lo[d]);
        const double steps = t * static_cast<double>(resolution[d] - 1);
        const long i =
            std::clamp<long>(std::lround(steps), 0, static_cast<long>(resolution[d]) - 1);
        flat = flat * resolution[d] + static_cast<std::size_t>(i);
    }
    return flat;
}

void GridDomain::validate() const {
    if (lo.size() != hi.size() || lo.size() != resolution.size())
        throw DimError("GridDomain: lo/hi/resolution rank mismatch");
    if (resolution.empty()) throw std::invalid_argument("GridDomain: empty");
    for (std::size_t d = 0; d < dim(); ++d) {
        if (!(lo[d] < hi[d])) throw std::invalid_argument("GridDomain: lo < hi required");
        if (resolution[d] < 2) throw std::invalid_argument("GridDomain: resolution >= 2 required");
    }
}

// ---- grid evaluation ------------------------------------------------------

Vec64 evaluate_grid(const ScalarField& f, const GridDomain& g) {
    g.validate();
    const std::size_t n = g.total();
    Vec64 field(n);
    std::atomic<std::size_t> first_bad{n};
    detail::parallel_for(n, [&](std::size_t i) {
        const double v = f(g.point(i));
        field[i] = v;
        if (!std::isfinite(v)) {
            std::size_t cur = first_bad.load();
            while (i < cur && !first_bad.compare_exchange_weak(cur, i)) {
            }
        }
    });
    if (first_bad.load() != n)
        throw NumericError("evaluate_grid: non-finite value at lattice index " +
                           std::to_string(first_bad.load()));
    return field;
}

// ---- level-set components -------------------------------------------------

std::string tunnel_verdict_name(TunnelVerdict v) {
    switch (v) {
    case TunnelVerdict::TunnelPresent: return "TunnelPresent";
    case TunnelVerdict::BoundedComponentExists: return "BoundedComponentExists";
    default: return "Empty";
    }
}

LevelSetLabeling label_level_sets(const Vec64& field, const GridDomain& g, double c) {
    g.validate();
    if (g.dim() > 2)
        throw std::invalid_argument("label_level_sets: component analysis is 1D/2D only");
    if (field.size() != g.total()) throw DimError("label_level_sets: field size != lattice size");

    LevelSetLabeling lab;
    lab.side = assign_sides(field, g, c);
    lab.component.assign(field.size(), -1);
    lab.components_sub = collect_components(lab.side, -1, g, &lab.component);
    lab.components_super = collect_components(lab.side, 1, g, &lab.component);
    return lab;
}

LevelSetReport level_components(const Vec64& field, const GridDomain& g, double c) {
    LevelSetLabeling lab = label_level_sets(field, g, c);

    LevelSetReport rep;
    rep.level_c = c;
    rep.components_sub = std::move(lab.components_sub);
    rep.components_super = std::move(lab.components_super);
    rep.band_cells =
        static_cast<std::size_t>(std::count(lab.side.begin(), lab.side.end(), 0));

    const bool sub_empty = rep.components_sub.empty();
    const bool super_empty = rep.components_super.empty();
    if (sub_empty || super_empty) {
        rep.tunnel_verdict = TunnelVerdict::Empty;
        return rep;
    }
    const auto has_bounded = [](const std::vector<ComponentInfo>& cs) {
        return std::any_of(cs.begin(), cs.end(), [](const ComponentInfo& ci) { return ci.bounded; });
    };
    rep.tunnel_verdict = (has_bounded(rep.components_sub) || has_bounded(rep.components_super))
                             ? TunnelVerdict::BoundedComponentExists
                             : TunnelVerdict::TunnelPresent;
    return rep;
}

std::string LevelSetReport::to_json() const {
    nlohmann::ordered_json j;
    j["level_c"] = level_c;
    const auto dump_side = [](const std::vector<ComponentInfo>& cs) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const ComponentInfo& ci : cs)
            arr.push_back({{"cell_count", ci.cell_count},
                           {"touches_boundary", ci.touches_boundary},
                           {"bounded", ci.bounded}});
        return arr;
    };
    j["components_sub"] = dump_side(components_sub);
    j["components_super"] = dump_side(components_super);
    j["band_cells"] = band_cells;
    j["tunnel_verdict"] = tunnel_verdict_name(tunnel_verdict);
    return j.dump(2);
}

bool level_hits_domain_boundary(const Vec64& field, const GridDomain& g, double c) {
    g.validate();
    if (field.size() != g.total())
        throw DimError("level_hits_domain_boundary: field size != lattice size");
    double bmin = std::numeric_limits<double>::infinity();
    double bmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (!on_lattice_boundary(unflatten(i, g.resolution), g.resolution)) continue;
        bmin = std::min(bmin, field[i]);
        bmax = std::max(bmax, field[i]);
    }
    return bmin <= c && c <= bmax;
}

bool tunnel_check_1d(const ScalarField& f, double lo, double hi, double c,
                     std::size_t resolution) {
    GridDomain g{{lo}, {hi}, {resolution}};
    const Vec64 field = evaluate_grid(f, g);
    const std::vector<int> side = assign_sides(field, g, c);

    bool sub_nonempty = false, super_nonempty = false;
    bool sub_at_end = false, super_at_end = false;
    for (std::size_t i = 0; i < side.size(); ++i) {
        const bool endpoint = (i == 0 || i + 1 == side.size());
        if (side[i] < 0) {
            sub_nonempty = true;
            sub_at_end = sub_at_end || endpoint;
        } else if (side[i] > 0) {
            super_nonempty = true;
            super_at_end = super_at_end || endpoint;
        }
    }
    const bool sub_ok = !sub_nonempty || sub_at_end;
    const bool super_ok = !super_nonempty || super_at_end;
    return sub_ok && super_ok;
}

// ---- critical-point search --------------------------------------------------

namespace {

double grad_inf_at(const ResNetModel& model, const Vec64& x) {
    return inf_norm_vec(input_gradient(model, x).grad);
}

double grad_sq_at(const ResNetModel& model, const Vec64& x) {
    const Vec64 gv = input_gradient(model, x).grad;
    double s = 0.0;
    for (double v : gv) s += v * v;
    return s;
}

Vec64 clamp_to_box(Vec64 x, const GridDomain& g) {
    for (std::size_t d = 0; d < x.size(); ++d) x[d] = std::clamp(x[d], g.lo[d], g.hi[d]);
    return x;
}

// One damped Newton descent on |grad|^2 from seed. Returns achieved point.
struct RefineOut {
    Vec64 x;
    double ginf;
    bool moved = false;
    bool stalled = false;
};

RefineOut refine_seed(const ResNetModel& model, const GridDomain& g, Vec64 x, double tol) {
    const std::size_t n = x.size();
    RefineOut out;
    double fx = grad_sq_at(model, x);
    for (int iter = 0; iter < 100; ++iter) {
        if (grad_inf_at(model, x) < tol) break;

        Vec64 h(n);
        for (std::size_t d = 0; d < n; ++d) h[d] = 1e-5 * (1.0 + std::abs(x[d]));

        Vec64 gp(n), gm(n), grad(n);
        for (std::size_t d = 0; d < n; ++d) {
            Vec64 xp = x, xm = x;
            xp[d] += h[d];
            xm[d] -= h[d];
            gp[d] = grad_sq_at(model, xp);
            gm[d] = grad_sq_at(model, xm);
            grad[d] = (gp[d] - gm[d]) / (2.0 * h[d]);
        }

        std::vector<double> H(n * n, 0.0);
        for (std::size_t d = 0; d < n; ++d)
            H[d * n + d] = (gp[d] - 2.0 * fx + gm[d]) / (h[d] * h[d]);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                Vec64 xpp = x, xpm = x, xmp = x, xmm = x;
                xpp[a] += h[a]; xpp[b] += h[b];
                xpm[a] += h[a]; xpm[b] -= h[b];
                xmp[a] -= h[a]; xmp[b] += h[b];
                xmm[a] -= h[a]; xmm[b] -= h[b];
                const double v = (grad_sq_at(model, xpp) - grad_sq_at(model, xpm) -
                                  grad_sq_at(model, xmp) + grad_sq_at(model, xmm)) /
                                 (4.0 * h[a] * h[b]);
                H[a * n + b] = H[b * n + a] = v;
            }
        }

        Vec64 step;
        Vec64 neg_grad(n);
        for (std::size_t d = 0; d < n; ++d) neg_grad[d] = -grad[d];
        bool newton_ok = solve_linear(H, neg_grad, step);
        if (newton_ok) {
            double dot = 0.0;
            for (std::size_t d = 0; d < n; ++d) dot += step[d] * grad[d];
            if (!(dot < 0.0)) newton_ok = false; // not a descent direction
        }
        if (!newton_ok) step = neg_grad;

        double t = 1.0;
        bool accepted = false;
        while (t > 1e-14) {
            Vec64 xt(n);
            for (std::size_t d = 0; d < n; ++d) xt[d] = x[d] + t * step[d];
            xt = clamp_to_box(std::move(xt), g);
            const double ft = grad_sq_at(model, xt);
            if (ft < fx) {
                x = std::move(xt);
                fx = ft;
                accepted = true;
                out.moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            out.stalled = true;
            break;
        }
    }
    out.x = std::move(x);
    out.ginf = grad_inf_at(model, out.x);
    return out;
}

} // namespace

CriticalSearchResult critical_point_search(const ResNetModel& model, const GridDomain& g,
                                           double tol) {
    g.validate();
    if (model.n_out != 1)
        throw std::invalid_argument("critical_point_search: scalar-output model required");
    if (g.dim() != static_cast<std::size_t>(model.n_in))
        throw DimError("critical_point_search: grid rank != model input dim");

    const std::size_t n = g.total();
    Vec64 norms(n);
    detail::parallel_for(n, [&](std::size_t i) { norms[i] = grad_inf_at(model, g.point(i)); });

    // Best few lattice points seed the local refinement.
    const std::size_t n_seeds = std::min<std::size_t>(5, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_seeds),
                      order.end(),
                      [&](std::size_t a, std::size_t b) { return norms[a] < norms[b]; });

    CriticalSearchResult res;
    res.location = g.point(order[0]);
    res.grad_norm = norms[order[0]];
    bool any_stall = false;
    for (std::size_t s = 0; s < n_seeds; ++s) {
        RefineOut r = refine_seed(model, g, g.point(order[s]), tol);
        any_stall = any_stall || r.stalled;
        if (r.ginf < res.grad_norm) {
            res.grad_norm = r.ginf;
            res.location = r.x;
            res.refined = r.moved;
        }
    }
    res.found = res.grad_norm < tol;
    if (res.found)
        res.note = "gradient norm below tolerance";
    else
        res.note = any_stall ? "refinement stalled above tolerance" : "no candidate below tolerance";
    return res;
}

// ---- decision threshold -----------------------------------------------------

double decision_boundary_level(const Vec64& outputs, const std::vector<int>& labels) {
    if (outputs.size() != labels.size())
        throw DimError("decision_boundary_level: outputs/labels size mismatch");
    if (outputs.empty()) throw std::invalid_argument("decision_boundary_level: empty input");

    const auto [mn_it, mx_it] = std::minmax_element(outputs.begin(), outputs.end());
    const bool has0 = std::find(labels.begin(), labels.end(), 0) != labels.end();
    const bool has1 = std::find(labels.begin(), labels.end(), 1) != labels.end();
    if (!has0 || !has1) return 0.5 * (*mn_it + *mx_it);

    std::vector<std::pair<double, int>> pts(outputs.size());
    for (std::size_t i = 0; i < outputs.size(); ++i) pts[i] = {outputs[i], labels[i]};
    std::sort(pts.begin(), pts.end());

    const double N = static_cast<double>(pts.size());
    const std::size_t total1 =
        static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));

    // Accuracy of "predict 1 iff output > c" is constant between consecutive
    // distinct output values; sweep the breakpoints.
    struct Interval {
        double lo, hi; // threshold interval [lo, hi)
        double acc;
    };
    std::vector<Interval> intervals;
    const double spread = std::max(*mx_it - *mn_it, 1.0);
    std::size_t n0_le = 0, n1_gt = total1;
    intervals.push_back({*mn_it - spread, *mn_it, static_cast<double>(n1_gt) / N});
    std::size_t i = 0;
    while (i < pts.size()) {
        const double v = pts[i].first;
        while (i < pts.size() && pts[i].first == v) {
            if (pts[i].second == 0)
                ++n0_le;
            else
                --n1_gt;
            ++i;
        }
        const double next = (i < pts.size()) ? pts[i].first : v + spread;
        intervals.push_back({v, next, static_cast<double>(n0_le + n1_gt) / N});
    }

    double best_acc = 0.0;
    for (const Interval& iv : intervals) best_acc = std::max(best_acc, iv.acc);
    for (const Interval& iv : intervals)
        if (iv.acc == best_acc && iv.lo <= 0.5 && 0.5 < iv.hi) return 0.5;

    const Interval* pick = nullptr;
    for (const Interval& iv : intervals) {
        if (iv.acc != best_acc) continue;
        if (!pick || iv.hi - iv.lo > pick->hi - pick->lo) pick = &iv;
    }
    return 0.5 * (pick->lo + pick->hi);
}

// ---- SVG rendering ----------------------------------------------------------

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

std::string render_level_set_svg(const Vec64& field, const GridDomain& g, double c,
                                 const std::vector<LabeledPoint2D>& points) {
    g.validate();
    if (g.dim() != 2) throw DimError("render_level_set_svg: 2D grid required");
    if (field.size() != g.total()) throw DimError("render_level_set_svg: field size mismatch");

    const std::size_t r0 = g.resolution[0], r1 = g.resolution[1];
    const double W = 640.0;
    const double aspect = (g.hi[1] - g.lo[1]) / (g.hi[0] - g.lo[0]);
    const double H = std::clamp(W * aspect, 160.0, 1280.0);
    const auto px = [&](double x) { return (x - g.lo[0]) / (g.hi[0] - g.lo[0]) * W; };
    const auto py = [&](double y) { return H - (y - g.lo[1]) / (g.hi[1] - g.lo[1]) * H; };
    const auto at = [&](std::size_t i, std::size_t j) { return field[i * r1 + j]; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(W) << "\" height=\""
        << fmt(H) << "\" viewBox=\"0 0 " << fmt(W) << ' ' << fmt(H) << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

    // Class fill: one rect per run of same-side cells within a row of cells.
    const char* col_sub = "#9dbce8";
    const char* col_super = "#f2b173";
    for (std::size_t j = 0; j + 1 < r1; ++j) {
        std::size_t run_start = 0;
        int run_side = 0;
        const auto cell_side = [&](std::size_t i) {
            const double avg = 0.25 * (at(i, j) + at(i + 1, j) + at(i, j + 1) + at(i + 1, j + 1));
            return avg > c ? 1 : -1;
        };
        const auto flush = [&](std::size_t end) {
            if (end == run_start) return;
            const double x0 = px(g.coord(0, run_start));
            const double x1 = px(g.coord(0, end));
            const double y_top = py(g.coord(1, j + 1));
            const double y_bot = py(g.coord(1, j));
            svg << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y_top) << "\" width=\""
                << fmt(x1 - x0) << "\" height=\"" << fmt(y_bot - y_top) << "\" fill=\""
                << (run_side > 0 ? col_super : col_sub) << "\"/>\n";
        };
        for (std::size_t i = 0; i + 1 < r0; ++i) {
            const int s = cell_side(i);
            if (i == run_start) {
                run_side = s;
            } else if (s != run_side) {
                flush(i);
                run_start = i;
                run_side = s;
            }
        }
        flush(r0 - 1);
    }

    // Marching-squares contour at c, one short segment list per crossing cell.
    svg << "<path fill=\"none\" stroke=\"#222222\" stroke-width=\"1.2\" d=\"";
    for (std::size_t i = 0; i + 1 < r0; ++i) {
        for (std::size_t j = 0; j + 1 < r1; ++j) {
            const double f00 = at(i, j), f10 = at(i + 1, j);
            const double f11 = at(i + 1, j + 1), f01 = at(i, j + 1);
            const int code = (f00 > c ? 1 : 0) | (f10 > c ? 2 : 0) | (f11 > c ? 4 : 0) |
                             (f01 > c ? 8 : 0);
            if (code == 0 || code == 15) continue;
            const double x0 = g.coord(0, i), x1 = g.coord(0, i + 1);
            const double y0 = g.coord(1, j), y1 = g.coord(1, j + 1);
            const auto lerp = [](double a, double b, double fa, double fb, double lv) {
                const double d = fb - fa;
                return d == 0.0 ? 0.5 * (a + b) : a + (lv - fa) / d * (b - a);
            };
            // Edge midpoints: 0 bottom, 1 right, 2 top, 3 left.
            const double ex[4] = {lerp(x0, x1, f00, f10, c), x1, lerp(x0, x1, f01, f11, c), x0};
            const double ey[4] = {y0, lerp(y0, y1, f10, f11, c), y1, lerp(y0, y1, f00, f01, c)};
            const auto seg = [&](int a, int b) {
                svg << 'M' << fmt(px(ex[a])) << ' ' << fmt(py(ey[a])) << 'L' << fmt(px(ex[b]))
                    << ' ' << fmt(py(ey[b]));
            };
            switch (code) {
            case 1: case 14: seg(3, 0); break;
            case 2: case 13: seg(0, 1); break;
            case 3: case 12: seg(3, 1); break;
            case 4: case 11: seg(1, 2); break;
            case 6: case 9: seg(0, 2); break;
            case 7: case 8: seg(3, 2); break;
            case 5:
            case 10: {
                const double center = 0.25 * (f00 + f10 + f11 + f01);
                const bool join = (center > c) == (code == 5);
                if (join) {
                    seg(3, 0);
                    seg(1, 2);
                } else {
                    seg(0, 1);
                    seg(3, 2);
                }
                break;
            }
            default: break;
            }
        }
    }
    svg << "\"/>\n";

    for (const LabeledPoint2D& p : points) {
        svg << "<circle cx=\"" << fmt(px(p.x0)) << "\" cy=\"" << fmt(py(p.x1))
            << "\" r=\"2.2\" fill=\"" << (p.label ? "#b5541a" : "#1f4e9c")
            << "\" stroke=\"#ffffff\" stroke-width=\"0.5\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace rnl
