#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "manifest.hpp"
#include "rnl/bounds.hpp"
#include "rnl/gradients.hpp"
#include "rnl/models.hpp"
#include "rnl/numerics.hpp"
#include "rnl/regimes.hpp"
#include "rnl/rng.hpp"
#include "rnl/sampling.hpp"
#include "rnl/topology.hpp"
#include "rnl/training.hpp"

namespace rnlcli {

namespace {

std::string version_string() {
#ifdef RESNETLAB_VERSION
    return RESNETLAB_VERSION;
#else
    return "0.0.0";
#endif
}

RunManifest start_manifest(const std::string& command, const ConfigMap& cfg,
                           std::uint64_t seed) {
    RunManifest m;
    m.command = command;
    m.config_text = cfg.canonical_text();
    m.config_hash = fnv1a64(m.config_text);
    m.seeds = {seed};
    m.version = version_string();
    return m;
}

void emit(RunManifest& m, const std::string& out_dir, const std::string& name,
          const std::string& content) {
    write_text_file(out_dir + "/" + name, content);
    m.artifacts.push_back(name);
}

rnl::ResNetModel load_model_arg(const ConfigMap& cfg) {
    const std::string path = cfg.get_string("model", "");
    if (path.empty()) throw ConfigError("missing required key 'model' (path to a model JSON file)");
    if (!std::filesystem::exists(path)) throw ConfigError("model file not found: " + path);
    return rnl::load_model(path);
}

rnl::Box domain_arg(const ConfigMap& cfg, std::size_t dim, double lo_def, double hi_def) {
    rnl::Box box;
    box.lo = cfg.get_reals("domain_lo", rnl::Vec64(dim, lo_def));
    box.hi = cfg.get_reals("domain_hi", rnl::Vec64(dim, hi_def));
    if (box.lo.size() != dim || box.hi.size() != dim)
        throw ConfigError("domain_lo/domain_hi must have " + std::to_string(dim) + " entries");
    for (std::size_t d = 0; d < dim; ++d)
        if (!(box.lo[d] < box.hi[d])) throw ConfigError("domain_lo must be below domain_hi");
    return box;
}

std::string fmtg(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

// ---- gradcheck ---------------------------------------------------------------

int cmd_gradcheck(const ConfigMap& cfg, const std::string& out_dir, std::uint64_t seed) {
    const auto count = cfg.get_int("count", 200);
    rnl::ModelSampler opt;
    opt.n_in_max = static_cast<std::size_t>(cfg.get_int("n_in_max", 4));
    opt.n_hid_max = static_cast<std::size_t>(cfg.get_int("n_hid_max", 4));
    opt.depth_max = static_cast<std::size_t>(cfg.get_int("depth_max", 5));
    opt.weight_range = cfg.get_real("weight_range", 2.0);
    const double h = cfg.get_real("fd_step", 1e-5);
    const double tol = cfg.get_real("tol", 1e-6);
    cfg.reject_unknown();
    if (count < 0) throw ConfigError("count must be nonnegative");

    RunManifest man = start_manifest("gradcheck", cfg, seed);

    std::ostringstream csv;
    csv << "index,n_in,n_hid,depth,activation,eps,delta,max_rel_err,pass\n";
    std::size_t fails = 0;
    double worst = 0.0;
    for (std::int64_t i = 0; i < count; ++i) {
        rnl::Rng rng = rnl::substream(seed, 0x67726164, static_cast<std::uint64_t>(i));
        auto [model, probe] = rnl::sample_model_with_probe(rng, opt);
        const rnl::Vec64 exact = rnl::input_gradient(model, probe).grad;
        const rnl::Vec64 fd = rnl::fd_gradient(model, probe, h);
        rnl::Vec64 diff(exact.size());
        for (std::size_t d = 0; d < diff.size(); ++d) diff[d] = exact[d] - fd[d];
        const double rel = rnl::inf_norm_vec(diff) / rnl::inf_norm_vec(exact);
        worst = std::max(worst, rel);
        const bool ok = rel < tol;
        fails += ok ? 0 : 1;
        csv << i << ',' << model.n_in << ',' << model.n_hid << ',' << model.depth() << ','
            << model.layers.front().act.name() << ',' << model.eps << ',' << model.delta << ','
            << fmtg(rel) << ',' << (ok ? 1 : 0) << '\n';
    }
    emit(man, out_dir, "gradcheck.csv", csv.str());
    write_manifest(man, out_dir);

    if (count == 0) {
        std::printf("gradcheck: warning: empty sweep, nothing checked\n");
        return 0;
    }
    std::printf("gradcheck: %lld/%lld pass, max rel err %.3e (tol %.1e)\n",
                static_cast<long long>(count - static_cast<std::int64_t>(fails)),
                static_cast<long long>(count), worst, tol);
    return fails == 0 ? 0 : 3;
}

// ---- regime -------------------------------------------------------------------

int cmd_regime(const ConfigMap& cfg, const std::string& out_dir, std::uint64_t seed) {
    const rnl::ResNetModel model = load_model_arg(cfg);
    const rnl::Box box = domain_arg(cfg, model.n_in, -1.0, 1.0);
    const bool do_search = cfg.get_bool("search", false);
    const auto resolution = static_cast<std::size_t>(cfg.get_int("resolution", 41));
    const double tol = cfg.get_real("tol", 1e-8);
    cfg.reject_unknown();

    RunManifest man = start_manifest("regime", cfg, seed);

    rnl::RegimeReport rep;
    try {
        rep = rnl::classify_regime(model, box);
    } catch (const std::invalid_argument& e) {
        std::printf("regime: verdict inapplicable (augmented): %s\n", e.what());
        return 2;
    }

    std::printf("regime: K_sigma=%s k_sigma=%s nu_max=%s nu_min=%s alpha=%s\n",
                fmtg(rep.constants.K_sigma).c_str(), fmtg(rep.constants.k_sigma).c_str(),
                fmtg(rep.constants.nu_max).c_str(), fmtg(rep.constants.nu_min).c_str(),
                fmtg(rep.constants.alpha).c_str());
    std::printf("regime: thresholds: alpha < %s excludes (skip side), alpha > %s excludes "
                "(residual side)\n",
                fmtg(rep.threshold_lo).c_str(), fmtg(rep.threshold_hi).c_str());
    std::printf("regime: verdict %s\n", rnl::regime_verdict_name(rep.verdict).c_str());

    nlohmann::ordered_json j = nlohmann::ordered_json::parse(rep.to_json());

    int rc = 0;
    if (do_search) {
        rnl::GridDomain g{box.lo, box.hi,
                          std::vector<std::size_t>(model.n_in, resolution)};
        const rnl::CriticalSearchResult sr = rnl::critical_point_search(model, g, tol);
        std::printf("regime: search %s, min |grad|_inf = %s (%s)\n",
                    sr.found ? "found a critical point" : "found no critical point",
                    fmtg(sr.grad_norm).c_str(), sr.note.c_str());
        nlohmann::ordered_json js;
        js["found"] = sr.found;
        js["grad_norm"] = sr.grad_norm;
        js["location"] = sr.location;
        js["note"] = sr.note;
        j["search"] = js;
        const bool excluded = rep.node_side_excluded || rep.mlp_side_excluded;
        if (excluded && sr.found) {
            std::printf("regime: VERDICT CONTRADICTION: critical point located inside an "
                        "excluded regime\n");
            rc = 3;
        }
    }

    emit(man, out_dir, "regime.json", j.dump(2) + "\n");
    write_manifest(man, out_dir);
    return rc;
}

// ---- bounds -------------------------------------------------------------------

namespace {

std::vector<rnl::BoundReport> euler_sweep(const ConfigMap& cfg, std::uint64_t seed) {
    const auto specs = cfg.get_int("specs", 1);
    const auto l_values = cfg.get_ints("L_values", {5, 10, 20, 40});
    const auto grid_points = static_cast<std::size_t>(cfg.get_int("grid_points", 201));
    const auto n_hid_max = static_cast<std::size_t>(cfg.get_int("n_hid_max", 3));
    cfg.reject_unknown();
    if (specs < 1) throw ConfigError("specs must be positive");
    for (auto L : l_values)
        if (L < 1) throw ConfigError("L_values entries must be positive");

    std::vector<rnl::BoundReport> rows;
    for (std::int64_t s = 0; s < specs; ++s) {
        rnl::Rng rng = rnl::substream(seed, 0xe01e, static_cast<std::uint64_t>(s));
        const rnl::NeuralOdeSpec spec = rnl::sample_autonomous_spec(rng, n_hid_max);
        const rnl::CanonicalFieldConstants consts = rnl::field_constants(spec);
        const double K_lt = rnl::map_lipschitz_inf(spec.output);
        const rnl::Box box{{-1.0}, {1.0}};
        for (auto L : l_values) {
            const auto steps = static_cast<std::size_t>(L);
            const double delta = spec.horizon_T / static_cast<double>(steps);
            const rnl::ResNetModel disc = rnl::euler_discretize(spec, steps);
            const auto euler_eval = [&](const rnl::Vec64& x) { return rnl::forward(disc, x).first; };
            const auto ref_eval = [&](const rnl::Vec64& x) {
                return rnl::integrate_node(spec, x, 10 * steps, rnl::OdeMethod::Rk4);
            };
            const double emp = rnl::empirical_sup_distance(euler_eval, ref_eval, box, {grid_points});
            const double theo = rnl::euler_bound_canonical(consts, K_lt, spec.horizon_T, delta);
            rows.push_back(rnl::make_bound_report("euler", delta, steps, theo, emp, grid_points, box));
        }
    }
    return rows;
}

std::vector<rnl::BoundReport> mlp_sweep(const ConfigMap& cfg, std::uint64_t seed) {
    const auto count = cfg.get_int("count", 1);
    const auto eps_values = cfg.get_reals("eps_values", {0.1, 0.05, 0.01});
    const auto grid_points = static_cast<std::size_t>(cfg.get_int("grid_points", 41));
    rnl::ModelSampler opt;
    opt.n_in_max = static_cast<std::size_t>(cfg.get_int("n_in_max", 2));
    opt.n_hid_max = static_cast<std::size_t>(cfg.get_int("n_hid_max", 2));
    opt.depth_max = static_cast<std::size_t>(cfg.get_int("depth_max", 3));
    opt.weight_range = cfg.get_real("weight_range", 0.8);
    opt.delta_lo = cfg.get_real("delta_lo", 0.2);
    opt.delta_hi = cfg.get_real("delta_hi", 0.5);
    opt.allow_affine_input = false; // the bound needs a bounded input transform
    cfg.reject_unknown();
    if (count < 1) throw ConfigError("count must be positive");
    for (double e : eps_values)
        if (!(e > 0.0 && e < 1.0))
            throw ConfigError("mlp sweep requires every eps in (0, 1), got " + fmtg(e));

    std::vector<rnl::BoundReport> rows;
    for (std::int64_t m = 0; m < count; ++m) {
        rnl::Rng rng = rnl::substream(seed, 0xa11f, static_cast<std::uint64_t>(m));
        rnl::ResNetModel model = rnl::sample_canonical_model(rng, opt);

        // Per-map constants off the sampled weights: sharper than one uniform
        // weight bound, still rigorous.
        const double S_sig = model.input.act.S();
        const double S_lambda =
            rnl::inf_norm_mat(model.input.W_tilde) * S_sig + rnl::inf_norm_vec(model.input.b_tilde);
        const double K_lt = rnl::map_lipschitz_inf(model.output);
        double S_f = 0.0, K_f = 0.0;
        for (const auto& layer : model.layers) {
            S_f = std::max(S_f, rnl::inf_norm_mat(layer.W_tilde) * layer.act.S() +
                                    rnl::inf_norm_vec(layer.b_tilde));
            K_f = std::max(K_f, rnl::inf_norm_mat(layer.W_tilde) * layer.act.K() *
                                    rnl::inf_norm_mat(layer.W));
        }

        const rnl::Box box{rnl::Vec64(model.n_in, -2.0), rnl::Vec64(model.n_in, 2.0)};
        const std::vector<std::size_t> res(model.n_in, grid_points);
        for (double eps : eps_values) {
            model.eps = eps;
            const rnl::ResNetModel limit = rnl::resnet_to_mlp(model);
            const auto skip_eval = [&](const rnl::Vec64& x) { return rnl::forward(model, x).first; };
            const auto limit_eval = [&](const rnl::Vec64& x) { return rnl::forward(limit, x).first; };
            const double emp = rnl::empirical_sup_distance(skip_eval, limit_eval, box, res);
            rnl::MlpBoundInputs in;
            in.eps = eps;
            in.delta = model.delta;
            in.L = model.depth();
            in.S_f = S_f;
            in.K_f = K_f;
            in.S_lambda = S_lambda;
            in.K_lambda_tilde = K_lt;
            const double theo = rnl::mlp_bound_explicit(in);
            std::size_t samples = 1;
            for (std::size_t r : res) samples *= r;
            rows.push_back(rnl::make_bound_report("mlp", eps, model.depth(), theo, emp, samples, box));
        }
    }
    return rows;
}

} // namespace

int cmd_bounds(const ConfigMap& cfg, const std::string& out_dir, std::uint64_t seed) {
    const std::string kind = cfg.get_string("kind", "euler");

    std::vector<rnl::BoundReport> rows;
    if (kind == "euler")
        rows = euler_sweep(cfg, seed);
    else if (kind == "mlp")
        rows = mlp_sweep(cfg, seed);
    else
        throw ConfigError("kind must be 'euler' or 'mlp', got '" + kind + "'");

    RunManifest man = start_manifest("bounds", cfg, seed);
    std::ostringstream csv;
    csv << rnl::bound_report_csv_header() << '\n';
    std::size_t fails = 0;
    for (const auto& r : rows) {
        csv << rnl::to_csv_row(r) << '\n';
        if (!r.pass()) ++fails;
    }
    emit(man, out_dir, "bounds.csv", csv.str());
    write_manifest(man, out_dir);

    std::printf("bounds: %zu/%zu rows certified (%s sweep)\n", rows.size() - fails, rows.size(),
                kind.c_str());
    if (fails > 0) {
        std::printf("bounds: BOUND VIOLATION in %zu rows\n", fails);
        return 3;
    }
    return 0;
}

// ---- train ----------------------------------------------------------------------

int cmd_train(const ConfigMap& cfg, const std::string& out_dir, std::uint64_t seed) {
    const std::string kind_name = cfg.get_string("dataset", "circle");
    const rnl::DatasetKind kind = rnl::dataset_kind_from_name(kind_name);
    const bool classification = kind != rnl::DatasetKind::Quad1D;

    const double eps = cfg.get_real("eps", 1.0);
    const double delta = cfg.get_real("delta", classification ? 0.1 : 0.5);
    const auto depth = static_cast<std::size_t>(cfg.get_int("depth", classification ? 20 : 5));
    const auto n_hid = static_cast<std::size_t>(cfg.get_int("n_hid", 2));
    const auto n_points =
        static_cast<std::size_t>(cfg.get_int("n_points", classification ? 1400 : 300));
    const auto n_seeds = cfg.get_int("seeds", 10);
    rnl::TrainConfig tc;
    tc.epochs = static_cast<std::size_t>(cfg.get_int("epochs", classification ? 300 : 500));
    tc.batch_size = static_cast<std::size_t>(cfg.get_int("batch_size", classification ? 128 : 0));
    tc.lr = cfg.get_real("lr", 0.01);
    tc.loss = classification ? rnl::Loss::Bce : rnl::Loss::Mse;
    tc.batch_norm = cfg.get_bool("batch_norm", classification);
    const bool figure = cfg.get_bool("figure", classification);
    const auto resolution = static_cast<std::size_t>(cfg.get_int("resolution", 201));
    cfg.reject_unknown();
    if (n_seeds < 1) throw ConfigError("seeds must be positive");
    if (depth < 1) throw ConfigError("depth must be positive");

    const rnl::Dataset data = rnl::make_dataset(kind, n_points, seed);
    const rnl::ResNetModel skeleton = classification
                                          ? rnl::make_2d_classifier(eps, delta, depth, n_hid)
                                          : rnl::make_1d_regressor(eps, delta, depth);

    RunManifest man = start_manifest("train", cfg, seed);
    man.seeds.clear();
    emit(man, out_dir, "dataset.csv", rnl::dataset_csv(data));

    for (std::int64_t s = 0; s < n_seeds; ++s) {
        const std::uint64_t u = seed + static_cast<std::uint64_t>(s);
        man.seeds.push_back(u);
        tc.seed = u;
        rnl::ResNetModel init = rnl::xavier_init(skeleton, u);

        rnl::ResNetModel trained;
        rnl::TrainRecord rec;
        try {
            std::tie(trained, rec) = rnl::train(init, data, tc);
        } catch (const rnl::NumericError& e) {
            throw rnl::NumericError("seed " + std::to_string(u) + ": " + e.what());
        }

        const std::string tag = "seed" + std::to_string(u);
        emit(man, out_dir, "model_" + tag + ".json", rnl::to_json(trained));
        emit(man, out_dir, "train_" + tag + ".csv", rnl::train_record_csv(rec));

        if (classification && figure) {
            rnl::Vec64 outputs(data.size());
            std::vector<int> labels(data.size());
            std::vector<rnl::LabeledPoint2D> pts(data.size());
            for (std::size_t i = 0; i < data.size(); ++i) {
                outputs[i] = rnl::forward(trained, data.inputs[i]).first[0];
                labels[i] = data.targets[i] > 0.5 ? 1 : 0;
                pts[i] = {data.inputs[i][0], data.inputs[i][1], labels[i]};
            }
            const double c = rnl::decision_boundary_level(outputs, labels);
            rnl::GridDomain g{data.domain.lo, data.domain.hi, {resolution, resolution}};
            const auto field = rnl::evaluate_grid(
                [&](const rnl::Vec64& x) { return rnl::forward(trained, x).first[0]; }, g);
            const rnl::LevelSetReport rep = rnl::level_components(field, g, c);
            emit(man, out_dir, "levelset_" + tag + ".json", rep.to_json() + "\n");
            emit(man, out_dir, "levelset_" + tag + ".svg",
                 rnl::render_level_set_svg(field, g, c, pts));
            std::printf("train: seed %llu loss %.4f acc %.3f c* %.4f verdict %s\n",
                        static_cast<unsigned long long>(u), rec.epoch_loss.back(),
                        rec.final_accuracy, c,
                        rnl::tunnel_verdict_name(rep.tunnel_verdict).c_str());
        } else {
            std::printf("train: seed %llu loss %.6f sign flips %.3f\n",
                        static_cast<unsigned long long>(u), rec.epoch_loss.back(),
                        rec.sign_flip_fraction);
        }
    }

    write_manifest(man, out_dir);
    return 0;
}

// ---- levelset ---------------------------------------------------------------------

int cmd_levelset(const ConfigMap& cfg, const std::string& out_dir, std::uint64_t seed) {
    const rnl::ResNetModel model = load_model_arg(cfg);
    if (model.n_out != 1) throw ConfigError("levelset requires a scalar-output model");
    const double level = cfg.get_real("level", 0.5);
    const rnl::Box box = domain_arg(cfg, model.n_in, -1.0, 1.0);
    auto res_list = cfg.get_ints("resolution", {201});
    cfg.reject_unknown();

    std::vector<std::size_t> res;
    if (res_list.size() == 1) res.assign(model.n_in, static_cast<std::size_t>(res_list[0]));
    else
        for (auto r : res_list) res.push_back(static_cast<std::size_t>(r));
    if (res.size() != model.n_in)
        throw ConfigError("resolution needs 1 or n_in entries");
    for (auto r : res)
        if (r < 2) throw ConfigError("resolution entries must be at least 2");

    RunManifest man = start_manifest("levelset", cfg, seed);
    rnl::GridDomain g{box.lo, box.hi, res};
    const auto field = rnl::evaluate_grid(
        [&](const rnl::Vec64& x) { return rnl::forward(model, x).first[0]; }, g);

    if (g.dim() > 2) {
        // Component analysis is planar only; still evaluate and summarize.
        std::printf("levelset: %zuD domain, evaluation-only mode (no component analysis)\n",
                    g.dim());
        const auto [mn, mx] = std::minmax_element(field.begin(), field.end());
        nlohmann::ordered_json j;
        j["level_c"] = level;
        j["mode"] = "evaluation_only";
        j["field_min"] = *mn;
        j["field_max"] = *mx;
        j["level_hits_boundary"] = rnl::level_hits_domain_boundary(field, g, level);
        emit(man, out_dir, "levelset.json", j.dump(2) + "\n");
        write_manifest(man, out_dir);
        return 0;
    }

    const rnl::LevelSetReport rep = rnl::level_components(field, g, level);
    emit(man, out_dir, "levelset.json", rep.to_json() + "\n");
    if (g.dim() == 2)
        emit(man, out_dir, "levelset.svg", rnl::render_level_set_svg(field, g, level));
    write_manifest(man, out_dir);

    std::printf("levelset: c=%s sub=%zu super=%zu band=%zu verdict=%s boundary_hit=%d\n",
                fmtg(level).c_str(), rep.components_sub.size(), rep.components_super.size(),
                rep.band_cells, rnl::tunnel_verdict_name(rep.tunnel_verdict).c_str(),
                rnl::level_hits_domain_boundary(field, g, level) ? 1 : 0);
    return 0;
}

} // namespace rnlcli
