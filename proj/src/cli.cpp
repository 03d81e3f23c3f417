#include "dpocs/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include "dpocs/convex_sets.hpp"
#include "dpocs/dilation_search.hpp"
#include "dpocs/error.hpp"
#include "dpocs/io.hpp"
#include "dpocs/linear_solvers.hpp"
#include "dpocs/pocs.hpp"
#include "dpocs/rng.hpp"
#include "dpocs/tomography.hpp"

namespace dpocs {

namespace {

namespace fs = std::filesystem;
using io::json;

constexpr std::uint64_t kErodeStream = 4;

void emit(const json& report, const std::string& output, std::ostream& out) {
    if (output.empty()) {
        out << report.dump(2) << '\n';
    } else {
        io::write_report_json(output, report);
    }
}

json vec_json(const Vector& v) { return v.values(); }

std::optional<double> opt(double v, bool given) { return given ? std::optional<double>(v) : std::nullopt; }

// ----------------------------------------------------------------------------
// solve

struct SolveArgs {
    std::string matrix, rhs, method = "mmse", rates, output;
    bool normalize_rows = false;
    double bracket_tol = 0.0;
    std::size_t max_iters = PocsOptions{}.max_iters;
};

int cmd_solve(const SolveArgs& a, bool tol_given, std::ostream& out) {
    LinearSystem sys(io::read_matrix(a.matrix), io::read_csv_vector(a.rhs));
    auto run = [&]() -> SolveReport {
        if (a.method == "mmse") {
            if (a.normalize_rows || !a.rates.empty())
                throw InvalidArgument("--normalize-rows and --rates only apply to --method minimax");
            return mmse_solve(sys);
        }
        if (a.normalize_rows && !a.rates.empty())
            throw InvalidArgument("--normalize-rows and --rates are mutually exclusive");
        Vector rates = a.normalize_rows ? row_norm_rates(sys.A)
                       : a.rates.empty() ? Vector(sys.A.rows(), 1.0)
                                         : io::read_csv_vector(a.rates);
        PocsOptions probe;
        probe.max_iters = a.max_iters;
        return minimax_solve(sys, rates, opt(a.bracket_tol, tol_given), probe);
    };
    const SolveReport rep = run();
    json j{{"command", "solve"},
           {"method", rep.method},
           {"rows", sys.A.rows()},
           {"cols", sys.A.cols()},
           {"x", vec_json(rep.x)},
           {"residual_l2", rep.residual_l2},
           {"residual_linf", rep.residual_linf},
           {"iterations", rep.iterations},
           {"probes", rep.probes}};
    if (rep.epsilon_star) j["epsilon_star"] = *rep.epsilon_star;
    if (rep.weighted_residual_linf) j["weighted_residual_linf"] = *rep.weighted_residual_linf;
    emit(j, a.output, out);
    return kExitOk;
}

// ----------------------------------------------------------------------------
// pocs

struct PocsArgs {
    std::string sets, x0, mode = "alternating", weights, trace, output;
    double epsilon = 0.0;
    PocsOptions opts;
};

int cmd_pocs(const PocsArgs& a, std::ostream& out) {
    SetList sets = io::read_sets(a.sets);
    const auto dim = sets.front()->dim();
    const Vector x0 = a.x0.empty() ? Vector(dim, 0.0) : io::read_csv_vector(a.x0);

    PocsOutcome outcome{PocsStatus::IterationBudgetExhausted, x0, {}, 0};
    if (a.mode == "alternating") {
        if (!a.weights.empty()) throw InvalidArgument("--weights only applies to --mode simultaneous");
        outcome = alternating_pocs(sets, x0, a.epsilon, a.opts);
    } else {
        const Vector w = a.weights.empty() ? Vector(sets.size(), 1.0 / static_cast<double>(sets.size()))
                                           : io::read_csv_vector(a.weights);
        if (w.size() != sets.size())
            throw InvalidArgument("--weights has " + std::to_string(w.size()) + " entries for " +
                                  std::to_string(sets.size()) + " sets");
        SetList dilated;
        for (const auto& s : sets) dilated.push_back(a.epsilon > 0.0 ? s->dilate(a.epsilon) : s);
        outcome = simultaneous_pocs(dilated, w, x0, a.opts);
    }
    if (!a.trace.empty()) io::write_trace_csv(a.trace, outcome.trace);

    const auto& t = outcome.trace;
    json j{{"command", "pocs"},
           {"mode", a.mode},
           {"epsilon", a.epsilon},
           {"status", to_string(outcome.status)},
           {"iterations", outcome.iterations},
           {"x_final", vec_json(outcome.x_final)},
           {"residual_max", t.residual_max.back()},
           {"displacement", t.displacement.back()}};
    emit(j, a.output, out);
    return kExitOk;
}

// ----------------------------------------------------------------------------
// dilate-search

struct DilateArgs {
    std::string sets, x0, history, output;
    double bracket_tol = 0.0;
    PocsOptions opts;
};

int cmd_dilate(const DilateArgs& a, bool tol_given, std::ostream& out) {
    DilationProblem p{io::read_sets(a.sets), Vector(1, 0.0), a.opts};
    p.x0 = a.x0.empty() ? Vector(p.sets.front()->dim(), 0.0) : io::read_csv_vector(a.x0);
    const auto res = interval_halving(p, opt(a.bracket_tol, tol_given));
    if (!a.history.empty()) io::write_bracket_csv(a.history, res.bracket_history);

    json per_set = json::array();
    for (const auto& s : p.sets) per_set.push_back(s->violation(res.x_star, res.epsilon_star));
    json j{{"command", "dilate-search"},
           {"epsilon_star", res.epsilon_star},
           {"x_star", vec_json(res.x_star)},
           {"probes", res.probes},
           {"bracket_steps", res.bracket_history.size()},
           {"max_violation", max_violation(p.sets, res.x_star, res.epsilon_star)},
           {"set_violations", per_set}};
    if (!res.bracket_history.empty()) {
        const auto& [lo, hi] = res.bracket_history.back();
        j["bracket"] = {lo, hi};
    }
    emit(j, a.output, out);
    return kExitOk;
}

// ----------------------------------------------------------------------------
// erode-demo

struct ErodeArgs {
    std::string sets, output;
    double epsilon = 0.0;
    std::size_t inits = 10;
    std::uint64_t seed = 0;
    double init_radius = 10.0;
    PocsOptions opts;
};

int cmd_erode(const ErodeArgs& a, std::ostream& out, std::ostream& err) {
    const SetList sets = io::read_sets(a.sets);
    if (a.inits < 1) throw InvalidArgument("--inits must be at least 1");
    if (!(a.init_radius > 0.0)) throw InvalidArgument("--init-radius must be positive");
    SetList eroded;
    for (const auto& s : sets) eroded.push_back(s->erode(a.epsilon));

    const auto dim = sets.front()->dim();
    Rng rng(a.seed, kErodeStream);
    std::vector<Vector> limits;
    json runs = json::array();
    bool all_converged = true;
    for (std::size_t k = 0; k < a.inits; ++k) {
        std::vector<double> start(dim);
        for (auto& v : start) v = rng.uniform(-a.init_radius, a.init_radius);
        const Vector x0(std::move(start));
        const auto o = alternating_pocs(eroded, x0, 0.0, a.opts);
        all_converged = all_converged && o.status == PocsStatus::Converged;
        runs.push_back({{"x0", vec_json(x0)},
                        {"x_final", vec_json(o.x_final)},
                        {"status", to_string(o.status)},
                        {"iterations", o.iterations},
                        {"residual_max", o.trace.residual_max.back()}});
        limits.push_back(o.x_final);
    }
    double spread = 0.0;
    for (std::size_t i = 0; i < limits.size(); ++i)
        for (std::size_t k = i + 1; k < limits.size(); ++k) spread = std::max(spread, distance(limits[i], limits[k]));

    json j{{"command", "erode-demo"},
           {"epsilon", a.epsilon},
           {"seed", a.seed},
           {"feasible", all_converged},
           {"spread", spread},
           {"runs", runs}};
    emit(j, a.output, out);
    if (!all_converged) {
        err << "dpocs: eroded sets have no common point (POCS did not converge)\n";
        return kExitNumerical;
    }
    return kExitOk;
}

// ----------------------------------------------------------------------------
// ct

struct CtArgs {
    std::string stage, config, method, output_dir, output;
};

class CtPipeline {
public:
    CtPipeline(io::ExperimentConfig cfg, fs::path dir) : cfg_(std::move(cfg)), dir_(std::move(dir)) {}

    json phantom() {
        const auto img = shepp_logan(cfg_.geometry.n);
        io::write_image_csv(dir_ / "phantom.csv", img);
        io::write_pgm(dir_ / "phantom.pgm", img);
        return {{"stage", "phantom"}, {"n", img.n}, {"files", {"phantom.csv", "phantom.pgm"}}};
    }

    json sinogram() {
        ensure("phantom.csv", [this] { phantom(); });
        const auto img = io::read_image_csv(dir_ / "phantom.csv");
        if (img.n != cfg_.geometry.n) throw InvalidArgument("phantom.csv size differs from the configured n");
        const auto& A = matrix(cfg_.geometry);
        const auto sino = forward_project(A, img, cfg_.geometry);
        io::write_sinogram(dir_ / "sinogram.csv", sino);
        return {{"stage", "sinogram"},
                {"geometry", io::geometry_to_json(cfg_.geometry)},
                {"matrix_rows", A.rows()},
                {"matrix_cols", A.cols()},
                {"matrix_nnz", A.nnz()},
                {"files", {"sinogram.csv", "sinogram.json"}}};
    }

    json corrupt() {
        ensure("sinogram.csv", [this] { sinogram(); });
        const auto clean = io::read_sinogram(dir_ / "sinogram.csv");
        const auto& c = cfg_.corruption;
        Sinogram s = clean;
        if (c.gaussian_sigma > 0.0) s = add_gaussian_noise(s, c.gaussian_sigma, c.seed);
        if (c.uniform_amplitude > 0.0) s = add_uniform_noise(s, c.uniform_amplitude, c.seed);
        if (c.max_shift > 0) s = apply_lateral_shift(s, c.max_shift, c.seed);
        io::write_sinogram(dir_ / "corrupted.csv", s);
        double l2 = 0.0, linf = 0.0;
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            const double d = s.values[i] - clean.values[i];
            l2 += d * d;
            linf = std::max(linf, std::abs(d));
        }
        return {{"stage", "corrupt"},
                {"gaussian_sigma", c.gaussian_sigma},
                {"uniform_amplitude", c.uniform_amplitude},
                {"max_shift", c.max_shift},
                {"seed", c.seed},
                {"corruption_l2", std::sqrt(l2)},
                {"corruption_linf", linf},
                {"files", {"corrupted.csv", "corrupted.json"}}};
    }

    // Returns the report and whether the reconstruction met its constraints.
    std::pair<json, bool> reconstruct(const std::string& method) {
        ensure("corrupted.csv", [this] { corrupt(); });
        const auto sino = io::read_sinogram(dir_ / "corrupted.csv");
        const auto& A = matrix(sino.geometry);
        const auto& m = cfg_.method;

        json rep{{"stage", "reconstruct"}, {"method", method}};
        bool ok = true;
        Image img(sino.geometry.n);
        if (method == "art") {
            img = art(A, sino, m.iterations, m.relax);
            rep["iterations"] = m.iterations;
            rep["relax"] = m.relax;
        } else if (method == "sart") {
            img = sart(A, sino, m.iterations, m.relax);
            rep["iterations"] = m.iterations;
            rep["relax"] = m.relax;
        } else if (method == "fbp") {
            img = fbp(sino, m.filter);
            rep["filter"] = m.filter == FbpFilter::Hann ? "hann" : "ram-lak";
        } else if (method == "dilated") {
            const auto r = dilated_reconstruct(A, sino, cfg_.dilation, cfg_.dilated);
            img = r.image;
            ok = r.feasible;
            rep["epsilon_noise"] = r.epsilon_noise;
            rep["max_shift"] = cfg_.dilation.max_shift;
            rep["adaptive"] = cfg_.dilation.adaptive;
            rep["relax"] = cfg_.dilated.relax;
            rep["feasible"] = r.feasible;
            rep["max_violation"] = r.max_violation;
            rep["residual_tol"] = cfg_.dilated.residual_tol;
            rep["sweeps"] = r.sweeps;
            rep["probes"] = r.probes;
        } else {
            throw InvalidArgument("unknown reconstruction method '" + method + "' (art|sart|fbp|dilated)");
        }
        const std::string stem = "recon_" + method;
        io::write_image_csv(dir_ / (stem + ".csv"), img);
        io::write_pgm(dir_ / (stem + ".pgm"), img);

        const auto sm = sino_metrics(A, img, sino);
        rep["sinogram_l2"] = sm.l2;
        rep["sinogram_linf"] = sm.linf;
        if (fs::exists(dir_ / "phantom.csv")) {
            const auto im = image_metrics(img, io::read_image_csv(dir_ / "phantom.csv"));
            rep["image_rmse"] = im.rmse;
            rep["image_max_abs"] = im.max_abs;
        }
        rep["files"] = {stem + ".csv", stem + ".pgm", stem + ".json"};
        io::write_report_json(dir_ / (stem + ".json"), rep);
        return {rep, ok};
    }

    std::pair<json, bool> compare() {
        static const std::vector<std::string> methods{"art", "sart", "fbp", "dilated"};
        bool ok = true;
        for (const auto& m : methods) ok = reconstruct(m).second && ok;

        // Metrics come from the saved files only.
        const auto sino = io::read_sinogram(dir_ / "corrupted.csv");
        const auto phantom = io::read_image_csv(dir_ / "phantom.csv");
        const auto A = build_path_matrix(sino.geometry);
        json table = json::object();
        for (const auto& m : methods) {
            const auto img = io::read_image_csv(dir_ / ("recon_" + m + ".csv"));
            const auto sm = sino_metrics(A, img, sino);
            const auto im = image_metrics(img, phantom);
            table[m] = {{"sinogram_l2", sm.l2},
                        {"sinogram_linf", sm.linf},
                        {"image_rmse", im.rmse},
                        {"image_max_abs", im.max_abs}};
        }
        auto best = [&](const char* key) {
            std::string arg;
            double v = INFINITY;
            for (const auto& m : methods)
                if (table[m][key].get<double>() < v) v = table[m][key].get<double>(), arg = m;
            return arg;
        };
        json rep{{"stage", "compare"},
                 {"metrics", table},
                 {"lowest_sinogram_l2", best("sinogram_l2")},
                 {"lowest_sinogram_linf", best("sinogram_linf")},
                 {"lowest_image_rmse", best("image_rmse")}};
        io::write_report_json(dir_ / "compare.json", rep);
        return {rep, ok};
    }

private:
    void ensure(const char* file, const std::function<void()>& make) {
        if (!fs::exists(dir_ / file)) make();
    }

    const SparseMatrix& matrix(const Geometry& g) {
        if (!A_ || !(geom_ == g)) {
            A_ = build_path_matrix(g);
            geom_ = g;
        }
        return *A_;
    }

    io::ExperimentConfig cfg_;
    fs::path dir_;
    std::optional<SparseMatrix> A_;
    Geometry geom_;
};

int cmd_ct(const CtArgs& a, std::ostream& out) {
    auto cfg = io::read_config(a.config);
    fs::path dir = cfg.output_dir;
    if (dir.is_relative()) dir = fs::path(a.config).parent_path() / dir;
    if (!a.output_dir.empty()) dir = a.output_dir;
    fs::create_directories(dir);
    if (!a.method.empty()) cfg.method.name = a.method;

    CtPipeline ct(cfg, dir);
    json rep;
    bool ok = true;
    if (a.stage == "phantom") {
        rep = ct.phantom();
    } else if (a.stage == "sinogram") {
        rep = ct.sinogram();
    } else if (a.stage == "corrupt") {
        rep = ct.corrupt();
    } else if (a.stage == "reconstruct") {
        std::tie(rep, ok) = ct.reconstruct(cfg.method.name);
    } else {
        std::tie(rep, ok) = ct.compare();
    }
    rep["command"] = "ct";
    rep["output_dir"] = dir.string();
    emit(rep, a.output, out);
    return ok ? kExitOk : kExitNumerical;
}

void add_pocs_options(CLI::App* app, PocsOptions& o) {
    app->add_option("--max-iters", o.max_iters, "POCS iteration budget")->check(CLI::PositiveNumber);
    app->add_option("--step-tol", o.step_tol, "Relative displacement threshold")->check(CLI::PositiveNumber);
    app->add_option("--residual-tol", o.residual_tol, "Largest accepted set violation")->check(CLI::PositiveNumber);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Projection onto convex sets with dilation and erosion of the constraint sets", "dpocs"};
    app.require_subcommand(1);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Solve an overdetermined linear system y = A x");
    s->add_option("--matrix", solve.matrix, "A as dense or triplet CSV")->required()->check(CLI::ExistingFile);
    s->add_option("--rhs", solve.rhs, "y as CSV")->required()->check(CLI::ExistingFile);
    s->add_option("--method", solve.method, "mmse or minimax")->check(CLI::IsMember({"mmse", "minimax"}));
    s->add_flag("--normalize-rows", solve.normalize_rows, "Use row norms as dilation rates (Euclidean minimax)");
    s->add_option("--rates", solve.rates, "Per-row dilation rates as CSV")->check(CLI::ExistingFile);
    auto* solve_tol = s->add_option("--bracket-tol", solve.bracket_tol, "Interval-halving stop width")
                          ->check(CLI::PositiveNumber);
    s->add_option("--max-iters", solve.max_iters, "POCS budget per feasibility probe")->check(CLI::PositiveNumber);
    s->add_option("--output", solve.output, "Write the JSON report here instead of stdout");

    PocsArgs pocs;
    auto* p = app.add_subcommand("pocs", "Run alternating or simultaneous POCS");
    p->add_option("--sets", pocs.sets, "Set collection JSON")->required()->check(CLI::ExistingFile);
    p->add_option("--x0", pocs.x0, "Starting point CSV (default: zeros)")->check(CLI::ExistingFile);
    p->add_option("--mode", pocs.mode, "alternating or simultaneous")
        ->check(CLI::IsMember({"alternating", "simultaneous"}));
    p->add_option("--weights", pocs.weights, "Simultaneous weights CSV (default: equal)")->check(CLI::ExistingFile);
    p->add_option("--epsilon", pocs.epsilon, "Dilate every set by rate * epsilon")->check(CLI::NonNegativeNumber);
    p->add_option("--trace", pocs.trace, "Write the residual trace CSV here");
    p->add_option("--output", pocs.output, "Write the JSON report here instead of stdout");
    add_pocs_options(p, pocs.opts);

    DilateArgs dil;
    auto* d = app.add_subcommand("dilate-search", "Smallest dilation at which the sets intersect");
    d->add_option("--sets", dil.sets, "Set collection JSON")->required()->check(CLI::ExistingFile);
    d->add_option("--x0", dil.x0, "Starting point CSV (default: zeros)")->check(CLI::ExistingFile);
    auto* dil_tol = d->add_option("--bracket-tol", dil.bracket_tol, "Interval-halving stop width")
                        ->check(CLI::PositiveNumber);
    d->add_option("--history", dil.history, "Write the bracket history CSV here");
    d->add_option("--output", dil.output, "Write the JSON report here instead of stdout");
    add_pocs_options(d, dil.opts);

    ErodeArgs ero;
    auto* e = app.add_subcommand("erode-demo", "Alternating POCS on eroded sets from random starts");
    e->add_option("--sets", ero.sets, "Set collection JSON")->required()->check(CLI::ExistingFile);
    e->add_option("--epsilon", ero.epsilon, "Erosion amount")->required()->check(CLI::NonNegativeNumber);
    e->add_option("--inits", ero.inits, "Number of random starting points");
    e->add_option("--seed", ero.seed, "Random seed");
    e->add_option("--init-radius", ero.init_radius, "Starts are uniform in [-r, r] per coordinate");
    e->add_option("--output", ero.output, "Write the JSON report here instead of stdout");
    add_pocs_options(e, ero.opts);

    CtArgs ct;
    auto* c = app.add_subcommand("ct", "Tomography pipeline stages");
    c->add_option("stage", ct.stage, "phantom|sinogram|corrupt|reconstruct|compare")
        ->required()
        ->check(CLI::IsMember({"phantom", "sinogram", "corrupt", "reconstruct", "compare"}));
    c->add_option("--config", ct.config, "Experiment configuration JSON")->required()->check(CLI::ExistingFile);
    c->add_option("--method", ct.method, "Reconstruction method override")
        ->check(CLI::IsMember({"art", "sart", "fbp", "dilated"}));
    c->add_option("--output-dir", ct.output_dir, "Override the configured output directory");
    c->add_option("--output", ct.output, "Write the JSON report here instead of stdout");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& ex) {
        return app.exit(ex, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (s->parsed()) return cmd_solve(solve, solve_tol->count() > 0, out);
        if (p->parsed()) return cmd_pocs(pocs, out);
        if (d->parsed()) return cmd_dilate(dil, dil_tol->count() > 0, out);
        if (e->parsed()) return cmd_erode(ero, out, err);
        return cmd_ct(ct, out);
    } catch (const InvalidArgument& ex) {
        err << "dpocs: invalid argument: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const NumericalError& ex) {
        err << "dpocs: numerical failure: " << ex.what() << '\n';
        return kExitNumerical;
    } catch (const IoError& ex) {
        err << "dpocs: I/O error: " << ex.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& ex) {
        err << "dpocs: I/O error: " << ex.what() << '\n';
        return kExitIo;
    } catch (const std::exception& ex) {
        err << "dpocs: error: " << ex.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace dpocs
