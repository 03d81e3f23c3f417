// Acceptance run: one PASS/FAIL line per criterion. Usage: acceptance [work_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpocs/cli.hpp"
#include "dpocs/convex_sets.hpp"
#include "dpocs/dilation_search.hpp"
#include "dpocs/io.hpp"
#include "dpocs/rng.hpp"
#include "dpocs/tomography.hpp"
#include "oracles.hpp"
#include "properties.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dpocs;

namespace {

// Tolerances and limits, one block per criterion.
constexpr double kMmseXTol = 1e-3, kMmseResTol = 1e-3, kMmseSeconds = 1.0;
constexpr double kMinimaxEpsTol = 1e-3, kMinimaxXTol = 1e-2, kMinimaxSeconds = 5.0;
constexpr int kOracleSystems = 50;
constexpr std::uint64_t kOracleSeed = 3;
constexpr double kOracleBracketTol = 1e-4, kOracleSeconds = 60.0;
constexpr double kRowSumTol = 1e-10;
constexpr int kPropertyCases = 1000;
constexpr double kCtSeconds = 300.0;
constexpr double kFbpFactor = 1.2;
constexpr int kErodeInits = 10;
constexpr double kErodeSpread = 1e-6;

fs::path source_dir() { return fs::path(DPOCS_SOURCE_DIR); }

struct Verdict {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

struct Workspace {
    fs::path dir;
    fs::path example_matrix, example_rhs;
};

// The 5x2 example: rows (1,0), (0,1) and three copies of (1,1).
Workspace prepare(const fs::path& dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    Workspace w{dir, dir / "A.csv", dir / "y.csv"};
    std::ofstream(w.example_matrix) << "1,0\n0,1\n1,1\n1,1\n1,1\n";
    std::ofstream(w.example_rhs) << "0\n0\n1\n2\n7\n";
    return w;
}

Verdict mmse_regression(const Workspace& w) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = cli({"solve", "--method", "mmse", "--matrix", w.example_matrix.string(), "--rhs",
                        w.example_rhs.string()});
    const double secs = seconds_since(t0);
    if (r.code != 0) return {false, "exit " + std::to_string(r.code) + ": " + r.err};
    const auto j = json::parse(r.out);
    const double x0 = j["x"][0], x1 = j["x"][1], res = j["residual_l2"];
    const bool ok = std::abs(x0 - 1.4286) <= kMmseXTol && std::abs(x1 - 1.4286) <= kMmseXTol &&
                    std::abs(res - 5.0427) <= kMmseResTol && secs < kMmseSeconds;
    return {ok, fmt("x = [%.6f, %.6f], residual_l2 = %.6f", x0, x1, res) + fmt(", %.3f s", secs)};
}

Verdict minimax_regression(const Workspace& w) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = cli({"solve", "--method", "minimax", "--matrix", w.example_matrix.string(), "--rhs",
                        w.example_rhs.string()});
    const double secs = seconds_since(t0);
    if (r.code != 0) return {false, "exit " + std::to_string(r.code) + ": " + r.err};
    const auto j = json::parse(r.out);
    const double eps = j["epsilon_star"], x0 = j["x"][0], x1 = j["x"][1];
    const bool ok = std::abs(eps - 3.0) <= kMinimaxEpsTol && std::abs(x0 - 2.0) <= kMinimaxXTol &&
                    std::abs(x1 - 2.0) <= kMinimaxXTol && secs < kMinimaxSeconds;
    return {ok, fmt("eps* = %.6f, x = [%.5f, %.5f]", eps, x0, x1) + fmt(", %.3f s", secs)};
}

Verdict oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(kOracleSeed, 0);
    double worst = 0.0;
    int failures = 0;
    for (int k = 0; k < kOracleSystems; ++k) {
        oracle::Dense A(5, std::vector<double>(2));
        std::vector<double> y(5);
        for (auto& row : A)
            for (auto& v : row) v = rng.uniform(-3, 3);
        for (auto& v : y) v = rng.uniform(-3, 3);
        SetList sets;
        for (std::size_t l = 0; l < 5; ++l) sets.push_back(std::make_shared<AffineSet>(Vector(A[l]), y[l], 1.0));
        const auto got = interval_halving({sets, Vector{0, 0}, {}, 60}, kOracleBracketTol);
        const double gap = std::abs(got.epsilon_star - oracle::chebyshev_vertices(A, y).eps);
        worst = std::max(worst, gap);
        if (gap > 2 * kOracleBracketTol) ++failures;
    }
    const double secs = seconds_since(t0);
    return {failures == 0 && secs < kOracleSeconds,
            fmt("%.0f systems, %.0f outside 2*bracket_tol, worst gap %.3g", kOracleSystems, failures, worst) +
                fmt(", %.2f s", secs)};
}

Verdict path_matrix() {
    const auto A = build_path_matrix(Geometry{100, 180, 145});
    bool ok = A.rows() == 26100 && A.cols() == 10000;
    std::string detail = std::to_string(A.rows()) + "x" + std::to_string(A.cols());

    // Row sums at n = 8 against brute-force clipping. A ray along the outer
    // boundary of the image keeps only the inside half of its edge length.
    const Geometry g = Geometry::standard(8);
    const auto B = build_path_matrix(g);
    double worst = 0.0;
    for (std::size_t a = 0; a < g.angles; ++a)
        for (std::size_t b = 0; b < g.bins; ++b) {
            const auto row = B.row(a * g.bins + b);
            double sum = 0.0;
            for (double v : row.values) sum += v;
            const double th = g.angle(a), off = g.bin_offset(b);
            double ref = 0.0;
            for (double v : oracle::path_row(8, th, off)) ref += v;
            const bool axis = std::abs(std::sin(th)) < 1e-12 || std::abs(std::cos(th)) < 1e-12;
            if (axis && std::abs(off - std::round(off)) < 1e-12) {
                // Edge rays touch two pixel columns in the brute force; use the chord.
                ref = oracle::square_chord(8, th, off);
                if (std::abs(off) == 4.0) ref *= 0.5;
            }
            worst = std::max(worst, std::abs(sum - ref));
        }
    ok = ok && worst <= kRowSumTol;
    return {ok, detail + fmt(", n=8 worst row-sum error %.3g", worst)};
}

Verdict property_suite() {
    bool ok = true;
    std::string detail;
    for (const auto kind : props::kFamilies) {
        const auto r = props::check_family(kind, kPropertyCases, 2024);
        const bool pass = props::passes(r) && r.cases == kPropertyCases;
        ok = ok && pass;
        if (!detail.empty()) detail += "; ";
        detail += to_string(kind) + (pass ? " ok" : fmt(" idem %.2g nonexp %.2g fejer %.2g", r.idempotence,
                                                        r.nonexpansive, r.fejer));
    }
    return {ok, detail};
}

struct CtRun {
    int code = -1;
    double secs = 0.0;
    json compare;
};

CtRun run_ct(const std::string& config, const fs::path& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = cli({"ct", "compare", "--config", (source_dir() / "configs" / config).string(), "--output-dir",
                        out.string()});
    CtRun run;
    run.code = r.code;
    run.secs = seconds_since(t0);
    if (fs::exists(out / "compare.json")) run.compare = io::read_json(out / "compare.json");
    return run;
}

// SART at least as close in L2; dilated at least as close in L-infinity.
Verdict norm_ordering(const CtRun& run) {
    if (run.compare.is_null()) return {false, "no compare.json (exit " + std::to_string(run.code) + ")"};
    const auto& m = run.compare["metrics"];
    const double sart_l2 = m["sart"]["sinogram_l2"], dil_l2 = m["dilated"]["sinogram_l2"];
    const double sart_inf = m["sart"]["sinogram_linf"], dil_inf = m["dilated"]["sinogram_linf"];
    const bool l2 = sart_l2 <= dil_l2, linf = dil_inf <= sart_inf;
    return {l2 && linf && run.secs < kCtSeconds,
            fmt("L2 sart %.4f ", sart_l2) + (l2 ? "<=" : ">") + fmt(" dilated %.4f", dil_l2) +
                fmt("; Linf dilated %.4f ", dil_inf) + (linf ? "<=" : ">") + fmt(" sart %.4f", sart_inf) +
                fmt("; %.1f s", run.secs)};
}

// Independent recheck of the box-dilated constraints from the saved files.
Verdict dilated_constraints(const fs::path& out) {
    const auto rep = io::read_json(out / "recon_dilated.json");
    const double eps = rep["epsilon_noise"], tol = rep["residual_tol"];
    const auto shift = static_cast<std::ptrdiff_t>(rep["max_shift"].get<std::size_t>());
    const auto sino = io::read_sinogram(out / "corrupted.csv");
    const auto img = io::read_image_csv(out / "recon_dilated.csv");
    const auto& g = sino.geometry;
    const auto A = build_path_matrix(g);
    double worst = 0.0;
    for (std::size_t a = 0; a < g.angles; ++a)
        for (std::size_t b = 0; b < g.bins; ++b) {
            double lo = INFINITY, hi = -INFINITY;
            for (std::ptrdiff_t s = -shift; s <= shift; ++s) {
                const auto k = static_cast<std::ptrdiff_t>(b) + s;
                const double v = (k < 0 || k >= static_cast<std::ptrdiff_t>(g.bins))
                                     ? 0.0
                                     : sino.at(a, static_cast<std::size_t>(k));
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            const double p = row_dot(A.row(a * g.bins + b), img.pixels);
            worst = std::max({worst, (lo - eps) - p, p - (hi + eps)});
        }
    return {worst <= tol, fmt("eps %.5f, worst violation %.3g (tol %.3g)", eps, worst, tol)};
}

Verdict fbp_sanity() {
    const double baseline = io::read_json(source_dir() / "tests" / "data" / "fbp_baseline.json")["relative_l2"];
    const Geometry g = Geometry::standard(64);
    const auto phantom = shepp_logan(64);
    const auto img = fbp(forward_project(build_path_matrix(g), phantom, g), FbpFilter::RamLak);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < phantom.pixels.size(); ++i) {
        const double d = img.pixels[i] - phantom.pixels[i];
        num += d * d;
        den += phantom.pixels[i] * phantom.pixels[i];
    }
    const double rel = std::sqrt(num / den);
    return {rel <= kFbpFactor * baseline, fmt("relative L2 %.6f, limit %.6f", rel, kFbpFactor * baseline)};
}

// Disks of radius 1.5 centred on the unit circle at 120 degree spacing. Eroded
// by 0.5 each has radius 1 and passes through the origin; the origin is the
// only common point.
Verdict erosion_demo(const fs::path& dir) {
    const fs::path sets = dir / "disks.json";
    json arr = json::array();
    for (int k = 0; k < 3; ++k) {
        const double t = std::numbers::pi / 2 + 2 * std::numbers::pi * k / 3;
        arr.push_back({{"type", "ball"}, {"center", {std::cos(t), std::sin(t)}}, {"radius", 1.5}});
    }
    std::ofstream(sets) << arr.dump();
    const auto r = cli({"erode-demo", "--sets", sets.string(), "--epsilon", "0.5", "--inits",
                        std::to_string(kErodeInits), "--seed", "9"});
    if (r.code != 0) return {false, "exit " + std::to_string(r.code) + ": " + r.err};
    const auto j = json::parse(r.out);
    double spread = 0.0, origin = 0.0;
    const auto& runs = j["runs"];
    for (const auto& a : runs) {
        const double ax = a["x_final"][0], ay = a["x_final"][1];
        origin = std::max(origin, std::hypot(ax, ay));
        for (const auto& b : runs)
            spread = std::max(spread, std::hypot(ax - b["x_final"][0].get<double>(), ay - b["x_final"][1].get<double>()));
    }
    const bool ok = runs.size() == static_cast<std::size_t>(kErodeInits) && spread <= kErodeSpread &&
                    origin <= kErodeSpread;
    return {ok, fmt("%.0f runs, spread %.3g, farthest from origin %.3g", static_cast<double>(runs.size()), spread,
                    origin)};
}

Verdict determinism(const std::vector<std::pair<fs::path, fs::path>>& pairs) {
    std::size_t files = 0;
    std::vector<std::string> differ;
    for (const auto& [a, b] : pairs)
        for (const auto& entry : fs::directory_iterator(a)) {
            ++files;
            const auto name = entry.path().filename();
            if (!fs::exists(b / name) || slurp(entry.path()) != slurp(b / name))
                differ.push_back(a.filename().string() + "/" + name.string());
        }
    std::string detail = std::to_string(files) + " files compared";
    for (const auto& d : differ) detail += ", differs: " + d;
    return {files > 0 && differ.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "dpocs_acceptance";
    const auto w = prepare(work);

    int failed = 0;
    auto report = [&](int id, const char* name, const std::function<Verdict()>& check) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failed;
        std::printf("%s  %2d  %-28s %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
        std::fflush(stdout);
    };

    report(1, "mmse regression", [&] { return mmse_regression(w); });
    report(2, "minimax regression", [&] { return minimax_regression(w); });
    report(3, "oracle equivalence", oracle_equivalence);
    report(4, "path matrix", path_matrix);
    report(5, "projection properties", property_suite);

    const fs::path g1 = work / "gaussian_a", g2 = work / "gaussian_b", u1 = work / "shift_a", u2 = work / "shift_b";
    const auto gaussian = run_ct("gaussian_noise.json", g1);
    report(6, "gaussian noise ordering", [&] { return norm_ordering(gaussian); });
    const auto shift = run_ct("lateral_shift.json", u1);
    report(7, "wobble constraints+ordering", [&] {
        const auto c = dilated_constraints(u1);
        const auto o = norm_ordering(shift);
        return Verdict{c.pass && o.pass, c.detail + "; " + o.detail};
    });
    report(8, "fbp sanity", fbp_sanity);
    report(9, "erosion demo", [&] { return erosion_demo(work); });
    report(10, "determinism", [&] {
        run_ct("gaussian_noise.json", g2);
        run_ct("lateral_shift.json", u2);
        return determinism({{g1, g2}, {u1, u2}});
    });

    std::printf("%d of 10 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
