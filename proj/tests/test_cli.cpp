#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpocs/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
    json report() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = dpocs::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

struct Workspace {
    fs::path dir;
    explicit Workspace(const std::string& name) : dir(fs::temp_directory_path() / ("dpocs_cli_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        write("A.csv", "1,0\n0,1\n1,1\n1,1\n1,1\n");
        write("y.csv", "0\n0\n1\n2\n7\n");
        write("rows.json", R"({"sets": [
            {"type": "affine", "normal": [1, 0], "offset": 0},
            {"type": "affine", "normal": [0, 1], "offset": 0},
            {"type": "affine", "normal": [1, 1], "offset": 1},
            {"type": "affine", "normal": [1, 1], "offset": 2},
            {"type": "affine", "normal": [1, 1], "offset": 7}]})");
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string path(const std::string& f) const { return (dir / f).string(); }
    void write(const std::string& f, const std::string& text) const { std::ofstream(dir / f) << text; }
};

}  // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    Workspace w("usage");
    CHECK(run({"solve", "--matrix", w.path("A.csv")}).code == 1);
    CHECK(run({"solve", "--matrix", w.path("A.csv"), "--rhs", w.path("y.csv"), "--method", "lasso"}).code == 1);
    CHECK(run({"solve", "--matrix", w.path("A.csv"), "--rhs", w.path("y.csv"), "--bogus"}).code == 1);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("solve: least squares and minimax") {
    Workspace w("solve");
    const auto ls = run({"solve", "--matrix", w.path("A.csv"), "--rhs", w.path("y.csv")});
    REQUIRE(ls.code == 0);
    const auto r = ls.report();
    CHECK(r["method"] == "mmse");
    CHECK(r["x"][0].get<double>() == doctest::Approx(10.0 / 7.0));
    CHECK(r["residual_l2"].get<double>() == doctest::Approx(5.0427).epsilon(1e-4));
    CHECK_FALSE(r.contains("epsilon_star"));

    const auto mm = run({"solve", "--matrix", w.path("A.csv"), "--rhs", w.path("y.csv"), "--method", "minimax",
                         "--bracket-tol", "1e-6", "--output", w.path("mm.json")});
    REQUIRE(mm.code == 0);
    const auto m = json::parse(std::ifstream(w.path("mm.json")));
    CHECK(m["epsilon_star"].get<double>() == doctest::Approx(3.0).epsilon(1e-5));
    CHECK(m["x"][0].get<double>() == doctest::Approx(2.0).epsilon(1e-3));

    const auto nr = run({"solve", "--matrix", w.path("A.csv"), "--rhs", w.path("y.csv"), "--method", "minimax",
                         "--normalize-rows"});
    REQUIRE(nr.code == 0);
    CHECK(nr.report()["epsilon_star"].get<double>() == doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("solve: bad inputs") {
    Workspace w("solvebad");
    w.write("short.csv", "1\n2\n");
    CHECK(run({"solve", "--matrix", w.path("A.csv"), "--rhs", w.path("short.csv")}).code == 1);
    w.write("sing.csv", "1,2\n2,4\n3,6\n");
    w.write("y3.csv", "1\n2\n3\n");
    CHECK(run({"solve", "--matrix", w.path("sing.csv"), "--rhs", w.path("y3.csv")}).code == 2);
    w.write("garbage.csv", "1,2\nx,y\n");
    const auto g = run({"solve", "--matrix", w.path("garbage.csv"), "--rhs", w.path("y3.csv")});
    CHECK(g.code == 3);
    CHECK(g.err.find("garbage.csv:2") != std::string::npos);
    CHECK(run({"solve", "--matrix", w.path("nope.csv"), "--rhs", w.path("y3.csv")}).code != 0);
}

TEST_CASE("pocs: alternating and simultaneous") {
    Workspace w("pocs");
    const auto cyc = run({"pocs", "--sets", w.path("rows.json")});
    REQUIRE(cyc.code == 0);
    CHECK(cyc.report()["status"] == "limit_cycle");

    const auto ok = run({"pocs", "--sets", w.path("rows.json"), "--epsilon", "3", "--trace", w.path("t.csv")});
    REQUIRE(ok.code == 0);
    CHECK(ok.report()["status"] == "converged");
    CHECK(ok.report()["x_final"][0].get<double>() == doctest::Approx(2.0));
    std::ifstream t(w.path("t.csv"));
    std::string header;
    std::getline(t, header);
    CHECK(header == "iter,residual_max,displacement");

    w.write("w5.csv", "0.2\n0.2\n0.2\n0.2\n0.2\n");
    w.write("w2.csv", "0.5\n0.5\n");
    const auto sim = run({"pocs", "--sets", w.path("rows.json"), "--mode", "simultaneous", "--weights",
                          w.path("w5.csv")});
    REQUIRE(sim.code == 0);
    CHECK(sim.report()["mode"] == "simultaneous");
    CHECK(run({"pocs", "--sets", w.path("rows.json"), "--mode", "simultaneous", "--weights", w.path("w2.csv")}).code == 1);
    CHECK(run({"pocs", "--sets", w.path("rows.json"), "--weights", w.path("w5.csv")}).code == 1);
    CHECK(run({"pocs", "--sets", w.path("rows.json"), "--x0", "1,2,3"}).code == 1);
}

TEST_CASE("pocs: schema errors exit 3 and name the node") {
    Workspace w("schema");
    w.write("bad.json", R"([{"type": "ball", "center": [0, 0], "radius": -2}])");
    const auto r = run({"pocs", "--sets", w.path("bad.json")});
    CHECK(r.code == 3);
    CHECK(r.err.find("/0/radius") != std::string::npos);
    w.write("broken.json", "[{");
    CHECK(run({"pocs", "--sets", w.path("broken.json")}).code == 3);
}

TEST_CASE("dilate-search") {
    Workspace w("dilate");
    const auto r = run({"dilate-search", "--sets", w.path("rows.json"), "--bracket-tol", "1e-5", "--history",
                        w.path("h.csv")});
    REQUIRE(r.code == 0);
    const auto j = r.report();
    CHECK(j["epsilon_star"].get<double>() == doctest::Approx(3.0).epsilon(1e-5));
    CHECK(j["bracket"][1].get<double>() - j["bracket"][0].get<double>() <= 1e-5);
    CHECK(j["max_violation"].get<double>() <= 2e-9);
    std::ifstream h(w.path("h.csv"));
    std::string header;
    std::getline(h, header);
    CHECK(header == "step,eps_lo,eps_hi");

    w.write("hard.json", R"([{"type": "point", "point": [0], "rate": 0}, {"type": "point", "point": [1], "rate": 0}])");
    CHECK(run({"dilate-search", "--sets", w.path("hard.json")}).code == 2);
}

TEST_CASE("erode-demo") {
    Workspace w("erode");
    w.write("disks.json", R"([
        {"type": "ball", "center": [0, 1], "radius": 1.5},
        {"type": "ball", "center": [-0.8660254037844386, -0.5], "radius": 1.5},
        {"type": "ball", "center": [0.8660254037844386, -0.5], "radius": 1.5}])");
    const auto r = run({"erode-demo", "--sets", w.path("disks.json"), "--epsilon", "0.5", "--inits", "5"});
    REQUIRE(r.code == 0);
    const auto j = r.report();
    CHECK(j["feasible"] == true);
    CHECK(j["spread"].get<double>() <= 1e-6);
    CHECK(j["runs"].size() == 5);

    // Eroding past the common point leaves nothing to find.
    CHECK(run({"erode-demo", "--sets", w.path("disks.json"), "--epsilon", "0.7", "--inits", "3"}).code == 2);
    CHECK(run({"erode-demo", "--sets", w.path("rows.json"), "--epsilon", "0.1"}).code == 2);
}

TEST_CASE("ct pipeline stages") {
    Workspace w("ct");
    w.write("cfg.json", R"({
        "geometry": {"n": 16, "angles": 30},
        "corruption": {"gaussian_sigma": 0.5, "seed": 3},
        "method": {"name": "sart", "iterations": 10, "relax": 0.5},
        "dilation": {"adaptive": true},
        "tolerances": {"residual_tol": 0.05},
        "outputs": {"dir": "out"}
    })");
    const auto cfg = w.path("cfg.json");
    REQUIRE(run({"ct", "phantom", "--config", cfg}).code == 0);
    CHECK(fs::exists(w.dir / "out" / "phantom.csv"));
    CHECK(fs::exists(w.dir / "out" / "phantom.pgm"));

    // Later stages build their inputs on demand.
    const auto rec = run({"ct", "reconstruct", "--config", cfg, "--method", "dilated"});
    REQUIRE(rec.code == 0);
    const auto j = rec.report();
    CHECK(j.contains("sinogram_l2"));
    CHECK(j.contains("image_rmse"));
    CHECK(j["feasible"] == true);
    CHECK(fs::exists(w.dir / "out" / "corrupted.csv"));
    CHECK(fs::exists(w.dir / "out" / "recon_dilated.pgm"));

    const auto cmp = run({"ct", "compare", "--config", cfg});
    REQUIRE(cmp.code == 0);
    const auto c = json::parse(std::ifstream(w.dir / "out" / "compare.json"));
    CHECK(c["metrics"].size() == 4);
    CHECK(c.contains("lowest_sinogram_l2"));

    CHECK(run({"ct", "reconstruct", "--config", cfg, "--method", "magic"}).code == 1);
    CHECK(run({"ct", "explode", "--config", cfg}).code == 1);
    w.write("nogeom.json", R"({"outputs": {"dir": "x"}})");
    const auto bad = run({"ct", "phantom", "--config", w.path("nogeom.json")});
    CHECK(bad.code == 3);
    CHECK(bad.err.find("/geometry") != std::string::npos);
}

TEST_CASE("ct outputs are deterministic") {
    Workspace w("ctdet");
    w.write("cfg.json", R"({
        "geometry": {"n": 16, "angles": 20},
        "corruption": {"uniform_amplitude": 1.0, "max_shift": 1, "seed": 5},
        "method": {"name": "art", "iterations": 3},
        "outputs": {"dir": "a"}
    })");
    REQUIRE(run({"ct", "reconstruct", "--config", w.path("cfg.json")}).code == 0);
    REQUIRE(run({"ct", "reconstruct", "--config", w.path("cfg.json"), "--output-dir", w.path("b")}).code == 0);
    for (const auto* f : {"corrupted.csv", "recon_art.csv", "recon_art.pgm"}) {
        std::ifstream a(w.dir / "a" / f, std::ios::binary), b(w.dir / "b" / f, std::ios::binary);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CHECK(sa.str() == sb.str());
        CHECK_FALSE(sa.str().empty());
    }
}
