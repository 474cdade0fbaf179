#include <unistd.h>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "locstat/io.hpp"

using namespace locstat;

namespace {

struct TempDir {
    std::filesystem::path dir;
    TempDir() {
        dir = std::filesystem::temp_directory_path() /
              ("locstat_io_" + std::to_string(::getpid()));
        std::filesystem::create_directories(dir);
    }
    ~TempDir() { std::filesystem::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
    void write(const std::string& name, const std::string& content) const {
        std::ofstream f(path(name), std::ios::binary);
        f << content;
    }
};

}  // namespace

TEST_CASE("series CSV loading: header, column selection, errors") {
    TempDir tmp;
    tmp.write("ok.csv", "date,close\n2020-01-01,100.0\n2020-01-02,101.0\n2020-01-03,99.5\n");
    const VecD close = load_series_csv(tmp.path("ok.csv"), 1, false);
    CHECK(close == VecD{100.0, 101.0, 99.5});
    // column -1 selects the last column
    CHECK(load_series_csv(tmp.path("ok.csv"), -1, false) == close);

    const VecD ret = load_series_csv(tmp.path("ok.csv"), 1, true);
    REQUIRE(ret.size() == 2);
    CHECK(ret[0] == doctest::Approx(std::log(101.0 / 100.0)));

    tmp.write("bad.csv", "x\n1.0\noops\n2.0\n");
    CHECK_THROWS_AS(load_series_csv(tmp.path("bad.csv"), 0, false), data_error);
    try {
        load_series_csv(tmp.path("bad.csv"), 0, false);
    } catch (const data_error& e) {
        CHECK(e.row == 3);
    }

    tmp.write("neg.csv", "x\n1.0\n-2.0\n");
    CHECK_THROWS_AS(load_series_csv(tmp.path("neg.csv"), 0, true), data_error);
}

TEST_CASE("trajectory CSV round trip through the series loader") {
    TempDir tmp;
    Trajectory traj;
    traj.n = 5;
    traj.values = {0.25, -1.5, 3.0, 0.0, 2.25};
    traj.aux = VecD{1.0, 2.0, 3.0, 4.0, 5.0};
    write_trajectory_csv(tmp.path("traj.csv"), traj);
    const VecD x = load_series_csv(tmp.path("traj.csv"), 1, false);
    CHECK(x == traj.values);
    const VecD aux = load_series_csv(tmp.path("traj.csv"), 2, false);
    CHECK(aux == *traj.aux);
}

TEST_CASE("curve CSV round trip is lossless") {
    TempDir tmp;
    EstimateCurve curve;
    curve.components = {"c0", "c1", "d1"};
    for (int k = 1; k <= 5; ++k) {
        EstimatePoint pt;
        pt.u = k / 10.0;
        pt.theta = {1.0 + 1e-13 * k, 0.1 * k, 0.3};
        pt.objective = 1.5 - 0.01 * k;
        pt.converged = k % 2 == 0;
        pt.boundary = k == 1;
        curve.points.push_back(pt);
    }
    write_curve_csv(tmp.path("curve.csv"), curve);
    const EstimateCurve back = read_curve_csv(tmp.path("curve.csv"));
    REQUIRE(back.points.size() == curve.points.size());
    CHECK(back.components == curve.components);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        CHECK(back.points[i].u == curve.points[i].u);
        CHECK(back.points[i].theta == curve.points[i].theta);
        CHECK(back.points[i].objective == curve.points[i].objective);
        CHECK(back.points[i].converged == curve.points[i].converged);
        CHECK(back.points[i].boundary == curve.points[i].boundary);
    }
}

TEST_CASE("rmise report JSON round trip is lossless") {
    RmiseReport report;
    report.components = {"c0", "c1"};
    report.master_seed = 123456789012345ULL;
    report.reps = 100;
    report.wall_seconds = 3.25;  // must NOT survive serialization
    RmiseCell cell;
    cell.n = 1000;
    cell.kernel = "epanechnikov";
    cell.rsmise = {0.4553, 0.1221000000000001};
    cell.excluded = 2;
    cell.unreliable = false;
    report.cells.push_back(cell);

    const std::string text = rmise_report_to_json(report);
    CHECK(text.find("wall") == std::string::npos);
    const RmiseReport back = rmise_report_from_json(text);
    CHECK(back.components == report.components);
    CHECK(back.master_seed == report.master_seed);
    CHECK(back.reps == report.reps);
    REQUIRE(back.cells.size() == 1);
    CHECK(back.cells[0].rsmise == cell.rsmise);
    CHECK(back.cells[0].excluded == 2);
    // Serialization itself is deterministic.
    CHECK(rmise_report_to_json(back) == text);
}

TEST_CASE("json reports carry a schema version") {
    AdmissibilityReport rep;
    rep.ok = false;
    rep.margin = -0.366;
    rep.worst_margin = -0.28;
    rep.worst_u = 0.785;
    rep.detail = "sum";
    const std::string text = check_report_to_json(rep);
    CHECK(text.find("\"schema_version\": 1") != std::string::npos);
    CHECK(text.find("worst_u") != std::string::npos);

    CltCheck clt;
    clt.empirical_var = 0.44;
    clt.theoretical_var = 0.45;
    clt.ratio = 0.44 / 0.45;
    clt.normality_pvalue = 0.3;
    CHECK(clt_check_to_json(clt).find("\"schema_version\": 1") != std::string::npos);
}

TEST_CASE("SVG output is a well-formed static chart") {
    TempDir tmp;
    const VecD xs = {0.1, 0.2, 0.3, 0.4};
    write_svg_lines(tmp.path("plot.svg"), "c0(u)", xs, {{"c0", {1.0, 1.2, 0.9, 1.1}}});
    std::ifstream in(tmp.path("plot.svg"));
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content.find("<svg") == 0);
    CHECK(content.find("<polyline") != std::string::npos);
    CHECK(content.find("</svg>") != std::string::npos);
}

TEST_CASE("config parsing: scenarios, models, strict keys") {
    const RunConfig cfg = parse_config_text(R"json({
        "model": {"scenario": "garch11_sec5"},
        "estimator": {"contrast": "gqmle", "kernel": "uniform", "lambda": 0.4,
                      "u_grid": {"k_over": 10},
                      "optimizer": {"restarts": 3, "tol": 1e-6}},
        "simulate": {"n": 250, "seed": 9},
        "mc": {"ns": [500, 1000], "reps": 7, "kernels": ["epanechnikov"], "seed": 4},
        "tau": {"u": 0.25, "s_max": 12, "p": 1, "reps": 333, "burn_in": 50, "seed": 2}
    })json");
    REQUIRE(cfg.model.has_value());
    CHECK(cfg.model->family == Family::TvGarch);
    CHECK(cfg.kernel.name() == "uniform");
    CHECK(cfg.lambda == 0.4);
    CHECK(cfg.u_grid.size() == 9);
    CHECK(cfg.optimizer.restarts == 3);
    CHECK(cfg.sim_n == 250);
    CHECK(cfg.mc_ns == std::vector<int>{500, 1000});
    CHECK(cfg.tau_p == 1);

    const EstimatorConfig est = cfg.estimator_config(*cfg.model);
    CHECK(est.contrast.kind == ContrastKind::GaussianQmle);
    CHECK(est.theta_box.dim() == 3);

    const McScenario sc = cfg.mc_scenario();
    CHECK(sc.reps == 7);
    CHECK(sc.kernels.size() == 1);
}

TEST_CASE("config parsing: custom family with path expressions") {
    const RunConfig cfg = parse_config_text(R"json({
        "model": {"family": "garch", "p": 1, "q": 1,
                  "paths": ["1+0.5*sin(5*u)", "0.1+0.4*cos2(4*u)", "0.1+0.4*u"],
                  "innovations": {"family": "gaussian", "sigma": 1.0}}
    })json");
    REQUIRE(cfg.model.has_value());
    const VecD at0 = cfg.model->path.eval(0.0);
    CHECK(at0[0] == doctest::Approx(1.0));
    CHECK(at0[1] == doctest::Approx(0.5));
    CHECK(at0[2] == doctest::Approx(0.1));
}

TEST_CASE("config parsing rejects unknown keys and bad values") {
    CHECK_THROWS_AS(parse_config_text(R"json({"modle": {}})json"), config_error);
    CHECK_THROWS_AS(parse_config_text(R"json({"model": {"scenario": "garch11_sec5", "n": 3}})json"),
                    config_error);
    CHECK_THROWS_AS(parse_config_text(R"json({"model": {"family": "garch77", "paths": ["1"]}})json"),
                    config_error);
    CHECK_THROWS_AS(parse_config_text(R"json({"estimator": {"contrast": "nope"}})json"), config_error);
    CHECK_THROWS_AS(parse_config_text(R"(not json)"), config_error);
    // invalid path (negative GARCH coefficient)
    CHECK_THROWS_AS(parse_config_text(R"json({
        "model": {"family": "garch", "p": 1, "q": 1, "paths": ["1", "-0.2", "0.1"]}
    })json"), config_error);
}
