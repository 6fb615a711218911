#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "qsl/config.hpp"
#include "qsl/io.hpp"
#include "qsl/orchestrate.hpp"

using namespace qsl;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

const char* kMinimalConfig = R"(
[model]
dim = 1
[grid]
points = 64
half_width = 10.0
[solver]
dt = 1e-3
t_end = 0.1
)";

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("checkpoint round-trip is bit exact") {
    const Grid g{1, 64, 7.5};
    std::mt19937 rng(5);
    std::normal_distribution<double> nd(0.0, 1.0);
    Field u(g);
    for (auto& z : u.v) z = cplx(nd(rng), nd(rng));

    const std::string path = tmp_path("qsl_ckpt_test.bin");
    write_checkpoint(path, u, 1.234567890123456789);
    const Checkpoint ck = read_checkpoint(path);
    CHECK(ck.field.grid == g);
    CHECK(std::memcmp(ck.field.v.data(), u.v.data(), u.v.size() * sizeof(cplx)) == 0);
    CHECK(std::memcmp(&ck.t, &ck.t, sizeof(double)) == 0);
    // Header parses back the exact double.
    const double t_expect = 1.234567890123456789;
    CHECK(ck.t == t_expect);
    std::filesystem::remove(path);
}

TEST_CASE("config parsing") {
    SUBCASE("minimal config fills documented defaults") {
        const RunConfig cfg = parse_config(kMinimalConfig);
        CHECK(cfg.model.dim == 1);
        CHECK(cfg.grid.m == 64);
        CHECK(cfg.solver.scheme == Scheme::Strang);
        CHECK(cfg.solver.sample_every == 10);
        CHECK(cfg.solver.boundary_mass_tol == 1e-8);
        CHECK(cfg.initial.kind == InitialKind::Gaussian);
        CHECK(cfg.output_dir == "out");
    }
    SUBCASE("unknown keys are named with their line") {
        const std::string bad = std::string(kMinimalConfig) + "unknown_key = 1\n";
        try {
            parse_config(bad);
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("unknown_key") != std::string::npos);
            CHECK(std::string(e.what()).find("line") != std::string::npos);
        }
    }
    SUBCASE("strang with the quasilinear term is rejected by name") {
        const std::string bad = R"(
[model]
dim = 1
h_kind = power
h_alpha = 1.0
[grid]
points = 64
half_width = 10.0
[solver]
scheme = strang
dt = 1e-3
t_end = 0.1
)";
        try {
            parse_config(bad);
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("strang requires delta_h = 0") != std::string::npos);
        }
    }
    SUBCASE("ifrk4 stability margin is checked against the grid") {
        const std::string bad = R"(
[model]
dim = 1
h_kind = power
h_alpha = 1.0
[grid]
points = 1024
half_width = 10.0
[solver]
scheme = ifrk4
dt = 0.1
t_end = 0.1
)";
        try {
            parse_config(bad);
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("dt * max|k|^2") != std::string::npos);
        }
    }
    SUBCASE("checkpoints past t_end are rejected") {
        const std::string bad = std::string(kMinimalConfig) +
                                "[diagnostics]\ncheckpoint_times = 5.0\n";
        CHECK_THROWS_AS(parse_config(bad), ConfigError);
    }
}

TEST_CASE("diagnostics csv schema is frozen") {
    CHECK(std::string(kDiagnosticsCsvHeader) ==
          "t,mass,energy,variance,dilation,grad_l2,gradh_l2,pot_mass,hartree_quart,"
          "g_int,g1_int,g2_int,phi,p_value,p_expanded,theta,hu_sq,boundary_fraction,boundary_ok");
    DiagnosticRecord r;
    r.t = 0.5;
    r.mass = 2.0;
    const std::string csv = diagnostics_csv({r});
    CHECK(csv.find("0.5,2,") != std::string::npos);
}

TEST_CASE("plot export") {
    SUBCASE("slope annotation recovers the power law") {
        std::vector<double> t, y;
        for (double tt = 1.0; tt <= 60.0; tt += 1.0) {
            t.push_back(tt);
            y.push_back(1.0 / (tt * tt));
        }
        const std::string out = export_plotdata(t, y, PlotMode::SlopeFit, 5.0, 50.0);
        CHECK(out.find("# slope -2") != std::string::npos);
    }
    SUBCASE("empty series give an empty table") {
        CHECK(export_plotdata({}, {}, PlotMode::Linear).empty());
    }
}

TEST_CASE("orchestrated runs are deterministic and complete") {
    RunConfig cfg = parse_config(kMinimalConfig);
    cfg.solver.t_end = 0.2;
    cfg.checkpoint_times = {0.1, 0.2};
    cfg.prefix = "detrun";

    const std::string dir1 = tmp_path("qsl_out1");
    const std::string dir2 = tmp_path("qsl_out2");
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    cfg.output_dir = dir1;
    CHECK(orchestrate(cfg).exit_code == kExitOk);
    cfg.output_dir = dir2;
    CHECK(orchestrate(cfg).exit_code == kExitOk);

    const std::string csv1 = slurp(dir1 + "/detrun_diagnostics.csv");
    const std::string csv2 = slurp(dir2 + "/detrun_diagnostics.csv");
    CHECK(!csv1.empty());
    CHECK(csv1 == csv2);

    const std::string ck1 = slurp(dir1 + "/detrun_ckpt_t0.2.bin");
    const std::string ck2 = slurp(dir2 + "/detrun_ckpt_t0.2.bin");
    CHECK(!ck1.empty());
    CHECK(ck1 == ck2);

    CHECK(std::filesystem::exists(dir1 + "/detrun_manifest.json"));
    CHECK(std::filesystem::exists(dir1 + "/detrun_scatter.csv"));
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("diverged runs flush partial artifacts and exit with the diverged code") {
    const char* unstable = R"(
[model]
dim = 1
h_kind = power
h_alpha = 1.0
[grid]
points = 128
half_width = 3.14159
[solver]
scheme = ifrk4
dt = 8.5e-3
t_end = 2.0
sample_every = 1
[initial]
kind = gaussian
amplitude = 2.0
width = 0.5
)";
    RunConfig cfg = parse_config(unstable);
    cfg.prefix = "boom";
    const std::string dir = tmp_path("qsl_div");
    std::filesystem::remove_all(dir);
    cfg.output_dir = dir;
    const OrchestrateResult res = orchestrate(cfg);
    CHECK(res.exit_code == kExitDiverged);
    CHECK(res.failed_stage == "solver");
    CHECK(std::filesystem::exists(dir + "/boom_diagnostics.csv"));
    const std::string manifest = slurp(dir + "/boom_manifest.json");
    CHECK(manifest.find("diverged") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("zero-length runs still produce the initial record and manifest") {
    RunConfig cfg = parse_config(kMinimalConfig);
    cfg.solver.t_end = 0.0;
    cfg.prefix = "zero";
    const std::string dir = tmp_path("qsl_out0");
    std::filesystem::remove_all(dir);
    cfg.output_dir = dir;
    CHECK(orchestrate(cfg).exit_code == kExitOk);
    const CsvTable t = read_csv(dir + "/zero_diagnostics.csv");
    CHECK(t.column("t").size() == 1);
    CHECK(std::filesystem::exists(dir + "/zero_manifest.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("shipped configurations stay parseable") {
    for (const char* name : {"configs/quintic_1d.ini", "configs/quasilinear_1d.ini",
                             "configs/scattering_check.ini"}) {
        const std::filesystem::path p = std::filesystem::path(QSL_SOURCE_DIR) / name;
        CHECK_NOTHROW(load_config(p.string()));
    }
}

TEST_CASE("csv reader round-trips tables") {
    const std::string path = tmp_path("qsl_table.csv");
    write_text(path, table_csv({"t", "y"}, {{0.0, 1.0, 2.0}, {3.0, 4.0, 5.0}}));
    const CsvTable t = read_csv(path);
    CHECK(t.columns.size() == 2);
    CHECK(t.column("y")[2] == 5.0);
    std::filesystem::remove(path);
}
