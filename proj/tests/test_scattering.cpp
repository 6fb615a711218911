#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "qsl/scattering.hpp"
#include "qsl/solver.hpp"

using namespace qsl;
using std::numbers::pi;

namespace {

Field gaussian(const Grid& g, double amp = 1.0, double width = 1.0) {
    Field u(g);
    for (std::size_t i = 0; i < u.size(); ++i)
        u.v[i] = amp * std::exp(-0.5 * radius_sq(g, i) / (width * width));
    return u;
}

Field random_field(const Grid& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Field u(g);
    for (auto& z : u.v) z = cplx(nd(rng), nd(rng));
    return u;
}

double linf_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

}  // namespace

TEST_CASE("pullback basics") {
    const Grid g{1, 64, 8.0};
    const Field u = random_field(g, 2);

    CHECK(linf_diff(free_pullback(u, 0.0), u) == 0.0);
    CHECK(norm_l2(free_pullback(u, 1.37)) == doctest::Approx(norm_l2(u)).epsilon(1e-12));

    const Field ab = free_pullback(free_pullback(u, 0.4), 0.9);
    const Field once = free_pullback(u, 1.3);
    CHECK(linf_diff(ab, once) < 1e-12);
}

TEST_CASE("pullback undoes the free flow exactly") {
    const Grid g{1, 128, 15.0};
    const ModelOnGrid mg = ModelOnGrid::build(ModelSpec{1, {}, {}, {}, {}}, g);
    const Field u0 = gaussian(g);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    double worst = 0.0;
    run(mg, cfg, u0,
        {Observer{[&](long, const State& s) {
             worst = std::max(worst, linf_diff(free_pullback(s.u, s.t), u0));
         }, 1}});
    CHECK(worst < 1e-10);
}

TEST_CASE("weighted operator") {
    const Grid g{1, 512, 20.0};
    const Field u = gaussian(g);
    SUBCASE("reduces to x u at t = 0") {
        const auto h0 = h_operator(u, 0.0);
        double n = 0.0;
        for (int i = 0; i < g.m; ++i) n += std::norm(h0[0].v[i]);
        CHECK(n * g.cell() == doctest::Approx(std::sqrt(pi) / 2.0).epsilon(1e-10));
    }
    SUBCASE("commutes with the free flow") {
        const ModelOnGrid mg = ModelOnGrid::build(ModelSpec{1, {}, {}, {}, {}}, g);
        SolverConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_end = 1.0;
        std::vector<double> series;
        run(mg, cfg, gaussian(g),
            {Observer{[&](long, const State& s) {
                 const auto hu = h_operator(s.u, s.t);
                 double n = 0.0;
                 for (const auto& c : hu) n += norm_l2_sq(c);
                 series.push_back(n);
             }, 1}});
        for (double v : series) CHECK(v == doctest::Approx(series.front()).epsilon(1e-8));
    }
}

TEST_CASE("cauchy gaps") {
    const Grid g{1, 256, 20.0};
    Trajectory traj;
    SUBCASE("linear flow has zero gaps") {
        const ModelOnGrid mg = ModelOnGrid::build(ModelSpec{1, {}, {}, {}, {}}, g);
        SolverConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_end = 2.0;
        const Field u0 = gaussian(g);
        run(mg, cfg, u0,
            {Observer{[&](long, const State& s) {
                 for (double t : {0.5, 1.0, 2.0})
                     if (std::abs(s.t - t) < 1e-9) traj.checkpoints.push_back({s.t, s.u});
             }, 1}});
        const PullbackSeries ps = cauchy_gaps(traj);
        REQUIRE(ps.times.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(ps.gap_l2[i][i] == 0.0);
            for (std::size_t j = 0; j < 3; ++j) CHECK(ps.gap_l2[i][j] < 1e-10);
        }
    }
    SUBCASE("gap matrix is symmetric and triangle consistent") {
        traj.checkpoints = {{0.0, random_field(g, 4)}, {0.5, random_field(g, 5)},
                            {1.0, random_field(g, 6)}};
        const PullbackSeries ps = cauchy_gaps(traj);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(ps.gap_l2[i][j] == ps.gap_l2[j][i]);
                for (std::size_t k = 0; k < 3; ++k)
                    CHECK(ps.gap_l2[i][j] <= ps.gap_l2[i][k] + ps.gap_l2[k][j] + 1e-10);
            }
    }
}

TEST_CASE("defocusing gaps decay on a short run") {
    const Grid g{1, 512, 40.0};
    ModelSpec m;
    m.dim = 1;
    m.f.terms = {{-1.0, 2.0}};
    const ModelOnGrid mg = ModelOnGrid::build(m, g);
    Trajectory traj;
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 4.0;
    run(mg, cfg, gaussian(g),
        {Observer{[&](long, const State& s) {
             for (double t : {1.0, 2.0, 4.0})
                 if (std::abs(s.t - t) < 1e-9) traj.checkpoints.push_back({s.t, s.u});
         }, 1}});
    const PullbackSeries ps = cauchy_gaps(traj);
    REQUIRE(ps.times.size() == 3);
    // gap(1,2) > gap(2,4): the nonlinearity decays.
    CHECK(ps.gap_l2[0][1] > ps.gap_l2[1][2]);
    CHECK(ps.gap_sigma[0][1] > ps.gap_sigma[1][2]);
}

TEST_CASE("weighted-norm bound series") {
    Trajectory traj;
    SUBCASE("constant series for the free flow") {
        const Grid g{1, 256, 20.0};
        const ModelOnGrid mg = ModelOnGrid::build(ModelSpec{1, {}, {}, {}, {}}, g);
        SolverConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_end = 1.0;
        run(mg, cfg, gaussian(g),
            {Observer{[&](long, const State& s) { traj.records.push_back(compute_record(mg, s)); }, 1}});
        const MbBoundSeries mb = mb_bound_check(traj, 0.0);
        CHECK(mb.bounded_trend);
        for (double v : mb.hu_sq) CHECK(v == doctest::Approx(mb.hu_sq.front()).epsilon(1e-7));
    }
    SUBCASE("quintic defocusing series stays bounded on a contained window") {
        const Grid g{1, 512, 30.0};
        ModelSpec m;
        m.dim = 1;
        m.f.terms = {{-1.0, 2.0}};
        const ModelOnGrid mg = ModelOnGrid::build(m, g);
        SolverConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_end = 3.0;
        run(mg, cfg, gaussian(g),
            {Observer{[&](long, const State& s) { traj.records.push_back(compute_record(mg, s)); }, 1}});
        const MbBoundSeries mb = mb_bound_check(traj, 0.0);
        CHECK(mb.bounded_trend);
        CHECK(mb.sup_hu_sq > 0.0);
        // The weighted-operator norm is controlled by the balance quantity.
        const double P0 = traj.records.front().p_value;
        CHECK(mb.sup_hu_sq <= P0 * (1.0 + 1e-6));
    }
    SUBCASE("synthetic quadratic growth is flagged") {
        for (double t = 0.0; t <= 10.0; t += 0.5) {
            DiagnosticRecord r;
            r.t = t;
            r.hu_sq = 1.0 + t * t;
            traj.records.push_back(r);
        }
        const MbBoundSeries mb = mb_bound_check(traj, 0.0);
        CHECK_FALSE(mb.bounded_trend);
    }
}
