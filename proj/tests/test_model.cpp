#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "qsl/model.hpp"

using namespace qsl;

namespace {

// Independent quadrature oracle: trapezoid of f over [0, s] with `panels`.
template <typename Fn>
double trapz(Fn&& f, double s, int panels) {
    double acc = 0.5 * (f(0.0) + f(s));
    for (int i = 1; i < panels; ++i) acc += f(s * i / panels);
    return acc * s / panels;
}

// Richardson-extrapolated trapezoid (panels and 2x panels) for the tight
// tolerances; still a pure quadrature of f.
template <typename Fn>
double trapz_rich(Fn&& f, double s, int panels) {
    const double c = trapz(f, s, panels);
    const double fine = trapz(f, s, 2 * panels);
    return fine + (fine - c) / 3.0;
}

FSpec fspec(std::initializer_list<FTerm> terms) {
    FSpec f;
    f.terms = terms;
    return f;
}

}  // namespace

TEST_CASE("h family point values") {
    HSpec none;
    HSpec lin{HKind::Power, 1.0};
    HSpec quad{HKind::Power, 2.0};

    auto v = eval_h(lin, 4.0);
    CHECK(v.h == doctest::Approx(4.0));
    CHECK(v.hp == doctest::Approx(1.0));
    CHECK(v.hpp == doctest::Approx(0.0));

    v = eval_h(none, 7.0);
    CHECK(v.h == 0.0);
    CHECK(v.hp == 0.0);
    CHECK(v.hpp == 0.0);

    v = eval_h(quad, 3.0);
    CHECK(v.h == doctest::Approx(9.0));
    CHECK(v.hp == doctest::Approx(6.0));
    CHECK(v.hpp == doctest::Approx(2.0));

    CHECK_THROWS_AS(eval_h(lin, -1.0), DomainError);
    CHECK_THROWS_AS((HSpec{HKind::Power, 0.3}.validate()), DomainError);
}

TEST_CASE("F and G point values") {
    const FSpec cubic = fspec({{-1.0, 1.0}});
    auto v = eval_F(cubic, 2.0);
    CHECK(v.F == doctest::Approx(-2.0));
    CHECK(v.G == doctest::Approx(-2.0));

    const FSpec zero;
    v = eval_F(zero, 5.0);
    CHECK(v.F == 0.0);
    CHECK(v.G == 0.0);
    CHECK(v.G1 == 0.0);
    CHECK(v.G2 == 0.0);

    const FSpec mixed = fspec({{1.0, 1.0}, {-1.0, 2.0}});  // F = s - s^2
    v = eval_F(mixed, 1.0);
    CHECK(v.G1 == doctest::Approx(0.5));
    CHECK(v.G2 == doctest::Approx(1.0 / 3.0));
    CHECK(v.G == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("G matches the quadrature oracle") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    std::uniform_real_distribution<double> svals(0.1, 4.0);
    for (int rep = 0; rep < 20; ++rep) {
        FSpec f = fspec({{coeff(rng), 1.0}, {coeff(rng), 1.5}, {coeff(rng), 3.0}});
        const double s = svals(rng);
        const double g = eval_F(f, s).G;
        const double oracle = trapz_rich([&](double e) { return eval_F(f, e).F; }, s, 10000);
        CHECK(g == doctest::Approx(oracle).epsilon(1e-10));
        // Split identity and signs.
        const auto v = eval_F(f, s);
        CHECK(v.G == doctest::Approx(v.G1 - v.G2).epsilon(1e-13));
        CHECK(v.G1 >= 0.0);
        CHECK(v.G2 >= 0.0);
    }
}

TEST_CASE("Htilde closed form and quadrature") {
    CHECK(eval_htilde(HSpec{HKind::Power, 1.0}, 2.0) == doctest::Approx(2.0));
    CHECK(eval_htilde(HSpec{}, 5.0) == 0.0);
    CHECK(eval_htilde(HSpec{HKind::Power, 0.5}, 4.0) == doctest::Approx(1.0));

    const HSpec h{HKind::Power, 1.3};
    const double s = 2.7;
    const double oracle = trapz(
        [&](double e) {
            const double hp = e == 0.0 ? 0.0 : 1.3 * std::pow(e, 0.3);
            return hp * hp * e;
        },
        s, 20000);
    CHECK(eval_htilde(h, s) == doctest::Approx(oracle).epsilon(1e-7));

    // Nondecreasing from zero.
    double prev = 0.0;
    CHECK(eval_htilde(h, 0.0) == 0.0);
    for (double e = 0.25; e <= 3.0; e += 0.25) {
        const double cur = eval_htilde(h, e);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("theta and interaction kernels match derivative combinations") {
    const HSpec h{HKind::Power, 1.5};
    for (double s : {0.3, 1.0, 2.4}) {
        const HValues v = eval_h(h, s);
        CHECK(h_theta_kernel(h, s) ==
              doctest::Approx((2.0 * v.hpp * v.hp * s + v.hp * v.hp) * s).epsilon(1e-12));
        CHECK(h_cross_kernel(h, s) == doctest::Approx(v.hpp * v.hp * s * s).epsilon(1e-12));
        CHECK(h_interaction_kernel(h, s) ==
              doctest::Approx((5.0 * v.hp + 2.0 * v.hpp * s) * v.hp * s).epsilon(1e-12));
    }
    CHECK(h_theta_kernel(h, 0.0) == 0.0);
    CHECK(h_cross_kernel(HSpec{HKind::Power, 1.0}, 2.0) == 0.0);
}

TEST_CASE("potential families") {
    PotentialSpec zero;
    CHECK(eval_potential(zero, 3.0) == 0.0);

    PotentialSpec pw{PotentialKind::SmoothedInversePower, 1.0, 2.0, 0.0};
    CHECK(eval_potential(pw, 4.0) == doctest::Approx(-0.25));

    PotentialSpec br{PotentialKind::BoundedRational, 1.0};
    CHECK(eval_potential(br, 0.0) == 0.0);
    CHECK(eval_potential(br, 1.0) == doctest::Approx(-0.5));

    for (double r2 : {0.0, 0.3, 2.0, 50.0}) {
        CHECK(eval_potential(pw, r2 + 0.01) <= 0.0);
        CHECK(eval_potential(br, r2) <= 0.0);
    }

    // x.grad against a finite difference in r.
    PotentialSpec sm{PotentialKind::SmoothedInversePower, 2.0, 1.5, 0.4};
    for (double r : {0.5, 1.0, 3.0}) {
        const double dr = 1e-6;
        const double num =
            r * (eval_potential(sm, (r + dr) * (r + dr)) - eval_potential(sm, (r - dr) * (r - dr))) /
            (2.0 * dr);
        CHECK(eval_potential_xdot(sm, r * r) == doctest::Approx(num).epsilon(1e-6));
    }
}

TEST_CASE("constant classification") {
    SUBCASE("quasilinear with cubic defocusing, N = 3") {
        ModelSpec m;
        m.dim = 3;
        m.h = {HKind::Power, 1.0};
        m.f = fspec({{-1.0, 1.0}});
        const auto rep = classify_constants(m);
        CHECK(rep.est_case == EstimateCase::Case2);
        CHECK(rep.k1 == doctest::Approx(1.0));
        CHECK(rep.k2 == doctest::Approx(0.5));
        CHECK(rep.l == doctest::Approx(1.0));
    }
    SUBCASE("defocusing septic above the sign threshold, N = 1") {
        ModelSpec m;
        m.dim = 1;
        m.f = fspec({{-1.0, 3.0}});
        const auto rep = classify_constants(m);
        CHECK(rep.est_case == EstimateCase::Case1);
        CHECK(rep.l == 0.0);
    }
    SUBCASE("all-zero nonlinearities") {
        ModelSpec m;
        m.dim = 2;
        const auto rep = classify_constants(m);
        CHECK(rep.est_case == EstimateCase::Case1);
        CHECK(rep.l == 0.0);
    }
    SUBCASE("cubic defocusing 1D: the constants behind the slow decay") {
        ModelSpec m;
        m.dim = 1;
        m.f = fspec({{-1.0, 1.0}});
        const auto rep = classify_constants(m);
        CHECK(rep.est_case == EstimateCase::Case2);
        CHECK(rep.k2 == doctest::Approx(0.5));
        CHECK(rep.l == doctest::Approx(0.5));
    }
    SUBCASE("quintic defocusing 1D sits exactly on the sign boundary") {
        ModelSpec m;
        m.dim = 1;
        m.f = fspec({{-1.0, 2.0}});
        const auto rep = classify_constants(m);
        CHECK(rep.est_case == EstimateCase::Case1);
        CHECK(rep.l == 0.0);
    }
    SUBCASE("potential exponents") {
        ModelSpec m;
        m.dim = 3;
        m.v = {PotentialKind::SmoothedInversePower, 1.0, 1.5, 0.0};
        const auto rep = classify_constants(m);
        CHECK(rep.k4 == doctest::Approx(0.5));
        CHECK(rep.est_case == EstimateCase::Case2);

        m.v.exponent = 2.0;
        const auto rep2 = classify_constants(m);
        CHECK(rep2.k4 == 0.0);
        CHECK(rep2.est_case == EstimateCase::Case1);
    }
}

TEST_CASE("classification is scale consistent") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> lam(0.1, 10.0);
    ModelSpec m;
    m.dim = 2;
    m.h = {HKind::Power, 1.25};
    m.f = fspec({{0.7, 0.8}, {-0.4, 1.6}});
    const auto base = classify_constants(m);
    for (int rep = 0; rep < 10; ++rep) {
        const double s = lam(rng);
        ModelSpec scaled = m;
        for (auto& t : scaled.f.terms) t.coeff *= s;
        const auto r = classify_constants(scaled);
        CHECK(r.k2 == doctest::Approx(base.k2));
        CHECK(r.k3 == doctest::Approx(base.k3));
        CHECK(r.l == doctest::Approx(base.l));
    }
}
