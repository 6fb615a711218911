#include "qsl/checker.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace qsl {

// ---------------------------------------------------------------------------
// Rational arithmetic.

namespace {

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    a = std::llabs(a);
    b = std::llabs(b);
    while (b) {
        const std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a == 0 ? 1 : a;
}

Rat normalized(std::int64_t n, std::int64_t d) {
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const std::int64_t g = gcd64(n, d);
    return Rat{n / g, d / g};
}

bool mul_overflow(std::int64_t a, std::int64_t b, std::int64_t* out) {
    return __builtin_mul_overflow(a, b, out);
}

}  // namespace

std::optional<Rat> Rat::from_double(double v, std::int64_t max_den) {
    if (!std::isfinite(v)) return std::nullopt;
    // Continued-fraction reconstruction, accepted only on exact round-trip.
    double x = v;
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int it = 0; it < 64; ++it) {
        const double fl = std::floor(x);
        if (std::abs(fl) > 1e15) return std::nullopt;
        const std::int64_t a = static_cast<std::int64_t>(fl);
        std::int64_t p2, q2, t;
        if (mul_overflow(a, p1, &t)) return std::nullopt;
        p2 = t + p0;
        if (mul_overflow(a, q1, &t)) return std::nullopt;
        q2 = t + q0;
        if (q2 > max_den) return std::nullopt;
        // Keep numerators small enough that cross-products in cmp() stay
        // inside int64.
        if (std::llabs(p2) > (std::int64_t{1} << 40)) return std::nullopt;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (static_cast<double>(p1) / static_cast<double>(q1) == v) return normalized(p1, q1);
        const double rem = x - fl;
        if (rem == 0.0) return std::nullopt;
        x = 1.0 / rem;
    }
    return std::nullopt;
}

Rat Rat::operator+(const Rat& o) const { return normalized(num * o.den + o.num * den, den * o.den); }
Rat Rat::operator-(const Rat& o) const { return normalized(num * o.den - o.num * den, den * o.den); }
Rat Rat::operator*(const Rat& o) const { return normalized(num * o.num, den * o.den); }
Rat Rat::operator/(const Rat& o) const { return normalized(num * o.den, den * o.num); }

int Rat::cmp(const Rat& o) const {
    const std::int64_t lhs = num * o.den, rhs = o.num * den;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

int compare_guarded(double a, double b, bool* exact) {
    const auto ra = Rat::from_double(a);
    const auto rb = Rat::from_double(b);
    if (ra && rb) {
        if (exact) *exact = true;
        return ra->cmp(*rb);
    }
    if (exact) *exact = false;
    if (std::abs(a - b) <= 1e-12) return 0;
    return a < b ? -1 : 1;
}

// ---------------------------------------------------------------------------
// Report rendering.

namespace {

std::string fmt_g(double v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    if (v == -std::numeric_limits<double>::infinity()) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Applies: return "applies";
        case Verdict::Fails: return "fails";
        case Verdict::NotApplicable: return "not-applicable";
    }
    return "?";
}

}  // namespace

std::vector<std::string> TheoremReport::failed_names() const {
    std::vector<std::string> out;
    for (const auto& c : conditions)
        if (!c.ok) out.push_back(c.name);
    return out;
}

std::string TheoremReport::render() const {
    std::string s = id + ": " + verdict_name(verdict) + "\n";
    for (const auto& c : conditions) {
        s += "  [" + std::string(c.ok ? "ok  " : "FAIL") + (c.boundary ? "/boundary" : "") + "] " +
             c.name;
        if (!c.detail.empty()) s += "  (" + c.detail + ")";
        s += "\n";
    }
    for (const auto& [k, v] : constants) s += "  " + k + " = " + fmt_g(v) + "\n";
    for (const auto& w : windows)
        s += "  window " + w.name + " = (" + fmt_g(w.lo) + ", " + fmt_g(w.hi) + ")" +
             (w.nonempty ? "" : "  [empty]") + "\n";
    if (!note.empty()) s += "  note: " + note + "\n";
    return s;
}

std::string TheoremReport::machine_line() const {
    std::string s = "{\"id\":\"" + id + "\",\"verdict\":\"" + verdict_name(verdict) + "\"";
    s += ",\"conditions\":[";
    for (std::size_t i = 0; i < conditions.size(); ++i) {
        const auto& c = conditions[i];
        s += std::string(i ? "," : "") + "{\"name\":\"" + c.name + "\",\"ok\":" +
             (c.ok ? "true" : "false") + (c.boundary ? ",\"boundary\":true" : "") + "}";
    }
    s += "],\"constants\":{";
    for (std::size_t i = 0; i < constants.size(); ++i)
        s += std::string(i ? "," : "") + "\"" + constants[i].first + "\":" + fmt_g(constants[i].second);
    s += "},\"windows\":[";
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& w = windows[i];
        s += std::string(i ? "," : "") + "{\"name\":\"" + w.name + "\",\"lo\":" + fmt_g(w.lo) +
             ",\"hi\":" + fmt_g(w.hi) + ",\"nonempty\":" + (w.nonempty ? "true" : "false") + "}";
    }
    s += "]";
    if (!note.empty()) s += ",\"note\":\"" + note + "\"";
    s += "}";
    return s;
}

// ---------------------------------------------------------------------------

AdmissiblePair admissible_pair(int dim, double r) {
    const double N = dim;
    const double rmax = dim >= 3 ? 2.0 * N / (N - 2.0) : std::numeric_limits<double>::infinity();
    if (r < 2.0 || !(r < rmax)) throw DomainError("admissible pair: r out of range");
    AdmissiblePair out;
    out.r = r;
    out.q = r == 2.0 ? std::numeric_limits<double>::infinity() : 4.0 * r / (N * (r - 2.0));
    out.q_conj = std::isinf(out.q) ? 1.0 : out.q / (out.q - 1.0);
    out.r_conj = r / (r - 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Interval helpers (open intervals; emptiness decided with the guarded compare).

namespace {

struct Interval {
    double lo = 1.0;
    double hi = 2.0;
    void cap_hi(double v) { hi = std::min(hi, v); }
    void raise_lo(double v) { lo = std::max(lo, v); }
    bool nonempty() const { return compare_guarded(lo, hi) < 0; }
};

WindowOut to_window(const std::string& name, const Interval& iv) {
    return WindowOut{name, iv.lo, iv.hi, iv.nonempty()};
}

Condition cond(const std::string& name, bool ok, const std::string& detail = "", bool boundary = false) {
    return Condition{name, ok, boundary, detail};
}

// Strict inequality lhs < rhs with boundary bookkeeping.
Condition cond_lt(const std::string& name, double lhs, double rhs, const std::string& detail = "") {
    const int c = compare_guarded(lhs, rhs);
    Condition out{name, c < 0, c == 0, detail};
    if (out.detail.empty()) out.detail = fmt_g(lhs) + " vs " + fmt_g(rhs);
    return out;
}

double two_star(int dim) {
    return dim >= 3 ? 2.0 * dim / (dim - 2.0) : std::numeric_limits<double>::infinity();
}

}  // namespace

// ---------------------------------------------------------------------------

WvReport check_wv(const ModelSpec& model) {
    WvReport out;
    TheoremReport& rep = out.report;
    const double N = model.dim;
    const bool quasilinear = model.h.active();
    rep.id = quasilinear ? "WV2" : "WV1";

    auto pot_power = [](const PotentialSpec& p) { return p.kind == PotentialKind::SmoothedInversePower; };

    if (!quasilinear) {
        // V in L^{p1} + L^inf for some p1 > max(1, N/2).
        Interval p1{std::max(1.0, N / 2.0), std::numeric_limits<double>::infinity()};
        if (!model.v.zero() && pot_power(model.v)) p1.cap_hi(N / model.v.exponent);
        Interval p2{std::max(1.0, N / 4.0), std::numeric_limits<double>::infinity()};
        if (!model.w.zero() && pot_power(model.w)) p2.cap_hi(N / model.w.exponent);
        rep.conditions.push_back(cond("V in L^p1 + L^inf, p1 > max(1, N/2)", p1.nonempty(),
                                      "window (" + fmt_g(p1.lo) + ", " + fmt_g(p1.hi) + ")"));
        rep.conditions.push_back(cond("W in L^p2 + L^inf, p2 > max(1, N/4)", p2.nonempty(),
                                      "window (" + fmt_g(p2.lo) + ", " + fmt_g(p2.hi) + ")"));
        out.p1_window = to_window("p1", p1);
        out.p2_window = to_window("p2", p2);
        const bool ok = p1.nonempty() && p2.nonempty();
        rep.verdict = ok ? Verdict::Applies : Verdict::Fails;
        out.cls = ok ? WvClass::WV1 : WvClass::Neither;
        return out;
    }

    // WV2: V in L^inf; W in L^1 near the origin and in L^{p2} + L^inf.
    bool v_ok = model.v.zero() || model.v.kind == PotentialKind::BoundedRational;
    rep.conditions.push_back(cond("V in L^inf", v_ok,
                                  v_ok ? "bounded potential" : "inverse power is unbounded at the origin"));
    bool w_l1 = true;
    std::string w_detail = "no kernel";
    if (!model.w.zero() && pot_power(model.w)) {
        w_l1 = compare_guarded(model.w.exponent, N) < 0;  // n < N for local integrability
        w_detail = "needs n < N near the origin; n = " + fmt_g(model.w.exponent) +
                   " (power tails are not globally integrable; origin test only)";
    } else if (!model.w.zero()) {
        w_detail = "bounded kernel; integrable near the origin";
    }
    rep.conditions.push_back(cond("W in L^1 near the origin", w_l1, w_detail));
    Interval p2{std::max(1.0, N / 4.0), std::numeric_limits<double>::infinity()};
    if (!model.w.zero() && pot_power(model.w)) p2.cap_hi(N / model.w.exponent);
    rep.conditions.push_back(cond("W in L^p2 + L^inf, p2 > max(1, N/4)", p2.nonempty(),
                                  "window (" + fmt_g(p2.lo) + ", " + fmt_g(p2.hi) + ")"));
    out.p2_window = to_window("p2", p2);
    const bool ok = v_ok && w_l1 && p2.nonempty();
    rep.verdict = ok ? Verdict::Applies : Verdict::Fails;
    out.cls = ok ? WvClass::WV2 : WvClass::Neither;
    return out;
}

// ---------------------------------------------------------------------------
// Gamma pairs for the global-existence smallness test.

namespace {

struct GammaPair {
    bool feasible = false;
    double g1 = 0.0, g2 = 0.0;
    double c = 0.0, cp = 0.0;
    std::string why;
};

// Near region (s <= 1): [G1]^g1 <= c s needs g1 (b+1) >= 1; [G1]^g2 <= c' env^{2*}
// needs g2 (b+1) >= e_near.  `ratio` of the two exponents pinned to one when
// pin = true, otherwise g2 is pushed strictly above the pin.
GammaPair solve_near(double beta, double cg, double e_near, int dim, bool pin) {
    GammaPair out;
    const double ts = two_star(dim);
    const double g1 = 1.0 / (beta + 1.0);
    const double gpin = g1 + 0.5 * ts * (1.0 - g1);
    double g2 = gpin;
    if (pin) {
        if (compare_guarded(g2 * (beta + 1.0), e_near) < 0) {
            out.why = "gamma2 (beta+1) < 2* envelope exponent near 0";
            return out;
        }
    } else {
        g2 = std::max(gpin, e_near / (beta + 1.0)) + 0.25;
    }
    out.feasible = true;
    out.g1 = g1;
    out.g2 = g2;
    out.c = std::pow(cg, g1);
    out.cp = std::pow(cg, g2);
    return out;
}

// Far region (s > 1): [G1]^g1 <= c s needs g1 (b+1) <= 1; [G1]^g2 <= c' env^{2*}
// needs g2 (b+1) <= e_far together with g2 > 1.
GammaPair solve_far(double beta, double cg, double e_far, int dim, bool pin) {
    GammaPair out;
    const double ts = two_star(dim);
    const double g1 = 1.0 / (beta + 1.0);
    const double gpin = g1 + 0.5 * ts * (1.0 - g1);
    const double gmax = e_far / (beta + 1.0);
    double g2 = gpin;
    if (pin) {
        if (compare_guarded(g2 * (beta + 1.0), e_far) > 0) {
            out.why = "gamma2~ (beta+1) > 2* envelope exponent past 1";
            return out;
        }
    } else {
        if (!(compare_guarded(gpin, gmax) < 0)) {
            out.why = "no gamma2~ strictly above the pinned ratio";
            return out;
        }
        g2 = gmax;
    }
    if (!(g2 > 1.0)) {
        out.why = "gamma2~ <= 1";
        return out;
    }
    out.feasible = true;
    out.g1 = g1;
    out.g2 = g2;
    out.c = std::pow(cg, g1);
    out.cp = std::pow(cg, g2);
    return out;
}

double smallness_product(double c, double cp, double mass_sq, double cs, int dim) {
    const double N = dim;
    const double pref = std::pow(2.0, two_star(dim) - 1.0) * cs;
    return std::pow(c * mass_sq, 2.0 / N) * std::pow(pref * cp, (N - 2.0) / N);
}

}  // namespace

TheoremReport check_theorem1(const ModelSpec& model, double mass_sq, double energy,
                             double sobolev_cs) {
    TheoremReport rep;
    rep.id = "theorem1";
    model.validate();

    if (model.f.defocusing()) {
        rep.note = "case 1 (defocusing)";
        rep.conditions.push_back(cond("F(s) <= 0 for s >= 0", true));
        rep.conditions.push_back(cond("0 < mass^2 < inf", mass_sq > 0.0 && std::isfinite(mass_sq),
                                      fmt_g(mass_sq)));
        rep.conditions.push_back(
            cond("0 <= E(u0) < inf", energy >= 0.0 && std::isfinite(energy), fmt_g(energy)));
        const bool ok = rep.failed_names().empty();
        rep.verdict = ok ? Verdict::Applies : Verdict::Fails;
        return rep;
    }

    rep.note = "case 2 (combined defocusing and focusing)";
    if (model.dim < 3 || !model.h.active()) {
        rep.conditions.push_back(cond("case 2 requires N >= 3 and delta_h = 1",
                                      false, "N = " + std::to_string(model.dim)));
        rep.verdict = Verdict::Fails;
        return rep;
    }
    const FTerm* foc = nullptr;
    int nfoc = 0;
    for (const FTerm& t : model.f.terms)
        if (t.coeff > 0.0) {
            foc = &t;
            ++nfoc;
        }
    if (nfoc != 1) throw UnsupportedFamilyError("theorem1 case 2 needs a single focusing monomial");

    const double beta = foc->exponent;
    const double cg = foc->coeff / (beta + 1.0);
    const double alpha = model.h.alpha;
    // Envelope [s^(1/2) + h(s)]^{2*}.
    const double e_near = two_star(model.dim) * std::min(0.5, alpha);
    const double e_far = two_star(model.dim) * std::max(0.5, alpha);

    struct Route {
        const char* name;
        GammaPair near, far;
        double product = 0.0;
        bool ok = false;
    };
    std::vector<Route> routes(3);
    routes[0].name = "ratio1 = 1, ratio2 < 1";
    routes[0].near = solve_near(beta, cg, e_near, model.dim, true);
    routes[0].far = solve_far(beta, cg, e_far, model.dim, false);
    if (routes[0].near.feasible && routes[0].far.feasible)
        routes[0].product = smallness_product(routes[0].near.c, routes[0].near.cp, mass_sq,
                                              sobolev_cs, model.dim);
    routes[1].name = "ratio1 < 1, ratio2 = 1";
    routes[1].near = solve_near(beta, cg, e_near, model.dim, false);
    routes[1].far = solve_far(beta, cg, e_far, model.dim, true);
    if (routes[1].near.feasible && routes[1].far.feasible)
        routes[1].product = smallness_product(routes[1].far.c, routes[1].far.cp, mass_sq,
                                              sobolev_cs, model.dim);
    routes[2].name = "ratio1 = 1, ratio2 = 1";
    routes[2].near = solve_near(beta, cg, e_near, model.dim, true);
    routes[2].far = solve_far(beta, cg, e_far, model.dim, true);
    if (routes[2].near.feasible && routes[2].far.feasible)
        routes[2].product = smallness_product(routes[2].near.c, routes[2].near.cp, mass_sq,
                                              sobolev_cs, model.dim) +
                            smallness_product(routes[2].far.c, routes[2].far.cp, mass_sq,
                                              sobolev_cs, model.dim);

    for (Route& r : routes)
        r.ok = r.near.feasible && r.far.feasible && compare_guarded(r.product, 0.25) < 0;

    const Route* chosen = nullptr;
    for (const Route& r : routes)
        if (r.ok) {
            chosen = &r;
            break;
        }
    const Route& best = chosen ? *chosen : routes[2];
    rep.conditions.push_back(cond(std::string("gamma pair near 0 feasible (") + best.name + ")",
                                  best.near.feasible, best.near.why));
    rep.conditions.push_back(cond("gamma pair past 1 feasible", best.far.feasible, best.far.why));
    if (best.near.feasible && best.far.feasible)
        rep.conditions.push_back(
            cond_lt("smallness product < 1/4", best.product, 0.25));
    rep.constants = {{"gamma1", best.near.g1}, {"gamma2", best.near.g2},
                     {"gamma1~", best.far.g1}, {"gamma2~", best.far.g2},
                     {"c1", best.near.c},      {"c1'", best.near.cp},
                     {"c2", best.far.c},       {"c2'", best.far.cp},
                     {"product", best.product}};
    rep.note += std::string("; route: ") + best.name;
    rep.verdict = chosen ? Verdict::Applies : Verdict::Fails;
    return rep;
}

// ---------------------------------------------------------------------------

TheoremReport check_theorem3(const ModelSpec& model) {
    TheoremReport rep;
    rep.id = "theorem3";
    const ConstantReport cls = classify_constants(model);

    if (model.f.has_focusing_term() && (model.dim < 3 || !model.h.active())) {
        rep.conditions.push_back(
            cond("combined defocusing/focusing case requires N >= 3 and delta_h = 1", false));
        rep.verdict = Verdict::Fails;
        return rep;
    }

    auto sign_cond = [&](const std::string& name) {
        const bool failed =
            std::any_of(cls.failing.begin(), cls.failing.end(),
                        [&](const std::string& f) { return f.find(name) == 0; });
        return !failed;
    };
    rep.conditions.push_back(cond("(i) 2h''h's + (h')^2 >= 0", sign_cond("h:")));
    rep.conditions.push_back(cond("(ii) (N+2)G1 - N F1 s >= 0", sign_cond("F focusing")));
    rep.conditions.push_back(cond("(iii) N F2 s - (N+2)G2 >= 0", sign_cond("F defocusing")));
    rep.conditions.push_back(cond("(iv) 2V + x.grad V >= 0", sign_cond("V:")));
    rep.conditions.push_back(cond("(v) 2W + x.grad W >= 0", sign_cond("W:")));
    rep.constants = {{"k1", cls.k1}, {"k2", cls.k2}, {"k3", cls.k3},
                     {"k4", cls.k4}, {"k5", cls.k5}, {"l", cls.l}};
    rep.note = cls.est_case == EstimateCase::Case1 ? "case 1 (all sign conditions hold)"
                                                   : "case 2 (deviation constants engaged)";
    rep.verdict = Verdict::Applies;
    return rep;
}

// ---------------------------------------------------------------------------

TheoremReport check_theorem4(const ModelSpec& model, double p, double theta, double q, double r,
                             double cr) {
    TheoremReport rep;
    rep.id = "theorem4";
    const ConstantReport cls = classify_constants(model);
    const bool combined = model.f.has_focusing_term();
    const double l = cls.l;

    rep.conditions.push_back(cond("0 < theta <= 1", theta > 0.0 && theta <= 1.0, fmt_g(theta)));
    if (!combined) {
        rep.conditions.push_back(cond_lt("p > 1/(2 theta)", 1.0 / (2.0 * theta), p));
    } else {
        rep.conditions.push_back(cond_lt("l < 2(1-C_r)/(1+C_r)", l, 2.0 * (1.0 - cr) / (1.0 + cr)));
        const double pmin = std::max(1.0 / (2.0 * theta),
                                     (1.0 - cr) / (theta * (2.0 * (1.0 - cr) - l * (1.0 + cr))));
        rep.conditions.push_back(cond_lt("p > max(1/(2 theta), combined threshold)", pmin, p));
    }

    if (model.dim >= 3 && model.h.active() && q > 0.0 && r > 0.0) {
        // Bound (G) exponents against the gamma pair with the h-only envelope.
        const FTerm* foc = nullptr;
        for (const FTerm& t : model.f.terms)
            if (t.coeff > 0.0) foc = &t;
        if (foc) {
            const double beta = foc->exponent;
            const double g2 = 1.0 / (beta + 1.0) +
                              0.5 * two_star(model.dim) * (1.0 - 1.0 / (beta + 1.0));
            rep.conditions.push_back(cond_lt("1 <= r < gamma2", r, g2));
            rep.constants.push_back({"gamma2", g2});
            const double g1 = 1.0 / (beta + 1.0);
            double qmin = r * (g2 - g1) / (two_star(model.dim) * (r - g1));
            if (combined) qmin *= 2.0 * (1.0 - cr) / (2.0 * (1.0 - cr) - l * (1.0 + cr));
            rep.conditions.push_back(cond_lt("q above the gamma-pair threshold", qmin, q));
        }
    }
    rep.constants.push_back({"l", l});
    rep.constants.push_back({"C_r", cr});
    rep.verdict = rep.failed_names().empty() ? Verdict::Applies : Verdict::Fails;
    return rep;
}

// ---------------------------------------------------------------------------
// L^2 scattering exponent windows.

namespace {

// Dual-exponent time cap: the decay conditions reduce to r' < 2N/(N + 2l)
// for the potential and kernel terms (l = 0 in case 1 gives r' < 2).
double time_cap(int dim, double l) { return 2.0 * dim / (dim + 2.0 * l); }

double rprime_low(int dim) { return std::max(1.0, 2.0 * dim / (dim + 2.0)); }

// Decay interval for the local-nonlinearity exponent r'3:
// (2 - l) q'3 (r' - th) / (r' (p - th)) > 1 with q'3 = 4r'/((4+N) r' - 2N).
Interval f_decay_interval(int dim, double l, double th, double pp, const Interval& base) {
    Interval iv = base;
    const double N = dim;
    const double A = 4.0 * (2.0 - l) - (4.0 + N) * (pp - th);
    const double B = 4.0 * (2.0 - l) * th - 2.0 * N * (pp - th);
    const int asign = compare_guarded(A, 0.0);
    if (asign > 0) {
        iv.raise_lo(B / A);
    } else if (asign < 0) {
        iv.cap_hi(B / A);
    } else if (compare_guarded(B, 0.0) >= 0) {
        iv.cap_hi(iv.lo);  // empty
    }
    return iv;
}

}  // namespace

TheoremReport check_theorem6(const ModelSpec& model) {
    TheoremReport rep;
    rep.id = "theorem6";
    model.validate();
    const int N = model.dim;

    if (model.h.active()) {
        rep.conditions.push_back(cond("semilinear case (delta_h = 0)", false));
        rep.verdict = Verdict::NotApplicable;
        return rep;
    }
    if (!model.f.defocusing()) {
        rep.conditions.push_back(cond("defocusing case (F <= 0)", false));
        rep.verdict = Verdict::Fails;
        return rep;
    }
    for (const PotentialSpec* p : {&model.v, &model.w}) {
        if (!p->zero() && p->kind == PotentialKind::BoundedRational) {
            rep.conditions.push_back(
                cond("potential decays at infinity (inverse-power family)", false,
                     "bounded-rational potentials are not in any global L^p"));
            rep.verdict = Verdict::Fails;
            return rep;
        }
    }

    const ConstantReport cls = classify_constants(model);
    const double l = cls.l;
    rep.constants.push_back({"l", l});
    rep.note = cls.est_case == EstimateCase::Case1 ? "case 1 decay (1/t^2)" : "case 2 decay (1/t^(2-l))";

    const double lo = rprime_low(N);
    const double cap = time_cap(N, l);
    bool all_ok = true;

    if (!model.v.zero()) {
        const double m = model.v.exponent;
        Interval r1{lo, std::min(2.0, std::min(2.0 * N / (N + m), cap))};
        Interval r2{std::max(lo, 2.0 * N / (N + m)), std::min(2.0, cap)};
        rep.windows.push_back(to_window("r'1", r1));
        rep.windows.push_back(to_window("r'2", r2));
        rep.conditions.push_back(cond("V1 in L^{r'1/(2-r'1)} near 0 with time decay", r1.nonempty()));
        rep.conditions.push_back(cond("V2 in L^{r'2/(2-r'2)} past 1 with time decay", r2.nonempty()));
        all_ok = all_ok && r1.nonempty() && r2.nonempty();
    }
    if (!model.w.zero()) {
        const double n = model.w.exponent;
        Interval w1{lo, std::min(2.0, std::min(4.0 * N / (2.0 * N + n), cap))};
        Interval w2{std::max(lo, 4.0 * N / (2.0 * N + n)), std::min(2.0, cap)};
        rep.windows.push_back(to_window("r~'1", w1));
        rep.windows.push_back(to_window("r~'2", w2));
        rep.conditions.push_back(cond("W1 in L^{r~'1/(2(r~'1-2))} near 0 with time decay", w1.nonempty()));
        rep.conditions.push_back(cond("W2 past 1 with time decay", w2.nonempty()));
        all_ok = all_ok && w1.nonempty() && w2.nonempty();
    }
    if (!model.f.zero()) {
        double bmin = model.f.terms.front().exponent, bmax = model.f.terms.back().exponent;
        const double th1 = 2.0 / (2.0 * bmin + 1.0), pp1 = (2.0 * bmin + 2.0) / (2.0 * bmin + 1.0);
        const double th2 = 2.0 / (2.0 * bmax + 1.0), pp2 = (2.0 * bmax + 2.0) / (2.0 * bmax + 1.0);
        Interval r3{std::max(lo, std::max(th1, th2)), std::min(2.0, std::min(pp1, pp2))};
        r3 = f_decay_interval(N, l, th1, pp1, r3);
        r3 = f_decay_interval(N, l, th2, pp2, r3);
        rep.windows.push_back(to_window("r'3", r3));
        rep.conditions.push_back(cond("F envelope exponents with time decay", r3.nonempty()));
        rep.constants.push_back({"theta1", th1});
        rep.constants.push_back({"p1", pp1});
        rep.constants.push_back({"theta2", th2});
        rep.constants.push_back({"p2", pp2});
        all_ok = all_ok && r3.nonempty();
    }

    rep.verdict = all_ok ? Verdict::Applies : Verdict::Fails;
    return rep;
}

// ---------------------------------------------------------------------------

double sigma_scattering_beta_lower(int dim) {
    const double N = dim;
    return (2.0 - N + std::sqrt(N * N + 12.0 * N + 4.0)) / (4.0 * N);
}

TheoremReport check_theorem7(const ModelSpec& model) {
    TheoremReport rep;
    rep.id = "theorem7";
    model.validate();
    const int N = model.dim;

    if (model.h.active() || !model.v.zero() || !model.w.zero()) {
        rep.conditions.push_back(cond("V = 0, W = 0, delta_h = 0", false));
        rep.verdict = Verdict::NotApplicable;
        rep.note = "the Sigma-space machinery is applied only to the pure local defocusing case";
        return rep;
    }
    if (model.f.zero() || !model.f.defocusing()) {
        rep.conditions.push_back(cond("F a sum of defocusing monomials", false));
        rep.verdict = Verdict::Fails;
        return rep;
    }

    const double bmin = model.f.terms.front().exponent;
    const double bmax = model.f.terms.back().exponent;
    const double blow = sigma_scattering_beta_lower(N);
    const double bhigh = N >= 3 ? two_star(N) / N : std::numeric_limits<double>::infinity();

    // (G): |G(s)| / [s^(1/2)]^{2*} -> 0 as s -> inf; monomials give bmax < 2*/N.
    Condition gcond = N >= 3 ? cond_lt("(G): beta_max < 2*/N", bmax, bhigh)
                             : cond("(G): automatic for N <= 2", true);
    rep.conditions.push_back(gcond);

    Condition wlow = cond_lt("decay window: beta_min > (2-N+sqrt(N^2+12N+4))/(4N)", blow, bmin);
    rep.conditions.push_back(wlow);
    rep.windows.push_back(WindowOut{"beta", blow, bhigh, compare_guarded(blow, bhigh) < 0});

    const double th1 = 1.0 / bmin, pp1 = (bmin + 1.0) / bmin;
    const double th2 = 1.0 / bmax, pp2 = (bmax + 1.0) / bmax;
    rep.constants = {{"theta1", th1}, {"p1", pp1}, {"theta2", th2}, {"p2", pp2}};

    // r-window from theta_j < r/(r-2) < p_j plus the decay scan.
    const double rmax = N >= 3 ? two_star(N) : std::numeric_limits<double>::infinity();
    Interval rwin{2.0 * bmax + 2.0, rmax};
    if (bmin < 1.0) rwin.cap_hi(2.0 / (1.0 - bmin));
    rep.conditions.push_back(cond("theta_j < r/(r-2) < p_j window nonempty",
                                  rwin.nonempty(),
                                  "(" + fmt_g(rwin.lo) + ", " + fmt_g(rwin.hi) + ")"));

    // Decay condition, linear in r: 2(2-l)[r(1-th)+2th] > [2N-(N-2)r](p-th).
    const ConstantReport cls = classify_constants(model);
    const double l = cls.l;
    rep.constants.push_back({"l", l});
    auto decay_clip = [&](double th, double pp, Interval iv) {
        const double coef = 2.0 * (2.0 - l) * (1.0 - th) + (N - 2.0) * (pp - th);
        const double rhs = 2.0 * N * (pp - th) - 4.0 * (2.0 - l) * th;
        const int cs = compare_guarded(coef, 0.0);
        if (cs > 0)
            iv.raise_lo(rhs / coef);
        else if (cs < 0)
            iv.cap_hi(rhs / coef);
        else if (compare_guarded(rhs, 0.0) >= 0)
            iv.cap_hi(iv.lo);
        return iv;
    };
    Interval rdecay = decay_clip(th1, pp1, decay_clip(th2, pp2, rwin));
    rep.windows.push_back(to_window("r", rdecay));
    rep.conditions.push_back(cond("decay-condition scan leaves a nonempty r-interval",
                                  rdecay.nonempty()));

    const bool ok = gcond.ok && wlow.ok && rwin.nonempty() && rdecay.nonempty();
    rep.verdict = ok ? Verdict::Applies : Verdict::Fails;
    if (!wlow.ok)
        rep.note = "decay conditions (local-nonlinearity time integrability) fail below the beta window";
    return rep;
}

// ---------------------------------------------------------------------------

TheoremReport check_corollary65(const ModelSpec& model) {
    TheoremReport rep;
    rep.id = "corollary6.5";
    model.validate();
    const double N = model.dim;

    const bool shape_ok = !model.h.active() && model.f.terms.size() == 1 &&
                          model.f.terms.front().coeff < 0.0 && !model.v.zero() && !model.w.zero() &&
                          model.v.kind == PotentialKind::SmoothedInversePower &&
                          model.w.kind == PotentialKind::SmoothedInversePower;
    if (!shape_ok) {
        rep.conditions.push_back(
            cond("model of the inverse-power/monomial form (V, F, W all present)", false));
        rep.verdict = Verdict::NotApplicable;
        return rep;
    }
    if (model.dim < 2) {
        rep.conditions.push_back(cond("N >= 2", false));
        rep.verdict = Verdict::NotApplicable;
        return rep;
    }

    const double m = model.v.exponent;
    const double n = model.w.exponent;
    const double beta = model.f.terms.front().exponent;
    const double nb = N * beta;
    const double ts = N >= 3 ? two_star(model.dim) : std::numeric_limits<double>::infinity();
    const double b0 = (4.0 - 3.0 * N + std::sqrt(9.0 * N * N + 40.0 * N + 16.0)) / (8.0 * N);
    rep.constants = {{"m", m}, {"n", n}, {"N beta", nb}, {"beta0", b0}};

    struct Case {
        const char* name;
        std::vector<Condition> conds;
        bool ok() const {
            return std::all_of(conds.begin(), conds.end(), [](const Condition& c) { return c.ok; });
        }
    };
    std::vector<Case> cases(3);
    cases[0].name = "(I)";
    cases[0].conds = {cond_lt("4/3 < m", 4.0 / 3.0, m), cond_lt("m < 2", m, 2.0),
                      cond_lt("m < n", m, n), cond_lt("n < 4", n, 4.0),
                      cond_lt("m < N beta", m, nb), cond_lt("N beta < 2*", nb, ts),
                      cond_lt("8 < 4m + n", 8.0, 4.0 * m + n)};
    cases[1].name = "(II)";
    cases[1].conds = {cond_lt("beta0 < N beta", b0, nb), cond_lt("N beta < m", nb, m),
                      cond_lt("m < 2", m, 2.0), cond_lt("N beta < n", nb, n),
                      cond_lt("n < 4", n, 4.0), cond_lt("4 < 2 N beta + m", 4.0, 2.0 * nb + m),
                      cond_lt("8 < 4 N beta + n", 8.0, 4.0 * nb + n)};
    cases[2].name = "(III)";
    cases[2].conds = {cond_lt("8/5 < n", 8.0 / 5.0, n), cond_lt("n < m", n, m),
                      cond_lt("m < 2", m, 2.0), cond_lt("n < N beta", n, nb),
                      cond_lt("N beta < 2*", nb, ts)};

    const Case* applied = nullptr;
    for (const Case& c : cases)
        if (c.ok()) {
            applied = &c;
            break;
        }
    // Report the conditions of the applying case, or of the closest case
    // (fewest failures) so the failing inequality is named.
    const Case* shown = applied;
    if (!shown) {
        std::size_t best = SIZE_MAX;
        for (const Case& c : cases) {
            const std::size_t nf = static_cast<std::size_t>(
                std::count_if(c.conds.begin(), c.conds.end(), [](const Condition& q) { return !q.ok; }));
            if (nf < best) {
                best = nf;
                shown = &c;
            }
        }
    }
    for (const Condition& c : shown->conds) {
        Condition named = c;
        named.name = std::string(shown->name) + " " + named.name;
        rep.conditions.push_back(named);
    }
    rep.note = applied ? std::string("case ") + applied->name + " applies"
                       : std::string("closest case ") + shown->name;

    // Embed the general exponent windows.
    const TheoremReport t6 = check_theorem6(model);
    rep.windows = t6.windows;
    rep.verdict = applied ? Verdict::Applies : Verdict::Fails;
    return rep;
}

}  // namespace qsl
