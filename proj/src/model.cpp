#include "qsl/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qsl {

void HSpec::validate() const {
    if (kind == HKind::Power && alpha < 0.5)
        throw DomainError("h power family requires alpha >= 1/2, got alpha = " + std::to_string(alpha));
}

HValues eval_h(const HSpec& spec, double s) {
    if (s < 0.0) throw DomainError("eval_h: negative argument s = " + std::to_string(s));
    HValues out;
    if (spec.kind == HKind::None) return out;
    const double a = spec.alpha;
    out.h = std::pow(s, a);
    // One-sided limits at s = 0 for the sub-quadratic powers.
    out.hp = (s == 0.0) ? (a == 1.0 ? 1.0 : (a > 1.0 ? 0.0 : std::numeric_limits<double>::infinity()))
                        : a * std::pow(s, a - 1.0);
    out.hpp = (s == 0.0) ? (a == 2.0 ? 2.0 : (a > 2.0 ? 0.0 : (a == 1.0 ? 0.0 : a * (a - 1.0) * std::pow(s, a - 2.0))))
                         : a * (a - 1.0) * std::pow(s, a - 2.0);
    if (spec.alpha == 1.0) out.hpp = 0.0;
    return out;
}

double eval_htilde(const HSpec& spec, double s) {
    if (s < 0.0) throw DomainError("eval_htilde: negative argument");
    if (spec.kind == HKind::None) return 0.0;
    const double a = spec.alpha;
    return 0.5 * a * std::pow(s, 2.0 * a);
}

double h_theta_kernel(const HSpec& spec, double s) {
    if (s < 0.0) throw DomainError("h_theta_kernel: negative argument");
    if (spec.kind == HKind::None) return 0.0;
    const double a = spec.alpha;
    return a * a * (2.0 * a - 1.0) * std::pow(s, 2.0 * a - 1.0);
}

double h_cross_kernel(const HSpec& spec, double s) {
    if (s < 0.0) throw DomainError("h_cross_kernel: negative argument");
    if (spec.kind == HKind::None) return 0.0;
    const double a = spec.alpha;
    return a * a * (a - 1.0) * std::pow(s, 2.0 * a - 1.0);
}

double h_interaction_kernel(const HSpec& spec, double s) {
    if (s < 0.0) throw DomainError("h_interaction_kernel: negative argument");
    if (spec.kind == HKind::None) return 0.0;
    const double a = spec.alpha;
    return a * a * (2.0 * a + 3.0) * std::pow(s, 2.0 * a - 1.0);
}

bool FSpec::defocusing() const {
    return std::all_of(terms.begin(), terms.end(), [](const FTerm& t) { return t.coeff <= 0.0; });
}

bool FSpec::has_focusing_term() const {
    return std::any_of(terms.begin(), terms.end(), [](const FTerm& t) { return t.coeff > 0.0; });
}

void FSpec::validate() const {
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i].exponent <= 0.0) throw DomainError("F exponents must be positive");
        if (i > 0 && terms[i].exponent <= terms[i - 1].exponent)
            throw DomainError("F exponents must be strictly increasing");
    }
}

FValues eval_F(const FSpec& spec, double s) {
    if (s < 0.0) throw DomainError("eval_F: negative argument");
    FValues out;
    for (const FTerm& t : spec.terms) {
        const double b = t.coeff, beta = t.exponent;
        const double sb = std::pow(s, beta);
        out.F += b * sb;
        out.Fp += (s == 0.0 && beta < 1.0) ? 0.0 : b * beta * std::pow(s, beta - 1.0);
        const double g = b * sb * s / (beta + 1.0);
        out.G += g;
        if (b > 0.0)
            out.G1 += g;
        else
            out.G2 -= g;
    }
    return out;
}

void PotentialSpec::validate() const {
    if (kind == PotentialKind::Zero) return;
    if (amplitude < 0.0) throw DomainError("potential amplitude must be >= 0");
    if (kind == PotentialKind::SmoothedInversePower) {
        if (exponent <= 0.0) throw DomainError("potential exponent must be > 0");
        if (eps < 0.0) throw DomainError("potential regularization must be >= 0");
    }
}

double eval_potential(const PotentialSpec& spec, double r2) {
    switch (spec.kind) {
        case PotentialKind::Zero:
            return 0.0;
        case PotentialKind::SmoothedInversePower: {
            const double q = r2 + spec.eps * spec.eps;
            if (q == 0.0) return -std::numeric_limits<double>::infinity();
            return -spec.amplitude * std::pow(q, -0.5 * spec.exponent);
        }
        case PotentialKind::BoundedRational:
            return -spec.amplitude * r2 / (r2 + 1.0);
    }
    return 0.0;
}

double eval_potential_xdot(const PotentialSpec& spec, double r2) {
    switch (spec.kind) {
        case PotentialKind::Zero:
            return 0.0;
        case PotentialKind::SmoothedInversePower: {
            // x . grad [-a (r^2+eps^2)^(-m/2)] = a m r^2 (r^2+eps^2)^(-m/2-1)
            const double q = r2 + spec.eps * spec.eps;
            if (q == 0.0) return 0.0;
            return spec.amplitude * spec.exponent * r2 * std::pow(q, -0.5 * spec.exponent - 1.0);
        }
        case PotentialKind::BoundedRational: {
            // x . grad [-a r^2/(r^2+1)] = -2 a r^2 / (r^2+1)^2
            const double d = r2 + 1.0;
            return -2.0 * spec.amplitude * r2 / (d * d);
        }
    }
    return 0.0;
}

void ModelSpec::validate() const {
    if (dim < 1 || dim > 3) throw DomainError("dimension must be 1, 2 or 3");
    h.validate();
    f.validate();
    v.validate();
    w.validate();
}

namespace {

// Deviation constant of an inverse-power potential against the dilation sign
// condition 2P + x.grad P >= 0: holds iff m >= 2, else the deficit is 2 - m.
// The bounded-rational family always fails, with ratio sup 4 at the origin.
struct PotClass {
    bool fails = false;
    double k = 0.0;
};

PotClass classify_potential(const PotentialSpec& p) {
    PotClass out;
    if (p.zero()) return out;
    if (p.kind == PotentialKind::SmoothedInversePower) {
        if (p.exponent < 2.0) {
            out.fails = true;
            out.k = 2.0 - p.exponent;
        }
    } else {  // BoundedRational
        out.fails = true;
        out.k = 4.0;
    }
    return out;
}

}  // namespace

ConstantReport classify_constants(const ModelSpec& model) {
    model.validate();
    ConstantReport rep;
    const double N = static_cast<double>(model.dim);

    double lmax = 0.0;
    if (model.h.active()) {
        rep.k1 = 2.0 * model.h.alpha - 1.0;
        if (rep.k1 > 0.0) {
            rep.failing.push_back("h: 2h''h's+(h')^2 deviation (k1 = 2a-1 > 0)");
            lmax = std::max(lmax, rep.k1);
        }
    }

    // Per-monomial F constants, |N beta - 2| / (beta + 1).  A focusing term
    // passes the sign test iff N beta <= 2, a defocusing term iff N beta >= 2.
    double kfoc = 0.0, kdef = 0.0;
    bool foc_fails = false, def_fails = false;
    for (const FTerm& t : model.f.terms) {
        if (t.coeff == 0.0) continue;
        const double kappa = std::abs(N * t.exponent - 2.0) / (t.exponent + 1.0);
        if (t.coeff > 0.0) {
            kfoc = std::max(kfoc, kappa);
            if (N * t.exponent > 2.0) {
                foc_fails = true;
                lmax = std::max(lmax, kappa);
            }
        } else {
            kdef = std::max(kdef, kappa);
            if (N * t.exponent < 2.0) {
                def_fails = true;
                lmax = std::max(lmax, kappa);
            }
        }
    }
    if (model.f.has_focusing_term()) {
        rep.k2 = kfoc;
        rep.k3 = kdef;
    } else {
        // Single sign class: report the F constant in the k2 slot.
        rep.k2 = kdef;
        rep.k3 = 0.0;
    }
    if (foc_fails) rep.failing.push_back("F focusing: (N+2)G1 - N F1 s >= 0 fails (N beta > 2)");
    if (def_fails) rep.failing.push_back("F defocusing: N F2 s - (N+2)G2 >= 0 fails (N beta < 2)");

    const PotClass pv = classify_potential(model.v);
    rep.k4 = pv.k;
    if (pv.fails) {
        rep.failing.push_back("V: 2V + x.grad V >= 0 fails");
        lmax = std::max(lmax, pv.k);
    }
    const PotClass pw = classify_potential(model.w);
    rep.k5 = pw.k;
    if (pw.fails) {
        rep.failing.push_back("W: 2W + x.grad W >= 0 fails");
        lmax = std::max(lmax, pw.k);
    }

    rep.l = lmax;
    rep.est_case = rep.failing.empty() ? EstimateCase::Case1 : EstimateCase::Case2;
    return rep;
}

}  // namespace qsl
