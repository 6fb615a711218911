#include "qsl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qsl {

namespace {

double sq(double x) { return x * x; }

// int over R^N of (1 + |x|^2)^(-p), p > N/2 (closed form via Gamma).
double inv_poly_integral(int dim, double p) {
    const double n2 = 0.5 * dim;
    return std::pow(std::numbers::pi, n2) * std::exp(std::lgamma(p - n2) - std::lgamma(p));
}

}  // namespace

DiagnosticRecord compute_record(const ModelOnGrid& model, const State& state, double tol) {
    const Field& u = state.u;
    const Grid& g = u.grid;
    const double t = state.t;
    const double N = static_cast<double>(g.dim);
    DiagnosticRecord r;
    r.t = t;

    r.mass = norm_l2(u);

    const auto grad = gradient(u);
    double grad_l2 = 0.0;
    for (const Field& gc : grad) grad_l2 += norm_l2_sq(gc);
    r.grad_l2 = grad_l2;

    // Quasilinear gradient and the theta kernel weight.
    double gradh_l2 = 0.0;
    double theta_h = 0.0;
    if (model.spec.h.active()) {
        Field hfield(g);
        for (std::size_t i = 0; i < g.size(); ++i)
            hfield.v[i] = eval_h(model.spec.h, std::norm(u.v[i])).h;
        const auto gh = gradient(hfield);
        for (const Field& c : gh) gradh_l2 += norm_l2_sq(c);

        // Quasilinear share of the dilation rate: -N |grad h|^2 - 8N h'' h' rho^2 |grad u|^2.
        // (The phase-blind substitution |grad rho|^2 = 4 rho |grad u|^2 fails for
        // complex fields; this is the combination the balance P' = 4 t theta needs.)
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double rho = std::norm(u.v[i]);
            double gu2 = 0.0;
            for (const Field& gc : grad) gu2 += std::norm(gc.v[i]);
            acc += h_cross_kernel(model.spec.h, rho) * gu2;
        }
        theta_h = -N * gradh_l2 - 8.0 * N * acc * g.cell();
    }
    r.gradh_l2 = gradh_l2;

    // F-family integrals.
    double g_int = 0.0, g1_int = 0.0, g2_int = 0.0, f_rho_int = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double rho = std::norm(u.v[i]);
        const FValues fv = eval_F(model.spec.f, rho);
        g_int += fv.G;
        g1_int += std::abs(fv.G1);
        g2_int += std::abs(fv.G2);
        f_rho_int += fv.F * rho;
    }
    const double cell = g.cell();
    g_int *= cell;
    g1_int *= cell;
    g2_int *= cell;
    f_rho_int *= cell;
    r.g_int = g_int;
    r.g1_int = g1_int;
    r.g2_int = g2_int;

    // Potential integrals.
    double pot = 0.0, pot_signed = 0.0, pot_dil = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double rho = std::norm(u.v[i]);
        pot += std::abs(model.v_samples[i]) * rho;
        pot_signed += model.v_samples[i] * rho;
        pot_dil += (2.0 * model.v_samples[i] + model.v_xdot_samples[i]) * rho;
    }
    r.pot_mass = pot * cell;
    pot_signed *= cell;
    pot_dil *= cell;

    // Hartree integrals.
    double hq_abs = 0.0, hq_signed = 0.0, hq_dil = 0.0;
    if (model.has_w) {
        Field rho(g);
        for (std::size_t i = 0; i < g.size(); ++i) rho.v[i] = std::norm(u.v[i]);
        const Field cw = model.convolve_w(rho);
        const Field caw = model.convolve_absw(rho);
        const Field cdw = model.convolve_w_dil(rho);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double ri = std::real(rho.v[i]);
            hq_signed += std::real(cw.v[i]) * ri;
            hq_abs += std::real(caw.v[i]) * ri;
            hq_dil += std::real(cdw.v[i]) * ri;
        }
        hq_signed *= cell;
        hq_abs *= cell;
        hq_dil *= cell;
    }
    r.hartree_quart = hq_abs;

    const double delta_h = model.spec.h.active() ? 1.0 : 0.0;
    r.energy = 0.5 * (r.grad_l2 + delta_h * gradh_l2) - 0.5 * pot_signed - 0.5 * g_int -
               0.25 * hq_signed;

    // Phi = delta_h |grad h|^2 + |G1| + |G2| + |V| rho + (|W|*rho) rho / 2.
    r.phi = delta_h * gradh_l2 + g1_int + g2_int + r.pot_mass + 0.5 * hq_abs;

    // x-weighted quantities, reusing the gradient already in hand.
    r.boundary_fraction = boundary_mass_fraction(u);
    r.boundary_ok = r.boundary_fraction <= tol;
    double var = 0.0, dil = 0.0, hu = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto ix = unravel(g, i);
        var += radius_sq(g, i) * std::norm(u.v[i]);
        cplx xg(0.0, 0.0);
        for (int d = 0; d < g.dim; ++d) {
            const double x = g.x(ix[d]);
            xg += x * grad[d].v[i];
            hu += std::norm(x * u.v[i] - cplx(0.0, 2.0 * t) * grad[d].v[i]);
        }
        dil += std::imag(std::conj(u.v[i]) * xg);
    }
    r.variance = var * cell;
    r.dilation = dil * cell;
    r.hu_sq = hu * cell;

    const double tail = 4.0 * t * t * (delta_h * gradh_l2 - g_int) - 4.0 * t * t * pot_signed -
                        2.0 * t * t * hq_signed;
    r.p_value = r.hu_sq + tail;
    r.p_expanded = r.variance + 4.0 * t * r.dilation + 4.0 * t * t * r.grad_l2 + tail;

    // theta(t) per the dilation balance.
    r.theta = theta_h - ((N + 2.0) * g_int - N * f_rho_int) - pot_dil - hq_dil;

    return r;
}

std::pair<double, double> invariants(const ModelOnGrid& model, const State& state) {
    const DiagnosticRecord r = compute_record(model, state);
    return {r.mass, r.energy};
}

std::vector<double> phi_density(const ModelOnGrid& model, const Field& u) {
    const Grid& g = u.grid;
    std::vector<double> out(g.size(), 0.0);
    const bool dh = model.spec.h.active();

    std::vector<double> gradh_sq;
    if (dh) {
        Field hfield(g);
        for (std::size_t i = 0; i < g.size(); ++i)
            hfield.v[i] = eval_h(model.spec.h, std::norm(u.v[i])).h;
        const auto gh = gradient(hfield);
        gradh_sq.assign(g.size(), 0.0);
        for (const Field& c : gh)
            for (std::size_t i = 0; i < g.size(); ++i) gradh_sq[i] += std::norm(c.v[i]);
    }

    Field caw;
    if (model.has_w) {
        Field rho(g);
        for (std::size_t i = 0; i < g.size(); ++i) rho.v[i] = std::norm(u.v[i]);
        caw = model.convolve_absw(rho);
    }

    for (std::size_t i = 0; i < g.size(); ++i) {
        const double rho = std::norm(u.v[i]);
        const FValues fv = eval_F(model.spec.f, rho);
        double phi = std::abs(fv.G1) + std::abs(fv.G2) + std::abs(model.v_samples[i]) * rho;
        if (dh) phi += gradh_sq[i];
        if (model.has_w) phi += 0.5 * std::real(caw.v[i]) * rho;
        out[i] = phi;
    }
    return out;
}

double phi_integral(const ModelOnGrid& model, const Field& u) {
    return integrate_real(phi_density(model, u), u.grid);
}

std::vector<double> Trajectory::times() const {
    std::vector<double> t;
    t.reserve(records.size());
    for (const auto& r : records) t.push_back(r.t);
    return t;
}

std::vector<double> Trajectory::series(double DiagnosticRecord::*field) const {
    std::vector<double> y;
    y.reserve(records.size());
    for (const auto& r : records) y.push_back(r.*field);
    return y;
}

VirialResult virial_residuals(const Trajectory& traj, bool require_boundary_ok) {
    if (traj.records.size() < 3) throw DomainError("virial residuals need at least 3 samples");
    VirialResult out;
    for (std::size_t i = 1; i + 1 < traj.records.size(); ++i) {
        const auto& a = traj.records[i - 1];
        const auto& b = traj.records[i];
        const auto& c = traj.records[i + 1];
        if (require_boundary_ok && !b.boundary_ok)
            throw DomainError("virial residuals: x-weighted integrals invalid, boundary mass above tolerance");
        const double dvar = (c.variance - a.variance) / (c.t - a.t);
        out.t.push_back(b.t);
        out.residual.push_back(dvar + 4.0 * b.dilation);
        out.max_abs_residual = std::max(out.max_abs_residual, std::abs(out.residual.back()));
        out.max_abs_dvar = std::max(out.max_abs_dvar, std::abs(dvar));
    }
    return out;
}

PseudoconformalResult pseudoconformal(const Trajectory& traj) {
    if (traj.records.empty()) throw DomainError("pseudoconformal needs a nonempty trajectory");
    PseudoconformalResult out;
    const double P0 = traj.records.front().p_value;
    double acc = 0.0;  // int_0^t tau theta dtau (trapezoid)
    for (std::size_t i = 0; i < traj.records.size(); ++i) {
        const auto& r = traj.records[i];
        if (i > 0) {
            const auto& q = traj.records[i - 1];
            acc += 0.5 * (r.t - q.t) * (q.t * q.theta + r.t * r.theta);
        }
        out.t.push_back(r.t);
        out.P.push_back(r.p_value);
        out.theta.push_back(r.theta);
        out.R.push_back(r.p_value - P0 - 4.0 * acc);
        out.max_abs_R = std::max(out.max_abs_R, std::abs(out.R.back()));
        out.max_P = std::max(out.max_P, r.p_value);
        out.form_discrepancy = std::max(out.form_discrepancy, std::abs(r.p_value - r.p_expanded));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::optional<std::string> validate_morawetz_weight(const ModelSpec& model, EstimateKind kind,
                                                    const WeightSpec& w, double cr) {
    const ConstantReport cls = classify_constants(model);
    const int N = model.dim;
    const bool combined = model.f.has_focusing_term();
    if (combined) {
        if (N < 3) return "combined defocusing/focusing case requires N >= 3";
        if (!(cr < 1.0)) return "C_r(u0) < 1";
    }
    switch (kind) {
        case EstimateKind::A: {
            if (cls.est_case != EstimateCase::Case1)
                return "estimate A requires the part-1 sign conditions (" + cls.failing.front() + ")";
            if (w.kind != WeightKind::PolyX) return "estimate A weight must be a(x) = (1+|x|^2)^sigma";
            if (!(w.theta > 0.5 && w.theta < 1.0)) return "1/2 < theta < 1";
            if (!(2.0 * w.sigma / (1.0 - w.theta) > N)) return "2 sigma / (1 - theta) > N";
            return std::nullopt;
        }
        case EstimateKind::B: {
            if (cls.est_case != EstimateCase::Case1)
                return "estimate B requires the part-1 sign conditions (" + cls.failing.front() + ")";
            if (w.kind != WeightKind::PolyT) return "estimate B weight must be b + t^k";
            if (w.c0 < 0.0) return "b >= 0";
            if (w.c0 > 0.0 ? !(w.k > 1.0) : !(w.k > 1.0 && w.k < 3.0))
                return w.c0 > 0.0 ? "k > 1" : "1 < k < 3";
            return std::nullopt;
        }
        case EstimateKind::C: {
            if (cls.est_case != EstimateCase::Case1)
                return "estimate C requires the part-1 sign conditions (" + cls.failing.front() + ")";
            if (w.kind != WeightKind::Constant) return "estimate C is unweighted";
            return std::nullopt;
        }
        case EstimateKind::D: {
            if (w.kind != WeightKind::PolyXT) return "estimate D weight must be (c(x)+t)^k";
            if (w.c0 < 0.0) return "c(x) >= 0";
            const double l = cls.l;
            if (combined) {
                if (!(w.k > 1.0 + l * (1.0 + cr) / (1.0 - cr)))
                    return "k > 1 + l(1+C_r)/(1-C_r)";
            } else if (w.c0 > 0.0) {
                if (!(w.k > l + 1.0)) return "k > l + 1";
            } else {
                if (!(l < 2.0)) return "l < 2 when c(x) is allowed to vanish";
                if (!(w.k > l + 1.0 && w.k < 3.0)) return "l + 1 < k < 3";
            }
            return std::nullopt;
        }
        case EstimateKind::E: {
            if (w.kind != WeightKind::Constant) return "estimate E is unweighted";
            const double l = cls.l;
            if (combined) {
                if (!(l < (1.0 - cr) / (1.0 + cr))) return "l < (1-C_r)/(1+C_r)";
            } else {
                if (!(l < 1.0)) return "l < 1";
            }
            return std::nullopt;
        }
    }
    return "unknown estimate";
}

double morawetz_integrand(const ModelOnGrid& model, const Field& u, double t, EstimateKind kind,
                          const WeightSpec& w) {
    const std::vector<double> phi = phi_density(model, u);
    const Grid& g = u.grid;
    double acc = 0.0;
    switch (kind) {
        case EstimateKind::A:
            for (std::size_t i = 0; i < phi.size(); ++i)
                acc += std::pow(phi[i], w.theta) / std::pow(1.0 + radius_sq(g, i), w.sigma);
            break;
        case EstimateKind::B:
            for (double p : phi) acc += t * t * p / (w.c0 + std::pow(t, w.k));
            break;
        case EstimateKind::C:
        case EstimateKind::E:
            for (double p : phi) acc += p;
            break;
        case EstimateKind::D:
            for (std::size_t i = 0; i < phi.size(); ++i) {
                const double c = w.c_radial ? w.c0 * std::sqrt(1.0 + radius_sq(g, i)) : w.c0;
                acc += t * t * phi[i] / std::pow(c + t, w.k);
            }
            break;
    }
    return acc * g.cell();
}

MorawetzResult morawetz_finalize(const ModelSpec& model, EstimateKind kind, const WeightSpec& w,
                                 const std::vector<double>& times, const std::vector<double>& series,
                                 double energy0, double c_u0, double cr) {
    MorawetzResult out;
    out.t = times;
    out.integrand = series;
    if (auto fail = validate_morawetz_weight(model, kind, w, cr)) {
        out.failed_condition = *fail;
        return out;
    }
    out.hypothesis_ok = true;
    out.accumulated = trapezoid(times, series);

    const ConstantReport cls = classify_constants(model);
    const bool combined = model.f.has_focusing_term();
    const double E = energy0, C0 = c_u0, l = cls.l;
    const double crfac = combined ? (1.0 + cr) / (1.0 - cr) : 1.0;
    const double T = times.empty() ? 0.0 : times.back();
    double tail = 0.0;

    switch (kind) {
        case EstimateKind::A: {
            const double Ia = inv_poly_integral(model.dim, w.sigma / (1.0 - w.theta));
            out.bound = std::pow(crfac, w.theta) *
                        (std::pow(2.0 * E, w.theta) +
                         std::pow(0.25 * C0, w.theta) / (2.0 * w.theta - 1.0)) *
                        std::pow(Ia, 1.0 - w.theta);
            if (T > 1.0)
                tail = std::pow(crfac * 0.25 * C0, w.theta) * std::pow(Ia, 1.0 - w.theta) *
                       std::pow(T, 1.0 - 2.0 * w.theta) / (2.0 * w.theta - 1.0);
            break;
        }
        case EstimateKind::B: {
            out.bound = crfac * (w.c0 > 0.0 ? 2.0 * E / (3.0 * w.c0) : 2.0 * E / (3.0 - w.k));
            out.bound += crfac * C0 / (4.0 * (w.k - 1.0));
            if (T > 1.0) tail = crfac * 0.25 * C0 * std::pow(T, 1.0 - w.k) / (w.k - 1.0);
            break;
        }
        case EstimateKind::C: {
            out.bound = crfac * (2.0 * E + 0.25 * C0);
            if (T > 1.0) tail = crfac * 0.25 * C0 / T;
            break;
        }
        case EstimateKind::D: {
            const double head =
                w.c0 > 0.0 ? 2.0 * E / (3.0 * std::pow(w.c0, w.k)) : 2.0 * E / (3.0 - w.k);
            if (!combined) {
                out.bound = head + C0 / (4.0 * (w.k - 1.0)) +
                            (4.0 * l * E + C0) / (4.0 * (w.k - l - 1.0));
                if (T > 1.0)
                    tail = 0.25 * C0 * std::pow(T, 1.0 - w.k) / (w.k - 1.0) +
                           0.25 * (4.0 * l * E + C0) * std::pow(T, l + 1.0 - w.k) / (w.k - l - 1.0);
            } else {
                const double lam = l * (1.0 + cr) / (1.0 - cr);
                out.bound = crfac * (head + C0 / (4.0 * (w.k - 1.0)) +
                                     (4.0 * l * E * (1.0 + cr) + C0 * (1.0 - cr)) /
                                         (4.0 * ((w.k - 1.0) * (1.0 - cr) - l * (1.0 + cr))));
                if (T > 1.0)
                    tail = crfac * 0.25 *
                           (C0 * std::pow(T, 1.0 - w.k) / (w.k - 1.0) +
                            (4.0 * l * E * (1.0 + cr) + C0 * (1.0 - cr)) / (1.0 - cr) *
                                std::pow(T, lam + 1.0 - w.k) / (w.k - lam - 1.0));
            }
            break;
        }
        case EstimateKind::E: {
            if (!combined) {
                out.bound = 2.0 * E + 0.25 * C0 + (4.0 * l * E + C0) / (4.0 * (1.0 - l));
                if (T > 1.0)
                    tail = 0.25 * C0 / T + 0.25 * (4.0 * l * E + C0) * std::pow(T, l - 1.0) / (1.0 - l);
            } else {
                const double lam = l * (1.0 + cr) / (1.0 - cr);
                out.bound = crfac * (2.0 * E + 0.25 * C0 +
                                     (4.0 * l * E * (1.0 + cr) + C0 * (1.0 - cr)) /
                                         (4.0 * ((1.0 - cr) - l * (1.0 + cr))));
                if (T > 1.0)
                    tail = crfac * 0.25 *
                           (C0 / T + (4.0 * l * E * (1.0 + cr) + C0 * (1.0 - cr)) / (1.0 - cr) *
                                         std::pow(T, lam - 1.0) / (1.0 - lam));
            }
            break;
        }
    }
    out.margin = out.bound - out.accumulated;
    out.tail_fraction = out.accumulated > 0.0 ? tail / out.accumulated : 0.0;
    out.tail_ok = out.tail_fraction <= 0.05;
    return out;
}

// ---------------------------------------------------------------------------

double spacetime_integrand(const ModelOnGrid& model, const Field& u, double theta,
                           const SpacetimeWeight& w) {
    const std::vector<double> phi = phi_density(model, u);
    const Grid& g = u.grid;
    double acc = 0.0;
    if (w.kind == SpacetimeWeight::Kind::Constant) {
        for (double p : phi) acc += std::pow(p, theta);
        acc *= w.amplitude;
    } else {
        for (std::size_t i = 0; i < phi.size(); ++i)
            acc += w.amplitude * std::exp(-0.5 * radius_sq(g, i) / sq(w.width)) *
                   std::pow(phi[i], theta);
    }
    return acc * g.cell();
}

SpacetimeResult spacetime_bound_F(const ModelSpec& model, double p, double theta,
                                  const SpacetimeWeight& w, const std::vector<double>& times,
                                  const std::vector<double>& series, double cr, double l) {
    SpacetimeResult out;
    const bool combined = model.f.has_focusing_term();
    if (!(theta > 0.0 && theta <= 1.0)) {
        out.failed_condition = "0 < theta <= 1";
        return out;
    }
    if (theta < 1.0 && w.kind == SpacetimeWeight::Kind::Constant) {
        out.failed_condition = "theta < 1 requires int w^(1/(1-theta)) finite (use the Gaussian weight)";
        return out;
    }
    if (!combined) {
        if (!(p > 1.0 / (2.0 * theta))) {
            out.failed_condition = "p > 1/(2 theta)";
            return out;
        }
    } else {
        if (!(l < 2.0 * (1.0 - cr) / (1.0 + cr))) {
            out.failed_condition = "l < 2(1-C_r)/(1+C_r)";
            return out;
        }
        const double pmin = std::max(1.0 / (2.0 * theta),
                                     (1.0 - cr) / (theta * (2.0 * (1.0 - cr) - l * (1.0 + cr))));
        if (!(p > pmin)) {
            out.failed_condition = "p > max(1/(2 theta), (1-C_r)/(theta[2(1-C_r)-l(1+C_r)]))";
            return out;
        }
    }
    out.hypothesis_ok = true;

    std::vector<double> yp(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) yp[i] = std::pow(series[i], p);
    out.lhs = std::pow(trapezoid(times, yp), 1.0 / p);

    if (!times.empty() && times.back() > 0.0) {
        const double T = times.back();
        std::size_t usable = 0;
        for (std::size_t i = 0; i < times.size(); ++i)
            if (times[i] >= 0.5 * T && times[i] > 0.0 && series[i] > 0.0) ++usable;
        if (usable >= 2) {
            auto [slope, icept] = loglog_slope(times, series, 0.5 * T, T);
            (void)icept;
            out.tail_slope = slope;
            out.finite_verdict = slope < -1.0 / p;
        } else {
            out.finite_verdict = true;  // identically-zero tail
        }
    }
    return out;
}

double spacetime_g_integrand(const ModelOnGrid& model, const Field& u, double r,
                             const SpacetimeWeight& w) {
    const Grid& g = u.grid;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double g1 = std::abs(eval_F(model.spec.f, std::norm(u.v[i])).G1);
        const double wt = w.kind == SpacetimeWeight::Kind::Constant
                              ? w.amplitude
                              : w.amplitude * std::exp(-0.5 * radius_sq(g, i) / sq(w.width));
        acc += wt * std::pow(g1, r);
    }
    return acc * g.cell();
}

SpacetimeGResult spacetime_bound_G(const ModelSpec& model, double q, double r,
                                   const SpacetimeWeight& w, const std::vector<double>& times,
                                   const std::vector<double>& series, double cr, double l,
                                   double gamma2, double gamma2_tilde) {
    SpacetimeGResult out;
    if (model.dim < 3) {
        out.failed_condition = "bound G requires N >= 3";
        return out;
    }
    if (w.kind != SpacetimeWeight::Kind::Constant) {
        out.failed_condition = "bound G implemented for bounded weights (sigma = 1)";
        return out;
    }
    if (!(r >= 1.0 && r < gamma2 && r < gamma2_tilde)) {
        out.failed_condition = "1 <= r < gamma2 and r < gamma2~";
        return out;
    }
    const double two_star = 2.0 * model.dim / (model.dim - 2.0);
    const bool combined = model.f.has_focusing_term();
    // q-thresholds from the gamma pair with the ratio pinned to 1:
    // gamma1 = gamma2 - 2*(1 - gamma1)... the finalized pairs carry
    // 1/tau4 = (r - gamma1)/(gamma2 - gamma1); with sigma = 1.
    const double gamma1 = (2.0 * gamma2 - two_star) / (2.0 - two_star);
    const double gamma1t = (2.0 * gamma2_tilde - two_star) / (2.0 - two_star);
    auto qmin_for = [&](double g1v, double g2v) {
        const double base = r * (g2v - g1v) / (two_star * (r - g1v));
        if (!combined) return base;
        return 2.0 * base * (1.0 - cr) / (2.0 * (1.0 - cr) - l * (1.0 + cr));
    };
    const double qmin = std::max(qmin_for(gamma1, gamma2), qmin_for(gamma1t, gamma2_tilde));
    if (!(q > qmin)) {
        out.failed_condition = "q above the gamma-pair threshold";
        return out;
    }
    out.hypothesis_ok = true;
    std::vector<double> yq(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) yq[i] = std::pow(series[i], q / r);
    out.lhs = std::pow(trapezoid(times, yq), 1.0 / q);
    return out;
}

// ---------------------------------------------------------------------------

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.size() != y.size()) throw DomainError("trapezoid: mismatched series");
    double acc = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) acc += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
    return acc;
}

std::pair<double, double> loglog_slope(const std::vector<double>& t, const std::vector<double>& y,
                                       double t_lo, double t_hi) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi || t[i] <= 0.0 || y[i] <= 0.0) continue;
        const double X = std::log(t[i]), Y = std::log(y[i]);
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
        ++n;
    }
    if (n < 2) throw DomainError("loglog_slope: fewer than 2 usable samples in the window");
    const double dn = static_cast<double>(n);
    const double slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
    const double icept = (sy - slope * sx) / dn;
    return {slope, icept};
}

DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& y, double t_lo,
                   double t_hi) {
    if (!(t_hi >= 10.0 * t_lo) || !(t_lo >= 1.0))
        throw DomainError("decay fit window must cover at least one decade past t = 1");
    DecayFit out;
    auto [slope, icept] = loglog_slope(t, y, t_lo, t_hi);
    out.iota = -slope;
    out.intercept = icept;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= t_lo && t[i] <= t_hi) ++n;
    out.n_points = n;
    return out;
}

double predicted_decay_exponent(const ModelSpec& model, double cr) {
    const ConstantReport cls = classify_constants(model);
    if (cls.est_case == EstimateCase::Case1) return 2.0;
    if (!model.f.has_focusing_term()) return 2.0 - cls.l;
    return 2.0 - cls.l * (1.0 + cr) / (1.0 - cr);
}

// ---------------------------------------------------------------------------

double sobolev_constant(int dim) {
    if (dim < 3) throw DomainError("sharp Sobolev constant defined for N >= 3");
    const double N = dim;
    const double two_star = 2.0 * N / (N - 2.0);
    // Best constant T in ||w||_{2*} <= T ||grad w||_2, raised to 2*.
    const double T = (1.0 / std::sqrt(N * (N - 2.0) * std::numbers::pi)) *
                     std::pow(std::tgamma(N) / std::tgamma(0.5 * N), 1.0 / N);
    return std::pow(T, two_star);
}

CrResult cr_constant(const ModelSpec& model, double mass_sq, double sobolev_cs,
                     bool envelope_sqrt_h) {
    CrResult out;
    if (model.dim < 3) {
        out.note = "not applicable: N < 3";
        return out;
    }
    if (!model.h.active()) {
        out.note = "not applicable: delta_h = 0";
        return out;
    }
    if (!model.f.has_focusing_term()) {
        out.applicable = true;
        out.feasible = true;
        out.value = 0.0;  // G1 = 0
        out.note = "no focusing term; C_r = 0";
        return out;
    }
    // Focusing part must be a single monomial.
    const FTerm* foc = nullptr;
    for (const FTerm& term : model.f.terms)
        if (term.coeff > 0.0) {
            if (foc) throw UnsupportedFamilyError("C_r needs a single focusing monomial");
            foc = &term;
        }
    out.applicable = true;

    const double N = model.dim;
    const double two_star = 2.0 * N / (N - 2.0);
    const double beta = foc->exponent;
    const double cg = foc->coeff / (beta + 1.0);  // G1 = cg s^(beta+1)
    const double alpha = model.h.alpha;
    const double e_near = two_star * (envelope_sqrt_h ? std::min(0.5, alpha) : alpha);
    const double e_far = two_star * (envelope_sqrt_h ? std::max(0.5, alpha) : alpha);

    const double g3 = 1.0 / (beta + 1.0);
    const double g4 = g3 + 0.5 * two_star * (1.0 - g3);  // ratio pinned to 1
    if (g4 * (beta + 1.0) < e_near) {
        out.note = "infeasible: gamma4 (beta+1) < 2* envelope exponent near 0";
        return out;
    }
    const double g3t = 1.0 / (beta + 1.0);
    const double g4t = g3t + 0.5 * two_star * (1.0 - g3t);
    if (g4t * (beta + 1.0) > e_far) {
        out.note = "infeasible: gamma4~ (beta+1) > 2* envelope exponent past 1";
        return out;
    }
    out.feasible = true;
    out.gamma3 = g3;
    out.gamma4 = g4;
    out.gamma3t = g3t;
    out.gamma4t = g4t;
    out.c3 = std::pow(cg, g3);
    out.c3p = std::pow(cg, g4);
    out.c4 = std::pow(cg, g3t);
    out.c4p = std::pow(cg, g4t);

    const double pref = std::pow(2.0, two_star - 1.0) * sobolev_cs;
    out.value = std::pow(out.c3 * mass_sq, 2.0 / N) * std::pow(pref * out.c3p, (N - 2.0) / N) +
                std::pow(out.c4 * mass_sq, 2.0 / N) * std::pow(pref * out.c4p, (N - 2.0) / N);
    return out;
}

GradientLimitResult gradient_limit(const Trajectory& traj) {
    GradientLimitResult out;
    const double twoE0 = 2.0 * traj.at0().energy;
    for (const auto& r : traj.records) {
        out.t.push_back(r.t);
        out.grad_l2.push_back(r.grad_l2);
        out.gap.push_back(std::abs(r.grad_l2 - twoE0));
    }
    out.final_gap = out.gap.empty() ? 0.0 : out.gap.back();
    return out;
}

}  // namespace qsl
