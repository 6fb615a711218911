#include "qsl/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qsl {

namespace {

// grad a component along `axis`, sampled in difference order.
std::vector<double> grad_a_diff(const Grid& g, PairKernel kernel, double r0, int axis) {
    std::vector<double> out(g.size(), 0.0);
    const int m = g.m;
    auto radial_profile = [&](double r) -> double {
        if (kernel == PairKernel::Abs) return 1.0;  // a'(r) = 1
        // Mollified 2d weight: a'(r) from the truncated 1/s^3 source.
        if (r < r0) return (r / r0) * (0.75 + 0.5 * std::log(r0 / r));
        return 1.0 - 0.25 * r0 / r;
    };
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto ix = unravel(g, i);
        double d[3] = {0.0, 0.0, 0.0};
        double r2 = 0.0;
        for (int dd = 0; dd < g.dim; ++dd) {
            d[dd] = wrap_delta(g, ix[dd]);
            r2 += d[dd] * d[dd];
        }
        // Odd sampling: a component whose own index sits on the seam plane
        // (delta_d = -L, its own negative mod the box) takes the odd
        // extension's value zero; one-sided values there would break the
        // antisymmetry the pair reduction rests on.
        if (r2 == 0.0 || ix[axis] == 0 || ix[axis] == m / 2) continue;
        const double r = std::sqrt(r2);
        out[i] = radial_profile(r) * d[axis] / r;
    }
    return out;
}

std::vector<double> momentum_density(const Field& u, const Field& grad_comp) {
    std::vector<double> p(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        p[i] = std::imag(u.v[i] * std::conj(grad_comp.v[i]));
    return p;
}

double floor_of(const std::vector<double>& rho) {
    double mx = 0.0;
    for (double r : rho) mx = std::max(mx, r);
    return std::max(mx * 1e-14, 1e-300);
}

}  // namespace

double action_pair(const Field& u, PairKernel kernel, double r0) {
    const Grid& g = u.grid;
    if (kernel == PairKernel::Mollified2d && g.dim != 2)
        throw GridMismatchError("mollified2d kernel is for N = 2");
    if (kernel == PairKernel::Mollified2d && r0 < g.dx())
        throw DomainError("mollified2d kernel needs r0 >= dx");

    Field rho(g);
    for (std::size_t i = 0; i < g.size(); ++i) rho.v[i] = std::norm(u.v[i]);
    const auto grad = gradient(u);

    double acc = 0.0;
    for (int axis = 0; axis < g.dim; ++axis) {
        const auto ker = grad_a_diff(g, kernel, r0, axis);
        const Field conv = convolve_diff(ker, rho);
        const auto p = momentum_density(u, grad[axis]);
        for (std::size_t i = 0; i < g.size(); ++i) acc += p[i] * std::real(conv.v[i]);
    }
    return 4.0 * acc * g.cell();
}

double action_pair_direct(const Field& u, PairKernel kernel, double r0) {
    const Grid& g = u.grid;
    if (g.size() > 4096) throw DomainError("direct pair action limited to 4096 points");
    const auto grad = gradient(u);
    const double cell = g.cell();

    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto ixi = unravel(g, i);
        for (std::size_t j = 0; j < g.size(); ++j) {
            const auto ixj = unravel(g, j);
            double d[3] = {0.0, 0.0, 0.0};
            int off[3] = {0, 0, 0};
            double r2 = 0.0;
            for (int dd = 0; dd < g.dim; ++dd) {
                off[dd] = (((ixi[dd] - ixj[dd]) % g.m) + g.m) % g.m;
                d[dd] = wrap_delta(g, off[dd]);
                r2 += d[dd] * d[dd];
            }
            if (r2 == 0.0) continue;
            const double r = std::sqrt(r2);
            double prof = 1.0;
            if (kernel == PairKernel::Mollified2d)
                prof = r < r0 ? (r / r0) * (0.75 + 0.5 * std::log(r0 / r)) : 1.0 - 0.25 * r0 / r;
            // 2 Im[(u_i u_j) (grad_x(conj u_i) conj(u_j), conj(u_i) grad_y(conj u_j))] . (ga, -ga)
            const cplx pij = u.v[i] * u.v[j];
            for (int dd = 0; dd < g.dim; ++dd) {
                if (off[dd] == 0 || off[dd] == g.m / 2) continue;  // odd sampling
                const double ga = prof * d[dd] / r;
                acc += 2.0 * ga *
                       (std::imag(pij * std::conj(grad[dd].v[i] * u.v[j])) -
                        std::imag(pij * std::conj(u.v[i] * grad[dd].v[j])));
            }
        }
    }
    return acc * cell * cell;
}

double hhalf_norm_sq(const Field& u) { return norm_l2_sq(fractional(u, 0.5)); }

// ---------------------------------------------------------------------------

Interaction3dAccumulator::Interaction3dAccumulator(const ModelOnGrid& model) : model_(model) {
    if (model.grid.dim != 3) throw GridMismatchError("interaction 3d accumulator needs N = 3");
}

void Interaction3dAccumulator::sample(const State& state) {
    const Field& u = state.u;
    const Grid& g = u.grid;
    t_.push_back(state.t);
    action_.push_back(action_pair(u, PairKernel::Abs));

    double l4 = 0.0, ht = 0.0;
    Field combo(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double rho = std::norm(u.v[i]);
        const double htv = eval_htilde(model_.spec.h, rho);
        l4 += rho * rho;
        ht += 4.0 * htv * rho;
        combo.v[i] = rho + std::sqrt(rho * htv);
    }
    l4_.push_back(l4 * g.cell());
    htld_.push_back(ht * g.cell());
    const double ex = -0.5 * (g.dim - 3);
    frac_.push_back(norm_l2_sq(ex == 0.0 ? combo : fractional(combo, ex)));
    hhalf_.push_back(hhalf_norm_sq(u));
}

Interaction3dResult Interaction3dAccumulator::finalize() const {
    Interaction3dResult out;
    out.t = t_;
    out.action = action_;
    out.l4 = trapezoid(t_, l4_);
    out.htilde_term = trapezoid(t_, htld_);
    out.fractional_form = trapezoid(t_, frac_);
    for (double a : action_) out.sup_action = std::max(out.sup_action, std::abs(a));
    for (double h : hhalf_) out.sup_hhalf_sq = std::max(out.sup_hhalf_sq, h);
    if (out.sup_hhalf_sq > 0.0) out.measured_c = (out.l4 + out.htilde_term) / out.sup_hhalf_sq;
    out.min_action_rate = 0.0;
    for (std::size_t i = 1; i + 1 < t_.size(); ++i) {
        const double rate = (action_[i + 1] - action_[i - 1]) / (t_[i + 1] - t_[i - 1]);
        out.min_action_rate = std::min(out.min_action_rate, rate);
        out.action_rate_scale = std::max(out.action_rate_scale, std::abs(rate));
    }
    return out;
}

// ---------------------------------------------------------------------------

Interaction2dSample interaction_2d_sample(const ModelOnGrid& model, const Field& u, double r0) {
    const Grid& g = u.grid;
    if (g.dim != 2) throw GridMismatchError("interaction 2d sample needs N = 2");
    if (r0 < g.dx()) throw DomainError("r0 < dx rejected");

    Field rho(g);
    Field htf(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = std::norm(u.v[i]);
        rho.v[i] = r;
        htf.v[i] = eval_htilde(model.spec.h, r);
    }

    std::vector<double> w(g.size(), 0.0);
    double sw = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto ix = unravel(g, i);
        const double dx0 = wrap_delta(g, ix[0]);
        const double dx1 = wrap_delta(g, ix[1]);
        const double r = std::hypot(dx0, dx1);
        if (r >= r0) {
            w[i] = 1.0 / (r * r * r);
            sw += w[i];
        }
    }
    sw *= g.cell();

    const Field wrho = convolve_diff(w, rho);
    const Field wht = convolve_diff(w, htf);

    Interaction2dSample out;
    double rho_sq = 0.0, rho_wrho = 0.0, rho_ht = 0.0, rho_wht = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double ri = std::real(rho.v[i]);
        rho_sq += ri * ri;
        rho_wrho += ri * std::real(wrho.v[i]);
        rho_ht += ri * std::real(htf.v[i]);
        rho_wht += ri * std::real(wht.v[i]);
    }
    const double cell = g.cell();
    out.diff_quotient = 2.0 * (sw * rho_sq * cell - rho_wrho * cell);
    out.cross_term = 8.0 * (sw * rho_ht * cell - rho_wht * cell);
    out.dhalf_sq = norm_l2_sq(fractional(rho, 0.5));
    return out;
}

Interaction2dAccumulator::Interaction2dAccumulator(const ModelOnGrid& model, double r0)
    : model_(model), r0_(r0) {
    if (model.grid.dim != 2) throw GridMismatchError("interaction 2d accumulator needs N = 2");
    if (r0 < model.grid.dx()) throw DomainError("r0 < dx rejected");
}

void Interaction2dAccumulator::sample(const State& state) {
    const Interaction2dSample s = interaction_2d_sample(model_, state.u, r0_);
    t_.push_back(state.t);
    dq_.push_back(s.diff_quotient);
    ct_.push_back(s.cross_term);
    dh_.push_back(s.dhalf_sq);
    hhalf_.push_back(hhalf_norm_sq(state.u));
}

Interaction2dResult Interaction2dAccumulator::finalize() const {
    Interaction2dResult out;
    out.t = t_;
    out.diff_quotient = trapezoid(t_, dq_);
    out.cross_term = trapezoid(t_, ct_);
    out.dhalf_sq = trapezoid(t_, dh_);
    for (double h : hhalf_) out.sup_hhalf_sq = std::max(out.sup_hhalf_sq, h);
    return out;
}

// ---------------------------------------------------------------------------

Interaction1dSample interaction_1d_sample(const ModelOnGrid& model, const Field& u, double eps) {
    const Grid& g = u.grid;
    if (g.dim != 1) throw GridMismatchError("interaction 1d sample needs N = 1");
    if (eps < 2.0 * g.dx()) throw DomainError("eps too small for the grid (needs eps >= 2 dx)");

    const std::size_t n = g.size();
    const double cell = g.cell();
    const HSpec& hs = model.spec.h;

    // Densities: rho2 = |u|^2, rho = rho2/2; p = Im(u d/dx conj(u)).
    Field rho2(g), rho(g);
    for (std::size_t i = 0; i < n; ++i) {
        rho2.v[i] = std::norm(u.v[i]);
        rho.v[i] = 0.5 * std::norm(u.v[i]);
    }
    const Field ux = gradient(u)[0];
    Field pf(g);
    for (std::size_t i = 0; i < n; ++i) pf.v[i] = std::imag(u.v[i] * std::conj(ux.v[i]));

    const Field drho = gradient(rho)[0];
    const Field d2rho = laplacian(rho);

    // Difference-order kernels: K = a', A = a (erf profile, int_0^{x/eps} e^{-s^2} ds).
    std::vector<double> K(n), A(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = wrap_delta(g, static_cast<int>(i));
        K[i] = std::exp(-d * d / (eps * eps)) / eps;
        A[i] = 0.5 * std::sqrt(std::numbers::pi) * std::erf(d / eps);
    }

    const Field Krho = convolve_diff(K, rho);
    const Field Kp = convolve_diff(K, pf);
    const Field Krho2 = convolve_diff(K, rho2);
    const Field Arho = convolve_diff(A, rho);

    const double fl = floor_of([&] {
        std::vector<double> rr(n);
        for (std::size_t i = 0; i < n; ++i) rr[i] = std::real(rho.v[i]);
        return rr;
    }());

    Interaction1dSample out;

    // Action M = iint a(x-y) rho(y) p(x).
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += std::real(pf.v[i]) * std::real(Arho.v[i]);
    out.action = m * cell;

    double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0, t5 = 0.0, t6 = 0.0, t7 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double rh = std::max(std::real(rho.v[i]), fl);
        const double dr = std::real(drho.v[i]);
        const double pi_ = std::real(pf.v[i]);
        const double kr = std::real(Krho.v[i]);
        t1 += dr * dr / rh * kr;
        t2 += pi_ * pi_ / rh * kr - pi_ * std::real(Kp.v[i]);
        t3 += -std::real(d2rho.v[i]) * kr;
    }
    if (hs.active()) {
        Field hf(g);
        for (std::size_t i = 0; i < n; ++i)
            hf.v[i] = eval_h(hs, std::real(rho2.v[i])).h;
        const Field hx = gradient(hf)[0];
        const Field hxx = laplacian(hf);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = std::real(rho2.v[i]);
            const double hps = hs.alpha * std::pow(s, hs.alpha);  // h'(s) s
            const double kr2 = std::real(Krho2.v[i]);
            t4 += -hps * std::real(hxx.v[i]) * kr2;
            t5 += 0.5 * std::real(hx.v[i]) * std::real(hx.v[i]) * kr2;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::real(rho2.v[i]);
        const FValues fv = eval_F(model.spec.f, s);
        t6 += 0.5 * (fv.G - fv.F * s) * std::real(Krho2.v[i]);
    }

    // T7: iint a(x-y) [V' + W' * rho2](x) rho2(x) rho(y).
    if (model.has_v || model.has_w) {
        std::vector<double> force(n, 0.0);
        if (model.has_v) {
            for (std::size_t i = 0; i < n; ++i) {
                const double x = g.x(static_cast<int>(i));
                force[i] = x != 0.0 ? model.v_xdot_samples[i] / x : 0.0;
            }
        }
        if (model.has_w) {
            std::vector<double> wprime(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double d = wrap_delta(g, static_cast<int>(i));
                wprime[i] = d != 0.0 ? eval_potential_xdot(model.spec.w, d * d) / d : 0.0;
            }
            const Field wconv = convolve_diff(wprime, rho2);
            for (std::size_t i = 0; i < n; ++i) force[i] += std::real(wconv.v[i]);
        }
        for (std::size_t i = 0; i < n; ++i)
            t7 += force[i] * std::real(rho2.v[i]) * std::real(Arho.v[i]);
    }

    out.rhs_terms[0] = t1 * cell;
    out.rhs_terms[1] = t2 * cell;
    out.rhs_terms[2] = t3 * cell;
    out.rhs_terms[3] = t4 * cell;
    out.rhs_terms[4] = t5 * cell;
    out.rhs_terms[5] = t6 * cell;
    out.rhs_terms[6] = t7 * cell;
    for (double term : out.rhs_terms) out.rhs_total += term;

    // Accumulated bound integrand: {[5h' + 2h'' s] h' s + 1}[d/dx rho2]^2 + [G - F s] s.
    double lhs = 0.0;
    const Field drho2 = gradient(rho2)[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::real(rho2.v[i]);
        const FValues fv = eval_F(model.spec.f, s);
        const double d2 = std::real(drho2.v[i]);
        lhs += (h_interaction_kernel(hs, s) + 1.0) * d2 * d2 + (fv.G - fv.F * s) * s;
    }
    out.lhs_density = lhs * cell;
    out.hhalf_sq = hhalf_norm_sq(u);
    return out;
}

Interaction1dAccumulator::Interaction1dAccumulator(const ModelOnGrid& model, double eps)
    : model_(model), eps_(eps) {
    if (model.grid.dim != 1) throw GridMismatchError("interaction 1d accumulator needs N = 1");
    if (eps < 2.0 * model.grid.dx()) throw DomainError("eps too small for the grid (needs eps >= 2 dx)");
}

void Interaction1dAccumulator::sample(const State& state) {
    t_.push_back(state.t);
    samples_.push_back(interaction_1d_sample(model_, state.u, eps_));
}

Interaction1dResult Interaction1dAccumulator::finalize() const {
    Interaction1dResult out;
    out.t = t_;
    std::vector<double> lhs_series;
    for (const auto& s : samples_) {
        out.action.push_back(s.action);
        out.rhs.push_back(s.rhs_total);
        out.lhs_density.push_back(s.lhs_density);
        lhs_series.push_back(s.lhs_density);
        out.sup_hhalf_sq = std::max(out.sup_hhalf_sq, s.hhalf_sq);
    }
    out.min_rate = 0.0;
    for (std::size_t i = 1; i + 1 < t_.size(); ++i) {
        const double rate = (out.action[i + 1] - out.action[i - 1]) / (t_[i + 1] - t_[i - 1]);
        out.max_rate = std::max(out.max_rate, std::abs(rate));
        out.min_rate = std::min(out.min_rate, rate);
        out.max_identity_residual =
            std::max(out.max_identity_residual, std::abs(rate - out.rhs[i]));
    }
    out.lhs_accumulated = trapezoid(t_, lhs_series);
    if (out.sup_hhalf_sq > 0.0) out.measured_c = out.lhs_accumulated / out.sup_hhalf_sq;
    return out;
}

}  // namespace qsl
