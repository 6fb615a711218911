#include "qsl/solver.hpp"

#include <cmath>

namespace qsl {

void SolverConfig::validate(const ModelSpec& model, const Grid& grid) const {
    // Negative dt is legal for reverse stepping; run() insists on forward time.
    if (dt == 0.0) throw DomainError("dt must be nonzero");
    if (t_end < 0.0) throw DomainError("t_end must be >= 0");
    if (sample_every < 1) throw DomainError("sample_every must be >= 1");
    if (scheme == Scheme::Strang && model.h.active())
        throw DomainError("strang requires delta_h = 0; use ifrk4 for quasilinear runs");
    if (model.h.active() && model.h.alpha < 1.0)
        throw DomainError("quasilinear runs are restricted to alpha >= 1");
    if (scheme == Scheme::IfRk4) {
        const double margin = std::abs(dt) * grid.kmax_sq();
        if (margin > 40.0)
            throw DomainError("ifrk4 stability margin exceeded: dt * max|k|^2 = " + std::to_string(margin) +
                              " > 40");
    }
}

ModelOnGrid ModelOnGrid::build(const ModelSpec& spec, const Grid& grid) {
    spec.validate();
    grid.validate();
    ModelOnGrid m;
    m.spec = spec;
    m.grid = grid;
    m.has_v = !spec.v.zero();
    m.has_w = !spec.w.zero();
    m.v_samples = sample_potential(spec.v, grid);
    m.v_xdot_samples = sample_potential_xdot(spec.v, grid);
    if (m.has_w) {
        m.w_samples = sample_potential(spec.w, grid);
        m.w_xdot_samples = sample_potential_xdot(spec.w, grid);
    }
    return m;
}

Field ModelOnGrid::convolve_w(const Field& rho) const {
    if (!has_w) return Field(grid);
    Field wk(grid);
    for (std::size_t i = 0; i < wk.size(); ++i) wk.v[i] = w_samples[i];
    return hartree(wk, rho);
}

Field ModelOnGrid::convolve_absw(const Field& rho) const {
    if (!has_w) return Field(grid);
    Field wk(grid);
    for (std::size_t i = 0; i < wk.size(); ++i) wk.v[i] = std::abs(w_samples[i]);
    return hartree(wk, rho);
}

Field ModelOnGrid::convolve_w_dil(const Field& rho) const {
    if (!has_w) return Field(grid);
    Field wk(grid);
    for (std::size_t i = 0; i < wk.size(); ++i) wk.v[i] = w_samples[i] + 0.5 * w_xdot_samples[i];
    return hartree(wk, rho);
}

namespace {

// Non-Laplacian part of the right-hand side, already multiplied by -i.
Field rhs_nonlinear(const ModelOnGrid& model, const Field& u) {
    const Grid& g = u.grid;
    Field out(g);

    std::vector<double> hp;
    Field lap_h;
    if (model.spec.h.active()) {
        Field hfield(g);
        hp.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const HValues hv = eval_h(model.spec.h, std::norm(u.v[i]));
            hfield.v[i] = hv.h;
            hp[i] = hv.hp;
        }
        lap_h = laplacian(hfield);
    }

    Field wconv;
    if (model.has_w) {
        Field rho(g);
        for (std::size_t i = 0; i < g.size(); ++i) rho.v[i] = std::norm(u.v[i]);
        wconv = model.convolve_w(rho);
    }

    for (std::size_t i = 0; i < g.size(); ++i) {
        double theta = model.v_samples[i] + eval_F(model.spec.f, std::norm(u.v[i])).F;
        if (model.has_w) theta += std::real(wconv.v[i]);
        cplx val = theta * u.v[i];
        if (model.spec.h.active()) val += 2.0 * hp[i] * std::real(lap_h.v[i]) * u.v[i];
        out.v[i] = cplx(0.0, -1.0) * val;
    }
    return out;
}

}  // namespace

Field rhs(const ModelOnGrid& model, const Field& u) {
    if (!(u.grid == model.grid)) throw GridMismatchError("rhs: field on a different grid");
    const Field lap = laplacian(u);
    Field out = rhs_nonlinear(model, u);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.v[i] += cplx(0.0, -1.0) * lap.v[i];
        if (!std::isfinite(out.v[i].real()) || !std::isfinite(out.v[i].imag()))
            throw DivergedError("non-finite value in rhs evaluation");
    }
    return out;
}

Stepper::Stepper(const ModelOnGrid& model, const SolverConfig& cfg) : model_(model), cfg_(cfg) {
    cfg.validate(model.spec, model.grid);
    const Grid& g = model.grid;
    k2_.resize(g.size());
    const int m = g.m;
    std::size_t idx = 0;
    if (g.dim == 1) {
        for (int i = 0; i < m; ++i) k2_[idx++] = g.k(i) * g.k(i);
    } else if (g.dim == 2) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) k2_[idx++] = g.k(i) * g.k(i) + g.k(j) * g.k(j);
    } else {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int l = 0; l < m; ++l)
                    k2_[idx++] = g.k(i) * g.k(i) + g.k(j) * g.k(j) + g.k(l) * g.k(l);
    }
    lin_full_.resize(k2_.size());
    lin_half_.resize(k2_.size());
    lin_half_inv_.resize(k2_.size());
    lin_full_inv_.resize(k2_.size());
    for (std::size_t i = 0; i < k2_.size(); ++i) {
        lin_full_[i] = std::polar(1.0, cfg.dt * k2_[i]);
        lin_half_[i] = std::polar(1.0, 0.5 * cfg.dt * k2_[i]);
        lin_half_inv_[i] = std::conj(lin_half_[i]);
        lin_full_inv_[i] = std::conj(lin_full_[i]);
    }
}

void Stepper::step(State& state) const {
    if (cfg_.scheme == Scheme::Strang)
        step_strang(state);
    else
        step_ifrk4(state);
    state.t += cfg_.dt;
}

void Stepper::step_strang(State& state) const {
    const Grid& g = model_.grid;
    Field& u = state.u;
    const double half = 0.5 * cfg_.dt;

    auto phase_half = [&]() {
        Field wconv;
        if (model_.has_w) {
            Field rho(g);
            for (std::size_t i = 0; i < g.size(); ++i) rho.v[i] = std::norm(u.v[i]);
            wconv = model_.convolve_w(rho);
        }
        for (std::size_t i = 0; i < g.size(); ++i) {
            double theta = model_.v_samples[i] + eval_F(model_.spec.f, std::norm(u.v[i])).F;
            if (model_.has_w) theta += std::real(wconv.v[i]);
            u.v[i] *= std::polar(1.0, -half * theta);
        }
    };

    phase_half();
    fft_forward(g, u.v);
    for (std::size_t i = 0; i < u.v.size(); ++i) u.v[i] *= lin_full_[i];
    fft_inverse(g, u.v);
    phase_half();
}

std::vector<cplx> Stepper::nonlinear_hat(const std::vector<cplx>& uhat, Field& work) const {
    const Grid& g = model_.grid;
    work.v = uhat;
    fft_inverse(g, work.v);
    Field n = rhs_nonlinear(model_, work);
    fft_forward(g, n.v);
    return std::move(n.v);
}

void Stepper::step_ifrk4(State& state) const {
    // Classical RK4 on v(tau) = exp(-i tau |k|^2) uhat(t0 + tau), tau in [0, dt].
    const Grid& g = model_.grid;
    const double dt = cfg_.dt;
    const std::size_t n = g.size();

    std::vector<cplx> v0 = state.u.v;
    fft_forward(g, v0);

    Field work(g);
    auto g_at = [&](const std::vector<cplx>& v, int half_steps) {
        std::vector<cplx> uh(n);
        if (half_steps == 0) {
            uh = v;
        } else if (half_steps == 1) {
            for (std::size_t i = 0; i < n; ++i) uh[i] = lin_half_[i] * v[i];
        } else {
            for (std::size_t i = 0; i < n; ++i) uh[i] = lin_full_[i] * v[i];
        }
        std::vector<cplx> nh = nonlinear_hat(uh, work);
        if (half_steps == 1) {
            for (std::size_t i = 0; i < n; ++i) nh[i] *= lin_half_inv_[i];
        } else if (half_steps == 2) {
            for (std::size_t i = 0; i < n; ++i) nh[i] *= lin_full_inv_[i];
        }
        return nh;
    };

    std::vector<cplx> a = g_at(v0, 0);
    std::vector<cplx> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = v0[i] + 0.5 * dt * a[i];
    std::vector<cplx> b = g_at(tmp, 1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = v0[i] + 0.5 * dt * b[i];
    std::vector<cplx> c = g_at(tmp, 1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = v0[i] + dt * c[i];
    std::vector<cplx> d = g_at(tmp, 2);

    for (std::size_t i = 0; i < n; ++i) {
        const cplx vn = v0[i] + (dt / 6.0) * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
        state.u.v[i] = lin_full_[i] * vn;
    }
    fft_inverse(g, state.u.v);
}

RunResult run(const ModelOnGrid& model, const SolverConfig& cfg, const Field& u0,
              const std::vector<Observer>& observers) {
    cfg.validate(model.spec, model.grid);
    if (cfg.dt < 0.0) throw DomainError("run advances forward in time; dt must be positive");
    if (!(u0.grid == model.grid)) throw GridMismatchError("run: initial data on a different grid");

    RunResult res;
    State state{0.0, u0};
    const double mass0 = norm_l2_sq(u0);
    const long nsteps = std::lround(cfg.t_end / cfg.dt);
    Stepper stepper(model, cfg);

    auto notify = [&](long step) {
        for (const Observer& ob : observers)
            if (step % (static_cast<long>(ob.every) * cfg.sample_every) == 0 || step == nsteps)
                ob.fn(step, state);
    };
    auto check_health = [&](long step) {
        double mass = 0.0;
        bool finite = true;
        for (const cplx& z : state.u.v) {
            const double w = std::norm(z);
            if (!std::isfinite(w)) {
                finite = false;
                break;
            }
            mass += w;
        }
        mass *= model.grid.cell();
        if (!finite) throw DivergedError("non-finite field at step " + std::to_string(step));
        if (mass0 > 0.0 && std::abs(mass - mass0) / mass0 > cfg.mass_drift_abort)
            throw DivergedError("mass drift " + std::to_string(std::abs(mass - mass0) / mass0) +
                                " exceeds abort threshold at step " + std::to_string(step));
        const double bf = boundary_mass_fraction(state.u);
        if (bf > cfg.boundary_mass_tol) {
            ++res.boundary_warnings;
            if (cfg.strict_boundary)
                throw DivergedError("boundary-mass breach: fraction " + std::to_string(bf));
        }
    };

    notify(0);
    for (long s = 1; s <= nsteps; ++s) {
        stepper.step(state);
        if (s % cfg.sample_every == 0 || s == nsteps) {
            check_health(s);
            notify(s);
        }
    }
    res.final_state = std::move(state);
    res.steps = nsteps;
    return res;
}

}  // namespace qsl
