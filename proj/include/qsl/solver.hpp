#pragma once

// Time integration of  i u_t = Lap u + 2 delta_h u h'(|u|^2) Lap h(|u|^2)
//                              + V u + F(|u|^2) u + (W*|u|^2) u.
// Sign convention: the free flow is the multiplier exp(+i dt |k|^2) on uhat.
// Strang splitting (exact pointwise phase substep) handles the semilinear
// case; integrating-factor RK4 handles delta_h != 0.

#include <functional>
#include <string>
#include <vector>

#include "qsl/grid.hpp"
#include "qsl/model.hpp"

namespace qsl {

struct DivergedError : std::runtime_error {
    explicit DivergedError(const std::string& what) : std::runtime_error(what) {}
};

enum class Scheme { Strang, IfRk4 };

struct SolverConfig {
    Scheme scheme = Scheme::Strang;
    double dt = 1e-3;
    double t_end = 1.0;
    int sample_every = 10;
    double boundary_mass_tol = 1e-8;
    bool strict_boundary = false;  // abort the run on a boundary-mass breach
    double mass_drift_abort = 1e-2;

    void validate(const ModelSpec& model, const Grid& grid) const;
};

struct State {
    double t = 0.0;
    Field u;
};

// Model sampled onto a grid: potentials evaluated once, kernel transform
// cached.  rhs/step work from this; tests can fill the samples directly.
struct ModelOnGrid {
    ModelSpec spec;
    Grid grid;
    std::vector<double> v_samples;      // V(x_i)
    std::vector<double> w_samples;      // W(x_i), x-order (empty if W = 0)
    std::vector<double> w_xdot_samples; // (x.grad W)(x_i)
    std::vector<double> v_xdot_samples; // (x.grad V)(x_i)
    bool has_v = false;
    bool has_w = false;

    static ModelOnGrid build(const ModelSpec& spec, const Grid& grid);
    // (W * rho) with the cached kernel; zero field if W = 0.
    Field convolve_w(const Field& rho) const;
    // (|W| * rho); kernel values are <= 0 so this is -convolve_w.
    Field convolve_absw(const Field& rho) const;
    // ((W + (x.grad W)/2) * rho)
    Field convolve_w_dil(const Field& rho) const;
};

// u_t = -i [Lap u + 2 delta_h u h'(rho) Lap h(rho) + V u + F(rho) u + (W*rho) u]
Field rhs(const ModelOnGrid& model, const Field& u);

struct Observer {
    // Called with (step index, state); state is read-only.
    std::function<void(long, const State&)> fn;
    int every = 1;
};

class Stepper {
  public:
    Stepper(const ModelOnGrid& model, const SolverConfig& cfg);

    // Advance one step of size cfg.dt (or -dt when reverse is set).
    void step(State& state) const;
    const ModelOnGrid& model() const { return model_; }

  private:
    void step_strang(State& state) const;
    void step_ifrk4(State& state) const;
    std::vector<cplx> nonlinear_hat(const std::vector<cplx>& uhat, Field& work) const;

    const ModelOnGrid& model_;
    SolverConfig cfg_;
    std::vector<double> k2_;          // |k|^2 in FFT order
    std::vector<cplx> lin_full_;      // exp(+i dt |k|^2)
    std::vector<cplx> lin_half_;      // exp(+i dt/2 |k|^2)
    std::vector<cplx> lin_half_inv_;  // exp(-i dt/2 |k|^2)
    std::vector<cplx> lin_full_inv_;  // exp(-i dt |k|^2)
};

struct RunResult {
    State final_state;
    long steps = 0;
    int boundary_warnings = 0;
    bool diverged = false;
    std::string diverged_reason;
};

// Advance u0 from t=0 to t_end, invoking the observers every `every` steps
// (always including step 0 and the final step).  Throws DivergedError on
// mass drift beyond cfg.mass_drift_abort or non-finite values; records
// boundary-mass warnings (throws if cfg.strict_boundary).
RunResult run(const ModelOnGrid& model, const SolverConfig& cfg, const Field& u0,
              const std::vector<Observer>& observers);

}  // namespace qsl
