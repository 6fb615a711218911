#pragma once

// Scalar functionals of a state or trajectory: mass, energy, virial
// quantities, the pseudoconformal pair (P, theta), the defect functional Phi,
// weighted Morawetz accumulations with their bound constants, mixed-norm
// spacetime bounds, decay-rate fits, and the mass/Sobolev smallness constant.

#include <optional>
#include <string>
#include <vector>

#include "qsl/grid.hpp"
#include "qsl/model.hpp"
#include "qsl/solver.hpp"

namespace qsl {

struct DiagnosticRecord {
    double t = 0.0;
    double mass = 0.0;       // (int |u|^2)^(1/2)
    double energy = 0.0;
    double variance = 0.0;   // int |x|^2 |u|^2
    double dilation = 0.0;   // Im int conj(u) (x.grad u)
    double grad_l2 = 0.0;    // int |grad u|^2
    double gradh_l2 = 0.0;   // int |grad h(|u|^2)|^2
    double pot_mass = 0.0;   // int |V| |u|^2
    double hartree_quart = 0.0;  // int (|W| * |u|^2) |u|^2
    double g_int = 0.0, g1_int = 0.0, g2_int = 0.0;  // int G, G1, G2
    double phi = 0.0;        // int Phi
    double p_value = 0.0;    // P(t), |(x-2it grad)u|^2 form
    double p_expanded = 0.0; // P(t), variance + 4t dilation + 4t^2 ... form
    double theta = 0.0;
    double hu_sq = 0.0;      // int |(x - 2it grad) u|^2
    double boundary_fraction = 0.0;
    bool boundary_ok = true;
};

// All record fields from one state; boundary flag against tol.
DiagnosticRecord compute_record(const ModelOnGrid& model, const State& state, double tol = 1e-8);

// {mass norm, energy} only (cheaper).
std::pair<double, double> invariants(const ModelOnGrid& model, const State& state);

// Pointwise defect density
// Phi(x) = delta_h |grad h|^2 + |G1| + |G2| + |V| |u|^2 + (|W|*|u|^2)|u|^2 / 2.
std::vector<double> phi_density(const ModelOnGrid& model, const Field& u);
double phi_integral(const ModelOnGrid& model, const Field& u);

struct Trajectory {
    std::vector<DiagnosticRecord> records;
    std::vector<std::pair<double, Field>> checkpoints;
    int boundary_warnings = 0;

    const DiagnosticRecord& at0() const { return records.front(); }
    std::vector<double> times() const;
    std::vector<double> series(double DiagnosticRecord::*field) const;
};

// ---------------------------------------------------------------------------
// Virial identity: residual(t_i) = centered d/dt variance + 4 dilation.

struct VirialResult {
    std::vector<double> t;
    std::vector<double> residual;
    double max_abs_residual = 0.0;
    double max_abs_dvar = 0.0;  // scale: max |d/dt variance|
};
VirialResult virial_residuals(const Trajectory& traj, bool require_boundary_ok = true);

// Pseudoconformal balance: R(t) = P(t) - P(0) - 4 int_0^t tau theta(tau) dtau.
struct PseudoconformalResult {
    std::vector<double> t, P, theta, R;
    double max_abs_R = 0.0;
    double max_P = 0.0;
    double form_discrepancy = 0.0;  // max |p_value - p_expanded|
};
PseudoconformalResult pseudoconformal(const Trajectory& traj);

// ---------------------------------------------------------------------------
// Weighted Morawetz estimates.

enum class EstimateKind { A, B, C, D, E };

enum class WeightKind { Constant, PolyX, PolyT, PolyXT };

struct WeightSpec {
    WeightKind kind = WeightKind::Constant;
    double theta = 1.0;    // Phi power (estimate A: 1/2 < theta < 1)
    double k = 2.0;        // time power (B, D)
    double sigma = 1.0;    // a(x) = (1 + |x|^2)^sigma (A)
    double c0 = 0.0;       // b (B) or c0 (D)
    bool c_radial = false; // D: c(x) = c0 sqrt(1 + |x|^2)
};

struct MorawetzResult {
    bool hypothesis_ok = false;
    std::string failed_condition;  // named inequality when rejected
    double accumulated = 0.0;      // time-trapezoid of the weighted integral
    double bound = 0.0;            // M_i(u0, ...)
    double margin = 0.0;           // bound - accumulated
    double tail_fraction = 0.0;    // estimated contribution beyond T over accumulated
    bool tail_ok = true;           // tail_fraction <= 5%
    std::vector<double> t, integrand;  // per-sample spatial integral
};

// Per-sample spatial integral for one estimate; fed by an observer.
double morawetz_integrand(const ModelOnGrid& model, const Field& u, double t, EstimateKind kind,
                          const WeightSpec& w);

// Finalize: time quadrature, bound constant, margin, tail estimate.
// `series`/`times` come from morawetz_integrand samples; u0-dependent
// constants are taken from the t=0 record (energy, variance) and cr.
MorawetzResult morawetz_finalize(const ModelSpec& model, EstimateKind kind, const WeightSpec& w,
                                 const std::vector<double>& times, const std::vector<double>& series,
                                 double energy0, double c_u0, double cr);

// Hypothesis validation alone (also used by the CLI `check` path).
std::optional<std::string> validate_morawetz_weight(const ModelSpec& model, EstimateKind kind,
                                                    const WeightSpec& w, double cr);

// ---------------------------------------------------------------------------
// Mixed-norm spacetime bounds.

struct SpacetimeWeight {
    enum class Kind { Constant, GaussianX } kind = Kind::Constant;
    double amplitude = 1.0;  // c_w
    double width = 1.0;      // Gaussian: exp(-|x|^2 / (2 width^2))
};

struct SpacetimeResult {
    bool hypothesis_ok = false;
    std::string failed_condition;
    double lhs = 0.0;          // (int (int w Phi^theta)^p dt)^(1/p)
    double tail_slope = 0.0;   // log-log slope of the inner integral over [T/2, T]
    bool finite_verdict = false;  // tail_slope < -1/p
};

double spacetime_integrand(const ModelOnGrid& model, const Field& u, double theta,
                           const SpacetimeWeight& w);

SpacetimeResult spacetime_bound_F(const ModelSpec& model, double p, double theta,
                                  const SpacetimeWeight& w, const std::vector<double>& times,
                                  const std::vector<double>& series, double cr, double l);

// Bound (G): mixed L^q_t L^r_x norm of G1(|u|^2) under a bounded weight.
struct SpacetimeGResult {
    bool hypothesis_ok = false;
    std::string failed_condition;
    double lhs = 0.0;
};
double spacetime_g_integrand(const ModelOnGrid& model, const Field& u, double r,
                             const SpacetimeWeight& w);
SpacetimeGResult spacetime_bound_G(const ModelSpec& model, double q, double r,
                                   const SpacetimeWeight& w, const std::vector<double>& times,
                                   const std::vector<double>& series, double cr, double l,
                                   double gamma2, double gamma2_tilde);

// ---------------------------------------------------------------------------
// Decay-rate fit: least-squares slope of log y against log t.

struct DecayFit {
    double iota = 0.0;       // fitted exponent (y ~ t^-iota)
    double intercept = 0.0;  // log-log intercept
    double predicted = 0.0;  // 2, 2-l, or 2 - l(1+Cr)/(1-Cr) per classification
    std::size_t n_points = 0;
};

DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& y, double t_lo,
                   double t_hi);
double predicted_decay_exponent(const ModelSpec& model, double cr);

// ---------------------------------------------------------------------------
// Mass/Sobolev smallness constant C_r(u0) for N >= 3 quasilinear models with
// a focusing monomial; gamma pair solved in closed form with the ratio
// condition pinned to 1.

struct CrResult {
    bool applicable = false;   // N >= 3, h active, focusing monomial present
    bool feasible = false;     // gamma windows nonempty
    double value = 0.0;
    double gamma3 = 0.0, gamma4 = 0.0, gamma3t = 0.0, gamma4t = 0.0;
    double c3 = 0.0, c3p = 0.0, c4 = 0.0, c4p = 0.0;
    std::string note;
};

// envelope_sqrt_h: use [s^(1/2) + h(s)] instead of [h(s)] in the comparison
// envelope (the two printed variants; both are supported and reported).
CrResult cr_constant(const ModelSpec& model, double mass_sq, double sobolev_cs,
                     bool envelope_sqrt_h = false);

// Classical closed-form sharp Sobolev constant for int w^(2*) <= C_s (int |grad w|^2)^(2*/2).
double sobolev_constant(int dim);

// ---------------------------------------------------------------------------
// Gradient limit: gap(t) = |int |grad u|^2 - 2 E(u0)|.

struct GradientLimitResult {
    std::vector<double> t, grad_l2, gap;
    double final_gap = 0.0;
};
GradientLimitResult gradient_limit(const Trajectory& traj);

// ---------------------------------------------------------------------------

// Trapezoid quadrature of y(t) over the sampled axis.
double trapezoid(const std::vector<double>& t, const std::vector<double>& y);

// Least-squares slope of log y vs log t over [t_lo, t_hi].
std::pair<double, double> loglog_slope(const std::vector<double>& t, const std::vector<double>& y,
                                       double t_lo, double t_hi);

}  // namespace qsl
