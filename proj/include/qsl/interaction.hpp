#pragma once

// Two-point (pair-correlation) Morawetz actions and the spacetime quantities
// they control, computed with FFT pair correlations.  Every FFT path reduces
// a double integral over (x, y) to single convolutions; the reductions are
// cross-checked against literal O(M^2) double sums in the test suite.
//
// Conventions: rho = |u|^2 and momentum density p = Im(u grad conj(u))
// throughout (the 1D module additionally uses its own mass density
// rho1 = |u|^2 / 2).  Under the sign convention i u_t = Lap u + ... this is
// the pairing that makes the defocusing pair action nondecreasing; the
// conjugate-swapped pairing is exactly its negative, and the double-sum
// oracle pins the implemented sign.

#include <vector>

#include "qsl/diagnostics.hpp"
#include "qsl/grid.hpp"
#include "qsl/model.hpp"
#include "qsl/solver.hpp"

namespace qsl {

enum class PairKernel {
    Abs,          // a(z) = |z|; grad a = z/|z| (N = 1: sign, N = 3: unit radial)
    Mollified2d,  // N = 2 radial weight with a'(r) = r/r0 (3/4 + log(r0/r)/2) for
                  // r < r0 and 1 - r0/(4r) past r0
};

// M = 4 int p(x) . (grad a * rho)(x) dx, the pair action
// 2 iint grad a(x-y) . Im[conj(u(x) u(y)) grad(u(x) u(y))] dx dy.
double action_pair(const Field& u, PairKernel kernel, double r0 = 0.0);

// Literal double-sum evaluation (O(M^2)); small grids only, used as oracle.
double action_pair_direct(const Field& u, PairKernel kernel, double r0 = 0.0);

// ---------------------------------------------------------------------------
// N = 3: accumulated left-hand sides controlled by the |x-y| action.

struct Interaction3dResult {
    double l4 = 0.0;               // iint |u|^4 dx dt
    double htilde_term = 0.0;      // iint 4 Htilde(|u|^2) |u|^2 dx dt
    double fractional_form = 0.0;  // iint |D^{-(N-3)/2}(rho + sqrt(rho Htilde))|^2 dx dt
    double sup_action = 0.0;       // sup_t |M(t)|
    double sup_hhalf_sq = 0.0;     // sup_t |u|_{Hdot^{1/2}}^2
    double measured_c = 0.0;       // (l4 + htilde_term) / sup_hhalf_sq
    double min_action_rate = 0.0;  // min over samples of centered dM/dt
    double action_rate_scale = 0.0;
    std::vector<double> t, action;
};

// Streaming accumulator: feed one state per sample.
class Interaction3dAccumulator {
  public:
    explicit Interaction3dAccumulator(const ModelOnGrid& model);
    void sample(const State& state);
    Interaction3dResult finalize() const;

  private:
    const ModelOnGrid& model_;
    std::vector<double> t_, action_, l4_, htld_, frac_, hhalf_;
};

// ---------------------------------------------------------------------------
// N = 2: truncated difference-quotient functionals.

struct Interaction2dSample {
    double diff_quotient = 0.0;   // iint w_r0(|x-y|) [rho(x)-rho(y)]^2 dx dy
    double cross_term = 0.0;      // 4 iint w_r0 [rho(x)-rho(y)][Ht(x)-Ht(y)] dx dy
    double dhalf_sq = 0.0;        // |D^{1/2} rho|_{L^2}^2
};

// One-state evaluation; r0 must be >= dx.
Interaction2dSample interaction_2d_sample(const ModelOnGrid& model, const Field& u, double r0);

struct Interaction2dResult {
    double diff_quotient = 0.0;  // time-accumulated
    double cross_term = 0.0;
    double dhalf_sq = 0.0;
    double sup_hhalf_sq = 0.0;
    std::vector<double> t;
};

class Interaction2dAccumulator {
  public:
    Interaction2dAccumulator(const ModelOnGrid& model, double r0);
    void sample(const State& state);
    Interaction2dResult finalize() const;

  private:
    const ModelOnGrid& model_;
    double r0_;
    std::vector<double> t_, dq_, ct_, dh_, hhalf_;
};

// ---------------------------------------------------------------------------
// N = 1: erf-mollified action, its exact rate identity, and the accumulated
// quasilinear-weighted bound.

struct Interaction1dSample {
    double action = 0.0;      // M(t)
    double rhs_total = 0.0;   // seven-term quadrature of dM/dt
    double rhs_terms[7] = {0, 0, 0, 0, 0, 0, 0};
    double lhs_density = 0.0;  // int {[5h'+2h''s]h's + 1}[d/dx |u|^2]^2 + [G - F s] s dx
    double hhalf_sq = 0.0;
};

Interaction1dSample interaction_1d_sample(const ModelOnGrid& model, const Field& u, double eps);

struct Interaction1dResult {
    std::vector<double> t, action, rhs, lhs_density;
    double max_identity_residual = 0.0;  // |centered dM/dt - rhs|
    double max_rate = 0.0;               // max |centered dM/dt|
    double min_rate = 0.0;               // min centered dM/dt (sign surrogate)
    double lhs_accumulated = 0.0;
    double sup_hhalf_sq = 0.0;
    double measured_c = 0.0;
};

class Interaction1dAccumulator {
  public:
    Interaction1dAccumulator(const ModelOnGrid& model, double eps);
    void sample(const State& state);
    Interaction1dResult finalize() const;

  private:
    const ModelOnGrid& model_;
    double eps_;
    std::vector<double> t_;
    std::vector<Interaction1dSample> samples_;
};

// |u|_{Hdot^{1/2}}^2 via the |k| multiplier.
double hhalf_norm_sq(const Field& u);

}  // namespace qsl
