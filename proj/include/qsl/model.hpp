#pragma once

// Closed-form nonlinearity families for the equation
//   i u_t = Lap u + 2 delta_h u h'(|u|^2) Lap h(|u|^2) + V(x) u + F(|u|^2) u + (W*|u|^2) u
// together with every derived scalar function (G, G1, G2, Htilde, radial
// derivatives of the potentials) and the sign/exponent classifier that the
// weighted-estimate machinery needs.

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsl {

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedFamilyError : std::runtime_error {
    explicit UnsupportedFamilyError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// h family: none (delta_h = 0) or the power law h(s) = s^alpha, alpha >= 1/2.

enum class HKind { None, Power };

struct HSpec {
    HKind kind = HKind::None;
    double alpha = 1.0;

    bool active() const { return kind == HKind::Power; }  // delta_h
    void validate() const;
};

struct HValues {
    double h = 0.0;
    double hp = 0.0;   // h'
    double hpp = 0.0;  // h''
};

// h, h', h'' at s >= 0. Negative s is a domain error.
HValues eval_h(const HSpec& spec, double s);

// Htilde(s) = int_0^s [h'(sigma)]^2 sigma dsigma; power law: alpha s^(2 alpha) / 2.
double eval_htilde(const HSpec& spec, double s);

// [2 h''(s) h'(s) s + (h'(s))^2] * s, evaluated in closed form so the
// degenerate s -> 0 limit stays finite: alpha^2 (2 alpha - 1) s^(2 alpha - 1).
double h_theta_kernel(const HSpec& spec, double s);

// h''(s) h'(s) s^2 in closed form: alpha^2 (alpha - 1) s^(2 alpha - 1); the
// weight of the cross term in the dilation rate.
double h_cross_kernel(const HSpec& spec, double s);

// [5 h'(s) + 2 h''(s) s] h'(s) s, the quasilinear weight of the 1D
// interaction bound: alpha^2 (2 alpha + 3) s^(2 alpha - 1).
double h_interaction_kernel(const HSpec& spec, double s);

// ---------------------------------------------------------------------------
// F family: F(s) = sum_j b_j s^(beta_j), exponents strictly increasing.

struct FTerm {
    double coeff = 0.0;     // b_j, signed
    double exponent = 1.0;  // beta_j > 0
};

struct FSpec {
    std::vector<FTerm> terms;

    bool zero() const { return terms.empty(); }
    // Defocusing means every coefficient is <= 0.
    bool defocusing() const;
    bool has_focusing_term() const;
    void validate() const;
};

struct FValues {
    double F = 0.0;
    double Fp = 0.0;  // F'
    double G = 0.0;   // int_0^s F
    double G1 = 0.0;  // positive-coefficient part of G
    double G2 = 0.0;  // minus the negative-coefficient part, G = G1 - G2
};

FValues eval_F(const FSpec& spec, double s);

// ---------------------------------------------------------------------------
// Potential family, shared by V and the convolution kernel W.
//   zero             : identically 0
//   SmoothedInversePower : -a / (|x|^2 + eps^2)^(m/2); eps = 0 gives the bare power
//   BoundedRational  : -a |x|^2 / (|x|^2 + 1)

enum class PotentialKind { Zero, SmoothedInversePower, BoundedRational };

struct PotentialSpec {
    PotentialKind kind = PotentialKind::Zero;
    double amplitude = 0.0;  // a >= 0
    double exponent = 1.0;   // m > 0 (inverse-power only)
    double eps = 0.0;        // regularization length (inverse-power only)

    bool zero() const { return kind == PotentialKind::Zero || amplitude == 0.0; }
    void validate() const;
};

// Value at radius r = |x| (always <= 0).
double eval_potential(const PotentialSpec& spec, double r2);
// x . grad of the potential at radius^2 = r2, analytic.
double eval_potential_xdot(const PotentialSpec& spec, double r2);

// ---------------------------------------------------------------------------

struct ModelSpec {
    int dim = 1;  // N in {1,2,3}
    HSpec h;
    FSpec f;
    PotentialSpec v;
    PotentialSpec w;

    bool semilinear() const { return !h.active(); }
    void validate() const;
};

// ---------------------------------------------------------------------------
// Sign classification of the weighted-estimate hypotheses for the power-law
// families, with the per-family deviation constants
//   k1 = 2 alpha - 1                   (h = s^alpha)
//   k2, k3 = |N beta - 2| / (beta + 1) (focusing / defocusing F monomials)
//   k4, k5 = 2 - m                     (V, W inverse powers, m < 2)
// and l = max over the constants whose sign condition actually fails.

enum class EstimateCase { Case1, Case2 };

struct ConstantReport {
    EstimateCase est_case = EstimateCase::Case1;
    double k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0, k5 = 0.0;
    double l = 0.0;
    // Names of the sign conditions that fail (empty in Case 1).
    std::vector<std::string> failing;
};

ConstantReport classify_constants(const ModelSpec& model);

}  // namespace qsl
