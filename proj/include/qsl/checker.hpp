#pragma once

// Closed-form validation of the exponent and sign hypotheses behind the
// weighted estimates, the global-existence criteria, and the scattering
// theorems, restricted to the power-law families.  Inequalities are decided
// in exact rational arithmetic whenever every operand reconstructs as a small
// rational; otherwise a 1e-12 guard band flags near-boundary ties.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsl/model.hpp"

namespace qsl {

// ---------------------------------------------------------------------------
// Exact rationals (int64, normalized).  Construction from a double succeeds
// only when the value is exactly p/q with a small denominator.

struct Rat {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static std::optional<Rat> from_double(double v, std::int64_t max_den = 1 << 20);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    Rat operator+(const Rat& o) const;
    Rat operator-(const Rat& o) const;
    Rat operator*(const Rat& o) const;
    Rat operator/(const Rat& o) const;
    int cmp(const Rat& o) const;  // -1, 0, +1
};

// Three-way compare with exactness bookkeeping: returns -1/0/+1; *exact set
// when both sides reconstructed as rationals.  |a-b| <= 1e-12 counts as a tie
// on the inexact path.
int compare_guarded(double a, double b, bool* exact = nullptr);

// ---------------------------------------------------------------------------

enum class Verdict { Applies, Fails, NotApplicable };

struct Condition {
    std::string name;   // the inequality, as printed
    bool ok = false;
    bool boundary = false;  // tie at the endpoint (strict inequality fails)
    std::string detail;
};

struct WindowOut {
    std::string name;
    double lo = 0.0, hi = 0.0;  // open interval (lo, hi)
    bool nonempty = false;
};

struct TheoremReport {
    std::string id;
    Verdict verdict = Verdict::NotApplicable;
    std::vector<Condition> conditions;
    std::vector<std::pair<std::string, double>> constants;
    std::vector<WindowOut> windows;
    std::string note;

    std::vector<std::string> failed_names() const;
    std::string render() const;        // human-readable block
    std::string machine_line() const;  // single byte-stable record line
};

// ---------------------------------------------------------------------------

struct AdmissiblePair {
    double q = 0.0;  // +inf at r = 2
    double r = 0.0;
    double q_conj = 0.0;
    double r_conj = 0.0;
};

// Solve 2/q = N(1/2 - 1/r); r must lie in [2, 2N/(N-2)) for N >= 3,
// [2, inf) otherwise.
AdmissiblePair admissible_pair(int dim, double r);

// ---------------------------------------------------------------------------

enum class WvClass { WV1, WV2, Neither };

struct WvReport {
    WvClass cls = WvClass::Neither;
    TheoremReport report;
    // Feasible integrability windows for the exponents p1 (V) and p2 (W).
    WindowOut p1_window, p2_window;
};

WvReport check_wv(const ModelSpec& model);

// Global-existence criteria; mass_sq = |u0|_{L^2}^2, energy = E(u0).
TheoremReport check_theorem1(const ModelSpec& model, double mass_sq, double energy,
                             double sobolev_cs);

// Sign classification with the per-family constants (wraps classify_constants).
TheoremReport check_theorem3(const ModelSpec& model);

// Bound (F)/(G) exponent validation for a given (p, theta) / (q, r) choice.
TheoremReport check_theorem4(const ModelSpec& model, double p, double theta, double q, double r,
                             double cr);

// L^2 scattering windows over the five dual exponents.
TheoremReport check_theorem6(const ModelSpec& model);

// Sigma scattering: Remark-window gate plus the literal exponent scan.
TheoremReport check_theorem7(const ModelSpec& model);

// The three closed-form case lists for the inverse-power/monomial model.
TheoremReport check_corollary65(const ModelSpec& model);

// Convenience: lower endpoint of the beta window for the Sigma scattering
// example class, (2 - N + sqrt(N^2 + 12N + 4)) / (4N).
double sigma_scattering_beta_lower(int dim);

}  // namespace qsl
