#pragma once

// Periodic grid on [-L, L)^N and the Fourier-side operators: Laplacian,
// gradient, fractional powers |k|^s, Hartree convolution, integrals and
// x-weighted moments.  Transform convention: (Lap f)^ = -|k|^2 fhat with
// wavenumbers k_j = (pi/L) * m_j, m_j in the usual FFT index order.

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "qsl/model.hpp"

namespace qsl {

using cplx = std::complex<double>;

struct Grid {
    int dim = 1;          // N in {1,2,3}
    int m = 8;            // points per axis, power of two, >= 8
    double half_width = 1.0;  // L

    std::size_t size() const {
        std::size_t n = 1;
        for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(m);
        return n;
    }
    double dx() const { return 2.0 * half_width / m; }
    double cell() const;  // dx^N
    // Centered coordinate of index i along one axis, in [-L, L).
    double x(int i) const { return -half_width + i * dx(); }
    // Signed wavenumber of FFT index i along one axis.
    double k(int i) const {
        const int s = (i <= m / 2) ? i : i - m;
        return (3.14159265358979323846 / half_width) * s;
    }
    double kmax_sq() const;  // max |k|^2 over the grid (Nyquist corner)

    bool operator==(const Grid& o) const = default;
    void validate() const;
};

struct Field {
    Grid grid;
    std::vector<cplx> v;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), v(g.size(), cplx(0.0, 0.0)) {}
    std::size_t size() const { return v.size(); }
    cplx& operator[](std::size_t i) { return v[i]; }
    const cplx& operator[](std::size_t i) const { return v[i]; }
};

// Unravel a flat row-major index into per-axis indices.
std::array<int, 3> unravel(const Grid& g, std::size_t idx);
// |x|^2 of the grid point with flat index idx.
double radius_sq(const Grid& g, std::size_t idx);

// In-place unnormalized forward / normalized inverse transforms.
void fft_forward(const Grid& g, std::vector<cplx>& data);
void fft_inverse(const Grid& g, std::vector<cplx>& data);

Field laplacian(const Field& u);
std::vector<Field> gradient(const Field& u);
// Multiplier |k|^s; for s < 0 the mean mode is zeroed first.
Field fractional(const Field& u, double s);

// Periodic convolution (W * rho)(x) = sum_y W(x - y) rho(y) dx^N.
// wker holds samples of W at the grid points x in [-L, L); rho is any field
// on the same grid.  W must be even for the symmetry properties to hold.
Field hartree(const Field& wker, const Field& rho);

// Convolution with a kernel already indexed by grid differences: entry j
// holds k(delta_j) with delta_j = j dx wrapped into [-L, L) per axis.
Field convolve_diff(const std::vector<double>& kernel_diff, const Field& f);

// Wrapped difference delta in [-L, L) for a single-axis index offset.
double wrap_delta(const Grid& g, int offset);

cplx integrate(const Field& f);
double integrate_real(const std::vector<double>& f, const Grid& g);
double norm_l2(const Field& u);      // sqrt(int |u|^2)
double norm_l2_sq(const Field& u);   // int |u|^2

struct Moments {
    double variance = 0.0;          // int |x|^2 |u|^2
    double dilation = 0.0;          // Im int conj(u) (x . grad u)
    double boundary_mass_fraction = 0.0;
    bool boundary_ok = true;        // fraction <= tol
};

// x-weighted moments; warns (boundary_ok = false) when the outermost shell
// carries more than `tol` of the total mass.
Moments moments(const Field& u, double tol = 1e-8);

// Component fields x_j * u (centered coordinates).
std::vector<Field> x_weighted(const Field& u);

// Fraction of |u|^2-mass on the outermost shell (first/last index any axis).
double boundary_mass_fraction(const Field& u);

// Sample a potential on the grid (values V(x_i), real).
std::vector<double> sample_potential(const PotentialSpec& spec, const Grid& g);
// Sample x.grad of a potential.
std::vector<double> sample_potential_xdot(const PotentialSpec& spec, const Grid& g);

struct GridMismatchError : std::runtime_error {
    explicit GridMismatchError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qsl
