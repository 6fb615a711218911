#include "qsl/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace qsl {

void Grid::validate() const {
    if (dim < 1 || dim > 3) throw DomainError("grid dim must be 1, 2 or 3");
    if (m < 8) throw DomainError("grid needs at least 8 points per axis");
    if ((m & (m - 1)) != 0) throw DomainError("points per axis must be a power of two");
    if (half_width <= 0.0) throw DomainError("grid half-width must be positive");
}

double Grid::cell() const {
    double c = 1.0;
    for (int d = 0; d < dim; ++d) c *= dx();
    return c;
}

double Grid::kmax_sq() const {
    const double knyq = (3.14159265358979323846 / half_width) * (m / 2);
    return dim * knyq * knyq;
}

std::array<int, 3> unravel(const Grid& g, std::size_t idx) {
    std::array<int, 3> out{0, 0, 0};
    for (int d = g.dim - 1; d >= 0; --d) {
        out[d] = static_cast<int>(idx % g.m);
        idx /= g.m;
    }
    return out;
}

double radius_sq(const Grid& g, std::size_t idx) {
    const auto ix = unravel(g, idx);
    double r2 = 0.0;
    for (int d = 0; d < g.dim; ++d) {
        const double x = g.x(ix[d]);
        r2 += x * x;
    }
    return r2;
}

namespace {

// Process-wide FFTW plan cache keyed by (dim, m).  Plans are created with
// FFTW_UNALIGNED so they can execute on any caller buffer; execution itself
// is thread-safe on distinct arrays.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

PlanPair& plans_for(const Grid& g) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(g.dim, g.m);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<cplx> scratch(g.size());
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    int dims[3] = {g.m, g.m, g.m};
    PlanPair pp;
    pp.fwd = fftw_plan_dft(g.dim, dims, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    pp.inv = fftw_plan_dft(g.dim, dims, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(key, pp).first->second;
}

void check_same_grid(const Field& a, const Field& b, const char* op) {
    if (!(a.grid == b.grid)) throw GridMismatchError(std::string(op) + ": fields live on different grids");
}

// Apply a real Fourier multiplier mul(k-vector) in place.
template <typename MulFn>
void apply_multiplier(Field& u, MulFn&& mul) {
    const Grid& g = u.grid;
    fft_forward(g, u.v);
    const int m = g.m;
    std::size_t idx = 0;
    if (g.dim == 1) {
        for (int i = 0; i < m; ++i) u.v[idx++] *= mul(g.k(i), 0.0, 0.0);
    } else if (g.dim == 2) {
        for (int i = 0; i < m; ++i) {
            const double ki = g.k(i);
            for (int j = 0; j < m; ++j) u.v[idx++] *= mul(ki, g.k(j), 0.0);
        }
    } else {
        for (int i = 0; i < m; ++i) {
            const double ki = g.k(i);
            for (int j = 0; j < m; ++j) {
                const double kj = g.k(j);
                for (int l = 0; l < m; ++l) u.v[idx++] *= mul(ki, kj, g.k(l));
            }
        }
    }
    fft_inverse(g, u.v);
}

}  // namespace

void fft_forward(const Grid& g, std::vector<cplx>& data) {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_for(g).fwd, p, p);
}

void fft_inverse(const Grid& g, std::vector<cplx>& data) {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_for(g).inv, p, p);
    const double scale = 1.0 / static_cast<double>(g.size());
    for (cplx& z : data) z *= scale;
}

Field laplacian(const Field& u) {
    Field out = u;
    apply_multiplier(out, [](double kx, double ky, double kz) { return -(kx * kx + ky * ky + kz * kz); });
    return out;
}

std::vector<Field> gradient(const Field& u) {
    const Grid& g = u.grid;
    std::vector<Field> out;
    out.reserve(g.dim);
    std::vector<cplx> hat = u.v;
    fft_forward(g, hat);
    for (int axis = 0; axis < g.dim; ++axis) {
        Field comp(g);
        const int m = g.m;
        std::size_t idx = 0;
        if (g.dim == 1) {
            for (int i = 0; i < m; ++i) comp.v[idx] = hat[idx] * cplx(0.0, g.k(i)), ++idx;
        } else if (g.dim == 2) {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    const double k = axis == 0 ? g.k(i) : g.k(j);
                    comp.v[idx] = hat[idx] * cplx(0.0, k);
                    ++idx;
                }
        } else {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    for (int l = 0; l < m; ++l) {
                        const double k = axis == 0 ? g.k(i) : (axis == 1 ? g.k(j) : g.k(l));
                        comp.v[idx] = hat[idx] * cplx(0.0, k);
                        ++idx;
                    }
        }
        fft_inverse(g, comp.v);
        out.push_back(std::move(comp));
    }
    return out;
}

Field fractional(const Field& u, double s) {
    Field out = u;
    const bool zero_mean = s < 0.0;
    fft_forward(out.grid, out.v);
    const Grid& g = out.grid;
    const int m = g.m;
    std::size_t idx = 0;
    auto mul = [&](double k2) -> double {
        if (k2 == 0.0) return zero_mean ? 0.0 : (s == 0.0 ? 1.0 : 0.0);
        return std::pow(k2, 0.5 * s);
    };
    if (g.dim == 1) {
        for (int i = 0; i < m; ++i) {
            const double k = g.k(i);
            out.v[idx++] *= mul(k * k);
        }
    } else if (g.dim == 2) {
        for (int i = 0; i < m; ++i) {
            const double ki2 = g.k(i) * g.k(i);
            for (int j = 0; j < m; ++j) out.v[idx++] *= mul(ki2 + g.k(j) * g.k(j));
        }
    } else {
        for (int i = 0; i < m; ++i) {
            const double ki2 = g.k(i) * g.k(i);
            for (int j = 0; j < m; ++j) {
                const double kj2 = g.k(j) * g.k(j);
                for (int l = 0; l < m; ++l) out.v[idx++] *= mul(ki2 + kj2 + g.k(l) * g.k(l));
            }
        }
    }
    fft_inverse(g, out.v);
    return out;
}

double wrap_delta(const Grid& g, int offset) {
    // delta_j = j dx for j < m/2, (j - m) dx for j >= m/2, i.e. the
    // representative of j dx in [-L, L).
    const int j = ((offset % g.m) + g.m) % g.m;
    return (j < g.m / 2 ? j : j - g.m) * g.dx();
}

Field convolve_diff(const std::vector<double>& kernel_diff, const Field& f) {
    const Grid& g = f.grid;
    if (kernel_diff.size() != g.size())
        throw GridMismatchError("convolve_diff: kernel length does not match the grid");
    Field kd(g);
    for (std::size_t i = 0; i < kd.size(); ++i) kd.v[i] = kernel_diff[i];
    fft_forward(g, kd.v);
    Field out = f;
    fft_forward(g, out.v);
    const double scale = g.cell();
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] *= scale * kd.v[i];
    fft_inverse(g, out.v);
    return out;
}

Field hartree(const Field& wker, const Field& rho) {
    check_same_grid(wker, rho, "hartree");
    const Grid& g = rho.grid;
    // Reorder the x-sampled kernel into difference order (cyclic shift by m/2
    // along every axis: x_{j + m/2 mod m} = wrap(j dx)).
    std::vector<double> kd(g.size());
    const int m = g.m, half = g.m / 2;
    if (g.dim == 1) {
        for (int i = 0; i < m; ++i) kd[i] = std::real(wker.v[(i + half) % m]);
    } else if (g.dim == 2) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                kd[static_cast<std::size_t>(i) * m + j] =
                    std::real(wker.v[static_cast<std::size_t>((i + half) % m) * m + (j + half) % m]);
    } else {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int l = 0; l < m; ++l)
                    kd[(static_cast<std::size_t>(i) * m + j) * m + l] = std::real(
                        wker.v[(static_cast<std::size_t>((i + half) % m) * m + (j + half) % m) * m +
                               (l + half) % m]);
    }
    return convolve_diff(kd, rho);
}

cplx integrate(const Field& f) {
    cplx s(0.0, 0.0);
    for (const cplx& z : f.v) s += z;
    return s * f.grid.cell();
}

double integrate_real(const std::vector<double>& f, const Grid& g) {
    double s = 0.0;
    for (double v : f) s += v;
    return s * g.cell();
}

double norm_l2_sq(const Field& u) {
    double s = 0.0;
    for (const cplx& z : u.v) s += std::norm(z);
    return s * u.grid.cell();
}

double norm_l2(const Field& u) { return std::sqrt(norm_l2_sq(u)); }

double boundary_mass_fraction(const Field& u) {
    const Grid& g = u.grid;
    double shell = 0.0, total = 0.0;
    for (std::size_t i = 0; i < u.v.size(); ++i) {
        const double w = std::norm(u.v[i]);
        total += w;
        const auto ix = unravel(g, i);
        for (int d = 0; d < g.dim; ++d)
            if (ix[d] == 0 || ix[d] == g.m - 1) {
                shell += w;
                break;
            }
    }
    return total > 0.0 ? shell / total : 0.0;
}

Moments moments(const Field& u, double tol) {
    Moments out;
    out.boundary_mass_fraction = boundary_mass_fraction(u);
    out.boundary_ok = out.boundary_mass_fraction <= tol;

    const Grid& g = u.grid;
    for (std::size_t i = 0; i < u.v.size(); ++i) out.variance += radius_sq(g, i) * std::norm(u.v[i]);
    out.variance *= g.cell();

    const auto grad = gradient(u);
    double dil = 0.0;
    for (std::size_t i = 0; i < u.v.size(); ++i) {
        const auto ix = unravel(g, i);
        cplx xg(0.0, 0.0);
        for (int d = 0; d < g.dim; ++d) xg += g.x(ix[d]) * grad[d].v[i];
        dil += std::imag(std::conj(u.v[i]) * xg);
    }
    out.dilation = dil * g.cell();
    return out;
}

std::vector<Field> x_weighted(const Field& u) {
    const Grid& g = u.grid;
    std::vector<Field> out(g.dim, Field(g));
    for (std::size_t i = 0; i < u.v.size(); ++i) {
        const auto ix = unravel(g, i);
        for (int d = 0; d < g.dim; ++d) out[d].v[i] = g.x(ix[d]) * u.v[i];
    }
    return out;
}

std::vector<double> sample_potential(const PotentialSpec& spec, const Grid& g) {
    std::vector<double> out(g.size(), 0.0);
    if (spec.zero()) return out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = eval_potential(spec, radius_sq(g, i));
    return out;
}

std::vector<double> sample_potential_xdot(const PotentialSpec& spec, const Grid& g) {
    std::vector<double> out(g.size(), 0.0);
    if (spec.zero()) return out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = eval_potential_xdot(spec, radius_sq(g, i));
    return out;
}

}  // namespace qsl
