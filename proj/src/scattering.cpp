#include "qsl/scattering.hpp"

#include <algorithm>
#include <cmath>

namespace qsl {

Field free_pullback(const Field& u, double t) {
    if (t == 0.0) return u;
    Field out = u;
    const Grid& g = u.grid;
    fft_forward(g, out.v);
    const int m = g.m;
    std::size_t idx = 0;
    auto mul = [&](double k2) { return std::polar(1.0, -t * k2); };
    if (g.dim == 1) {
        for (int i = 0; i < m; ++i) out.v[idx++] *= mul(g.k(i) * g.k(i));
    } else if (g.dim == 2) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) out.v[idx++] *= mul(g.k(i) * g.k(i) + g.k(j) * g.k(j));
    } else {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int l = 0; l < m; ++l)
                    out.v[idx++] *= mul(g.k(i) * g.k(i) + g.k(j) * g.k(j) + g.k(l) * g.k(l));
    }
    fft_inverse(g, out.v);
    return out;
}

std::vector<Field> h_operator(const Field& u, double t) {
    const Grid& g = u.grid;
    auto grad = gradient(u);
    std::vector<Field> out(g.dim, Field(g));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto ix = unravel(g, i);
        for (int d = 0; d < g.dim; ++d)
            out[d].v[i] = g.x(ix[d]) * u.v[i] - cplx(0.0, 2.0 * t) * grad[d].v[i];
    }
    return out;
}

namespace {

double l2_diff(const Field& a, const Field& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a.v[i] - b.v[i]);
    return std::sqrt(s * a.grid.cell());
}

double hdot1_diff(const Field& a, const Field& b) {
    Field d = a;
    for (std::size_t i = 0; i < d.size(); ++i) d.v[i] -= b.v[i];
    const auto grad = gradient(d);
    double s = 0.0;
    for (const Field& c : grad) s += norm_l2_sq(c);
    return std::sqrt(s);
}

double xweighted_diff(const Field& a, const Field& b) {
    const Grid& g = a.grid;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += radius_sq(g, i) * std::norm(a.v[i] - b.v[i]);
    return std::sqrt(s * g.cell());
}

}  // namespace

PullbackSeries cauchy_gaps(const Trajectory& traj) {
    if (traj.checkpoints.empty()) throw DomainError("cauchy_gaps: no checkpoints stored");
    PullbackSeries out;
    for (const auto& [t, u] : traj.checkpoints) {
        out.times.push_back(t);
        out.v.push_back(free_pullback(u, t));
    }
    const std::size_t n = out.v.size();
    out.gap_l2.assign(n, std::vector<double>(n, 0.0));
    out.gap_sigma.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double l2 = l2_diff(out.v[i], out.v[j]);
            const double sg = l2 + hdot1_diff(out.v[i], out.v[j]) + xweighted_diff(out.v[i], out.v[j]);
            out.gap_l2[i][j] = out.gap_l2[j][i] = l2;
            out.gap_sigma[i][j] = out.gap_sigma[j][i] = sg;
        }
    out.u_plus = out.v.back();
    out.last_gap_l2 = n >= 2 ? out.gap_l2[n - 2][n - 1] : 0.0;
    return out;
}

MbBoundSeries mb_bound_check(const Trajectory& traj, double l) {
    MbBoundSeries out;
    std::vector<double> vals;
    for (const auto& r : traj.records) {
        out.t.push_back(r.t);
        out.hu_sq.push_back(r.hu_sq);
        const double ratio = r.t > 1.0 && l > 0.0 ? r.hu_sq / std::pow(r.t, l) : r.hu_sq;
        out.hu_sq_over_tl.push_back(ratio);
        out.sup_hu_sq = std::max(out.sup_hu_sq, r.hu_sq);
        out.sup_ratio = std::max(out.sup_ratio, ratio);
        vals.push_back(r.hu_sq);
    }
    if (vals.size() >= 3) {
        std::vector<double> sorted = vals;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted[sorted.size() / 2];
        out.bounded_trend = vals.back() <= 2.0 * std::max(median, 1e-300);
    }
    return out;
}

}  // namespace qsl
