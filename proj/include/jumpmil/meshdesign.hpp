#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "errors.hpp"
#include "mesh.hpp"
#include "model.hpp"
#include "path.hpp"
#include "quad.hpp"
#include "rng.hpp"
#include "scheme.hpp"
#include "util.hpp"

namespace jumpmil {

inline std::vector<double> uniform_grid(double T, std::size_t points) {
    if (points < 2) throw std::invalid_argument("uniform_grid: need >= 2 points");
    if (!(T > 0.0)) throw std::invalid_argument("uniform_grid: T must be > 0");
    std::vector<double> t(points);
    for (std::size_t j = 0; j < points; ++j)
        t[j] = static_cast<double>(j) * T / static_cast<double>(points - 1);
    t.front() = 0.0;
    t.back() = T;
    return t;
}

// Probability density psi on [0, T] that generates quantile meshes. Two
// representations share one interface:
//   - table mode: piecewise-linear psi on a uniform grid, cumulative
//     integrated exactly (piecewise quadratic);
//   - analytic mode: a callable psi, cumulative precomputed per cell with
//     composite Simpson (the cell error is far below the 1e-12 quantile
//     tolerance), partial cells integrated the same way.
// psi must be nonnegative, positive at interior grid points (zeros at the
// two endpoints are tolerated: quantiles stay unique), with positive mass.
class Density {
  public:
    static Density from_table(double T, std::vector<double> values) {
        Density d;
        d.init_grid(T, values.size());
        d.psi_ = std::move(values);
        d.validate_values();
        d.cum_.resize(d.psi_.size());
        d.cum_[0] = 0.0;
        for (std::size_t j = 0; j + 1 < d.psi_.size(); ++j)
            d.cum_[j + 1] = d.cum_[j] + 0.5 * (d.psi_[j] + d.psi_[j + 1]) * (d.t_[j + 1] - d.t_[j]);
        d.normalize();
        return d;
    }

    static Density from_function(std::function<double(double)> f, double T,
                                 std::size_t grid_points = 1025) {
        Density d;
        d.init_grid(T, grid_points);
        d.psi_.resize(grid_points);
        for (std::size_t j = 0; j < grid_points; ++j) d.psi_[j] = f(d.t_[j]);
        d.validate_values();
        d.analytic_ = std::move(f);
        d.cum_.resize(grid_points);
        d.cum_[0] = 0.0;
        for (std::size_t j = 0; j + 1 < grid_points; ++j)
            d.cum_[j + 1] = d.cum_[j] + simpson_cell(d.analytic_, d.t_[j], d.t_[j + 1]);
        d.normalize();
        return d;
    }

    double T() const { return t_.back(); }
    const std::vector<double>& grid() const { return t_; }
    const std::vector<double>& values() const { return psi_; }

    double psi(double s) const {
        const std::size_t j = cell_of(s);
        if (analytic_) return scale_ * analytic_(s);
        const double u = (s - t_[j]) / (t_[j + 1] - t_[j]);
        return psi_[j] + (psi_[j + 1] - psi_[j]) * u;
    }

    double cumulative(double s) const {
        const std::size_t j = cell_of(s);
        if (analytic_) return cum_[j] + scale_ * simpson_cell(analytic_, t_[j], s);
        // exact integral of the linear interpolant over [t_j, s]
        return cum_[j] + 0.5 * (psi_[j] + psi(s)) * (s - t_[j]);
    }

    // Largest cell index j with t_[j] <= s (clamped), for bracketing.
    std::size_t cell_of(double s) const {
        if (!(s >= 0.0 && s <= t_.back()))
            throw std::domain_error("Density: argument outside [0, T]");
        auto it = std::upper_bound(t_.begin(), t_.end(), s);
        std::size_t j = static_cast<std::size_t>(it - t_.begin());
        j = j == 0 ? 0 : j - 1;
        return std::min(j, t_.size() - 2);
    }

    double cum_at_cell(std::size_t j) const { return cum_[j]; }

  private:
    void init_grid(double T, std::size_t points) {
        if (points < 2) throw std::invalid_argument("Density: need >= 2 grid points");
        if (!(T > 0.0)) throw std::invalid_argument("Density: T must be > 0");
        t_ = uniform_grid(T, points);
    }

    void validate_values() const {
        for (std::size_t j = 0; j < psi_.size(); ++j) {
            if (!(psi_[j] >= 0.0)) throw contract_error("Density: psi must be nonnegative");
            if (j > 0 && j + 1 < psi_.size() && psi_[j] == 0.0)
                throw contract_error("Density: psi vanishes at an interior point");
        }
    }

    void normalize() {
        const double mass = cum_.back();
        if (!(mass > 0.0)) throw contract_error("Density: zero total mass");
        for (auto& v : psi_) v /= mass;
        for (auto& v : cum_) v /= mass;
        cum_.back() = 1.0;
        scale_ = 1.0 / mass;
    }

    static double simpson_cell(const std::function<double(double)>& f, double a, double b) {
        // composite Simpson with 8 subintervals; cells are ~T/1024 wide so
        // the error is O(h^5/8^4), negligibly below the quantile tolerance
        if (b <= a) return 0.0;
        const double h = (b - a) / 8.0;
        double s = f(a) + f(b);
        for (int k = 1; k < 8; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(k));
        return s * h / 3.0;
    }

    std::vector<double> t_, psi_, cum_;
    std::function<double(double)> analytic_;
    double scale_ = 1.0;
};

// Quantile mesh: cumulative(knots[i]) = i/n, solved per knot by bracketed
// Newton (bisection fallback) to absolute residual <= 1e-12.
inline Mesh mesh_from_density(const Density& density, std::size_t n) {
    if (n == 0) throw std::invalid_argument("mesh_from_density: n must be >= 1");
    Mesh mesh;
    mesh.knots.resize(n + 1);
    mesh.knots[0] = 0.0;
    mesh.knots[n] = density.T();
    const auto& grid = density.grid();
    for (std::size_t i = 1; i < n; ++i) {
        const double q = static_cast<double>(i) / static_cast<double>(n);
        // bracket by the tabulated cumulative, then refine
        std::size_t lo_cell = 0, hi_cell = grid.size() - 1;
        while (hi_cell - lo_cell > 1) {
            const std::size_t mid = (lo_cell + hi_cell) / 2;
            if (density.cum_at_cell(mid) <= q)
                lo_cell = mid;
            else
                hi_cell = mid;
        }
        double lo = grid[lo_cell], hi = grid[hi_cell];
        double x = 0.5 * (lo + hi);
        double g = density.cumulative(x) - q;
        for (int iter = 0; iter < 200 && std::fabs(g) > 5e-13; ++iter) {
            if (g < 0.0)
                lo = x;
            else
                hi = x;
            const double p = density.psi(x);
            double next = p > 0.0 ? x - g / p : 0.5 * (lo + hi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            x = next;
            g = density.cumulative(x) - q;
        }
        if (std::fabs(g) > 1e-12)
            throw numerical_error("mesh_from_density: quantile solve did not converge");
        mesh.knots[i] = x;
    }
    validate_mesh(mesh);
    return mesh;
}

// Pilot Monte-Carlo estimate of E Y(t) on a uniform grid.
struct PilotEstimate {
    std::vector<double> grid;
    std::vector<double> ey_hat;
    std::vector<double> std_error;
    std::size_t M_pilot = 0;
};

// Runs M_pilot Milstein paths on an equidistant pilot mesh and averages the
// local roughness Y = |b|^2 + lambda |c|^2 at every knot. Replications use
// streams (master_seed, stream_base + m); accumulation is in replication
// order, so the result is bit-identical for every thread count.
inline PilotEstimate pilot_expected_y(const SdeModel& model, const IntensityModel& intensity,
                                      std::size_t pilot_grid_size, std::size_t M_pilot,
                                      std::uint64_t master_seed,
                                      std::uint64_t stream_base = (1ULL << 62),
                                      unsigned threads = 1) {
    if (pilot_grid_size < 2)
        throw std::invalid_argument("pilot_expected_y: pilot_grid_size must be >= 2");
    if (M_pilot < 100) throw std::invalid_argument("pilot_expected_y: M_pilot must be >= 100");
    model.validate();
    const auto comm = check_commutativity(model, 1e-8);
    if (!comm.pass)
        throw contract_error("pilot_expected_y: jump commutativity violated");

    const Mesh mesh = equidistant_mesh(model.T, pilot_grid_size);
    const std::size_t K = mesh.knots.size();

    std::vector<std::vector<double>> rows(M_pilot);
    parallel_for(M_pilot, threads, [&](std::size_t m) {
        RngStream rng(master_seed, stream_base + m);
        const GridPath path = simulate_grid_path(mesh.knots, intensity, rng);
        const auto x = run_milstein(model, mesh, path);
        auto& row = rows[m];
        row.resize(K);
        for (std::size_t j = 0; j < K; ++j)
            row[j] = local_y(model, intensity, mesh.knots[j], x[j]);
    });

    PilotEstimate out;
    out.grid = mesh.knots;
    out.ey_hat.assign(K, 0.0);
    out.std_error.assign(K, 0.0);
    out.M_pilot = M_pilot;
    std::vector<double> sum(K, 0.0), sumsq(K, 0.0);
    for (std::size_t m = 0; m < M_pilot; ++m)
        for (std::size_t j = 0; j < K; ++j) {
            sum[j] += rows[m][j];
            sumsq[j] += rows[m][j] * rows[m][j];
        }
    const double Md = static_cast<double>(M_pilot);
    for (std::size_t j = 0; j < K; ++j) {
        out.ey_hat[j] = sum[j] / Md;
        const double var = std::max(0.0, (sumsq[j] - sum[j] * sum[j] / Md) / (Md - 1.0));
        out.std_error[j] = std::sqrt(var / Md);
    }
    return out;
}

// psi_0 proportional to sqrt(E Y(t)), tabulated from a pilot. floor_eps
// regularizes regions where the pilot estimate collapses to ~0.
inline Density optimal_density(const PilotEstimate& pilot, double floor_eps = 1e-6) {
    if (!(floor_eps >= 0.0)) throw std::invalid_argument("optimal_density: floor_eps < 0");
    if (pilot.grid.size() < 2 || pilot.grid.size() != pilot.ey_hat.size())
        throw std::invalid_argument("optimal_density: malformed pilot estimate");
    double max_ey = 0.0;
    for (double v : pilot.ey_hat) max_ey = std::max(max_ey, v);
    if (!(max_ey > 0.0))
        throw contract_error("optimal_density: E Y vanishes identically (P2 violated)");
    std::vector<double> vals(pilot.ey_hat.size());
    for (std::size_t j = 0; j < vals.size(); ++j)
        vals[j] = std::sqrt(std::max(pilot.ey_hat[j], floor_eps * max_ey));
    return Density::from_table(pilot.grid.back(), std::move(vals));
}

// Analytic variant: psi_0 from a closed-form E Y, kept as a callable so
// quantile meshes reach full root-finder accuracy.
inline Density optimal_density(std::function<double(double)> ey, double T,
                               std::size_t grid_points = 1025) {
    return Density::from_function(
        [ey = std::move(ey)](double t) { return std::sqrt(std::max(0.0, ey(t))); }, T,
        grid_points);
}

// E Y(t) = (sigma^2 + lam) x0^2 e^{2 gamma t} for the Merton model.
inline double merton_expected_y(const MertonParams& p, double t) {
    if (!(t >= 0.0 && t <= p.T)) throw std::domain_error("merton_expected_y: t outside [0, T]");
    return (p.sigma * p.sigma + p.lam) * p.x0 * p.x0 * std::exp(2.0 * p.gamma() * t);
}

// Closed-form optimal knots t_i = ln(1 + (i/n)(e^{gamma T} - 1)) / gamma;
// the gamma -> 0 limit is the equidistant mesh, switched at |gamma| T <= 1e-8
// where the closed form loses all significant digits.
inline Mesh merton_optimal_mesh(const MertonParams& p, std::size_t n) {
    if (n == 0) throw std::invalid_argument("merton_optimal_mesh: n must be >= 1");
    p.validate();
    const double g = p.gamma();
    if (std::fabs(g) * p.T <= 1e-8) return equidistant_mesh(p.T, n);
    Mesh mesh;
    mesh.knots.resize(n + 1);
    const double em = std::expm1(g * p.T);
    for (std::size_t i = 1; i < n; ++i) {
        const double q = static_cast<double>(i) / static_cast<double>(n);
        mesh.knots[i] = std::log1p(q * em) / g;
    }
    mesh.knots[0] = 0.0;
    mesh.knots[n] = p.T;
    validate_mesh(mesh);
    return mesh;
}

} // namespace jumpmil
