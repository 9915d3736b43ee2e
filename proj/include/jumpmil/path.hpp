#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace jumpmil {

// Strictly increasing jump instants in (0, T].
using JumpTimes = std::vector<double>;

// Driving noise sampled on one grid. n[i] counts jumps with tau <= grid[i]
// (a jump landing exactly on a grid point belongs to N(t), not N(t-)).
// jumps may be empty when only knot counts are known; the schemes use only
// (grid, w, n), which is exactly the standard-information restriction.
struct GridPath {
    std::vector<double> grid;    // sorted, grid.front() == 0
    std::vector<double> w;       // W at grid, w[0] == 0
    std::vector<std::int64_t> n; // N at grid, n[0] == 0
    JumpTimes jumps;
};

// Thinning: candidates from a homogeneous process at rate lambda_max, kept
// with probability lambda(t)/lambda_max. Exact for any bounded intensity.
inline JumpTimes poisson_jump_times(const IntensityModel& intensity, double T,
                                    RngStream& rng) {
    intensity.validate();
    if (!(T > 0.0)) throw std::invalid_argument("poisson_jump_times: T must be > 0");
    JumpTimes times;
    double t = 0.0;
    for (;;) {
        t += rng.exponential(intensity.lambda_max);
        if (t > T) break;
        const double lam_t = intensity.lambda(t);
        if (lam_t > intensity.lambda_max)
            throw contract_error("poisson_jump_times: lambda(t) exceeds lambda_max");
        if (!(lam_t >= 0.0))
            throw contract_error("poisson_jump_times: lambda(t) negative");
        if (rng.uniform01() * intensity.lambda_max < lam_t) times.push_back(t);
    }
    return times;
}

inline void require_grid(const std::vector<double>& grid) {
    if (grid.empty() || grid.front() != 0.0)
        throw std::invalid_argument("grid must start at 0");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] <= grid[i + 1]))
            throw std::invalid_argument("grid must be sorted");
}

// W sampled at the grid points: independent Gaussian increments with
// variance equal to the interval length.
inline std::vector<double> wiener_on_grid(const std::vector<double>& grid, RngStream& rng) {
    require_grid(grid);
    std::vector<double> w(grid.size());
    w[0] = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double dt = grid[i + 1] - grid[i];
        w[i + 1] = dt > 0.0 ? w[i] + std::sqrt(dt) * rng.normal() : w[i];
    }
    return w;
}

// N at grid points as a deterministic function of the jump times (tau <= t).
inline std::vector<std::int64_t> counts_on_grid(const JumpTimes& jumps,
                                                const std::vector<double>& grid) {
    std::vector<std::int64_t> n(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        n[i] = std::upper_bound(jumps.begin(), jumps.end(), grid[i]) - jumps.begin();
    return n;
}

// Counts of jumps strictly before each grid point, i.e. N(t-).
inline std::vector<std::int64_t> counts_on_grid_left(const JumpTimes& jumps,
                                                     const std::vector<double>& grid) {
    std::vector<std::int64_t> n(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        n[i] = std::lower_bound(jumps.begin(), jumps.end(), grid[i]) - jumps.begin();
    return n;
}

// Sorted union with exact-duplicate removal.
inline std::vector<double> merge_grids(const std::vector<double>& a,
                                       const std::vector<double>& b) {
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// One replication of the driving noise: jump times first, then W on the
// union of base_grid and the jump times. The fixed draw order is part of the
// reproducibility contract.
inline GridPath simulate_grid_path(const std::vector<double>& base_grid,
                                   const IntensityModel& intensity, RngStream& rng) {
    require_grid(base_grid);
    GridPath p;
    p.jumps = poisson_jump_times(intensity, base_grid.back(), rng);
    p.grid = merge_grids(base_grid, p.jumps);
    p.w = wiener_on_grid(p.grid, rng);
    p.n = counts_on_grid(p.jumps, p.grid);
    return p;
}

// I(W,W) over one interval: (dW^2 - dt) / 2.
inline double i_ww(double delta_w, double delta_t) {
    if (!(delta_t > 0.0)) throw std::invalid_argument("i_ww: delta_t must be > 0");
    return 0.5 * (delta_w * delta_w - delta_t);
}

// I(N,N) over one interval: (dN^2 - dN) / 2 = number of ordered jump pairs.
inline double i_nn(std::int64_t delta_n) {
    if (delta_n < 0) throw std::invalid_argument("i_nn: delta_n must be >= 0");
    const double dn = static_cast<double>(delta_n);
    return 0.5 * (dn * dn - dn);
}

// I(N,W) + I(W,N) over one interval collapses to dN * dW; this sum is the
// only cross information the commutative scheme needs.
inline double cross_sum(std::int64_t delta_n, double delta_w) {
    if (delta_n < 0) throw std::invalid_argument("cross_sum: delta_n must be >= 0");
    return static_cast<double>(delta_n) * delta_w;
}

// Conditional mean of W(t) given the interval endpoints (Brownian bridge).
inline double brownian_bridge_mean(double w_i, double w_ip1, double t_i, double t_ip1,
                                   double t) {
    if (!(t_ip1 > t_i)) throw std::invalid_argument("brownian_bridge_mean: t_ip1 <= t_i");
    if (!(t >= t_i && t <= t_ip1))
        throw std::invalid_argument("brownian_bridge_mean: t outside interval");
    return w_i + (w_ip1 - w_i) * (t - t_i) / (t_ip1 - t_i);
}

namespace detail {

inline void require_bridge_args(std::int64_t n_i, std::int64_t n_ip1, double t_i,
                                double t_ip1, double t) {
    if (!(t_ip1 > t_i)) throw std::invalid_argument("poisson bridge: t_ip1 <= t_i");
    if (!(t >= t_i && t <= t_ip1))
        throw std::invalid_argument("poisson bridge: t outside interval");
    if (n_ip1 < n_i) throw std::invalid_argument("poisson bridge: n_ip1 < n_i");
}

inline double bridge_lambda_total(const IntensityModel& intensity, double t_i, double t_ip1) {
    const double L = intensity.increment(t_i, t_ip1);
    if (!(L > 0.0)) throw contract_error("poisson bridge: Lambda(t_ip1, t_i) <= 0");
    return L;
}

} // namespace detail

// E( N(t) | N(t_i), N(t_ip1) ) = [n_ip1 L(t,t_i) + n_i L(t_ip1,t)] / L(t_ip1,t_i).
inline double poisson_bridge_mean(std::int64_t n_i, std::int64_t n_ip1,
                                  const IntensityModel& intensity, double t_i, double t_ip1,
                                  double t) {
    detail::require_bridge_args(n_i, n_ip1, t_i, t_ip1, t);
    const double L = detail::bridge_lambda_total(intensity, t_i, t_ip1);
    const double Lt = intensity.increment(t_i, t);
    const double Lr = intensity.increment(t, t_ip1);
    return (static_cast<double>(n_ip1) * Lt + static_cast<double>(n_i) * Lr) / L;
}

// Conditional variance of N(t) given the endpoints:
// dN * L(t_ip1,t) L(t,t_i) / L(t_ip1,t_i)^2 (binomial bridge).
inline double poisson_bridge_var(std::int64_t n_i, std::int64_t n_ip1,
                                 const IntensityModel& intensity, double t_i, double t_ip1,
                                 double t) {
    detail::require_bridge_args(n_i, n_ip1, t_i, t_ip1, t);
    const double L = detail::bridge_lambda_total(intensity, t_i, t_ip1);
    const double Lt = intensity.increment(t_i, t);
    const double Lr = intensity.increment(t, t_ip1);
    return static_cast<double>(n_ip1 - n_i) * Lr * Lt / (L * L);
}

// Marginal mean-square deviation E |N(t) - E(N(t)|endpoints)|^2, which does
// not depend on the endpoint counts: L(t_ip1,t) L(t,t_i) / L(t_ip1,t_i).
inline double poisson_bridge_var_marginal(const IntensityModel& intensity, double t_i,
                                          double t_ip1, double t) {
    detail::require_bridge_args(0, 0, t_i, t_ip1, t);
    const double L = detail::bridge_lambda_total(intensity, t_i, t_ip1);
    const double Lt = intensity.increment(t_i, t);
    const double Lr = intensity.increment(t, t_ip1);
    return Lr * Lt / L;
}

// Samples N(t) given the endpoints: n_i + Binomial(dN, L(t,t_i)/L(t_ip1,t_i)).
inline std::int64_t poisson_bridge_sample(std::int64_t n_i, std::int64_t n_ip1,
                                          const IntensityModel& intensity, double t_i,
                                          double t_ip1, double t, RngStream& rng) {
    detail::require_bridge_args(n_i, n_ip1, t_i, t_ip1, t);
    const double L = detail::bridge_lambda_total(intensity, t_i, t_ip1);
    const double p = std::min(1.0, std::max(0.0, intensity.increment(t_i, t) / L));
    return n_i + rng.binomial(n_ip1 - n_i, p);
}

} // namespace jumpmil
