#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "mesh.hpp"
#include "model.hpp"
#include "path.hpp"

namespace jumpmil {

// One Milstein step under jump commutativity, coefficients frozen at
// (t_i, x_i). With partial increments (t < t_ip1) this is the continuous
// Milstein evaluation, which the fine reference uses between its knots:
//   x + a dt + b dW + c dN + L1b I_WW + L-1c I_NN + L1c dN dW.
inline double milstein_step(const SdeModel& model, double t_i, double t_ip1, double x_i,
                            double dw, std::int64_t dn, double iww, double inn) {
    if (!(t_ip1 > t_i)) throw std::invalid_argument("milstein_step: t_ip1 <= t_i");
    const double dt = t_ip1 - t_i;
    const double a = model.a(t_i, x_i);
    const double b = model.b(t_i, x_i);
    const double c = model.c(t_i, x_i);
    const double l1b = b * model.db_dy(t_i, x_i);
    const double l1c = b * model.dc_dy(t_i, x_i);
    const double lm1c = model.c(t_i, x_i + c) - c;
    const double dnf = static_cast<double>(dn);
    return x_i + a * dt + b * dw + c * dnf + l1b * iww + lm1c * inn + l1c * dnf * dw;
}

namespace detail {

// Indices of the mesh knots inside path.grid; every knot must be present.
inline std::vector<std::size_t> knot_indices(const Mesh& mesh, const GridPath& path) {
    std::vector<std::size_t> idx(mesh.knots.size());
    std::size_t j = 0;
    for (std::size_t i = 0; i < mesh.knots.size(); ++i) {
        while (j < path.grid.size() && path.grid[j] < mesh.knots[i]) ++j;
        if (j >= path.grid.size() || path.grid[j] != mesh.knots[i])
            throw std::invalid_argument("mesh knot not contained in path grid");
        idx[i] = j;
    }
    return idx;
}

} // namespace detail

// Iterates milstein_step over the mesh. Uses only W and N at the knots, so
// the result is measurable with respect to standard information.
inline std::vector<double> run_milstein(const SdeModel& model, const Mesh& mesh,
                                        const GridPath& path) {
    validate_mesh(mesh);
    const auto idx = detail::knot_indices(mesh, path);
    std::vector<double> x(mesh.knots.size());
    x[0] = model.x0;
    for (std::size_t i = 0; i + 1 < mesh.knots.size(); ++i) {
        const double t_i = mesh.knots[i];
        const double t_ip1 = mesh.knots[i + 1];
        const double dw = path.w[idx[i + 1]] - path.w[idx[i]];
        const std::int64_t dn = path.n[idx[i + 1]] - path.n[idx[i]];
        x[i + 1] = milstein_step(model, t_i, t_ip1, x[i], dw, dn, i_ww(dw, t_ip1 - t_i),
                                 i_nn(dn));
    }
    return x;
}

enum class MethodKind { conditional, linear };

// Global approximation on [0, T]: Milstein values at the knots plus a
// continuous interpolation. The linear kind is the chord between knot
// values; the conditional kind is the conditional expectation of the
// continuous Milstein process given the knot samples, with time weight
// theta_w = (t - t_i)/dt and compensator weight theta_n = L(t,t_i)/L(t_ip1,t_i).
struct ApproxTrajectory {
    struct Interval {
        double a, b, c, l1b, l1c, lm1c; // coefficients at (t_i, x_i)
        double dw, dn, iww, inn;        // full-interval noise functionals
        double lam_full;                // L(t_ip1, t_i), conditional kind
    };

    Mesh mesh;
    MethodKind kind = MethodKind::linear;
    std::vector<double> knot_values;
    std::vector<Interval> iv;
    IntensityModel intensity; // retained for the conditional Lambda weights
};

struct BuildOptions {
    bool check_commutativity = true;
    double commutativity_tol = 1e-8;
};

inline ApproxTrajectory build_trajectory(MethodKind kind, const SdeModel& model,
                                         const IntensityModel& intensity, const Mesh& mesh,
                                         const GridPath& path, const BuildOptions& opt = {}) {
    validate_mesh(mesh);
    model.validate();
    if (opt.check_commutativity) {
        const auto rep = check_commutativity(model, opt.commutativity_tol);
        if (!rep.pass)
            throw contract_error("build_trajectory: jump commutativity violated (max " +
                                 std::to_string(rep.max_violation) + ")");
    }
    const auto idx = detail::knot_indices(mesh, path);

    ApproxTrajectory traj;
    traj.mesh = mesh;
    traj.kind = kind;
    traj.intensity = intensity;
    const std::size_t n = mesh.knots.size() - 1;
    traj.knot_values.resize(n + 1);
    traj.iv.resize(n);
    traj.knot_values[0] = model.x0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t_i = mesh.knots[i];
        const double t_ip1 = mesh.knots[i + 1];
        const double dt = t_ip1 - t_i;
        const double x_i = traj.knot_values[i];
        auto& seg = traj.iv[i];
        seg.a = model.a(t_i, x_i);
        seg.b = model.b(t_i, x_i);
        seg.c = model.c(t_i, x_i);
        seg.l1b = seg.b * model.db_dy(t_i, x_i);
        seg.l1c = seg.b * model.dc_dy(t_i, x_i);
        seg.lm1c = model.c(t_i, x_i + seg.c) - seg.c;
        seg.dw = path.w[idx[i + 1]] - path.w[idx[i]];
        const std::int64_t dn = path.n[idx[i + 1]] - path.n[idx[i]];
        seg.dn = static_cast<double>(dn);
        seg.iww = i_ww(seg.dw, dt);
        seg.inn = i_nn(dn);
        seg.lam_full = kind == MethodKind::conditional ? intensity.increment(t_i, t_ip1) : dt;
        if (kind == MethodKind::conditional && !(seg.lam_full > 0.0))
            throw contract_error("build_trajectory: Lambda(t_ip1, t_i) <= 0");
        traj.knot_values[i + 1] = x_i + seg.a * dt + seg.b * seg.dw + seg.c * seg.dn +
                                  seg.l1b * seg.iww + seg.lm1c * seg.inn +
                                  seg.l1c * seg.dn * seg.dw;
    }
    return traj;
}

namespace detail {

// Value inside interval i at time t; knots are short-circuited by eval so
// both kinds reproduce knot_values bitwise there.
inline double eval_in_interval(const ApproxTrajectory& traj, std::size_t i, double t) {
    const double t_i = traj.mesh.knots[i];
    const double t_ip1 = traj.mesh.knots[i + 1];
    const auto& seg = traj.iv[i];
    const double x_i = traj.knot_values[i];
    if (traj.kind == MethodKind::linear) {
        const double theta = (t - t_i) / (t_ip1 - t_i);
        return x_i + (traj.knot_values[i + 1] - x_i) * theta;
    }
    const double theta_w = (t - t_i) / (t_ip1 - t_i);
    const double theta_n = traj.intensity.increment(t_i, t) / seg.lam_full;
    return x_i + seg.a * (t - t_i) + seg.b * seg.dw * theta_w + seg.c * seg.dn * theta_n +
           seg.l1b * seg.iww * (theta_w * theta_w) +
           seg.l1c * seg.dn * seg.dw * (theta_n * theta_w) +
           seg.lm1c * seg.inn * (theta_n * theta_n);
}

} // namespace detail

// O(log n) evaluation at arbitrary t in [0, T].
inline double eval(const ApproxTrajectory& traj, double t) {
    const auto& knots = traj.mesh.knots;
    if (!(t >= knots.front() && t <= knots.back()))
        throw std::domain_error("eval: t outside [0, T]");
    auto it = std::upper_bound(knots.begin(), knots.end(), t);
    std::size_t i = static_cast<std::size_t>(it - knots.begin());
    i = i == 0 ? 0 : i - 1;
    if (i + 1 >= knots.size()) i = knots.size() - 2;
    if (t == knots[i]) return traj.knot_values[i];
    if (t == knots[i + 1]) return traj.knot_values[i + 1];
    return detail::eval_in_interval(traj, i, t);
}

// Sequential evaluator for sorted query points; amortizes the interval
// search to O(1) per point, the hot path of the error lab.
class TrajectoryCursor {
  public:
    explicit TrajectoryCursor(const ApproxTrajectory& traj) : traj_(&traj) {}

    double operator()(double t) {
        const auto& knots = traj_->mesh.knots;
        if (!(t >= knots.front() && t <= knots.back()))
            throw std::domain_error("eval: t outside [0, T]");
        while (i_ + 2 < knots.size() && knots[i_ + 1] <= t) ++i_;
        if (t == knots[i_]) return traj_->knot_values[i_];
        if (t == knots[i_ + 1]) return traj_->knot_values[i_ + 1];
        return detail::eval_in_interval(*traj_, i_, t);
    }

  private:
    const ApproxTrajectory* traj_;
    std::size_t i_ = 0;
};

} // namespace jumpmil
