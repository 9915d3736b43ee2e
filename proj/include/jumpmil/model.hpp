#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "quad.hpp"

namespace jumpmil {

using Coef = std::function<double(double, double)>; // (t, y) -> value

// Parameters of the linear jump-diffusion benchmark
//   dX = r X dt + sigma X dW + X dN,  X(0) = x0,
// whose solution doubles at every jump. gamma = r + sigma^2/2 + 3 lam/2
// controls the growth of E(Y(t)); it is derived, never stored.
struct MertonParams {
    double r = 0.0;
    double sigma = 1.0;
    double lam = 1.0;
    double x0 = 1.0;
    double T = 1.0;

    double gamma() const { return r + 0.5 * sigma * sigma + 1.5 * lam; }

    void validate() const {
        if (!(sigma > 0.0)) throw std::invalid_argument("MertonParams: sigma must be > 0");
        if (!(lam > 0.0)) throw std::invalid_argument("MertonParams: lam must be > 0");
        if (!(x0 > 0.0)) throw std::invalid_argument("MertonParams: x0 must be > 0");
        if (!(T > 0.0)) throw std::invalid_argument("MertonParams: T must be > 0");
    }
};

// One-dimensional jump-diffusion problem
//   dX = a dt + b dW + c dN on [0, T], X(0) = x0.
// db_dy/dc_dy are supplied explicitly (no autodiff); check_derivatives
// guards against mismatches. b_is_zero / c_is_zero are declared by the
// constructor of each built-in model (not inferred) and drive the cost
// model. When a closed-form solution in terms of (t, W(t), N(t)) exists it
// is attached as `exact` and can serve as the error-lab reference.
struct SdeModel {
    Coef a, b, c;
    Coef db_dy, dc_dy;
    double x0 = 1.0;
    double T = 1.0;
    bool b_is_zero = false;
    bool c_is_zero = false;
    std::string name = "custom";
    std::function<double(double, double, std::int64_t)> exact; // (t, w_t, n_t)
    std::optional<MertonParams> merton;

    void validate() const {
        if (!(T > 0.0)) throw std::invalid_argument("SdeModel: T must be > 0");
        if (!a || !b || !c || !db_dy || !dc_dy)
            throw std::invalid_argument("SdeModel: all coefficient functions must be set");
    }
};

// Time-varying jump intensity lambda(t) > 0 with compensator
// m(t) = integral of lambda over [0, t]. In quadrature mode the compensator
// increment is integrated adaptively (tolerance quad_tol), always over the
// requested subinterval to avoid cancellation of two long integrals.
enum class MMode { analytic, quadrature };

struct IntensityModel {
    std::function<double(double)> lambda;
    std::function<double(double)> m_analytic; // used when m_mode == analytic
    double lambda_max = 0.0;
    MMode m_mode = MMode::analytic;
    double quad_tol = 1e-10;

    double m(double t) const {
        if (m_mode == MMode::analytic) return m_analytic(t);
        return integrate_adaptive(lambda, 0.0, t, quad_tol);
    }

    // Lambda(t, s) = m(t) - m(s) for s <= t.
    double increment(double s, double t) const {
        if (m_mode == MMode::analytic) return m_analytic(t) - m_analytic(s);
        return integrate_adaptive(lambda, s, t, quad_tol);
    }

    void validate() const {
        if (!lambda) throw std::invalid_argument("IntensityModel: lambda must be set");
        if (m_mode == MMode::analytic && !m_analytic)
            throw std::invalid_argument("IntensityModel: analytic mode needs m_analytic");
        if (!(lambda_max > 0.0))
            throw contract_error("IntensityModel: lambda_max must be positive");
    }
};

inline void require_time(const SdeModel& model, double t) {
    if (!(t >= 0.0 && t <= model.T))
        throw std::domain_error("time outside [0, T]");
}

enum class CoefSel { b, c };

// L1 f (t, y) = b(t, y) * df/dy (t, y) for f in {b, c}.
inline double l1_apply(const SdeModel& model, CoefSel which, double t, double y) {
    require_time(model, t);
    const double bv = model.b(t, y);
    return which == CoefSel::b ? bv * model.db_dy(t, y) : bv * model.dc_dy(t, y);
}

// L-1 f (t, y) = f(t, y + c(t, y)) - f(t, y) for f in {b, c}.
inline double lm1_apply(const SdeModel& model, CoefSel which, double t, double y) {
    require_time(model, t);
    const double cv = model.c(t, y);
    const Coef& f = (which == CoefSel::b) ? model.b : model.c;
    return f(t, y + cv) - f(t, y);
}

struct CommutativityReport {
    double max_violation = 0.0;
    bool pass = false;
};

// Default sample grid: 21 equidistant times in [0, T] x 41 states in [-5, 5].
inline std::vector<std::pair<double, double>> default_check_grid(const SdeModel& model) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(21 * 41);
    for (int i = 0; i <= 20; ++i) {
        const double t = model.T * static_cast<double>(i) / 20.0;
        for (int j = 0; j <= 40; ++j) {
            const double y = -5.0 + 10.0 * static_cast<double>(j) / 40.0;
            pts.emplace_back(t, y);
        }
    }
    return pts;
}

// Jump commutativity: L-1 b = L1 c pointwise. The scheme is implementable
// from endpoint noise values only under this condition.
inline CommutativityReport check_commutativity(const SdeModel& model,
                                               const std::vector<std::pair<double, double>>& grid,
                                               double tol) {
    if (grid.empty()) throw std::invalid_argument("check_commutativity: empty sample grid");
    if (!(tol >= 0.0)) throw std::invalid_argument("check_commutativity: tol must be >= 0");
    CommutativityReport rep;
    for (const auto& [t, y] : grid) {
        const double lhs = lm1_apply(model, CoefSel::b, t, y);
        const double rhs = l1_apply(model, CoefSel::c, t, y);
        rep.max_violation = std::max(rep.max_violation, std::fabs(lhs - rhs));
    }
    rep.pass = rep.max_violation <= tol;
    return rep;
}

inline CommutativityReport check_commutativity(const SdeModel& model, double tol = 1e-8) {
    return check_commutativity(model, default_check_grid(model), tol);
}

struct DerivativeReport {
    double max_violation_b = 0.0;
    double max_violation_c = 0.0;
    bool pass = false;
};

// Central-difference consistency of db_dy/dc_dy with b/c:
// |supplied - fd| <= tol * (1 + |y|) at every sampled point.
inline DerivativeReport check_derivatives(const SdeModel& model,
                                          const std::vector<std::pair<double, double>>& grid,
                                          double tol = 1e-6) {
    if (grid.empty()) throw std::invalid_argument("check_derivatives: empty sample grid");
    DerivativeReport rep;
    bool ok = true;
    for (const auto& [t, y] : grid) {
        const double h = 1e-5 * (1.0 + std::fabs(y));
        const double fd_b = (model.b(t, y + h) - model.b(t, y - h)) / (2.0 * h);
        const double fd_c = (model.c(t, y + h) - model.c(t, y - h)) / (2.0 * h);
        const double vb = std::fabs(model.db_dy(t, y) - fd_b);
        const double vc = std::fabs(model.dc_dy(t, y) - fd_c);
        rep.max_violation_b = std::max(rep.max_violation_b, vb);
        rep.max_violation_c = std::max(rep.max_violation_c, vc);
        const double bound = tol * (1.0 + std::fabs(y));
        ok = ok && vb <= bound && vc <= bound;
    }
    rep.pass = ok;
    return rep;
}

inline DerivativeReport check_derivatives(const SdeModel& model, double tol = 1e-6) {
    return check_derivatives(model, default_check_grid(model), tol);
}

// Local mean-square roughness process Y(t) = |b|^2 + lambda(t) |c|^2
// evaluated at state x; sqrt(E Y(t)) is the local L2-Hoelder constant of X.
inline double local_y(const SdeModel& model, const IntensityModel& intensity, double t,
                      double x) {
    require_time(model, t);
    const double bv = model.b(t, x);
    const double cv = model.c(t, x);
    return bv * bv + intensity.lambda(t) * cv * cv;
}

// Closed-form Merton solution x0 * exp((r - sigma^2/2) t + sigma w) * 2^n.
inline double merton_exact(const MertonParams& p, double w_t, std::int64_t n_t, double t) {
    if (n_t < 0) throw std::invalid_argument("merton_exact: n_t must be >= 0");
    if (!(t >= 0.0 && t <= p.T)) throw std::domain_error("merton_exact: t outside [0, T]");
    const double expo = (p.r - 0.5 * p.sigma * p.sigma) * t + p.sigma * w_t;
    return p.x0 * std::exp(expo) * std::ldexp(1.0, static_cast<int>(n_t));
}

// ---- built-in models ------------------------------------------------------

inline IntensityModel make_const_intensity(double lam) {
    if (!(lam > 0.0)) throw contract_error("make_const_intensity: lambda must be > 0");
    IntensityModel im;
    im.lambda = [lam](double) { return lam; };
    im.m_analytic = [lam](double t) { return lam * t; };
    im.lambda_max = lam;
    im.m_mode = MMode::analytic;
    return im;
}

// lambda(t) = l0 + l1 t, required positive on [0, T].
inline IntensityModel make_affine_intensity(double l0, double l1, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("make_affine_intensity: T must be > 0");
    if (!(l0 > 0.0) || !(l0 + l1 * T > 0.0))
        throw contract_error("make_affine_intensity: lambda must stay positive on [0, T]");
    IntensityModel im;
    im.lambda = [l0, l1](double t) { return l0 + l1 * t; };
    im.m_analytic = [l0, l1](double t) { return l0 * t + 0.5 * l1 * t * t; };
    im.lambda_max = std::max(l0, l0 + l1 * T);
    im.m_mode = MMode::analytic;
    return im;
}

inline SdeModel make_merton(const MertonParams& p) {
    p.validate();
    SdeModel m;
    m.name = "merton";
    m.x0 = p.x0;
    m.T = p.T;
    m.a = [p](double, double y) { return p.r * y; };
    m.b = [p](double, double y) { return p.sigma * y; };
    m.c = [](double, double y) { return y; };
    m.db_dy = [p](double, double) { return p.sigma; };
    m.dc_dy = [](double, double) { return 1.0; };
    m.exact = [p](double t, double w, std::int64_t n) { return merton_exact(p, w, n, t); };
    m.merton = p;
    return m;
}

// Geometric Brownian motion dX = r X dt + sigma X dW (no jumps).
inline SdeModel make_pure_diffusion(double r, double sigma, double x0, double T) {
    if (!(sigma > 0.0) || !(x0 > 0.0) || !(T > 0.0))
        throw std::invalid_argument("make_pure_diffusion: sigma, x0, T must be positive");
    SdeModel m;
    m.name = "pure-diffusion";
    m.x0 = x0;
    m.T = T;
    m.a = [r](double, double y) { return r * y; };
    m.b = [sigma](double, double y) { return sigma * y; };
    m.c = [](double, double) { return 0.0; };
    m.db_dy = [sigma](double, double) { return sigma; };
    m.dc_dy = [](double, double) { return 0.0; };
    m.c_is_zero = true;
    m.exact = [r, sigma, x0](double t, double w, std::int64_t) {
        return x0 * std::exp((r - 0.5 * sigma * sigma) * t + sigma * w);
    };
    return m;
}

// dX = c(t) dN with c(t) = c0 + c1 t; b == 0. With constant c the solution
// X(t) = x0 + c0 N(t) is standard-information exact and attached.
inline SdeModel make_pure_jump_additive(double c0, double c1, double x0, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("make_pure_jump_additive: T must be > 0");
    SdeModel m;
    m.name = "pure-jump-additive";
    m.x0 = x0;
    m.T = T;
    m.a = [](double, double) { return 0.0; };
    m.b = [](double, double) { return 0.0; };
    m.c = [c0, c1](double t, double) { return c0 + c1 * t; };
    m.db_dy = [](double, double) { return 0.0; };
    m.dc_dy = [](double, double) { return 0.0; };
    m.b_is_zero = true;
    if (c1 == 0.0)
        m.exact = [c0, x0](double, double, std::int64_t n) {
            return x0 + c0 * static_cast<double>(n);
        };
    return m;
}

struct PolyCoefParams {
    double k0 = 0.0, k1 = 0.0, k2 = 0.0; // k0 + k1 t + k2 y
};

// First-degree polynomial family: each coefficient is k0 + k1 t + k2 y.
// Commutativity is the caller's responsibility and is checked downstream.
inline SdeModel make_polynomial(const PolyCoefParams& pa, const PolyCoefParams& pb,
                                const PolyCoefParams& pc, double x0, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("make_polynomial: T must be > 0");
    SdeModel m;
    m.name = "polynomial";
    m.x0 = x0;
    m.T = T;
    auto mk = [](PolyCoefParams p) {
        return Coef([p](double t, double y) { return p.k0 + p.k1 * t + p.k2 * y; });
    };
    m.a = mk(pa);
    m.b = mk(pb);
    m.c = mk(pc);
    m.db_dy = [pb](double, double) { return pb.k2; };
    m.dc_dy = [pc](double, double) { return pc.k2; };
    m.b_is_zero = pb.k0 == 0.0 && pb.k1 == 0.0 && pb.k2 == 0.0;
    m.c_is_zero = pc.k0 == 0.0 && pc.k1 == 0.0 && pc.k2 == 0.0;
    return m;
}

} // namespace jumpmil
