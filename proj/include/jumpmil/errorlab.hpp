#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "mesh.hpp"
#include "meshdesign.hpp"
#include "model.hpp"
#include "path.hpp"
#include "quad.hpp"
#include "rng.hpp"
#include "scheme.hpp"
#include "util.hpp"

namespace jumpmil {

// Informational cost of one replication on an n-interval mesh: number of
// driving-process values the scheme consumes. Triviality of b and c is
// declared on the model, not inferred from samples.
inline std::size_t cost_of(std::size_t n, const SdeModel& model) {
    if (n == 0) throw std::invalid_argument("cost_of: n must be >= 1");
    const bool b_live = !model.b_is_zero;
    const bool c_live = !model.c_is_zero;
    if (b_live && c_live) return 2 * n;
    if (b_live || c_live) return n;
    return 0;
}

struct ErrorEstimate {
    double e_hat = 0.0;        // estimate of e_n = sqrt(E integral |X - Xhat|^2)
    double std_error = 0.0;    // delta-method standard error of e_hat
    double mean_sq = 0.0;      // raw mean of the squared-error integral
    double std_error_sq = 0.0; // standard error of mean_sq
    std::size_t M = 0;
    std::size_t n = 0;
    std::size_t eval_grid_size = 0;
};

// Reference trajectory used as stand-in for the true solution: either the
// model's closed-form solution or a Milstein run on a factor-refined mesh
// (reference error one order below the measured n^{-1/2} signal).
struct ReferenceSpec {
    enum class Kind { exact, fine_milstein };
    Kind kind = Kind::exact;
    std::size_t factor = 16;

    static ReferenceSpec exact_solution() { return {Kind::exact, 16}; }
    static ReferenceSpec fine(std::size_t factor = 16) { return {Kind::fine_milstein, factor}; }

    std::string describe() const {
        return kind == Kind::exact ? std::string("exact")
                                   : "fine-milstein:" + std::to_string(factor);
    }
};

inline void validate_reference(const ReferenceSpec& ref, const SdeModel& model) {
    if (ref.kind == ReferenceSpec::Kind::exact && !model.exact)
        throw std::invalid_argument(
            "reference 'exact' requires a model with a closed-form solution");
    if (ref.kind == ReferenceSpec::Kind::fine_milstein && ref.factor < 8)
        throw std::invalid_argument("fine-milstein refinement factor must be >= 8");
}

struct RunOptions {
    enum class Mode { det, fast };
    Mode mode = Mode::det;
    unsigned threads = 1;
};

namespace detail {

inline std::vector<double> uniform_points(double T, std::size_t segments) {
    if (segments == 0) throw std::invalid_argument("uniform_points: segments must be >= 1");
    std::vector<double> pts(segments + 1);
    for (std::size_t i = 0; i <= segments; ++i)
        pts[i] = static_cast<double>(i) * T / static_cast<double>(segments);
    pts.front() = 0.0;
    pts.back() = T;
    return pts;
}

inline Mesh refine_mesh(const Mesh& mesh, std::size_t factor) {
    Mesh fine;
    fine.knots.reserve(mesh.n() * factor + 1);
    for (std::size_t i = 0; i + 1 < mesh.knots.size(); ++i) {
        const double t_i = mesh.knots[i];
        const double dt = mesh.knots[i + 1] - t_i;
        for (std::size_t k = 0; k < factor; ++k)
            fine.knots.push_back(k == 0 ? t_i
                                        : t_i + dt * static_cast<double>(k) /
                                                    static_cast<double>(factor));
    }
    fine.knots.push_back(mesh.knots.back());
    validate_mesh(fine);
    return fine;
}

// Reference values along one simulated path, queried in ascending grid
// order. Right value is the cadlag solution value; the left value differs
// from it only where the grid point is a jump instant.
class ReferenceEval {
  public:
    ReferenceEval(const SdeModel& model, ReferenceSpec spec, const GridPath& path,
                  const std::vector<std::int64_t>& n_left, const Mesh* fine_mesh,
                  const std::vector<double>* fine_values,
                  const std::vector<std::size_t>* fine_idx)
        : model_(&model), spec_(spec), path_(&path), n_left_(&n_left), fine_mesh_(fine_mesh),
          fine_values_(fine_values), fine_idx_(fine_idx) {}

    std::pair<double, double> value_pair(std::size_t j) {
        const double t = path_->grid[j];
        const bool at_jump = (*n_left_)[j] != path_->n[j];
        if (spec_.kind == ReferenceSpec::Kind::exact) {
            const double right = model_->exact(t, path_->w[j], path_->n[j]);
            const double left =
                at_jump ? model_->exact(t, path_->w[j], (*n_left_)[j]) : right;
            return {right, left};
        }
        while (k_ + 1 < fine_idx_->size() && (*fine_idx_)[k_ + 1] <= j) ++k_;
        if ((*fine_idx_)[k_] == j) {
            const double right = (*fine_values_)[k_];
            // jumps live in (0, T], so a jump at a fine knot has k_ >= 1
            const double left = at_jump ? step_from(k_ - 1, j, true) : right;
            return {right, left};
        }
        const double right = step_from(k_, j, false);
        const double left = at_jump ? step_from(k_, j, true) : right;
        return {right, left};
    }

  private:
    // Continuous Milstein evaluation from fine knot k to grid point j.
    double step_from(std::size_t k, std::size_t j, bool use_left_count) const {
        const double tk = fine_mesh_->knots[k];
        const double t = path_->grid[j];
        const std::size_t gk = (*fine_idx_)[k];
        const double dw = path_->w[j] - path_->w[gk];
        const std::int64_t nj = use_left_count ? (*n_left_)[j] : path_->n[j];
        const std::int64_t dn = nj - path_->n[gk];
        return milstein_step(*model_, tk, t, (*fine_values_)[k], dw, dn, i_ww(dw, t - tk),
                             i_nn(dn));
    }

    const SdeModel* model_;
    ReferenceSpec spec_;
    const GridPath* path_;
    const std::vector<std::int64_t>* n_left_;
    const Mesh* fine_mesh_;
    const std::vector<double>* fine_values_;
    const std::vector<std::size_t>* fine_idx_;
    std::size_t k_ = 0;
};

// One replication of integral |X_ref - X_hat|^2 dt over [0, T], trapezoid
// rule on the union grid, split at jump times via reference left limits.
inline double replication_sq_error(const SdeModel& model, const IntensityModel& intensity,
                                   MethodKind method, const Mesh& mesh,
                                   const std::vector<double>& base_grid, const Mesh* fine_mesh,
                                   ReferenceSpec ref, RngStream& rng) {
    const GridPath path = simulate_grid_path(base_grid, intensity, rng);
    const auto n_left = counts_on_grid_left(path.jumps, path.grid);

    BuildOptions bo;
    bo.check_commutativity = false; // validated once by the caller
    const ApproxTrajectory traj = build_trajectory(method, model, intensity, mesh, path, bo);

    std::vector<double> fine_values;
    std::vector<std::size_t> fine_idx;
    if (ref.kind == ReferenceSpec::Kind::fine_milstein) {
        fine_values = run_milstein(model, *fine_mesh, path);
        fine_idx = knot_indices(*fine_mesh, path);
    }
    ReferenceEval refe(model, ref, path, n_left, fine_mesh, &fine_values, &fine_idx);
    TrajectoryCursor approx(traj);

    double acc = 0.0;
    double prev_r2 = 0.0;
    double prev_t = 0.0;
    for (std::size_t j = 0; j < path.grid.size(); ++j) {
        const double t = path.grid[j];
        const double xa = approx(t);
        const auto [xr, xl] = refe.value_pair(j);
        if (j > 0) {
            const double dl = xl - xa;
            acc += 0.5 * (prev_r2 + dl * dl) * (t - prev_t);
        }
        const double dr = xr - xa;
        prev_r2 = dr * dr;
        prev_t = t;
    }
    if (!std::isfinite(acc)) throw numerical_error("l2_error_mc: non-finite integrand");
    return acc;
}

} // namespace detail

// Monte-Carlo estimate of the global L2 error of the chosen method on the
// given mesh. Replication rep uses stream (master_seed, rep); results are
// reduced in replication order, so output is bit-identical for any thread
// count (det and fast modes coincide in this implementation).
inline ErrorEstimate l2_error_mc(const SdeModel& model, const IntensityModel& intensity,
                                 MethodKind method, const Mesh& mesh, std::size_t M,
                                 std::size_t eval_grid_size, ReferenceSpec ref,
                                 std::uint64_t master_seed, const RunOptions& run = {}) {
    model.validate();
    validate_mesh(mesh);
    if (M < 2) throw std::invalid_argument("l2_error_mc: M must be >= 2");
    if (eval_grid_size < 1) throw std::invalid_argument("l2_error_mc: eval_grid_size >= 1");
    if (mesh.T() != model.T)
        throw std::invalid_argument("l2_error_mc: mesh horizon differs from model horizon");
    validate_reference(ref, model);
    const auto comm = check_commutativity(model, 1e-8);
    if (!comm.pass)
        throw contract_error("l2_error_mc: jump commutativity violated (max " +
                             std::to_string(comm.max_violation) + ")");

    std::vector<double> base =
        merge_grids(mesh.knots, detail::uniform_points(model.T, eval_grid_size));
    std::optional<Mesh> fine;
    if (ref.kind == ReferenceSpec::Kind::fine_milstein) {
        fine = detail::refine_mesh(mesh, ref.factor);
        base = merge_grids(base, fine->knots);
    }

    std::vector<double> results(M);
    parallel_for(M, run.threads, [&](std::size_t rep) {
        RngStream rng(master_seed, rep);
        results[rep] = detail::replication_sq_error(model, intensity, method, mesh, base,
                                                    fine ? &*fine : nullptr, ref, rng);
    });

    double sum = 0.0;
    for (double s : results) sum += s;
    const double mean = sum / static_cast<double>(M);
    double ss = 0.0;
    for (double s : results) {
        const double d = s - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(M - 1);

    ErrorEstimate est;
    est.M = M;
    est.n = mesh.n();
    est.eval_grid_size = eval_grid_size;
    est.mean_sq = mean;
    est.std_error_sq = std::sqrt(var / static_cast<double>(M));
    est.e_hat = std::sqrt(std::max(0.0, mean));
    est.std_error = est.e_hat > 0.0 ? est.std_error_sq / (2.0 * est.e_hat) : 0.0;
    return est;
}

// Asymptotic error constants from a tabulated E Y(t):
//   equidistant:    C_eq    = sqrt(T/6) (integral E Y)^{1/2}
//   noneq-optimal:  C_noneq = (1/sqrt 6) integral sqrt(E Y)
//   density psi:    C_psi   = (1/sqrt 6) (integral E Y / psi)^{1/2}
enum class MeshRegime { equidistant, noneq_optimal };

namespace detail {

inline void check_ey_table(const std::vector<double>& t, const std::vector<double>& ey) {
    if (t.size() != ey.size() || t.size() < 2)
        throw std::invalid_argument("asymptotic_constant: need matching tables, >= 2 points");
    for (std::size_t j = 0; j + 1 < t.size(); ++j)
        if (!(t[j] < t[j + 1]))
            throw std::invalid_argument("asymptotic_constant: time grid not increasing");
    for (double v : ey)
        if (!(v >= 0.0)) throw std::invalid_argument("asymptotic_constant: E Y must be >= 0");
}

} // namespace detail

inline double asymptotic_constant(const std::vector<double>& t, const std::vector<double>& ey,
                                  MeshRegime regime) {
    detail::check_ey_table(t, ey);
    if (regime == MeshRegime::equidistant) {
        const double T = t.back() - t.front();
        return std::sqrt(T / 6.0 * trapezoid(t, ey));
    }
    std::vector<double> root(ey.size());
    for (std::size_t j = 0; j < ey.size(); ++j) root[j] = std::sqrt(ey[j]);
    return trapezoid(t, root) / std::sqrt(6.0);
}

inline double asymptotic_constant(const std::vector<double>& t, const std::vector<double>& ey,
                                  const Density& density) {
    detail::check_ey_table(t, ey);
    if (std::fabs(density.T() - t.back()) > 1e-12 * std::max(1.0, std::fabs(t.back())))
        throw std::invalid_argument("asymptotic_constant: density horizon differs from grid");
    std::vector<double> g(ey.size());
    for (std::size_t j = 0; j < ey.size(); ++j) {
        const double p = density.psi(t[j]);
        if (!(p > 0.0))
            throw contract_error("asymptotic_constant: density not positive on the grid");
        g[j] = ey[j] / p;
    }
    return std::sqrt(trapezoid(t, g) / 6.0);
}

enum class MeshKind { equidistant, density, merton_optimal };

inline const char* name_of(MethodKind k) {
    return k == MethodKind::conditional ? "conditional" : "linear";
}

inline const char* name_of(MeshKind k) {
    switch (k) {
        case MeshKind::equidistant: return "equidistant";
        case MeshKind::density: return "density";
        default: return "merton-optimal";
    }
}

struct ReportRow {
    std::size_t n = 0;
    std::size_t cost = 0;
    double e_hat = 0.0;
    double std_error = 0.0;
    double sqrt_n_e = 0.0;
    double sqrt_cost_e = 0.0;
    double predicted_limit = 0.0;
};

struct ConvergenceReport {
    std::vector<ReportRow> rows;
    double slope = 0.0;           // least-squares slope of log e_hat vs log n
    double predicted_limit = 0.0; // n-scaled limit C_psi; cost-scaled limit is
                                  // sqrt(cost_n/n) * C_psi
    std::string model_name, method_kind, mesh_kind, reference;
    std::uint64_t master_seed = 0;
    std::size_t M = 0;
    std::size_t eval_grid_size = 0;
};

struct StudyOptions {
    RunOptions run;
    std::size_t eval_grid_size = 0;        // 0 selects 4 * n_list.back()
    std::optional<double> predicted_limit; // override the computed limit
    std::optional<PilotEstimate> pilot;    // reuse a pilot for the limit
    std::size_t pilot_grid_size = 512;
    std::size_t M_pilot = 2000;
    std::size_t ey_grid_points = 2049; // tabulation of analytic E Y
};

// One l2_error_mc per n, common replication streams across the n values,
// plus the predicted asymptotic constant for the chosen mesh family.
inline ConvergenceReport convergence_study(const SdeModel& model,
                                           const IntensityModel& intensity, MethodKind method,
                                           MeshKind mesh_kind,
                                           const std::optional<Density>& density,
                                           const std::vector<std::size_t>& n_list,
                                           std::size_t M, ReferenceSpec ref,
                                           std::uint64_t master_seed,
                                           const StudyOptions& opts = {}) {
    if (n_list.empty()) throw std::invalid_argument("convergence_study: empty n_list");
    for (std::size_t k = 0; k < n_list.size(); ++k) {
        if (n_list[k] < 2) throw std::invalid_argument("convergence_study: each n must be >= 2");
        if (k > 0 && n_list[k] <= n_list[k - 1])
            throw std::invalid_argument("convergence_study: n_list must be strictly increasing");
    }
    if (mesh_kind == MeshKind::density && !density)
        throw std::invalid_argument("convergence_study: density mesh kind needs a density");
    if (mesh_kind == MeshKind::merton_optimal && !model.merton)
        throw std::invalid_argument("convergence_study: merton-optimal mesh needs a Merton model");
    if (density && std::fabs(density->T() - model.T) > 1e-12 * model.T)
        throw std::invalid_argument("convergence_study: density horizon differs from model");

    double climit = 0.0;
    if (opts.predicted_limit) {
        climit = *opts.predicted_limit;
    } else {
        std::vector<double> t, ey;
        if (model.merton) {
            t = uniform_grid(model.T, opts.ey_grid_points);
            ey.resize(t.size());
            for (std::size_t j = 0; j < t.size(); ++j)
                ey[j] = merton_expected_y(*model.merton, t[j]);
        } else {
            const PilotEstimate p =
                opts.pilot ? *opts.pilot
                           : pilot_expected_y(model, intensity, opts.pilot_grid_size,
                                              opts.M_pilot, master_seed, 1ULL << 62,
                                              opts.run.threads);
            t = p.grid;
            ey = p.ey_hat;
        }
        switch (mesh_kind) {
            case MeshKind::equidistant:
                climit = asymptotic_constant(t, ey, MeshRegime::equidistant);
                break;
            case MeshKind::merton_optimal:
                climit = asymptotic_constant(t, ey, MeshRegime::noneq_optimal);
                break;
            case MeshKind::density:
                climit = asymptotic_constant(t, ey, *density);
                break;
        }
    }

    ConvergenceReport rep;
    rep.predicted_limit = climit;
    rep.model_name = model.name;
    rep.method_kind = name_of(method);
    rep.mesh_kind = name_of(mesh_kind);
    rep.reference = ref.describe();
    rep.master_seed = master_seed;
    rep.M = M;
    rep.eval_grid_size = opts.eval_grid_size ? opts.eval_grid_size : 4 * n_list.back();

    for (std::size_t n : n_list) {
        Mesh mesh;
        switch (mesh_kind) {
            case MeshKind::equidistant: mesh = equidistant_mesh(model.T, n); break;
            case MeshKind::density: mesh = mesh_from_density(*density, n); break;
            case MeshKind::merton_optimal: mesh = merton_optimal_mesh(*model.merton, n); break;
        }
        const ErrorEstimate est = l2_error_mc(model, intensity, method, mesh, M,
                                              rep.eval_grid_size, ref, master_seed, opts.run);
        ReportRow row;
        row.n = n;
        row.cost = cost_of(n, model);
        row.e_hat = est.e_hat;
        row.std_error = est.std_error;
        row.sqrt_n_e = std::sqrt(static_cast<double>(n)) * est.e_hat;
        row.sqrt_cost_e = std::sqrt(static_cast<double>(row.cost)) * est.e_hat;
        row.predicted_limit = climit;
        rep.rows.push_back(row);
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (const auto& row : rep.rows) {
        if (!(row.e_hat > 0.0)) continue;
        const double x = std::log(static_cast<double>(row.n));
        const double y = std::log(row.e_hat);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) {
        const double den = static_cast<double>(cnt) * sxx - sx * sx;
        rep.slope = den != 0.0 ? (static_cast<double>(cnt) * sxy - sx * sy) / den : 0.0;
    }
    return rep;
}

struct HolderPoint {
    double h = 0.0;
    double ratio_hat = 0.0;
    double std_error = 0.0;
};

// ratio_hat(h) = sqrt(MC mean |X(t+h) - X(t)|^2) / sqrt(h), which tends to
// sqrt(E Y(t)) as h goes to 0.
inline std::vector<HolderPoint> holder_ratio(const SdeModel& model,
                                             const IntensityModel& intensity, double t,
                                             const std::vector<double>& h_list, std::size_t M,
                                             ReferenceSpec ref, std::uint64_t master_seed,
                                             const RunOptions& run = {}) {
    model.validate();
    if (h_list.empty()) throw std::invalid_argument("holder_ratio: empty h_list");
    for (std::size_t k = 0; k < h_list.size(); ++k) {
        if (!(h_list[k] > 0.0)) throw std::invalid_argument("holder_ratio: h must be > 0");
        if (k > 0 && !(h_list[k] < h_list[k - 1]))
            throw std::invalid_argument("holder_ratio: h_list must be strictly decreasing");
    }
    if (!(t >= 0.0) || !(t + h_list.front() <= model.T))
        throw std::invalid_argument("holder_ratio: window [t, t+max h] outside [0, T]");
    if (M < 2) throw std::invalid_argument("holder_ratio: M must be >= 2");
    validate_reference(ref, model);

    std::vector<double> base{0.0, t};
    for (double h : h_list) base.push_back(t + h);
    std::sort(base.begin(), base.end());
    base.erase(std::unique(base.begin(), base.end()), base.end());
    if (base.back() < model.T) base.push_back(model.T);

    std::optional<Mesh> fine;
    if (ref.kind == ReferenceSpec::Kind::fine_milstein) {
        const double h_min = h_list.back();
        const std::size_t steps = static_cast<std::size_t>(std::ceil(model.T / h_min));
        fine = equidistant_mesh(model.T, ref.factor * std::max<std::size_t>(steps, 64));
    }

    const std::size_t K = h_list.size();
    std::vector<std::vector<double>> sq(M); // per replication, per h
    parallel_for(M, run.threads, [&](std::size_t rep) {
        RngStream rng(master_seed, rep);
        std::vector<double> grid = base;
        if (fine) grid = merge_grids(grid, fine->knots);
        const GridPath path = [&] {
            GridPath p;
            p.jumps = poisson_jump_times(intensity, model.T, rng);
            p.grid = merge_grids(grid, p.jumps);
            p.w = wiener_on_grid(p.grid, rng);
            p.n = counts_on_grid(p.jumps, p.grid);
            return p;
        }();
        const auto n_left = counts_on_grid_left(path.jumps, path.grid);

        std::vector<double> fine_values;
        std::vector<std::size_t> fine_idx;
        if (fine) {
            fine_values = run_milstein(model, *fine, path);
            fine_idx = detail::knot_indices(*fine, path);
        }
        detail::ReferenceEval refe(model, ref, path, n_left, fine ? &*fine : nullptr,
                                   &fine_values, &fine_idx);

        auto grid_index = [&](double s) {
            const auto it = std::lower_bound(path.grid.begin(), path.grid.end(), s);
            return static_cast<std::size_t>(it - path.grid.begin());
        };
        // ascending query order: t first, then t+h from the smallest h up
        const double x_t = refe.value_pair(grid_index(t)).first;
        auto& row = sq[rep];
        row.resize(K);
        for (std::size_t k = K; k-- > 0;) {
            const double x_th = refe.value_pair(grid_index(t + h_list[k])).first;
            const double d = x_th - x_t;
            row[k] = d * d;
        }
    });

    std::vector<HolderPoint> out(K);
    for (std::size_t k = 0; k < K; ++k) {
        double sum = 0.0;
        for (std::size_t rep = 0; rep < M; ++rep) sum += sq[rep][k];
        const double mean = sum / static_cast<double>(M);
        double ss = 0.0;
        for (std::size_t rep = 0; rep < M; ++rep) {
            const double d = sq[rep][k] - mean;
            ss += d * d;
        }
        const double se_mean = std::sqrt(ss / static_cast<double>(M - 1) /
                                         static_cast<double>(M));
        out[k].h = h_list[k];
        out[k].ratio_hat = std::sqrt(std::max(0.0, mean)) / std::sqrt(h_list[k]);
        out[k].std_error =
            mean > 0.0 ? se_mean / (2.0 * std::sqrt(mean) * std::sqrt(h_list[k])) : 0.0;
    }
    return out;
}

// Writes converge.csv (schema: n,cost_n,e_hat,stderr,sqrt_n_e,sqrt_cost_e,
// predicted_limit) and converge_plot.dat (block 0: log n vs log e_hat;
// block 1: the predicted-constant horizontal reference). Lines starting with
// "# cfg:" echo the resolved configuration so a run can be reproduced from
// the artifact alone.
inline void emit_report(const ConvergenceReport& rep, const std::filesystem::path& dir,
                        const std::vector<std::pair<std::string, std::string>>& config_kv = {}) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "converge.csv", std::ios::binary);
        if (!f) throw std::runtime_error("emit_report: cannot open converge.csv");
        for (const auto& [k, v] : config_kv) f << "# cfg:" << k << "=" << v << "\n";
        f << "## model=" << rep.model_name << " method=" << rep.method_kind
          << " mesh=" << rep.mesh_kind << " reference=" << rep.reference << "\n";
        f << "## master_seed=" << rep.master_seed << " M=" << rep.M
          << " eval_grid_size=" << rep.eval_grid_size << " slope=" << fmt_g17(rep.slope)
          << " predicted_limit=" << fmt_g17(rep.predicted_limit) << "\n";
        f << "n,cost_n,e_hat,stderr,sqrt_n_e,sqrt_cost_e,predicted_limit\n";
        for (const auto& row : rep.rows)
            f << row.n << ',' << row.cost << ',' << fmt_g17(row.e_hat) << ','
              << fmt_g17(row.std_error) << ',' << fmt_g17(row.sqrt_n_e) << ','
              << fmt_g17(row.sqrt_cost_e) << ',' << fmt_g17(row.predicted_limit) << "\n";
    }
    {
        std::ofstream f(dir / "converge_plot.dat", std::ios::binary);
        if (!f) throw std::runtime_error("emit_report: cannot open converge_plot.dat");
        f << "# block 0: log(n) log(e_hat); block 1: log(predicted_limit) reference line\n";
        for (const auto& row : rep.rows) {
            if (!(row.e_hat > 0.0)) continue;
            f << fmt_g17(std::log(static_cast<double>(row.n))) << ' '
              << fmt_g17(std::log(row.e_hat)) << "\n";
        }
        f << "\n\n";
        if (!rep.rows.empty() && rep.predicted_limit > 0.0) {
            const double lc = std::log(rep.predicted_limit);
            f << fmt_g17(std::log(static_cast<double>(rep.rows.front().n))) << ' '
              << fmt_g17(lc) << "\n";
            f << fmt_g17(std::log(static_cast<double>(rep.rows.back().n))) << ' '
              << fmt_g17(lc) << "\n";
        }
    }
}

} // namespace jumpmil
