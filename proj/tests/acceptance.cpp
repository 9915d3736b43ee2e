// Acceptance harness: one pass/fail line per criterion, nonzero exit on any
// failure. Each line carries the measured value and the tolerance it is held
// to, so a transcript is auditable on its own.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "jumpmil/errorlab.hpp"

using namespace jumpmil;

namespace {

bool g_all_pass = true;

void report(int idx, bool pass, const std::string& what) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", idx, what.c_str());
    std::fflush(stdout);
    if (!pass) g_all_pass = false;
}

std::string fm(double x, int prec = 5) { return fmt_g(x, prec); }

std::string pct(double x) { return fmt_g(100.0 * x, 3) + "%"; }

// 1. linear Milstein on the equidistant mesh reaches the predicted constant
void criterion1() {
    const MertonParams p{-3.5, 1.0, 2.0, 1.0, 1.0}; // gamma = 0
    const SdeModel m = make_merton(p);
    const IntensityModel im = make_const_intensity(p.lam);
    const auto rep =
        convergence_study(m, im, MethodKind::linear, MeshKind::equidistant, std::nullopt,
                          {64, 128, 256, 512}, 10000, ReferenceSpec::exact_solution(), 12345);
    const double c_eq = std::sqrt((p.sigma * p.sigma + p.lam) / 6.0); // sqrt(0.5)
    const double v256 = rep.rows[2].sqrt_n_e;
    const double v512 = rep.rows[3].sqrt_n_e;
    const double dev = std::fabs(v512 / c_eq - 1.0);
    const double spread =
        (std::max(v256, v512) - std::min(v256, v512)) / std::min(v256, v512);
    report(1, dev <= 0.15 && spread <= 0.10,
           "sqrt(n)*e_hat(512)=" + fm(v512) + " vs C_eq=" + fm(c_eq) + ", dev=" + pct(dev) +
               " (tol 15%); spread{256,512}=" + pct(spread) + " (tol 10%)");
}

// 2. error ratio optimal/equidistant matches the analytic constant ratio
void criterion2() {
    const MertonParams p{-0.5, 1.0, 2.0, 1.0, 1.0}; // gamma T = 3
    const SdeModel m = make_merton(p);
    const IntensityModel im = make_const_intensity(p.lam);
    const double g = p.gamma(), s2l = p.sigma * p.sigma + p.lam, T = p.T;

    const double c_eq_cf = std::sqrt(T * s2l * (std::exp(2.0 * g * T) - 1.0) / (12.0 * g));
    const double c_noneq_cf = std::sqrt(s2l / 6.0) * (std::exp(g * T) - 1.0) / g;
    std::vector<double> t = uniform_grid(T, 4097), ey(4097);
    for (std::size_t j = 0; j < t.size(); ++j) ey[j] = merton_expected_y(p, t[j]);
    const double c_eq = asymptotic_constant(t, ey, MeshRegime::equidistant);
    const double c_noneq = asymptotic_constant(t, ey, MeshRegime::noneq_optimal);
    const double cdev = std::max(std::fabs(c_eq / c_eq_cf - 1.0),
                                 std::fabs(c_noneq / c_noneq_cf - 1.0));

    const auto eq = l2_error_mc(m, im, MethodKind::linear, equidistant_mesh(T, 512), 10000,
                                2048, ReferenceSpec::exact_solution(), 12345);
    const auto op = l2_error_mc(m, im, MethodKind::linear, merton_optimal_mesh(p, 512), 10000,
                                2048, ReferenceSpec::exact_solution(), 12345);
    const double ratio = op.e_hat / eq.e_hat;
    const double target = c_noneq_cf / c_eq_cf;
    const double dev = std::fabs(ratio / target - 1.0);
    report(2, dev <= 0.15 && cdev <= 1e-5,
           "e(optimal)/e(equidistant)=" + fm(ratio) + " vs C_noneq/C_eq=" + fm(target) +
               ", dev=" + pct(dev) + " (tol 15%); constants vs closed form dev=" + fm(cdev, 2) +
               " (tol 1e-5)");
}

// 3. conditional == linear when the intensity is constant and b, c depend on t only
void criterion3() {
    PolyCoefParams pa{0.1, 0.0, -0.3}, pb{0.8, 0.25, 0.0}, pc{0.5, -0.2, 0.0};
    const SdeModel m = make_polynomial(pa, pb, pc, 1.0, 1.0);
    const IntensityModel im = make_const_intensity(2.0);
    const Mesh mesh = equidistant_mesh(1.0, 32);
    const std::vector<double> eval = detail::uniform_points(1.0, 4096);
    const std::vector<double> base = merge_grids(mesh.knots, eval);
    double worst = 0.0;
    for (std::uint64_t repn = 0; repn < 100; ++repn) {
        RngStream rng(31337, repn);
        const GridPath path = simulate_grid_path(base, im, rng);
        const auto cond = build_trajectory(MethodKind::conditional, m, im, mesh, path);
        const auto lin = build_trajectory(MethodKind::linear, m, im, mesh, path);
        TrajectoryCursor cc(cond), cl(lin);
        for (double tq : eval) worst = std::max(worst, std::fabs(cc(tq) - cl(tq)));
    }
    report(3, worst <= 1e-12,
           "max |conditional - linear| = " + fm(worst, 3) +
               " over 4097-point grid x 100 paths (tol 1e-12)");
}

// 4. knot error of the Milstein chain decays like n^{-1}
void criterion4() {
    const MertonParams p{-3.5, 1.0, 2.0, 1.0, 1.0};
    const SdeModel m = make_merton(p);
    const IntensityModel im = make_const_intensity(p.lam);
    const std::vector<std::size_t> ns{16, 32, 64, 128, 256, 512};
    std::vector<Mesh> meshes;
    for (std::size_t n : ns) meshes.push_back(equidistant_mesh(p.T, n));
    std::vector<std::vector<double>> sumsq(ns.size());
    for (std::size_t k = 0; k < ns.size(); ++k) sumsq[k].assign(ns[k] + 1, 0.0);

    const std::size_t M = 4000;
    for (std::uint64_t repn = 0; repn < M; ++repn) {
        RngStream rng(777, repn);
        // nested dyadic meshes: one path per replication serves every n
        const GridPath path = simulate_grid_path(meshes.back().knots, im, rng);
        for (std::size_t k = 0; k < ns.size(); ++k) {
            const auto xs = run_milstein(m, meshes[k], path);
            const auto idx = detail::knot_indices(meshes[k], path);
            for (std::size_t i = 1; i < xs.size(); ++i) {
                const double xr =
                    m.exact(meshes[k].knots[i], path.w[idx[i]], path.n[idx[i]]);
                const double d = xs[i] - xr;
                sumsq[k][i] += d * d;
            }
        }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        double worst = 0.0;
        for (double s : sumsq[k]) worst = std::max(worst, s);
        const double e = std::sqrt(worst / static_cast<double>(M));
        const double x = std::log(static_cast<double>(ns[k])), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double cnt = static_cast<double>(ns.size());
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    report(4, slope >= -1.15 && slope <= -0.85,
           "sup-over-knots L2 error slope = " + fm(slope) +
               " for n in {16..512}, M=4000 (tol -1 +/- 0.15)");
}

// 5. empirical bridge moments match the conditional mean/variance formulas
void criterion5() {
    const IntensityModel im = make_affine_intensity(1.0, 1.0, 1.0); // lambda(t) = 1 + t
    const double qs[3] = {0.25, 0.5, 0.75};
    const std::size_t M = 100000;
    double sum[3][4] = {}, sq[3][4] = {};
    for (std::uint64_t repn = 0; repn < M; ++repn) {
        RngStream rng(555, repn);
        const auto jumps = poisson_jump_times(im, 1.0, rng);
        const auto n1 = static_cast<std::int64_t>(jumps.size());
        for (int qi = 0; qi < 3; ++qi) {
            const double q = qs[qi];
            const auto nq = static_cast<std::int64_t>(
                std::upper_bound(jumps.begin(), jumps.end(), q) - jumps.begin());
            const double mean = poisson_bridge_mean(0, n1, im, 0.0, 1.0, q);
            const double var = poisson_bridge_var(0, n1, im, 0.0, 1.0, q);
            const std::int64_t ns = poisson_bridge_sample(0, n1, im, 0.0, 1.0, q, rng);
            const double v[4] = {static_cast<double>(nq) - mean, 0.0,
                                 static_cast<double>(ns) - mean, 0.0};
            const double w[4] = {v[0], v[0] * v[0] - var, v[2], v[2] * v[2] - var};
            for (int c = 0; c < 4; ++c) {
                sum[qi][c] += w[c];
                sq[qi][c] += w[c] * w[c];
            }
        }
    }
    double zmax = 0.0;
    for (int qi = 0; qi < 3; ++qi)
        for (int c = 0; c < 4; ++c) {
            const double mean = sum[qi][c] / static_cast<double>(M);
            const double var = (sq[qi][c] / static_cast<double>(M) - mean * mean) /
                               static_cast<double>(M - 1) * static_cast<double>(M);
            const double se = std::sqrt(var / static_cast<double>(M));
            zmax = std::max(zmax, std::fabs(mean) / se);
        }
    report(5, zmax <= 3.0,
           "max |z| = " + fm(zmax, 3) +
               " over 12 conditional mean/variance checks at t in {0.25,0.5,0.75}, M=1e5 "
               "(tol 3 s.e.)");
}

// 6. discrete iterated-integral identities hold with zero tolerance
void criterion6() {
    const IntensityModel im = make_const_intensity(2.0);
    const std::vector<double> base = detail::uniform_points(1.0, 8);
    std::size_t bad = 0, intervals = 0;
    for (std::uint64_t repn = 0; repn < 10000; ++repn) {
        RngStream rng(999, repn);
        const GridPath path = simulate_grid_path(base, im, rng);
        // snap W to the 2^-26 lattice so all sums below are exact in binary64
        std::vector<double> wq(path.w.size());
        for (std::size_t j = 0; j < wq.size(); ++j)
            wq[j] = std::ldexp(std::nearbyint(std::ldexp(path.w[j], 26)), -26);
        std::vector<std::size_t> bidx(base.size());
        for (std::size_t i = 0; i < base.size(); ++i)
            bidx[i] = static_cast<std::size_t>(
                std::lower_bound(path.grid.begin(), path.grid.end(), base[i]) -
                path.grid.begin());
        for (std::size_t i = 0; i + 1 < base.size(); ++i) {
            const std::size_t js = bidx[i], je = bidx[i + 1];
            const std::int64_t dn = path.n[je] - path.n[js];
            const double dw = wq[je] - wq[js];
            double inw = 0.0, iwn = 0.0;
            for (std::size_t j = js; j < je; ++j)
                inw += static_cast<double>(path.n[j] - path.n[js]) * (wq[j + 1] - wq[j]);
            for (std::size_t j = js + 1; j <= je; ++j)
                iwn += (wq[j] - wq[js]) * static_cast<double>(path.n[j] - path.n[j - 1]);
            if (cross_sum(dn, dw) != inw + iwn) ++bad;
            // brute-force double sum over ordered jump pairs in the interval
            const auto lo = std::upper_bound(path.jumps.begin(), path.jumps.end(), base[i]);
            const auto hi =
                std::upper_bound(path.jumps.begin(), path.jumps.end(), base[i + 1]);
            std::int64_t pairs = 0;
            for (auto a = lo; a != hi; ++a)
                for (auto b = a + 1; b != hi; ++b) ++pairs;
            if (i_nn(dn) != static_cast<double>(pairs)) ++bad;
            ++intervals;
        }
    }
    report(6, bad == 0,
           "i_nn and cross_sum identities exact on " + std::to_string(intervals) +
               " intervals over 1e4 paths, " + std::to_string(bad) +
               " mismatches (zero tolerance)");
}

// 7. the scaled increment ratio converges to sqrt(E Y(t))
void criterion7() {
    const MertonParams p{-0.3, 1.0, 0.2, 1.0, 1.0}; // gamma = 0.5
    const SdeModel m = make_merton(p);
    const IntensityModel im = make_const_intensity(p.lam);
    std::vector<double> hs;
    for (int k = 4; k <= 10; ++k) hs.push_back(std::ldexp(1.0, -k));
    const auto pts =
        holder_ratio(m, im, 0.5, hs, 100000, ReferenceSpec::exact_solution(), 4242);
    const double target =
        std::sqrt(p.sigma * p.sigma + p.lam) * p.x0 * std::exp(p.gamma() * 0.5);
    const double diff = std::fabs(pts.back().ratio_hat - target);
    const double tol = 3.0 * pts.back().std_error + 0.10 * target;
    report(7, diff <= tol,
           "ratio(h=2^-10)=" + fm(pts.back().ratio_hat) + " vs sqrt(E Y(0.5))=" + fm(target) +
               ", |diff|=" + fm(diff, 3) + " (tol 3 s.e. + 10% = " + fm(tol, 3) + ")");
}

// 8. density quantile knots reproduce the closed-form quantile function
void criterion8() {
    const Density d = Density::from_function([](double s) { return 2.0 * s; }, 1.0);
    const Mesh mesh = mesh_from_density(d, 1000);
    double worst = 0.0;
    for (std::size_t i = 0; i <= 1000; ++i)
        worst = std::max(worst,
                         std::fabs(mesh.knots[i] - std::sqrt(static_cast<double>(i) / 1000.0)));
    report(8, worst <= 1e-10,
           "max |knot_i - sqrt(i/n)| = " + fm(worst, 3) + " for psi(t)=2t, n=1000 (tol 1e-10)");
}

// 9. converge subcommand is byte-deterministic under --mode det
void criterion9() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "jumpmil_acceptance9";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cmd = std::string(JUMPMIL_CLI_PATH) +
                            " converge --set model.name=merton --set model.r=-3.5"
                            " --set model.sigma=1 --set model.lambda=2"
                            " --set run.n_list=16,32 --set run.M=300"
                            " --set run.reference=exact --mode det --seed 2026 --out " +
                            (dir / "out").string() + " >/dev/null 2>&1";
    auto run_once = [&]() -> bool {
        const int st = std::system(cmd.c_str());
        return st != -1 && WIFEXITED(st) && WEXITSTATUS(st) == 0;
    };
    auto slurp = [](const fs::path& f) {
        std::ifstream in(f, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const bool ok1 = run_once();
    const std::string first_csv = slurp(dir / "out" / "converge.csv");
    const std::string first_dat = slurp(dir / "out" / "converge_plot.dat");
    const bool ok2 = run_once();
    const std::string second_csv = slurp(dir / "out" / "converge.csv");
    const std::string second_dat = slurp(dir / "out" / "converge_plot.dat");
    const bool same = !first_csv.empty() && first_csv == second_csv && first_dat == second_dat;
    report(9, ok1 && ok2 && same,
           std::string("two det-mode converge runs byte-identical: ") +
               (same ? "yes" : "no") + " (" + std::to_string(first_csv.size()) +
               " csv bytes; exit codes " + (ok1 && ok2 ? "0/0" : "nonzero") + ")");
    fs::remove_all(dir);
}

void guarded(int idx, void (*fn)()) {
    try {
        fn();
    } catch (const std::exception& e) {
        report(idx, false, std::string("exception: ") + e.what());
    }
}

} // namespace

int main() {
    guarded(1, criterion1);
    guarded(2, criterion2);
    guarded(3, criterion3);
    guarded(4, criterion4);
    guarded(5, criterion5);
    guarded(6, criterion6);
    guarded(7, criterion7);
    guarded(8, criterion8);
    guarded(9, criterion9);
    std::printf("%s\n", g_all_pass ? "acceptance: all criteria passed"
                                   : "acceptance: FAILURES PRESENT");
    return g_all_pass ? 0 : 1;
}
