#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "config.hpp"

namespace jumpmil {

inline void write_cfg_header(std::ofstream& f, const RunConfig& cfg) {
    for (const auto& [k, v] : resolved_kv(cfg)) f << "# cfg:" << k << "=" << v << "\n";
}

inline std::filesystem::path ensure_out_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.out);
    std::filesystem::create_directories(dir);
    return dir;
}

// ---- pilot cache ------------------------------------------------------------

inline void store_pilot(const std::string& path, const PilotEstimate& p) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write pilot cache '" + path + "'");
    f << "# pilot:M_pilot=" << p.M_pilot << "\n";
    f << "t,ey_hat,stderr\n";
    for (std::size_t j = 0; j < p.grid.size(); ++j)
        f << fmt_g17(p.grid[j]) << ',' << fmt_g17(p.ey_hat[j]) << ','
          << fmt_g17(p.std_error[j]) << "\n";
}

inline std::optional<PilotEstimate> load_pilot(const std::string& path) {
    std::ifstream f(path);
    if (!f) return std::nullopt;
    std::string line;
    if (!std::getline(f, line) || line.rfind("# pilot:M_pilot=", 0) != 0)
        throw config_error("pilot cache '" + path + "': missing # pilot header");
    PilotEstimate p;
    p.M_pilot = detail::parse_uint<std::size_t>(line.substr(16));
    if (!std::getline(f, line) || line != "t,ey_hat,stderr")
        throw config_error("pilot cache '" + path + "': bad schema row");
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        double v[3];
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(ss, cell, ','))
                throw config_error("pilot cache '" + path + "': short row");
            v[k] = detail::parse_double(cell);
        }
        p.grid.push_back(v[0]);
        p.ey_hat.push_back(v[1]);
        p.std_error.push_back(v[2]);
    }
    if (p.grid.size() < 2) throw config_error("pilot cache '" + path + "': too few rows");
    return p;
}

inline PilotEstimate get_pilot(const RunConfig& cfg, const SdeModel& model,
                               const IntensityModel& intensity) {
    if (!cfg.pilot_cache.empty())
        if (auto p = load_pilot(cfg.pilot_cache)) return *p;
    PilotEstimate p = pilot_expected_y(model, intensity, cfg.pilot_grid, cfg.M_pilot, cfg.seed,
                                       1ULL << 62, cfg.threads);
    if (!cfg.pilot_cache.empty()) store_pilot(cfg.pilot_cache, p);
    return p;
}

// psi_0 for the configured model: closed form when available, pilot otherwise.
inline Density optimal_density_for(const RunConfig& cfg, const SdeModel& model,
                                   const IntensityModel& intensity,
                                   std::optional<PilotEstimate>* pilot_out = nullptr) {
    if (model.merton) {
        const MertonParams p = *model.merton;
        return optimal_density([p](double t) { return merton_expected_y(p, t); }, model.T);
    }
    PilotEstimate pilot = get_pilot(cfg, model, intensity);
    Density d = optimal_density(pilot, cfg.floor_eps);
    if (pilot_out) *pilot_out = std::move(pilot);
    return d;
}

// ---- subcommands ------------------------------------------------------------

inline int cmd_check(const RunConfig& cfg) {
    const SdeModel model = build_model(cfg);
    build_intensity(cfg); // validates positivity on [0, T]
    const auto grid = default_check_grid(model);
    const auto comm = check_commutativity(model, grid, cfg.check_tol);
    const auto der = check_derivatives(model, grid);
    std::cout << "commutativity: max violation " << fmt_g(comm.max_violation, 6) << " (tol "
              << fmt_g(cfg.check_tol, 6) << "): " << (comm.pass ? "PASS" : "FAIL") << "\n";
    std::cout << "derivatives:   max violation b " << fmt_g(der.max_violation_b, 6) << ", c "
              << fmt_g(der.max_violation_c, 6) << ": " << (der.pass ? "PASS" : "FAIL") << "\n";
    return comm.pass && der.pass ? 0 : 2;
}

inline int cmd_mesh(const RunConfig& cfg) {
    const SdeModel model = build_model(cfg);
    const IntensityModel intensity = build_intensity(cfg);
    const std::size_t n = cfg.n_list.back();
    const auto dir = ensure_out_dir(cfg);
    auto dump = [&](const char* fname, const Mesh& mesh) {
        std::ofstream f(dir / fname, std::ios::binary);
        if (!f) throw std::runtime_error(std::string("cannot write ") + fname);
        write_cfg_header(f, cfg);
        f << "i,t\n";
        for (std::size_t i = 0; i < mesh.knots.size(); ++i)
            f << i << ',' << fmt_g17(mesh.knots[i]) << "\n";
        std::cout << "wrote " << (dir / fname).string() << "\n";
    };
    dump("mesh_equidistant.csv", equidistant_mesh(model.T, n));
    if (model.merton) dump("mesh_merton_optimal.csv", merton_optimal_mesh(*model.merton, n));
    const PilotEstimate pilot = get_pilot(cfg, model, intensity);
    dump("mesh_pilot_optimal.csv", mesh_from_density(optimal_density(pilot, cfg.floor_eps), n));
    return 0;
}

inline int cmd_pilot(const RunConfig& cfg) {
    const SdeModel model = build_model(cfg);
    const IntensityModel intensity = build_intensity(cfg);
    const PilotEstimate p = get_pilot(cfg, model, intensity);
    const auto dir = ensure_out_dir(cfg);
    std::ofstream f(dir / "pilot.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write pilot.csv");
    write_cfg_header(f, cfg);
    f << "## M_pilot=" << p.M_pilot << "\n";
    f << "t,ey_hat,stderr\n";
    for (std::size_t j = 0; j < p.grid.size(); ++j)
        f << fmt_g17(p.grid[j]) << ',' << fmt_g17(p.ey_hat[j]) << ','
          << fmt_g17(p.std_error[j]) << "\n";
    std::cout << "wrote " << (dir / "pilot.csv").string() << "\n";
    return 0;
}

inline int cmd_converge(const RunConfig& cfg) {
    const SdeModel model = build_model(cfg);
    const IntensityModel intensity = build_intensity(cfg);
    StudyOptions opts;
    opts.run.mode = cfg.mode == "det" ? RunOptions::Mode::det : RunOptions::Mode::fast;
    opts.run.threads = cfg.threads;
    opts.eval_grid_size = cfg.eval_grid_size;
    opts.pilot_grid_size = cfg.pilot_grid;
    opts.M_pilot = cfg.M_pilot;
    std::optional<Density> density;
    if (mesh_kind(cfg) == MeshKind::density) {
        std::optional<PilotEstimate> pilot;
        density = optimal_density_for(cfg, model, intensity, &pilot);
        opts.pilot = std::move(pilot);
    }
    const ReferenceSpec ref = reference_spec(cfg, model);
    const ConvergenceReport rep =
        convergence_study(model, intensity, method_kind(cfg), mesh_kind(cfg), density,
                          cfg.n_list, cfg.M, ref, cfg.seed, opts);
    const auto dir = ensure_out_dir(cfg);
    emit_report(rep, dir, resolved_kv(cfg));
    std::cout << "model=" << rep.model_name << " method=" << rep.method_kind
              << " mesh=" << rep.mesh_kind << " reference=" << rep.reference
              << " M=" << rep.M << " seed=" << rep.master_seed << "\n";
    for (const auto& row : rep.rows)
        std::cout << "n=" << row.n << " cost=" << row.cost << " e_hat=" << fmt_g(row.e_hat, 6)
                  << " stderr=" << fmt_g(row.std_error, 3)
                  << " sqrt_n_e=" << fmt_g(row.sqrt_n_e, 6) << "\n";
    std::cout << "slope=" << fmt_g(rep.slope, 6)
              << " predicted_limit=" << fmt_g(rep.predicted_limit, 6) << "\n";
    std::cout << "wrote " << (dir / "converge.csv").string() << " and "
              << (dir / "converge_plot.dat").string() << "\n";
    return 0;
}

inline int cmd_constants(const RunConfig& cfg) {
    const SdeModel model = build_model(cfg);
    const IntensityModel intensity = build_intensity(cfg);
    std::vector<double> t, ey;
    std::optional<Density> psi0;
    if (model.merton) {
        const MertonParams p = *model.merton;
        t = uniform_grid(model.T, 2049);
        ey.resize(t.size());
        for (std::size_t j = 0; j < t.size(); ++j) ey[j] = merton_expected_y(p, t[j]);
        psi0 = optimal_density([p](double s) { return merton_expected_y(p, s); }, model.T);
    } else {
        const PilotEstimate pilot = get_pilot(cfg, model, intensity);
        t = pilot.grid;
        ey = pilot.ey_hat;
        psi0 = optimal_density(pilot, cfg.floor_eps);
    }
    const double c_eq = asymptotic_constant(t, ey, MeshRegime::equidistant);
    const double c_noneq = asymptotic_constant(t, ey, MeshRegime::noneq_optimal);
    const double c_psi = asymptotic_constant(t, ey, *psi0);
    std::cout << "C_eq        = " << fmt_g(c_eq, 12) << "\n";
    std::cout << "C_noneq     = " << fmt_g(c_noneq, 12) << "\n";
    std::cout << "C_psi       = " << fmt_g(c_psi, 12) << "\n";
    std::cout << "C_eq/C_noneq = " << fmt_g(c_eq / c_noneq, 12) << "\n";
    const auto dir = ensure_out_dir(cfg);
    std::ofstream f(dir / "constants.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write constants.csv");
    write_cfg_header(f, cfg);
    f << "name,value\n";
    f << "C_eq," << fmt_g17(c_eq) << "\n";
    f << "C_noneq," << fmt_g17(c_noneq) << "\n";
    f << "C_psi," << fmt_g17(c_psi) << "\n";
    f << "C_eq_over_C_noneq," << fmt_g17(c_eq / c_noneq) << "\n";
    std::cout << "wrote " << (dir / "constants.csv").string() << "\n";
    return 0;
}

inline int cmd_simulate(const RunConfig& cfg) {
    const SdeModel model = build_model(cfg);
    const IntensityModel intensity = build_intensity(cfg);
    const std::size_t n = cfg.n_list.back();
    Mesh mesh;
    switch (mesh_kind(cfg)) {
        case MeshKind::equidistant: mesh = equidistant_mesh(model.T, n); break;
        case MeshKind::merton_optimal: mesh = merton_optimal_mesh(*model.merton, n); break;
        case MeshKind::density:
            mesh = mesh_from_density(optimal_density_for(cfg, model, intensity), n);
            break;
    }
    const std::size_t eval = cfg.eval_grid_size ? cfg.eval_grid_size : 4 * n;
    const std::vector<double> base =
        merge_grids(mesh.knots, detail::uniform_points(model.T, eval));
    RngStream rng(cfg.seed, 0);
    const GridPath path = simulate_grid_path(base, intensity, rng);
    BuildOptions bo;
    bo.commutativity_tol = cfg.check_tol;
    const ApproxTrajectory traj =
        build_trajectory(method_kind(cfg), model, intensity, mesh, path, bo);
    TrajectoryCursor cur(traj);

    const auto dir = ensure_out_dir(cfg);
    std::ofstream f(dir / "path.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write path.csv");
    write_cfg_header(f, cfg);
    f << "t,w,n,x_hat" << (model.exact ? ",x_exact" : "") << "\n";
    for (std::size_t j = 0; j < path.grid.size(); ++j) {
        const double t = path.grid[j];
        f << fmt_g17(t) << ',' << fmt_g17(path.w[j]) << ',' << path.n[j] << ','
          << fmt_g17(cur(t));
        if (model.exact) f << ',' << fmt_g17(model.exact(t, path.w[j], path.n[j]));
        f << "\n";
    }
    std::cout << "wrote " << (dir / "path.csv").string() << " (" << path.grid.size()
              << " rows, " << path.jumps.size() << " jumps)\n";
    return 0;
}

// ---- argument parsing and exit-code mapping ---------------------------------

inline int run_cli(int argc, char** argv) {
    CLI::App app{"strong-approximation laboratory for jump-diffusion SDEs"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> mode, out;
    auto add_common = [&](CLI::App* s) {
        s->add_option("--config", config_path, "config file ([section] key=value)");
        s->add_option("--seed", seed, "master seed override");
        s->add_option("--threads", threads, "worker thread count");
        s->add_option("--mode", mode, "det or fast")->check(CLI::IsMember({"det", "fast"}));
        s->add_option("--out", out, "output directory");
        s->add_option("--set", sets, "override section.key=value (repeatable)");
    };
    CLI::App* c_check = app.add_subcommand("check", "model contract checks");
    CLI::App* c_mesh = app.add_subcommand("mesh", "emit discretization meshes");
    CLI::App* c_pilot = app.add_subcommand("pilot", "pilot estimate of E Y(t)");
    CLI::App* c_converge = app.add_subcommand("converge", "L2 convergence study");
    CLI::App* c_constants = app.add_subcommand("constants", "asymptotic error constants");
    CLI::App* c_simulate = app.add_subcommand("simulate", "single-path trajectory dump");
    for (CLI::App* s : {c_check, c_mesh, c_pilot, c_converge, c_constants, c_simulate})
        add_common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : parse_config_file(config_path);
        for (const auto& s : sets) apply_override(cfg, s);
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        if (mode) cfg.mode = *mode;
        if (out) cfg.out = *out;
        validate_config(cfg);
        if (app.got_subcommand(c_check)) return cmd_check(cfg);
        if (app.got_subcommand(c_mesh)) return cmd_mesh(cfg);
        if (app.got_subcommand(c_pilot)) return cmd_pilot(cfg);
        if (app.got_subcommand(c_converge)) return cmd_converge(cfg);
        if (app.got_subcommand(c_constants)) return cmd_constants(cfg);
        if (app.got_subcommand(c_simulate)) return cmd_simulate(cfg);
        return 1;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const contract_error& e) {
        std::cerr << "contract error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace jumpmil
