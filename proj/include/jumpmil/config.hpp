#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "errorlab.hpp"
#include "meshdesign.hpp"
#include "model.hpp"

namespace jumpmil {

// Flat sectioned key=value experiment description. Unknown keys are errors:
// a silently ignored typo in an experiment config is worse than a failure.
struct RunConfig {
    // [model]
    std::string model = "merton";
    double r = 0.0, sigma = 1.0, lambda = 1.0, x0 = 1.0, T = 1.0;
    PolyCoefParams pa, pb, pc; // a0..a2, b0..b2, c0..c2 (c0, c1 double as the
                               // pure-jump-additive coefficients)
    // [intensity]
    std::optional<double> lambda0; // defaults to model lambda
    double lambda1 = 0.0;
    std::string m_mode = "analytic";
    // [run]
    std::string method = "conditional";
    std::string mesh = "equidistant";
    std::vector<std::size_t> n_list = {64, 128, 256, 512};
    std::size_t M = 1000;
    std::size_t M_pilot = 2000;
    std::size_t pilot_grid = 512;
    std::size_t eval_grid_size = 0; // 0 selects 4 * n_list.back()
    std::string reference;          // "", "exact", "merton-exact", "fine-milstein"
    std::size_t fine_factor = 16;
    std::uint64_t seed = 12345;
    std::string mode = "det";
    unsigned threads = 1;
    std::string out = "out";
    std::string pilot_cache;
    double floor_eps = 1e-6;
    double check_tol = 1e-8;

    std::set<std::string> seen; // flattened keys that were set explicitly
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v) {
    const std::string t = trim(v);
    if (t.empty()) throw config_error("expected number, got empty value");
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(t, &used);
    } catch (const std::exception&) {
        throw config_error("expected number, got '" + t + "'");
    }
    if (used != t.size()) throw config_error("trailing characters in number '" + t + "'");
    return x;
}

template <class UInt>
UInt parse_uint(const std::string& v) {
    const std::string t = trim(v);
    UInt x{};
    const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw config_error("expected nonnegative integer, got '" + t + "'");
    return x;
}

inline std::vector<std::size_t> parse_size_list(const std::string& v) {
    std::vector<std::size_t> out;
    std::stringstream ss(trim(v));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_uint<std::size_t>(item));
    if (out.empty()) throw config_error("expected comma-separated list of integers");
    return out;
}

} // namespace detail

// Applies one key within a section; throws config_error naming the key on
// unknown keys or malformed values (no location; the caller adds it).
inline void apply_kv(RunConfig& cfg, const std::string& section, const std::string& key,
                     const std::string& value) {
    using detail::parse_double;
    using detail::parse_uint;
    auto fail_unknown = [&] {
        throw config_error("unknown key '" + key + "' in section [" + section + "]");
    };
    const std::string v = detail::trim(value);
    if (section == "model") {
        if (key == "name") cfg.model = v;
        else if (key == "r") cfg.r = parse_double(v);
        else if (key == "sigma") cfg.sigma = parse_double(v);
        else if (key == "lambda") cfg.lambda = parse_double(v);
        else if (key == "x0") cfg.x0 = parse_double(v);
        else if (key == "T") cfg.T = parse_double(v);
        else if (key == "a0") cfg.pa.k0 = parse_double(v);
        else if (key == "a1") cfg.pa.k1 = parse_double(v);
        else if (key == "a2") cfg.pa.k2 = parse_double(v);
        else if (key == "b0") cfg.pb.k0 = parse_double(v);
        else if (key == "b1") cfg.pb.k1 = parse_double(v);
        else if (key == "b2") cfg.pb.k2 = parse_double(v);
        else if (key == "c0") cfg.pc.k0 = parse_double(v);
        else if (key == "c1") cfg.pc.k1 = parse_double(v);
        else if (key == "c2") cfg.pc.k2 = parse_double(v);
        else fail_unknown();
    } else if (section == "intensity") {
        if (key == "lambda0") cfg.lambda0 = parse_double(v);
        else if (key == "lambda1") cfg.lambda1 = parse_double(v);
        else if (key == "m_mode") cfg.m_mode = v;
        else fail_unknown();
    } else if (section == "run") {
        if (key == "method") cfg.method = v;
        else if (key == "mesh") cfg.mesh = v;
        else if (key == "n_list") cfg.n_list = detail::parse_size_list(v);
        else if (key == "M") cfg.M = parse_uint<std::size_t>(v);
        else if (key == "M_pilot") cfg.M_pilot = parse_uint<std::size_t>(v);
        else if (key == "pilot_grid") cfg.pilot_grid = parse_uint<std::size_t>(v);
        else if (key == "eval_grid_size") cfg.eval_grid_size = parse_uint<std::size_t>(v);
        else if (key == "reference") cfg.reference = v;
        else if (key == "fine_factor") cfg.fine_factor = parse_uint<std::size_t>(v);
        else if (key == "seed") cfg.seed = parse_uint<std::uint64_t>(v);
        else if (key == "mode") cfg.mode = v;
        else if (key == "threads") cfg.threads = parse_uint<unsigned>(v);
        else if (key == "out") cfg.out = v;
        else if (key == "pilot_cache") cfg.pilot_cache = v;
        else if (key == "floor_eps") cfg.floor_eps = parse_double(v);
        else if (key == "check_tol") cfg.check_tol = parse_double(v);
        else fail_unknown();
    } else {
        throw config_error("unknown section [" + section + "]");
    }
    cfg.seen.insert(section + "." + key);
}

// Flattened "section.key=value" form used by --set and artifact headers.
inline void apply_override(RunConfig& cfg, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw config_error("override '" + spec + "': expected section.key=value");
    const std::string path = detail::trim(spec.substr(0, eq));
    const auto dot = path.find('.');
    if (dot == std::string::npos)
        throw config_error("override '" + spec + "': expected section.key=value");
    apply_kv(cfg, path.substr(0, dot), path.substr(dot + 1), spec.substr(eq + 1));
}

inline RunConfig parse_config_text(const std::string& text, const std::string& source) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        auto where = [&] { return source + ":" + std::to_string(lineno) + ": "; };
        if (t.front() == '[') {
            if (t.back() != ']') throw config_error(where() + "malformed section header");
            section = detail::trim(t.substr(1, t.size() - 2));
            if (section != "model" && section != "intensity" && section != "run")
                throw config_error(where() + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error(where() + "expected key=value, got '" + t + "'");
        if (section.empty())
            throw config_error(where() + "key outside any [section]");
        const std::string key = detail::trim(t.substr(0, eq));
        try {
            apply_kv(cfg, section, key, t.substr(eq + 1));
        } catch (const config_error& e) {
            throw config_error(where() + "[" + section + "] key '" + key + "': " + e.what());
        }
    }
    return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

inline void validate_config(const RunConfig& cfg) {
    auto fail = [](const std::string& m) { throw config_error("config: " + m); };
    if (cfg.model != "merton" && cfg.model != "pure-diffusion" &&
        cfg.model != "pure-jump-additive" && cfg.model != "polynomial")
        fail("unknown model '" + cfg.model + "'");
    if (!(cfg.T > 0.0)) fail("T must be > 0");
    if (cfg.method != "conditional" && cfg.method != "linear")
        fail("method must be conditional or linear");
    if (cfg.mesh != "equidistant" && cfg.mesh != "density" && cfg.mesh != "merton-optimal")
        fail("mesh must be equidistant, density or merton-optimal");
    if (cfg.mesh == "merton-optimal" && cfg.model != "merton")
        fail("merton-optimal mesh requires the merton model");
    if (cfg.mode != "det" && cfg.mode != "fast") fail("mode must be det or fast");
    if (cfg.m_mode != "analytic" && cfg.m_mode != "quadrature")
        fail("m_mode must be analytic or quadrature");
    if (!cfg.reference.empty() && cfg.reference != "exact" && cfg.reference != "merton-exact" &&
        cfg.reference != "fine-milstein")
        fail("reference must be exact, merton-exact or fine-milstein");
    if (cfg.n_list.empty()) fail("n_list must not be empty");
    for (std::size_t k = 0; k < cfg.n_list.size(); ++k) {
        if (cfg.n_list[k] < 2) fail("every n must be >= 2");
        if (k > 0 && cfg.n_list[k] <= cfg.n_list[k - 1]) fail("n_list must be strictly increasing");
    }
    if (cfg.M < 2) fail("M must be >= 2");
    if (cfg.M_pilot < 100) fail("M_pilot must be >= 100");
    if (cfg.pilot_grid < 2) fail("pilot_grid must be >= 2");
    if (cfg.fine_factor < 8) fail("fine_factor must be >= 8");
    if (cfg.threads < 1) fail("threads must be >= 1");
    if (!(cfg.floor_eps >= 0.0)) fail("floor_eps must be >= 0");
    if (!(cfg.check_tol >= 0.0)) fail("check_tol must be >= 0");
    if (cfg.model == "merton") {
        if (cfg.seen.count("intensity.lambda0") && *cfg.lambda0 != cfg.lambda)
            fail("merton intensity must match the model's constant lambda");
        if (cfg.lambda1 != 0.0)
            fail("merton requires a constant intensity (lambda1 must be 0)");
    }
}

inline SdeModel build_model(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.model == "merton")
        return make_merton({cfg.r, cfg.sigma, cfg.lambda, cfg.x0, cfg.T});
    if (cfg.model == "pure-diffusion")
        return make_pure_diffusion(cfg.r, cfg.sigma, cfg.x0, cfg.T);
    if (cfg.model == "pure-jump-additive")
        return make_pure_jump_additive(cfg.pc.k0, cfg.pc.k1, cfg.x0, cfg.T);
    return make_polynomial(cfg.pa, cfg.pb, cfg.pc, cfg.x0, cfg.T);
}

inline IntensityModel build_intensity(const RunConfig& cfg) {
    validate_config(cfg);
    const double l0 = cfg.lambda0.value_or(cfg.lambda);
    IntensityModel im = cfg.lambda1 == 0.0 ? make_const_intensity(l0)
                                           : make_affine_intensity(l0, cfg.lambda1, cfg.T);
    if (cfg.m_mode == "quadrature") im.m_mode = MMode::quadrature;
    return im;
}

inline MethodKind method_kind(const RunConfig& cfg) {
    return cfg.method == "conditional" ? MethodKind::conditional : MethodKind::linear;
}

inline MeshKind mesh_kind(const RunConfig& cfg) {
    if (cfg.mesh == "equidistant") return MeshKind::equidistant;
    if (cfg.mesh == "density") return MeshKind::density;
    return MeshKind::merton_optimal;
}

inline ReferenceSpec reference_spec(const RunConfig& cfg, const SdeModel& model) {
    if (cfg.reference.empty())
        return model.exact ? ReferenceSpec::exact_solution()
                           : ReferenceSpec::fine(cfg.fine_factor);
    if (cfg.reference == "fine-milstein") return ReferenceSpec::fine(cfg.fine_factor);
    return ReferenceSpec::exact_solution(); // "exact" and its merton alias
}

// Full resolved configuration in a fixed order; feeding these pairs back
// through apply_override reproduces the run byte-identically.
inline std::vector<std::pair<std::string, std::string>> resolved_kv(const RunConfig& cfg) {
    const SdeModel probe = build_model(cfg);
    std::vector<std::pair<std::string, std::string>> kv;
    auto put = [&](const char* k, std::string v) { kv.emplace_back(k, std::move(v)); };
    auto putd = [&](const char* k, double v) { kv.emplace_back(k, fmt_g17(v)); };
    put("model.name", cfg.model);
    putd("model.r", cfg.r);
    putd("model.sigma", cfg.sigma);
    putd("model.lambda", cfg.lambda);
    putd("model.x0", cfg.x0);
    putd("model.T", cfg.T);
    putd("model.a0", cfg.pa.k0);
    putd("model.a1", cfg.pa.k1);
    putd("model.a2", cfg.pa.k2);
    putd("model.b0", cfg.pb.k0);
    putd("model.b1", cfg.pb.k1);
    putd("model.b2", cfg.pb.k2);
    putd("model.c0", cfg.pc.k0);
    putd("model.c1", cfg.pc.k1);
    putd("model.c2", cfg.pc.k2);
    putd("intensity.lambda0", cfg.lambda0.value_or(cfg.lambda));
    putd("intensity.lambda1", cfg.lambda1);
    put("intensity.m_mode", cfg.m_mode);
    put("run.method", cfg.method);
    put("run.mesh", cfg.mesh);
    {
        std::string s;
        for (std::size_t k = 0; k < cfg.n_list.size(); ++k)
            s += (k ? "," : "") + std::to_string(cfg.n_list[k]);
        put("run.n_list", s);
    }
    put("run.M", std::to_string(cfg.M));
    put("run.M_pilot", std::to_string(cfg.M_pilot));
    put("run.pilot_grid", std::to_string(cfg.pilot_grid));
    put("run.eval_grid_size", std::to_string(cfg.eval_grid_size));
    put("run.reference", cfg.reference.empty()
                             ? (probe.exact ? std::string("exact") : std::string("fine-milstein"))
                             : cfg.reference);
    put("run.fine_factor", std::to_string(cfg.fine_factor));
    put("run.seed", std::to_string(cfg.seed));
    put("run.mode", cfg.mode);
    put("run.threads", std::to_string(cfg.threads));
    putd("run.floor_eps", cfg.floor_eps);
    putd("run.check_tol", cfg.check_tol);
    return kv;
}

// Rebuilds a RunConfig from the "# cfg:" header lines of an artifact.
inline RunConfig config_from_artifact_header(const std::string& artifact_path) {
    std::ifstream f(artifact_path);
    if (!f) throw config_error("cannot open artifact '" + artifact_path + "'");
    RunConfig cfg;
    std::string line;
    bool any = false;
    const std::string tag = "# cfg:";
    while (std::getline(f, line)) {
        if (line.rfind(tag, 0) != 0) {
            if (any) break;
            continue;
        }
        apply_override(cfg, line.substr(tag.size()));
        any = true;
    }
    if (!any) throw config_error("artifact '" + artifact_path + "' has no # cfg: header");
    return cfg;
}

} // namespace jumpmil
