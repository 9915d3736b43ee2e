#pragma once

#include <stdexcept>
#include <vector>

namespace jumpmil {

// Discretization 0 = t_0 < t_1 < ... < t_n = T.
struct Mesh {
    std::vector<double> knots;

    std::size_t n() const { return knots.empty() ? 0 : knots.size() - 1; }
    double T() const { return knots.back(); }
};

inline void validate_mesh(const Mesh& mesh) {
    if (mesh.knots.size() < 2) throw std::invalid_argument("Mesh: need at least 2 knots");
    if (mesh.knots.front() != 0.0) throw std::invalid_argument("Mesh: knots[0] must be 0");
    const double T = mesh.knots.back();
    if (!(T > 0.0)) throw std::invalid_argument("Mesh: T must be > 0");
    const double min_dt = 1e-14 * T;
    for (std::size_t i = 0; i + 1 < mesh.knots.size(); ++i)
        if (!(mesh.knots[i + 1] - mesh.knots[i] >= min_dt))
            throw std::invalid_argument("Mesh: degenerate interval (dt < 1e-14 T)");
}

// knots[i] = i T / n, endpoints exactly 0 and T.
inline Mesh equidistant_mesh(double T, std::size_t n) {
    if (n == 0) throw std::invalid_argument("equidistant_mesh: n must be >= 1");
    if (!(T > 0.0)) throw std::invalid_argument("equidistant_mesh: T must be > 0");
    Mesh mesh;
    mesh.knots.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        mesh.knots[i] = static_cast<double>(i) * T / static_cast<double>(n);
    mesh.knots[0] = 0.0;
    mesh.knots[n] = T;
    validate_mesh(mesh);
    return mesh;
}

} // namespace jumpmil
