#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "pleat/error.hpp"
#include "pleat/triangulation.hpp"

namespace pleat
{

struct LayerAngles {
    double x{}, y{}, z{};

    [[nodiscard]] double operator[](Label l) const
    {
        return l == Label::x ? x : l == Label::y ? y : z;
    }
};

/** @brief Pleating parameters and the dihedral angles they determine */
struct AngleStructure {
    /** Full parameter vector; for two-bridge links w[0] = w[c] = pi/2 */
    std::vector<double> w;
    /** One entry per layer of the triangulation */
    std::vector<LayerAngles> angles;
    bool interior{};
};

struct Constraint {
    std::string id;
    double margin{};
};

/**
 * Linear form of one angle in the parameters (w[i-1], w[i], w[i+1]) of its
 * layer, plus a constant.
 */
struct AngleForm {
    std::array<double, 3> coef{};
    double constant{};
};

/** Coefficients of x, y, z of a layer, by context */
inline std::array<AngleForm, 3> layer_forms(const Layer& l)
{
    const double pi = std::numbers::pi;
    const AngleForm z{{0, -2, 0}, pi};
    const AngleForm sum{{1, 0, 1}, 0};
    const AngleForm bend{{-1, 2, -1}, 0};
    if (l.before == Letter::L && l.after == Letter::L) {
        return {sum, bend, z};
    }
    if (l.before == Letter::R && l.after == Letter::R) {
        return {bend, sum, z};
    }
    const AngleForm up{{1, 1, -1}, 0};
    const AngleForm down{{-1, 1, 1}, 0};
    if (l.before == Letter::L) {
        return {up, down, z};
    }
    return {down, up, z};
}

/** Positions in w of (w[i-1], w[i], w[i+1]) for a layer */
inline std::array<int, 3> layer_neighbours(const LayeredTriangulation& tri, const Layer& l)
{
    if (tri.kind == Kind::TwoBridge) {
        return {l.index - 1, l.index, l.index + 1};
    }
    const int m = tri.size();
    return {(l.index - 1 + m) % m, l.index, (l.index + 1) % m};
}

/** Indices of w that are optimization variables */
inline std::vector<int> free_indices(const LayeredTriangulation& tri)
{
    std::vector<int> out;
    if (tri.kind == Kind::TwoBridge) {
        for (int i = 1; i < tri.size(); ++i) {
            out.push_back(i);
        }
    } else {
        for (int i = 0; i < tri.size(); ++i) {
            out.push_back(i);
        }
    }
    return out;
}

inline void check_dimension(const LayeredTriangulation& tri, const std::vector<double>& w)
{
    if (static_cast<int>(w.size()) != tri.w_size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "expected " + std::to_string(tri.w_size()) + " parameters, got " +
                        std::to_string(w.size()));
    }
}

/** Signed margins of the range, concavity and hinge conditions */
inline std::vector<Constraint> constraint_residuals(const LayeredTriangulation& tri,
                                                    const std::vector<double>& w)
{
    check_dimension(tri, w);
    const double half = std::numbers::pi / 2;
    std::vector<Constraint> out;
    for (const auto& l : tri.layers) {
        const auto nb = layer_neighbours(tri, l);
        const double a = w[static_cast<std::size_t>(nb[0])];
        const double b = w[static_cast<std::size_t>(nb[1])];
        const double c = w[static_cast<std::size_t>(nb[2])];
        const std::string tag = "[" + std::to_string(l.index) + "]";
        out.push_back({"range_low" + tag, b});
        out.push_back({"range_high" + tag, half - b});
        if (l.hinge) {
            out.push_back({"hinge" + tag, b - std::abs(c - a)});
        } else {
            out.push_back({"concavity" + tag, 2 * b - a - c});
        }
    }
    return out;
}

inline double min_margin(const LayeredTriangulation& tri, const std::vector<double>& w)
{
    double mn = INFINITY;
    for (const auto& c : constraint_residuals(tri, w)) {
        mn = std::min(mn, c.margin);
    }
    return mn;
}

inline LayerAngles evaluate_layer(const LayeredTriangulation& tri, const Layer& l,
                                  const std::vector<double>& w)
{
    const auto nb = layer_neighbours(tri, l);
    const auto forms = layer_forms(l);
    std::array<double, 3> v{};
    for (int t = 0; t < 3; ++t) {
        const auto& f = forms[static_cast<std::size_t>(t)];
        double s = f.constant;
        for (int k = 0; k < 3; ++k) {
            s += f.coef[static_cast<std::size_t>(k)] *
                 w[static_cast<std::size_t>(nb[static_cast<std::size_t>(k)])];
        }
        v[static_cast<std::size_t>(t)] = s;
    }
    return {v[0], v[1], v[2]};
}

/** @brief Dihedral angles of every layer from the pleating parameters */
inline AngleStructure angles_from_w(const LayeredTriangulation& tri, const std::vector<double>& w)
{
    check_dimension(tri, w);
    AngleStructure s;
    s.w = w;
    for (const auto& l : tri.layers) {
        s.angles.push_back(evaluate_layer(tri, l, w));
    }
    s.interior = min_margin(tri, w) > 0;
    return s;
}

/** Dihedral angle sum around an edge class */
inline double edge_angle_sum(const LayeredTriangulation& tri, const AngleStructure& s,
                             const EdgeClass& e)
{
    double sum = 0;
    for (const auto& sl : e.slots) {
        for (std::size_t k = 0; k < tri.layers.size(); ++k) {
            if (tri.layers[k].index == sl.layer) {
                sum += sl.count * s.angles[k][sl.label];
            }
        }
    }
    return sum;
}

/** The three pleating angles of the surface between layers i and i+1 */
inline std::array<double, 3> pleating_angles(const std::vector<double>& w, int i)
{
    const auto n = static_cast<int>(w.size());
    const double a = w[static_cast<std::size_t>(((i % n) + n) % n)];
    const double b = w[static_cast<std::size_t>((((i + 1) % n) + n) % n)];
    return {-2 * a, 2 * b, 2 * a - 2 * b};
}

namespace detail
{
// Strictly concave arc between hinges j < k, both at pi/3
inline void fill_gap(std::vector<double>& w, int j, int k, int wrap)
{
    const double third = std::numbers::pi / 3;
    for (int i = j; i <= k; ++i) {
        const double t = static_cast<double>((i - j) * (k - i)) / ((k - j) * (k - j));
        w[static_cast<std::size_t>(wrap > 0 ? i % wrap : i)] = third + t;
    }
}

// Terminal fan: linear from pi/2 at `from` to pi/3 at `to`, plus a concave bump
inline void fill_terminal(std::vector<double>& w, int from, int to)
{
    const double half = std::numbers::pi / 2;
    const double third = std::numbers::pi / 3;
    const int len = std::abs(to - from);
    const int dir = to > from ? 1 : -1;
    for (int s = 0; s <= len; ++s) {
        const double t = static_cast<double>(s) / len;
        const double bump = 0.1 * t * (1 - t);
        w[static_cast<std::size_t>(from + dir * s)] = half + (third - half) * t + bump;
    }
}
}  // namespace detail

/** @brief A point strictly inside the polytope of angle structures */
inline AngleStructure initial_structure(const LayeredTriangulation& tri)
{
    std::vector<int> hinges;
    for (const auto& l : tri.layers) {
        if (l.hinge) {
            hinges.push_back(l.index);
        }
    }
    std::vector<double> w(static_cast<std::size_t>(tri.w_size()), std::numbers::pi / 3);
    if (tri.kind == Kind::TwoBridge) {
        const int c = tri.size();
        if (hinges.empty()) {
            throw Error(ErrorCode::Infeasible, "two-bridge word without hinge");
        }
        detail::fill_terminal(w, 0, hinges.front());
        detail::fill_terminal(w, c, hinges.back());
        for (std::size_t h = 0; h + 1 < hinges.size(); ++h) {
            detail::fill_gap(w, hinges[h], hinges[h + 1], 0);
        }
    } else {
        const int m = tri.size();
        if (hinges.empty()) {
            throw Error(ErrorCode::Infeasible, "bundle word without hinge");
        }
        for (std::size_t h = 0; h < hinges.size(); ++h) {
            const int j = hinges[h];
            int k = hinges[(h + 1) % hinges.size()];
            if (k <= j) {
                k += m;
            }
            detail::fill_gap(w, j, k, m);
        }
    }
    auto s = angles_from_w(tri, w);
    if (!s.interior) {
        throw Error(ErrorCode::Infeasible, "initial structure is not interior");
    }
    return s;
}

}  // namespace pleat
