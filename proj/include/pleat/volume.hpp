#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "pleat/angles.hpp"
#include "pleat/error.hpp"
#include "pleat/triangulation.hpp"

namespace pleat
{

namespace detail
{
// |B_2k| / (2k (2k+1)!) for k = 1..
inline const std::vector<double>& clausen_coefficients()
{
    static const std::vector<double> c = [] {
        // |B_2k| = 2 (2k)! zeta(2k) / (2 pi)^2k
        std::vector<double> out;
        const double twoPi = 2 * std::numbers::pi;
        double fact = 1;  // (2k)!
        for (int k = 1; k <= 30; ++k) {
            fact *= (2.0 * k - 1) * (2.0 * k);
            const double zeta = std::riemann_zeta(2.0 * k);
            const double absB = 2 * fact * zeta / std::pow(twoPi, 2 * k);
            out.push_back(absB / (2.0 * k * fact * (2.0 * k + 1)));
        }
        return out;
    }();
    return c;
}

// Clausen function Cl2(x) for x in [-pi, pi]
inline double clausen_reduced(double x)
{
    if (x == 0) {
        return 0;
    }
    const double ax = std::abs(x);
    double s = ax - ax * std::log(ax);
    const double x2 = ax * ax;
    double p = ax;
    for (double c : clausen_coefficients()) {
        p *= x2;
        const double term = c * p;
        s += term;
        if (term < 1e-18 * std::abs(s)) {
            break;
        }
    }
    return x < 0 ? -s : s;
}
}  // namespace detail

/**
 * @brief Lobachevsky function, -int_0^theta log|2 sin u| du, for theta in [0, pi].
 *
 * Evaluated as Cl2(2 theta) / 2 through the power series of the Clausen
 * function on [-pi, pi].
 */
inline double lobachevsky(double theta)
{
    const double pi = std::numbers::pi;
    if (!(theta >= 0 && theta <= pi)) {
        throw Error(ErrorCode::OutOfRange, "lobachevsky argument outside [0, pi]");
    }
    double x = 2 * theta;
    if (x > pi) {
        x -= 2 * pi;
    }
    return 0.5 * detail::clausen_reduced(x);
}

inline double v3() { return 3 * lobachevsky(std::numbers::pi / 3); }
inline double v8() { return 8 * lobachevsky(std::numbers::pi / 4); }

/** @brief Volume of an ideal tetrahedron with dihedral angles x, y, z */
inline double tet_volume(double x, double y, double z)
{
    constexpr double tol = 1e-9;
    if (x < -tol || y < -tol || z < -tol) {
        throw Error(ErrorCode::OutOfRange, "negative dihedral angle");
    }
    if (std::abs(x + y + z - std::numbers::pi) > tol) {
        throw Error(ErrorCode::AngleSum, "dihedral angles must sum to pi");
    }
    auto clamp = [](double t) { return std::clamp(t, 0.0, std::numbers::pi); };
    return lobachevsky(clamp(x)) + lobachevsky(clamp(y)) + lobachevsky(clamp(z));
}

inline double total_volume(const LayeredTriangulation& tri, const AngleStructure& s)
{
    double v = 0;
    for (std::size_t k = 0; k < tri.layers.size(); ++k) {
        const auto& a = s.angles[k];
        v += tri.layers[k].tetrahedra * tet_volume(a.x, a.y, a.z);
    }
    return v;
}

inline double total_volume(const LayeredTriangulation& tri, const std::vector<double>& w)
{
    return total_volume(tri, angles_from_w(tri, w));
}

namespace detail
{
// Position of each w index among the free variables, -1 when pinned
inline std::vector<int> free_position(const LayeredTriangulation& tri)
{
    std::vector<int> pos(static_cast<std::size_t>(tri.w_size()), -1);
    const auto fi = free_indices(tri);
    for (std::size_t k = 0; k < fi.size(); ++k) {
        pos[static_cast<std::size_t>(fi[k])] = static_cast<int>(k);
    }
    return pos;
}

inline void require_interior_angles(const AngleStructure& s)
{
    for (const auto& a : s.angles) {
        if (!(a.x > 0 && a.y > 0 && a.z > 0)) {
            throw Error(ErrorCode::Boundary, "angle structure on the boundary");
        }
    }
}
}  // namespace detail

/**
 * @brief Gradient of the volume in the free parameters (ordered as free_indices).
 */
inline std::vector<double> volume_gradient(const LayeredTriangulation& tri,
                                           const std::vector<double>& w)
{
    const auto s = angles_from_w(tri, w);
    detail::require_interior_angles(s);
    const auto pos = detail::free_position(tri);
    std::vector<double> g(free_indices(tri).size(), 0.0);
    for (std::size_t k = 0; k < tri.layers.size(); ++k) {
        const auto& l = tri.layers[k];
        const auto nb = layer_neighbours(tri, l);
        const auto forms = layer_forms(l);
        const std::array<double, 3> th{s.angles[k].x, s.angles[k].y, s.angles[k].z};
        for (int t = 0; t < 3; ++t) {
            const double ls = std::log(std::sin(th[static_cast<std::size_t>(t)]));
            for (int j = 0; j < 3; ++j) {
                const int p = pos[static_cast<std::size_t>(nb[static_cast<std::size_t>(j)])];
                if (p >= 0) {
                    g[static_cast<std::size_t>(p)] -=
                        l.tetrahedra * forms[static_cast<std::size_t>(t)].coef[static_cast<std::size_t>(j)] * ls;
                }
            }
        }
    }
    return g;
}

/** @brief Hessian of the volume in the free parameters */
inline Eigen::MatrixXd volume_hessian(const LayeredTriangulation& tri, const std::vector<double>& w)
{
    const auto s = angles_from_w(tri, w);
    detail::require_interior_angles(s);
    const auto pos = detail::free_position(tri);
    const auto n = static_cast<Eigen::Index>(free_indices(tri).size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < tri.layers.size(); ++k) {
        const auto& l = tri.layers[k];
        const auto nb = layer_neighbours(tri, l);
        const auto forms = layer_forms(l);
        const std::array<double, 3> th{s.angles[k].x, s.angles[k].y, s.angles[k].z};
        for (int t = 0; t < 3; ++t) {
            const double ct = 1.0 / std::tan(th[static_cast<std::size_t>(t)]);
            const auto& cf = forms[static_cast<std::size_t>(t)].coef;
            for (int i = 0; i < 3; ++i) {
                const int pi = pos[static_cast<std::size_t>(nb[static_cast<std::size_t>(i)])];
                if (pi < 0) {
                    continue;
                }
                for (int j = 0; j < 3; ++j) {
                    const int pj = pos[static_cast<std::size_t>(nb[static_cast<std::size_t>(j)])];
                    if (pj < 0) {
                        continue;
                    }
                    H(pi, pj) -= l.tetrahedra * cf[static_cast<std::size_t>(i)] *
                                 cf[static_cast<std::size_t>(j)] * ct;
                }
            }
        }
    }
    return H;
}

/** @brief Solver output and bound certificates */
struct VolumeReport {
    double total_volume{};
    std::vector<double> per_tet_volumes;
    double gradient_inf_norm{};
    int iterations{};
    bool converged{};
    double lower_bound{};
    double upper_bound{};
    double certificate_volume{};
    /** Volume after each accepted iterate, starting with the initial point */
    std::vector<double> volume_history;
    int newton_steps{};
    int gradient_steps{};
    double min_angle{};
    /** Context and label of the smallest angle, e.g. "RR|x" */
    std::string degeneracy_hint;
};

struct VolumeBounds {
    double lower{};
    double upper{};
    AngleStructure certificate;
    double certificate_volume{};
};

/** @brief Bounds on the volume and the angle structure certifying the lower one */
inline VolumeBounds volume_bounds(const LayeredTriangulation& tri)
{
    VolumeBounds b;
    const double third = std::numbers::pi / 3;
    std::vector<double> w(static_cast<std::size_t>(tri.w_size()), third);
    if (tri.kind == Kind::TwoBridge) {
        const auto& syl = detail::group(tri.letters);
        const int c = tri.size();
        const int tw = static_cast<int>(syl.size());
        const int a1 = syl.front().exponent;
        const int an = syl.back().exponent;
        const double half = std::numbers::pi / 2;
        for (int i = 0; i <= a1; ++i) {
            w[static_cast<std::size_t>(i)] = half + (third - half) * i / a1;
        }
        for (int i = c - an; i <= c; ++i) {
            w[static_cast<std::size_t>(i)] = third + (half - third) * (i - (c - an)) / an;
        }
        b.lower = 2 * v3() * tw - 2.7066;
        b.upper = 2 * v8() * (tw - 1);
    } else {
        const int n = MonodromyWord::from_letters(tri.letters).n();
        const int k = tri.kind == Kind::SphereBundle ? 4 : 2;
        b.lower = k * n * v3();
        b.upper = k * n * v8();
    }
    b.certificate = angles_from_w(tri, w);
    b.certificate_volume = total_volume(tri, b.certificate);
    return b;
}

namespace detail
{
inline std::string degeneracy_hint(const LayeredTriangulation& tri, const AngleStructure& s,
                                   double& minAngle)
{
    minAngle = INFINITY;
    std::string hint;
    for (std::size_t k = 0; k < tri.layers.size(); ++k) {
        const auto& l = tri.layers[k];
        for (Label lab : {Label::x, Label::y, Label::z}) {
            const double a = s.angles[k][lab];
            if (a < minAngle) {
                minAngle = a;
                hint = std::string(1, static_cast<char>(l.before)) +
                       static_cast<char>(l.after) + "|" + label_char(lab) + "@" +
                       std::to_string(l.index);
            }
        }
    }
    return hint;
}

inline double inf_norm(const std::vector<double>& g)
{
    double n = 0;
    for (double x : g) {
        n = std::max(n, std::abs(x));
    }
    return n;
}
}  // namespace detail

/**
 * @brief Maximize the volume over the open polytope by damped Newton steps.
 *
 * Steps are halved until the trial point is interior and the volume does not
 * drop; gradient ascent is used when the Newton direction is not an ascent
 * direction.
 */
inline std::pair<AngleStructure, VolumeReport> ascend_volume(const LayeredTriangulation& tri,
                                                             const AngleStructure& w0,
                                                             double tol = 1e-12,
                                                             int max_iter = 200)
{
    check_dimension(tri, w0.w);
    if (!(min_margin(tri, w0.w) > 0)) {
        throw Error(ErrorCode::Infeasible, "starting point is not interior");
    }
    const auto fi = free_indices(tri);
    const auto n = static_cast<Eigen::Index>(fi.size());
    std::vector<double> w = w0.w;
    double V = total_volume(tri, w);
    std::vector<double> g = volume_gradient(tri, w);
    double gn = detail::inf_norm(g);

    VolumeReport rep;
    rep.volume_history.push_back(V);
    const double eps = std::numeric_limits<double>::epsilon();
    int it = 0;
    while (gn >= tol && it < max_iter) {
        ++it;
        Eigen::VectorXd G(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            G(k) = g[static_cast<std::size_t>(k)];
        }
        const Eigen::MatrixXd H = volume_hessian(tri, w);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(-H);
        Eigen::VectorXd d = ldlt.solve(G);
        bool newton = ldlt.info() == Eigen::Success && ldlt.isPositive() && d.allFinite() &&
                      d.dot(G) > 0;
        if (!newton) {
            d = G;
        }
        double t = 1;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
            std::vector<double> trial = w;
            for (Eigen::Index k = 0; k < n; ++k) {
                trial[static_cast<std::size_t>(fi[static_cast<std::size_t>(k)])] += t * d(k);
            }
            if (!(min_margin(tri, trial) > 0)) {
                continue;
            }
            const double Vt = total_volume(tri, trial);
            const auto gt = volume_gradient(tri, trial);
            const double gnt = detail::inf_norm(gt);
            const bool gain = Vt > V;
            // below rounding of the volume, progress is measured by the gradient
            const bool flat = Vt >= V - 4 * eps * std::abs(V) && gnt < gn;
            if (gain || flat) {
                w = trial;
                V = std::max(Vt, V);
                g = gt;
                gn = gnt;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            break;
        }
        (newton ? rep.newton_steps : rep.gradient_steps) += 1;
        rep.volume_history.push_back(V);
    }
    AngleStructure s = angles_from_w(tri, w);
    rep.total_volume = total_volume(tri, s);
    for (std::size_t k = 0; k < tri.layers.size(); ++k) {
        const auto& a = s.angles[k];
        for (int c = 0; c < tri.layers[k].tetrahedra; ++c) {
            rep.per_tet_volumes.push_back(tet_volume(a.x, a.y, a.z));
        }
    }
    rep.gradient_inf_norm = gn;
    rep.iterations = it;
    rep.converged = gn < tol;
    rep.degeneracy_hint = detail::degeneracy_hint(tri, s, rep.min_angle);
    const auto bounds = volume_bounds(tri);
    rep.lower_bound = bounds.lower;
    rep.upper_bound = bounds.upper;
    rep.certificate_volume = bounds.certificate_volume;
    return {s, rep};
}

/** @brief As ascend_volume, but throws ENotConverged when the gradient stays above tol */
inline std::pair<AngleStructure, VolumeReport> maximize_volume(const LayeredTriangulation& tri,
                                                               const AngleStructure& w0,
                                                               double tol = 1e-12,
                                                               int max_iter = 200)
{
    auto [s, rep] = ascend_volume(tri, w0, tol, max_iter);
    const double gn = rep.gradient_inf_norm;
    const int it = rep.iterations;
    if (!rep.converged) {
        throw Error(ErrorCode::NotConverged,
                    "gradient norm " + std::to_string(gn) + " after " + std::to_string(it) +
                        " iterations; smallest angle at " + rep.degeneracy_hint);
    }
    return {s, rep};
}

}  // namespace pleat
