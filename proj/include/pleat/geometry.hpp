#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <deque>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "pleat/angles.hpp"
#include "pleat/error.hpp"
#include "pleat/triangulation.hpp"

namespace pleat
{

using cplx = std::complex<double>;

/** @brief Third vertex s of the triangle (0, 1, s) with angles x at 0, y at 1, z at s */
inline cplx triangle_shape(double x, double y, double z)
{
    if (!(x > 0 && y > 0 && z > 0)) {
        throw Error(ErrorCode::Degenerate, "triangle with a non-positive angle");
    }
    return std::sin(y) / std::sin(z) * std::polar(1.0, x);
}

struct HolonomyResidual {
    std::string generator;
    double residual{};
    /** Rotation-scaling part of the holonomy */
    cplx ratio{1.0, 0.0};
};

/** Translation lattice of one cusp torus */
struct CuspPeriods {
    int component{};
    cplx horizontal;
    cplx vertical;
    /** |alpha - 1| of the two generators */
    double horizontal_rotation{};
    double vertical_rotation{};
};

/** @brief Planar realisation of one fundamental domain of the cusp tessellation */
struct CuspDevelopment {
    /** Corner coordinates of every cusp triangle */
    std::vector<std::array<cplx, 3>> positions;
    /** Seam crossings from the root to each triangle (bundles) */
    std::vector<int> sheet;
    /** Corner angles of every cusp triangle */
    std::vector<std::array<double, 3>> corner_angles;
    std::vector<CuspPeriods> periods;
    std::vector<HolonomyResidual> residuals;
    /** Smallest signed area over the developed triangles */
    double min_signed_area{};
};

namespace detail
{
inline std::vector<int> layer_position(const LayeredTriangulation& tri)
{
    int mx = 0;
    for (const auto& l : tri.layers) {
        mx = std::max(mx, l.index);
    }
    std::vector<int> pos(static_cast<std::size_t>(mx + 1), -1);
    for (std::size_t k = 0; k < tri.layers.size(); ++k) {
        pos[static_cast<std::size_t>(tri.layers[k].index)] = static_cast<int>(k);
    }
    return pos;
}

inline std::vector<std::array<double, 3>> corner_angles(const LayeredTriangulation& tri,
                                                        const AngleStructure& s)
{
    const auto pos = layer_position(tri);
    std::vector<std::array<double, 3>> out;
    for (const auto& T : tri.cusp.triangles) {
        const auto& a = s.angles[static_cast<std::size_t>(pos[static_cast<std::size_t>(T.layer)])];
        out.push_back({a[T.labels[0]], a[T.labels[1]], a[T.labels[2]]});
    }
    return out;
}

// Complete a triangle from two known corners
inline void complete(const std::array<double, 3>& ang, std::array<cplx, 3>& z,
                     const std::array<bool, 3>& known)
{
    int miss = 0;
    while (known[static_cast<std::size_t>(miss)]) {
        ++miss;
    }
    const int i = (miss + 1) % 3;
    const int j = (miss + 2) % 3;
    const auto ui = static_cast<std::size_t>(i);
    const auto uj = static_cast<std::size_t>(j);
    const auto um = static_cast<std::size_t>(miss);
    z[um] = z[ui] + (z[uj] - z[ui]) * (std::sin(ang[uj]) / std::sin(ang[um])) * std::polar(1.0, ang[ui]);
}

inline double signed_area(const std::array<cplx, 3>& z)
{
    return 0.5 * std::imag(std::conj(z[1] - z[0]) * (z[2] - z[0]));
}

// Place the neighbour across side s of a placed triangle
inline std::array<cplx, 3> place_across(const CuspGraph& g, const std::vector<std::array<double, 3>>& ang,
                                        int t, int s, const std::array<cplx, 3>& zt)
{
    const auto& sd = g.adj[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
    std::array<cplx, 3> zu{};
    std::array<bool, 3> known{false, false, false};
    for (int c = 0; c < 3; ++c) {
        const int m = sd.corner_map[static_cast<std::size_t>(c)];
        if (m >= 0) {
            zu[static_cast<std::size_t>(m)] = zt[static_cast<std::size_t>(c)];
            known[static_cast<std::size_t>(m)] = true;
        }
    }
    complete(ang[static_cast<std::size_t>(sd.tri)], zu, known);
    return zu;
}

// Similarity taking the placement `placed` of the neighbour to the one induced from t
inline std::pair<cplx, cplx> gluing_similarity(const CuspGraph& g, int t, int s,
                                               const std::array<cplx, 3>& zt,
                                               const std::array<cplx, 3>& placed)
{
    const auto& sd = g.adj[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
    std::array<int, 2> cs{};
    int k = 0;
    for (int c = 0; c < 3; ++c) {
        if (c != s) {
            cs[static_cast<std::size_t>(k++)] = c;
        }
    }
    const cplx A = zt[static_cast<std::size_t>(cs[0])];
    const cplx B = zt[static_cast<std::size_t>(cs[1])];
    const cplx Ap = placed[static_cast<std::size_t>(sd.corner_map[static_cast<std::size_t>(cs[0])])];
    const cplx Bp = placed[static_cast<std::size_t>(sd.corner_map[static_cast<std::size_t>(cs[1])])];
    const cplx alpha = (B - A) / (Bp - Ap);
    return {alpha, A - alpha * Ap};
}

/** Closed loop of the development: holonomy z -> alpha z + tau, seam count v */
struct Cycle {
    int component{};
    cplx alpha;
    cplx tau;
    int v{};
};

inline cplx log_ratio(cplx a) { return std::log(a); }

// Real Euclid on collinear translations, carrying log alpha along
inline std::pair<cplx, cplx> collinear_gcd(std::vector<std::pair<cplx, cplx>> items, double tol)
{
    std::pair<cplx, cplx> g{0.0, 0.0};
    for (auto it : items) {
        if (std::abs(it.first) < tol) {
            continue;
        }
        if (std::abs(g.first) < tol) {
            g = it;
            continue;
        }
        auto a = g, b = it;
        for (int guard = 0; guard < 200 && std::abs(b.first) >= tol; ++guard) {
            const double q = std::round(std::real(a.first / b.first));
            std::pair<cplx, cplx> r{a.first - q * b.first, a.second - q * b.second};
            a = b;
            b = r;
        }
        g = a;
    }
    return g;
}

// Denominator of a continued-fraction approximation of x within tol
inline long long denominator(double x, double tol, long long max_den = 100000)
{
    long long h0 = 1, h1 = 0, k0 = 0, k1 = 1;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(r);
        const auto ai = static_cast<long long>(a);
        const long long h2 = ai * h0 + h1, k2 = ai * k0 + k1;
        h1 = h0;
        h0 = h2;
        k1 = k0;
        k0 = k2;
        if (k0 > max_den) {
            return k1;
        }
        if (std::abs(x - static_cast<double>(h0) / static_cast<double>(k0)) < tol) {
            return k0;
        }
        const double f = r - a;
        if (f < 1e-15) {
            return k0;
        }
        r = 1 / f;
    }
    return k0;
}

// Reduced basis of the rank-2 lattice spanned by translations, carrying log alpha along
inline std::array<std::pair<cplx, cplx>, 2> lattice_basis(const std::vector<std::pair<cplx, cplx>>& v,
                                                          double tol)
{
    using Item = std::pair<cplx, cplx>;
    auto len = [](const Item& p) { return std::abs(p.first); };
    std::array<Item, 2> out{};
    std::vector<Item> gens;
    for (const auto& x : v) {
        if (len(x) >= tol) {
            gens.push_back(x);
        }
    }
    if (gens.empty()) {
        return out;
    }
    const cplx B1 = gens[0].first;
    std::size_t second = 0;
    for (std::size_t k = 1; k < gens.size(); ++k) {
        if (std::abs(std::imag(gens[k].first / B1)) * std::abs(B1) >= tol) {
            second = k;
            break;
        }
    }
    if (second == 0) {
        out[0] = collinear_gcd(gens, tol);
        return out;
    }
    const cplx B2 = gens[second].first;
    const double det = std::imag(std::conj(B1) * B2);
    std::vector<std::array<double, 2>> coord;
    long long D = 1;
    const double ctol = tol / std::max(std::abs(B1), std::abs(B2));
    for (const auto& gItem : gens) {
        const cplx x = gItem.first;
        const double m = std::imag(std::conj(x) * B2) / det;
        const double n = std::imag(std::conj(B1) * x) / det;
        coord.push_back({m, n});
        D = std::lcm(D, denominator(m, ctol));
        D = std::lcm(D, denominator(n, ctol));
    }
    struct Col {
        std::array<long long, 2> c;
        Item item;
    };
    std::vector<Col> cols;
    for (std::size_t k = 0; k < gens.size(); ++k) {
        cols.push_back({{std::llround(coord[k][0] * static_cast<double>(D)),
                         std::llround(coord[k][1] * static_cast<double>(D))},
                        gens[k]});
    }
    auto reduce = [](std::vector<Col>& cs, int axis) {
        // Euclid on one coordinate; returns the column holding the gcd
        for (int guard = 0; guard < 10000; ++guard) {
            Col* piv = nullptr;
            for (auto& c : cs) {
                if (c.c[static_cast<std::size_t>(axis)] != 0 &&
                    (piv == nullptr || std::llabs(c.c[static_cast<std::size_t>(axis)]) <
                                           std::llabs(piv->c[static_cast<std::size_t>(axis)]))) {
                    piv = &c;
                }
            }
            if (piv == nullptr) {
                return Col{};
            }
            bool changed = false;
            for (auto& c : cs) {
                if (&c == piv || c.c[static_cast<std::size_t>(axis)] == 0) {
                    continue;
                }
                const long long q = c.c[static_cast<std::size_t>(axis)] / piv->c[static_cast<std::size_t>(axis)];
                c.c[0] -= q * piv->c[0];
                c.c[1] -= q * piv->c[1];
                c.item.first -= static_cast<double>(q) * piv->item.first;
                c.item.second -= static_cast<double>(q) * piv->item.second;
                changed = true;
            }
            if (!changed) {
                Col res = *piv;
                cs.erase(cs.begin() + (piv - cs.data()));
                return res;
            }
        }
        return Col{};
    };
    const Col first = reduce(cols, 0);
    const Col last = reduce(cols, 1);
    std::array<Item, 2> basis{first.item, last.item};
    for (int guard = 0; guard < 200; ++guard) {
        if (len(basis[1]) < len(basis[0])) {
            std::swap(basis[0], basis[1]);
        }
        const double r = std::round(std::real(basis[1].first * std::conj(basis[0].first)) /
                                    std::norm(basis[0].first));
        if (r == 0) {
            break;
        }
        basis[1] = {basis[1].first - r * basis[0].first, basis[1].second - r * basis[0].second};
    }
    return basis;
}
}  // namespace detail

/**
 * @brief Develop the cusp tessellation into the plane.
 *
 * Each connected component is laid out by a breadth-first walk from its first
 * triangle; the first triangle overall has corners 0 and 1 at 0 and 1.
 */
inline CuspDevelopment develop_cusp(const LayeredTriangulation& tri, const AngleStructure& s)
{
    const auto& g = tri.cusp;
    CuspDevelopment dev;
    dev.corner_angles = detail::corner_angles(tri, s);
    for (const auto& a : dev.corner_angles) {
        if (!(a[0] > 0 && a[1] > 0 && a[2] > 0)) {
            throw Error(ErrorCode::Degenerate, "cusp triangle with a non-positive angle");
        }
    }
    const std::size_t n = g.triangles.size();
    dev.positions.assign(n, {});
    dev.sheet.assign(n, 0);
    std::vector<bool> placed(n, false);
    std::vector<std::array<bool, 3>> tree(n, {false, false, false});
    std::vector<detail::Cycle> cycles;
    double offset = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (placed[root]) {
            continue;
        }
        std::array<cplx, 3> z{cplx(offset, 0), cplx(offset + 1, 0), cplx{}};
        detail::complete(dev.corner_angles[root], z, {true, true, false});
        dev.positions[root] = z;
        placed[root] = true;
        std::deque<int> queue{static_cast<int>(root)};
        while (!queue.empty()) {
            const int t = queue.front();
            queue.pop_front();
            for (int sd = 0; sd < 3; ++sd) {
                const auto& side = g.adj[static_cast<std::size_t>(t)][static_cast<std::size_t>(sd)];
                const auto u = static_cast<std::size_t>(side.tri);
                if (!placed[u]) {
                    dev.positions[u] = detail::place_across(g, dev.corner_angles, t, sd,
                                                            dev.positions[static_cast<std::size_t>(t)]);
                    dev.sheet[u] = dev.sheet[static_cast<std::size_t>(t)] + side.vshift;
                    placed[u] = true;
                    tree[static_cast<std::size_t>(t)][static_cast<std::size_t>(sd)] = true;
                    tree[u][static_cast<std::size_t>(side.side)] = true;
                    queue.push_back(side.tri);
                }
            }
        }
        offset += 10;
    }
    // every gluing outside the spanning forest closes a loop
    for (std::size_t t = 0; t < n; ++t) {
        for (int sd = 0; sd < 3; ++sd) {
            const auto& side = g.adj[t][static_cast<std::size_t>(sd)];
            if (tree[t][static_cast<std::size_t>(sd)]) {
                continue;
            }
            if (3 * side.tri + side.side < static_cast<int>(3 * t) + sd) {
                continue;
            }
            auto [alpha, tau] = detail::gluing_similarity(g, static_cast<int>(t), sd, dev.positions[t],
                                                          dev.positions[static_cast<std::size_t>(side.tri)]);
            detail::Cycle c;
            c.component = g.triangles[t].component;
            c.alpha = alpha;
            c.tau = tau;
            c.v = dev.sheet[t] + side.vshift - dev.sheet[static_cast<std::size_t>(side.tri)];
            cycles.push_back(c);
            dev.residuals.push_back({"cycle[" + std::to_string(cycles.size() - 1) + "]",
                                     std::abs(alpha - 1.0), alpha});
        }
    }
    dev.min_signed_area = INFINITY;
    for (const auto& z : dev.positions) {
        dev.min_signed_area = std::min(dev.min_signed_area, detail::signed_area(z));
    }
    // vertex loops: product of side-length ratios and rotations around each cusp vertex
    std::vector<cplx> loop(static_cast<std::size_t>(g.vertices), cplx(1.0, 0.0));
    std::vector<double> turn(static_cast<std::size_t>(g.vertices), 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        const auto& a = dev.corner_angles[t];
        for (int c = 0; c < 3; ++c) {
            const auto v = static_cast<std::size_t>(g.corner_vertex[t][static_cast<std::size_t>(c)]);
            loop[v] *= std::sin(a[static_cast<std::size_t>((c + 1) % 3)]) /
                       std::sin(a[static_cast<std::size_t>((c + 2) % 3)]);
            turn[v] += a[static_cast<std::size_t>(c)];
        }
    }
    for (std::size_t v = 0; v < loop.size(); ++v) {
        const cplx alpha = loop[v] * std::polar(1.0, turn[v]);
        dev.residuals.push_back({"vertex[" + std::to_string(v) + "]", std::abs(alpha - 1.0), alpha});
    }
    // translation lattice per component
    double scale = 0;
    for (const auto& z : dev.positions) {
        for (int c = 0; c < 3; ++c) {
            scale = std::max(scale, std::abs(z[static_cast<std::size_t>(c)] - z[0]));
        }
    }
    const double tol = 1e-7 * std::max(scale, 1.0);
    for (int comp = 0; comp < g.components; ++comp) {
        CuspPeriods P;
        P.component = comp;
        std::vector<std::pair<cplx, cplx>> flat, all;
        std::vector<std::pair<std::pair<cplx, cplx>, int>> tagged;
        for (const auto& c : cycles) {
            if (c.component != comp) {
                continue;
            }
            const std::pair<cplx, cplx> item{c.tau, detail::log_ratio(c.alpha)};
            all.push_back(item);
            if (c.v == 0) {
                flat.push_back(item);
            } else {
                tagged.push_back({item, c.v});
            }
        }
        std::pair<cplx, cplx> h{}, vv{};
        if (tri.kind != Kind::TwoBridge && !tagged.empty()) {
            h = detail::collinear_gcd(flat, tol);
            // integer Euclid on the seam count
            auto a = tagged.front();
            for (std::size_t k = 1; k < tagged.size(); ++k) {
                auto b = tagged[k];
                while (b.second != 0) {
                    const int q = a.second / b.second;
                    decltype(a) r{{a.first.first - static_cast<double>(q) * b.first.first,
                                   a.first.second - static_cast<double>(q) * b.first.second},
                                  a.second - q * b.second};
                    a = b;
                    b = r;
                }
                if (std::abs(b.first.first) >= tol) {
                    flat.push_back(b.first);
                    h = detail::collinear_gcd(flat, tol);
                }
            }
            if (a.second < 0) {
                a = {{-a.first.first, -a.first.second}, -a.second};
            }
            vv = a.first;
            if (std::abs(h.first) > tol) {
                const double q = std::round(std::real(vv.first / h.first));
                vv = {vv.first - q * h.first, vv.second - q * h.second};
            }
        } else {
            auto basis = detail::lattice_basis(all, tol);
            h = basis[0];
            vv = basis[1];
        }
        P.horizontal = h.first;
        P.vertical = vv.first;
        P.horizontal_rotation = std::abs(std::exp(h.second) - 1.0);
        P.vertical_rotation = std::abs(std::exp(vv.second) - 1.0);
        dev.residuals.push_back({"period_h[" + std::to_string(comp) + "]", P.horizontal_rotation,
                                 std::exp(h.second)});
        dev.residuals.push_back({"period_v[" + std::to_string(comp) + "]", P.vertical_rotation,
                                 std::exp(vv.second)});
        dev.periods.push_back(P);
    }
    // hinge-level curves: the loop of the band of layers j-1, j, j+1 in the cover unrolling the seam
    if (tri.kind != Kind::TwoBridge) {
        const int m = tri.size();
        for (const auto& l : tri.layers) {
            if (!l.hinge) {
                continue;
            }
            const int j = l.index;
            std::map<std::pair<int, int>, std::array<cplx, 3>> pos;
            std::map<std::pair<int, int>, std::array<bool, 3>> used;
            auto global = [&](int t, int sh) {
                return g.triangles[static_cast<std::size_t>(t)].layer + m * sh;
            };
            int root = -1;
            for (std::size_t t = 0; t < n; ++t) {
                if (g.triangles[t].layer == j) {
                    root = static_cast<int>(t);
                    break;
                }
            }
            std::array<cplx, 3> z0{cplx(0, 0), cplx(1, 0), cplx{}};
            detail::complete(dev.corner_angles[static_cast<std::size_t>(root)], z0, {true, true, false});
            pos[{root, 0}] = z0;
            std::deque<std::pair<int, int>> q{{root, 0}};
            std::vector<cplx> loops;
            while (!q.empty()) {
                auto [t, sh] = q.front();
                q.pop_front();
                for (int sd = 0; sd < 3; ++sd) {
                    const auto& side = g.adj[static_cast<std::size_t>(t)][static_cast<std::size_t>(sd)];
                    const int sh2 = sh + side.vshift;
                    const int gl = global(side.tri, sh2);
                    if (gl < j - 1 || gl > j + 1) {
                        continue;
                    }
                    auto& ut = used[{t, sh}];
                    if (ut[static_cast<std::size_t>(sd)]) {
                        continue;
                    }
                    ut[static_cast<std::size_t>(sd)] = true;
                    used[{side.tri, sh2}][static_cast<std::size_t>(side.side)] = true;
                    const auto key = std::make_pair(side.tri, sh2);
                    auto it = pos.find(key);
                    if (it == pos.end()) {
                        pos[key] = detail::place_across(g, dev.corner_angles, t, sd, pos[{t, sh}]);
                        q.push_back(key);
                    } else {
                        loops.push_back(detail::gluing_similarity(g, t, sd, pos[{t, sh}], it->second).first);
                    }
                }
            }
            for (std::size_t k = 0; k < loops.size(); ++k) {
                std::string name = "beta[" + std::to_string(j) + "]";
                if (loops.size() > 1) {
                    name += "[" + std::to_string(k) + "]";
                }
                dev.residuals.push_back({name, std::abs(loops[k] - 1.0), loops[k]});
            }
        }
    }
    return dev;
}

inline std::vector<HolonomyResidual> holonomy_residuals(const CuspDevelopment& dev)
{
    return dev.residuals;
}

inline double max_residual(const CuspDevelopment& dev)
{
    double r = 0;
    for (const auto& h : dev.residuals) {
        r = std::max(r, h.residual);
    }
    return r;
}

/** Local picture of one fan: node lifts, the chain u_{-1}..u_{k+1} and the hinge triangle */
struct FanChain {
    /** Syllable index in the word and its length k */
    int syllable{};
    int length{};
    Letter letter{Letter::R};
    int hinge_layer{};
    cplx node_minus, node_plus;
    /** u_{-1}, u_0, ..., u_{k+1} */
    std::vector<cplx> u;
    /** Edge class of the node */
    int node_class{-1};
};

struct FanDiagnostic {
    int syllable{};
    int hinge_layer{};
    double Q{}, P{}, T{};
    double margin{};
    /** Largest of Q, P, T */
    double scale{};
};

namespace detail
{
// Continue around the vertex at corner c of triangle t, towards the corner `toward`
inline void rotate_about(const CuspGraph& g, const std::vector<std::array<double, 3>>& ang, int& t,
                         std::array<cplx, 3>& z, int& c, int& toward)
{
    // the side through c and `toward` is opposite the third corner
    const int third = 3 - c - toward;
    const auto& sd = g.adj[static_cast<std::size_t>(t)][static_cast<std::size_t>(third)];
    auto zu = place_across(g, ang, t, third, z);
    const int c2 = sd.corner_map[static_cast<std::size_t>(c)];
    const int shared = sd.corner_map[static_cast<std::size_t>(toward)];
    t = sd.tri;
    z = zu;
    c = c2;
    toward = 3 - c2 - shared;
}
}  // namespace detail

/**
 * @brief Develop the fans of every syllable that starts at a hinge.
 *
 * The hinge triangle G pointing up has its apex (z corner) at u_1, the node of the
 * next syllable at n_+ and u_0 at its remaining corner; the neighbour of G across
 * the side u_0 u_1 carries the previous lift n_- of the node.
 */
inline std::vector<FanChain> fan_chains(const LayeredTriangulation& tri, const AngleStructure& s)
{
    const auto& g = tri.cusp;
    const auto ang = detail::corner_angles(tri, s);
    std::vector<FanChain> out;
    const auto syl = detail::group(tri.letters);
    // starting letter position of each syllable
    std::vector<int> start;
    int acc = 0;
    for (const auto& sy : syl) {
        start.push_back(acc);
        acc += sy.exponent;
    }
    for (std::size_t si = 0; si < syl.size(); ++si) {
        const int j = start[si];
        bool isHinge = false;
        for (const auto& l : tri.layers) {
            if (l.index == j && l.hinge) {
                isHinge = true;
            }
        }
        if (!isHinge) {
            continue;
        }
        const Letter letter = syl[si].letter;
        const Label nodeLabel = letter == Letter::R ? Label::x : Label::y;
        for (std::size_t t0 = 0; t0 < g.triangles.size(); ++t0) {
            const auto& G = g.triangles[t0];
            if (G.layer != j || !G.apex_up) {
                continue;
            }
            int apex = -1, node = -1;
            for (int c = 0; c < 3; ++c) {
                if (G.labels[static_cast<std::size_t>(c)] == Label::z) {
                    apex = c;
                }
                if (G.labels[static_cast<std::size_t>(c)] == nodeLabel) {
                    node = c;
                }
            }
            const int other = 3 - apex - node;
            FanChain fc;
            fc.syllable = static_cast<int>(si);
            fc.length = syl[si].exponent;
            fc.letter = letter;
            fc.hinge_layer = j;
            fc.node_class = g.vertex_class[static_cast<std::size_t>(
                g.corner_vertex[t0][static_cast<std::size_t>(node)])];
            std::array<cplx, 3> z{};
            z[static_cast<std::size_t>(node)] = 0;
            z[static_cast<std::size_t>(other)] = 1;
            detail::complete(ang[t0], z,
                             {node == 0 || other == 0, node == 1 || other == 1, node == 2 || other == 2});
            fc.node_plus = z[static_cast<std::size_t>(node)];
            // n_- across the side u_0 u_1, opposite the node corner; u_{-1} follows around n_-
            {
                auto zf = detail::place_across(g, ang, static_cast<int>(t0), node, z);
                const auto& sd = g.adj[t0][static_cast<std::size_t>(node)];
                const int u0 = sd.corner_map[static_cast<std::size_t>(other)];
                int c = 3 - sd.corner_map[static_cast<std::size_t>(apex)] - u0;
                fc.node_minus = zf[static_cast<std::size_t>(c)];
                int t = sd.tri, toward = u0;
                detail::rotate_about(g, ang, t, zf, c, toward);
                fc.u.push_back(zf[static_cast<std::size_t>(toward)]);
            }
            fc.u.push_back(z[static_cast<std::size_t>(other)]);
            fc.u.push_back(z[static_cast<std::size_t>(apex)]);
            {
                int t = static_cast<int>(t0), c = node, toward = apex;
                auto zz = z;
                for (int k = 1; k <= fc.length; ++k) {
                    detail::rotate_about(g, ang, t, zz, c, toward);
                    fc.u.push_back(zz[static_cast<std::size_t>(toward)]);
                }
            }
            out.push_back(fc);
        }
    }
    return out;
}

/** @brief Segment lengths Q, P, T at the start of every fan */
inline std::vector<FanDiagnostic> fan_diagnostics(const std::vector<FanChain>& fans)
{
    std::vector<FanDiagnostic> out;
    for (const auto& f : fans) {
        FanDiagnostic d;
        d.syllable = f.syllable;
        d.hinge_layer = f.hinge_layer;
        const cplx u0 = f.u[1], u1 = f.u[2];
        d.P = std::abs(u1 - u0);
        d.T = std::abs(u1 - f.node_plus);
        d.Q = std::abs(u0 - f.node_minus);
        d.margin = d.Q - (d.P + d.T);
        d.scale = std::max({d.Q, d.P, d.T});
        out.push_back(d);
    }
    return out;
}

inline std::vector<FanDiagnostic> fan_diagnostics(const LayeredTriangulation& tri,
                                                  const AngleStructure& s)
{
    return fan_diagnostics(fan_chains(tri, s));
}

struct GeodesicLength {
    int syllable{};
    /** Complex length, Re >= 0 and Im in (-pi, pi] */
    cplx length;
    /** Largest |M(u_s) - u_{s+1}| relative to the node distance */
    double orbit_residual{};
};

/** Fold a complex length to Re >= 0 and Im in (-pi, pi] */
inline cplx fold_length(cplx l)
{
    if (l.real() < 0 || (l.real() == 0 && l.imag() < 0)) {
        l = -l;
    }
    const double twoPi = 2 * std::numbers::pi;
    double im = std::remainder(l.imag(), twoPi);
    if (im <= -std::numbers::pi) {
        im += twoPi;
    }
    return {l.real(), im};
}

/**
 * @brief Complex length of the loxodromic map sending n_- to the cusp point,
 * the cusp point to n_+ and u_0 to u_1, for every fan.
 */
inline std::vector<GeodesicLength> geodesic_complex_lengths(const std::vector<FanChain>& fans)
{
    std::vector<GeodesicLength> out;
    for (const auto& f : fans) {
        const cplx np = f.node_plus, nm = f.node_minus;
        if (std::abs(np - nm) < 1e-12 * (std::abs(np) + std::abs(nm) + 1)) {
            throw Error(ErrorCode::Degenerate, "fan nodes coincide");
        }
        const cplx u0 = f.u[1], u1 = f.u[2];
        // M(z) = (n_+ z + beta) / (z - n_-)
        const cplx beta = u1 * (u0 - nm) - np * u0;
        const cplx det = -np * nm - beta;
        const cplx tr = np - nm;
        const cplx half = tr / (2.0 * std::sqrt(det));
        GeodesicLength gl;
        gl.syllable = f.syllable;
        gl.length = fold_length(2.0 * std::acosh(half));
        double res = 0;
        for (std::size_t k = 0; k + 1 < f.u.size(); ++k) {
            const cplx img = (np * f.u[k] + beta) / (f.u[k] - nm);
            res = std::max(res, std::abs(img - f.u[k + 1]) / std::abs(np - nm));
        }
        gl.orbit_residual = res;
        out.push_back(gl);
    }
    return out;
}

/** @brief Fixed point of the R^N L^M system */
struct RNLMSolution {
    int N{}, M{};
    cplx a, a_prime, b, b_prime;
    int iterations{};
    double residual{};
};

inline double rnlm_residual(const RNLMSolution& s)
{
    const cplx I(0, 1);
    const double r1 = std::abs(std::sin(s.a) - I * std::tan(s.b) * std::cos(s.b_prime));
    const double r2 = std::abs(std::sin(s.a_prime) + I * std::tan(s.b_prime) * std::cos(s.b));
    return std::max(r1, r2);
}

/** @brief Iterate the arcsine map from a = a' = 0 until it settles */
inline RNLMSolution solve_rnlm(int N, int M, double tol = 1e-15, int max_iter = 500)
{
    if (N < 4 || M < 4) {
        throw Error(ErrorCode::NoContraction, "R^N L^M iteration needs N, M >= 4");
    }
    const cplx I(0, 1);
    const double pi = std::numbers::pi;
    RNLMSolution s;
    s.N = N;
    s.M = M;
    cplx a = 0, ap = 0;
    double prev = INFINITY;
    int grow = 0;
    for (int it = 1; it <= max_iter; ++it) {
        const cplx b = (pi - 2.0 * a) / static_cast<double>(N);
        const cplx bp = (pi - 2.0 * ap) / static_cast<double>(M);
        const cplx na = std::asin(I * std::tan(b) * std::cos(bp));
        const cplx nap = std::asin(-I * std::tan(bp) * std::cos(b));
        const double step = std::max(std::abs(na - a), std::abs(nap - ap));
        a = na;
        ap = nap;
        s.iterations = it;
        if (!std::isfinite(step) || std::abs(a) > 1) {
            throw Error(ErrorCode::NoContraction, "R^N L^M iterates diverge");
        }
        grow = step > prev ? grow + 1 : 0;
        if (grow > 5) {
            throw Error(ErrorCode::NoContraction, "R^N L^M iteration does not contract");
        }
        prev = step;
        if (step <= tol) {
            break;
        }
    }
    s.a = a;
    s.a_prime = ap;
    s.b = (pi - 2.0 * a) / static_cast<double>(N);
    s.b_prime = (pi - 2.0 * ap) / static_cast<double>(M);
    s.residual = rnlm_residual(s);
    return s;
}

inline cplx cot(cplx z) { return std::cos(z) / std::sin(z); }

struct RNLMCrossCheck {
    /** Largest |u_s - cot(a + s b)| / |cot b| over the fan after normalisation */
    double vertex_mismatch{};
    /** Largest mismatch of the triangle ratios against sin^2(a + s b) / sin^2 b */
    double ratio_mismatch{};
    double parallelogram{};
    double congruence{};
    /** Smaller of the two acute angles of the developed hinge triangle */
    double pinched_angle{};
    double pinched_prediction{};
    cplx geodesic_length;
    cplx predicted_length;
    double length_mismatch{};
};

/**
 * @brief Compare a developed fan of R^N L^M with the analytic embedding.
 *
 * Fans of L syllables are matched against (a, b) and fans of R syllables against
 * (a', b'); with the orientation of develop_cusp the two families are exchanged
 * with respect to the letters of the word.
 */
inline RNLMCrossCheck rnlm_crosscheck(const RNLMSolution& sol, const FanChain& fan)
{
    RNLMCrossCheck r;
    const bool primed = fan.letter == Letter::R;
    const cplx a = primed ? sol.a_prime : sol.a;
    const cplx b = primed ? sol.b_prime : sol.b;
    const int N = primed ? sol.M : sol.N;
    const cplx cb = cot(b);
    // similarity with n_+ -> cot b, n_- -> -cot b
    const cplx k = 2.0 * cb / (fan.node_plus - fan.node_minus);
    auto f = [&](cplx z) { return k * (z - fan.node_minus) - cb; };
    for (std::size_t i = 0; i < fan.u.size(); ++i) {
        const double s = static_cast<double>(i) - 1;
        r.vertex_mismatch = std::max(r.vertex_mismatch, std::abs(f(fan.u[i]) - cot(a + s * b)) / std::abs(cb));
    }
    for (std::size_t i = 1; i + 1 < fan.u.size(); ++i) {
        const double s = static_cast<double>(i) - 1;
        const cplx A = a + s * b;
        const cplx ratio = (fan.u[i + 1] - fan.node_plus) / (fan.u[i + 1] - fan.u[i]);
        const cplx expect = std::sin(A) * std::sin(A) / (std::sin(b) * std::sin(b));
        r.ratio_mismatch = std::max(r.ratio_mismatch, std::abs(ratio - expect) / std::abs(expect));
    }
    r.parallelogram = std::abs(cot(a + static_cast<double>(N) * b) + cot(a));
    r.congruence = std::abs(cot(sol.a) / cot(sol.b) + cot(sol.a_prime) / cot(sol.b_prime));
    const cplx u0 = fan.u[1], u1 = fan.u[2];
    const double atNode = std::abs(std::arg((u1 - fan.node_plus) / (u0 - fan.node_plus)));
    const double atU0 = std::abs(std::arg((fan.node_plus - u0) / (u1 - u0)));
    r.pinched_angle = std::min(atNode, atU0);
    const double pi = std::numbers::pi;
    r.pinched_prediction = 2 * pi * pi * (std::pow(sol.N, -3.0) + std::pow(sol.M, -3.0));
    auto gl = geodesic_complex_lengths({fan});
    r.geodesic_length = gl.front().length;
    r.predicted_length = fold_length(2.0 * cplx(0, 1) * b);
    r.length_mismatch = std::abs(r.geodesic_length - r.predicted_length);
    return r;
}

}  // namespace pleat
