#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "pleat/error.hpp"
#include "pleat/farey.hpp"

namespace pleat
{

enum class Kind { TorusBundle, SphereBundle, TwoBridge };

inline const char* kind_name(Kind k)
{
    switch (k) {
        case Kind::TorusBundle:
            return "torus-bundle";
        case Kind::SphereBundle:
            return "sphere-bundle";
        case Kind::TwoBridge:
            return "two-bridge";
    }
    return "";
}

/** Dihedral angle label; opposite edges share a label, z is the apex label */
enum class Label : std::uint8_t { x = 0, y = 1, z = 2 };

inline char label_char(Label l) { return "xyz"[static_cast<int>(l)]; }

struct Layer {
    /** Index into w: 0..m-1 for bundles, 1..c-1 for bridges */
    int index{};
    bool hinge{};
    Letter before{};
    Letter after{};
    int tetrahedra{1};
    /** First or last layer of a two-bridge triangulation */
    bool boundary{};
};

struct Slot {
    int layer;
    Label label;
    int count;
    bool operator==(const Slot&) const = default;
};

struct EdgeClass {
    int id{};
    int valence{};
    std::vector<Slot> slots;
    /** Farey vertex visited by the walk; for clasp cores, the first of the merged ones */
    int farey_vertex{};
    /** 0 or 1 for the two lifts in the sphere model, 0 otherwise */
    int lift{};
    bool is_clasp_core{};
    /** Crossing index (1-based letter position) that introduced the slope; -1 if none */
    int crossing{-1};
};

namespace lattice
{
using Vec = std::array<std::int64_t, 2>;

inline Vec operator+(Vec a, Vec b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec operator-(Vec a, Vec b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec operator-(Vec a) { return {-a[0], -a[1]}; }
inline std::int64_t cross(Vec a, Vec b) { return a[0] * b[1] - a[1] * b[0]; }
inline bool parallel(Vec a, Vec b) { return cross(a, b) == 0; }

/** Vertex pair -> edge label. Vertices 0,1 span the bottom diagonal, 2,3 the top */
inline Label edge_label(int a, int b)
{
    if (a > b) {
        std::swap(a, b);
    }
    if ((a == 0 && b == 1) || (a == 2 && b == 3)) {
        return Label::z;
    }
    if ((a == 0 && b == 2) || (a == 1 && b == 3)) {
        return Label::x;
    }
    return Label::y;
}

inline int edge_index(int a, int b)
{
    if (a > b) {
        std::swap(a, b);
    }
    static constexpr int table[4][4] = {
        {-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
    return table[a][b];
}

inline std::array<int, 2> edge_vertices(int e)
{
    static constexpr int table[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    return {table[e][0], table[e][1]};
}

/** One step of the oriented walk across the Farey tessellation */
struct WalkStep {
    Vec p, q, r, rprev;
    int id_p, id_q, id_r, id_rprev;
};

/**
 * Walk crossing Farey edges e_0, e_1, ...; letters[j] is the turn from e_j to e_{j+1}.
 * An R keeps the right end p, an L keeps the left end q. New vertex at step j gets id j+3.
 */
inline std::vector<WalkStep> farey_walk(const std::vector<Letter>& letters, int steps)
{
    std::vector<WalkStep> out;
    WalkStep s{{1, 0}, {0, 1}, {}, {1, -1}, 0, 1, -1, 2};
    const auto n = static_cast<int>(letters.size());
    for (int j = 0; j < steps; ++j) {
        Vec plus = s.p + s.q;
        s.r = parallel(plus, s.rprev) ? s.p - s.q : plus;
        s.id_r = j + 3;
        out.push_back(s);
        WalkStep nx = s;
        if (letters[static_cast<std::size_t>(j % n)] == Letter::R) {
            nx.q = s.r;
            nx.id_q = s.id_r;
            nx.rprev = s.q;
            nx.id_rprev = s.id_q;
        } else {
            nx.p = s.r;
            nx.id_p = s.id_r;
            nx.rprev = s.p;
            nx.id_rprev = s.id_p;
        }
        s = nx;
    }
    return out;
}

/** A walk step in its own frame, and the frame of the next step in its coordinates */
struct LocalStep {
    WalkStep step;
    /** columns are the next frame's basis vectors */
    Vec col0, col1;

    [[nodiscard]] Vec to_this(Vec x) const
    {
        return {col0[0] * x[0] + col1[0] * x[1], col0[1] * x[0] + col1[1] * x[1]};
    }
};

/**
 * As farey_walk, but each step is expressed in the positive frame spanned by
 * its current edges p, q, so coordinates stay bounded for long words.
 */
inline std::vector<LocalStep> farey_walk_local(const std::vector<Letter>& letters, int steps)
{
    std::vector<LocalStep> out;
    WalkStep s{{1, 0}, {0, 1}, {}, {1, -1}, 0, 1, -1, 2};
    const auto n = static_cast<int>(letters.size());
    for (int j = 0; j < steps; ++j) {
        Vec plus = s.p + s.q;
        s.r = parallel(plus, s.rprev) ? s.p - s.q : plus;
        s.id_r = j + 3;
        WalkStep nx = s;
        if (letters[static_cast<std::size_t>(j % n)] == Letter::R) {
            nx.q = s.r;
            nx.id_q = s.id_r;
            nx.rprev = s.q;
            nx.id_rprev = s.id_q;
        } else {
            nx.p = s.r;
            nx.id_p = s.id_r;
            nx.rprev = s.p;
            nx.id_rprev = s.id_p;
        }
        LocalStep ls{s, nx.p, nx.q};
        if (cross(nx.p, nx.q) < 0) {
            std::swap(ls.col0, ls.col1);
        }
        out.push_back(ls);
        // re-express in the new frame; the frame has determinant 1
        const Vec c0 = ls.col0, c1 = ls.col1;
        auto inv = [&](Vec x) {
            return Vec{c1[1] * x[0] - c1[0] * x[1], -c0[1] * x[0] + c0[0] * x[1]};
        };
        nx.p = inv(nx.p);
        nx.q = inv(nx.q);
        nx.rprev = inv(nx.rprev);
        s = nx;
    }
    return out;
}

/** Labelled parallelogram of the tetrahedron at a walk step */
inline std::array<Vec, 4> parallelogram(const WalkStep& s)
{
    if (parallel(s.p + s.q, s.rprev)) {
        return {Vec{0, 0}, s.p + s.q, s.p, s.q};
    }
    return {s.q, s.p, s.p + s.q, Vec{0, 0}};
}

struct Tet {
    int layer{};
    std::array<Vec, 4> v{};
    /** Farey vertex id of each of the six edges (edge_index order) */
    std::array<int, 6> vertex_id{};
};

enum class GlueType { Stack, Seam, Fold };

struct Glue {
    int tet{-1};
    /** perm[k] = vertex of the other tetrahedron matched to vertex k */
    std::array<int, 4> perm{};
    GlueType type{GlueType::Stack};
    /** +1 crossing the bundle seam upward, -1 downward */
    int vshift{};
};

enum class Model { Torus, Sphere };

/**
 * Ideal triangulation realised by lattice parallelograms in R^2 x R, modulo
 * Z^2 (torus) or the group generated by 2Z^2 and x -> -x (sphere).
 */
struct Complex {
    Model model{Model::Torus};
    std::vector<Tet> tets;
    std::vector<std::array<Glue, 4>> glue;
};

namespace detail
{
using Tri = std::array<Vec, 3>;

inline std::int64_t fdiv(std::int64_t n, std::int64_t d)
{
    return ::pleat::detail::floor_div(n, d);
}

// Canonical key of a labelled lattice triangle modulo the model group;
// `pos` receives the canonical position of each input point.
inline std::array<Vec, 3> canonical(Model model, const Tri& t, std::array<int, 3>& pos)
{
    std::array<Vec, 3> best{};
    bool have = false;
    const int nsign = model == Model::Torus ? 1 : 2;
    for (int si = 0; si < nsign; ++si) {
        const std::int64_t s = si == 0 ? 1 : -1;
        Tri u{};
        for (int k = 0; k < 3; ++k) {
            u[static_cast<std::size_t>(k)] = {s * t[static_cast<std::size_t>(k)][0],
                                              s * t[static_cast<std::size_t>(k)][1]};
        }
        Vec mn = *std::min_element(u.begin(), u.end());
        Vec shift{};
        if (model == Model::Torus) {
            shift = mn;
        } else {
            shift = {2 * fdiv(mn[0], 2), 2 * fdiv(mn[1], 2)};
        }
        for (auto& x : u) {
            x = x - shift;
        }
        std::array<Vec, 3> key = u;
        std::sort(key.begin(), key.end());
        if (!have || key < best) {
            best = key;
            have = true;
            for (int k = 0; k < 3; ++k) {
                pos[static_cast<std::size_t>(k)] = static_cast<int>(
                    std::find(key.begin(), key.end(), u[static_cast<std::size_t>(k)]) -
                    key.begin());
            }
        }
    }
    return best;
}

struct FaceRef {
    int tet;
    int face;
    std::array<int, 3> verts;  // tet vertices of the face, indexed by canonical position
};

inline std::array<int, 3> face_vertices(int face)
{
    std::array<int, 3> out{};
    int k = 0;
    for (int v = 0; v < 4; ++v) {
        if (v != face) {
            out[static_cast<std::size_t>(k++)] = v;
        }
    }
    return out;
}

inline std::array<int, 3> perm_from(const std::array<int, 3>& verts, const std::array<int, 3>& pos)
{
    std::array<int, 3> byPos{};
    for (int k = 0; k < 3; ++k) {
        byPos[static_cast<std::size_t>(pos[static_cast<std::size_t>(k)])] =
            verts[static_cast<std::size_t>(k)];
    }
    return byPos;
}

inline void set_glue(Complex& cx, int t, int face, int t2, const std::array<int, 3>& from,
                     const std::array<int, 3>& to, GlueType type, int vshift)
{
    Glue g;
    g.tet = t2;
    g.type = type;
    g.vshift = vshift;
    for (int k = 0; k < 3; ++k) {
        g.perm[static_cast<std::size_t>(from[static_cast<std::size_t>(k)])] =
            to[static_cast<std::size_t>(k)];
    }
    int other = 6;
    for (int k = 0; k < 3; ++k) {
        other -= to[static_cast<std::size_t>(k)];
    }
    g.perm[static_cast<std::size_t>(face)] = other;
    cx.glue[static_cast<std::size_t>(t)][static_cast<std::size_t>(face)] = g;
}

// Glue faces `upper` of the tets in `lo` to faces `lower` of tets `hi` (as positioned by hiPos)
inline void glue_layers(Complex& cx, const std::vector<int>& lo, const std::vector<int>& hi,
                        const std::vector<std::array<Vec, 4>>& hiPos, GlueType type)
{
    std::map<std::array<Vec, 3>, FaceRef> bottoms;
    for (std::size_t h = 0; h < hi.size(); ++h) {
        for (int face : {2, 3}) {
            auto fv = face_vertices(face);
            Tri t{hiPos[h][static_cast<std::size_t>(fv[0])],
                  hiPos[h][static_cast<std::size_t>(fv[1])],
                  hiPos[h][static_cast<std::size_t>(fv[2])]};
            std::array<int, 3> pos{};
            auto key = canonical(cx.model, t, pos);
            bottoms[key] = FaceRef{hi[h], face, perm_from(fv, pos)};
        }
    }
    for (int t : lo) {
        const auto& tet = cx.tets[static_cast<std::size_t>(t)];
        for (int face : {0, 1}) {
            auto fv = face_vertices(face);
            Tri tri{tet.v[static_cast<std::size_t>(fv[0])], tet.v[static_cast<std::size_t>(fv[1])],
                    tet.v[static_cast<std::size_t>(fv[2])]};
            std::array<int, 3> pos{};
            auto key = canonical(cx.model, tri, pos);
            auto it = bottoms.find(key);
            if (it == bottoms.end()) {
                throw Error(ErrorCode::Infeasible, "unmatched face in layered gluing");
            }
            const auto& ref = it->second;
            std::array<int, 3> to{};
            for (int k = 0; k < 3; ++k) {
                to[static_cast<std::size_t>(k)] =
                    ref.verts[static_cast<std::size_t>(pos[static_cast<std::size_t>(k)])];
            }
            const int vs = type == GlueType::Seam ? 1 : 0;
            set_glue(cx, t, face, ref.tet, fv, to, type, vs);
            set_glue(cx, ref.tet, ref.face, t, to, fv, type, -vs);
        }
    }
}

// Fold the faces of the given side (bottom faces {2,3} or top faces {0,1}) along edges of slope `peri`
inline void fold(Complex& cx, const std::vector<int>& layerTets, bool bottom, Vec peri)
{
    const std::array<int, 2> faces = bottom ? std::array<int, 2>{2, 3} : std::array<int, 2>{0, 1};
    std::map<std::array<Vec, 3>, FaceRef> index;
    for (int t : layerTets) {
        const auto& tet = cx.tets[static_cast<std::size_t>(t)];
        for (int face : faces) {
            auto fv = face_vertices(face);
            Tri tri{tet.v[static_cast<std::size_t>(fv[0])], tet.v[static_cast<std::size_t>(fv[1])],
                    tet.v[static_cast<std::size_t>(fv[2])]};
            std::array<int, 3> pos{};
            auto key = canonical(cx.model, tri, pos);
            index[key] = FaceRef{t, face, perm_from(fv, pos)};
        }
    }
    for (int t : layerTets) {
        const auto& tet = cx.tets[static_cast<std::size_t>(t)];
        for (int face : faces) {
            auto fv = face_vertices(face);
            // find the peripheral edge of this face
            int a = -1, b = -1, c = -1;
            for (int i = 0; i < 3 && a < 0; ++i) {
                int u = fv[static_cast<std::size_t>(i)];
                int v = fv[static_cast<std::size_t>((i + 1) % 3)];
                if (parallel(tet.v[static_cast<std::size_t>(v)] - tet.v[static_cast<std::size_t>(u)],
                             peri)) {
                    a = u;
                    b = v;
                    c = fv[static_cast<std::size_t>((i + 2) % 3)];
                }
            }
            if (a < 0) {
                throw Error(ErrorCode::Infeasible, "face without peripheral edge");
            }
            const Vec A = tet.v[static_cast<std::size_t>(a)];
            const Vec B = tet.v[static_cast<std::size_t>(b)];
            const Vec C = tet.v[static_cast<std::size_t>(c)];
            Tri refl{A, B, A + B - C};
            std::array<int, 3> pos{};
            auto key = canonical(cx.model, refl, pos);
            auto it = index.find(key);
            if (it == index.end()) {
                throw Error(ErrorCode::Infeasible, "unmatched face in clasp fold");
            }
            const auto& ref = it->second;
            if (ref.tet == t && ref.face == face) {
                throw Error(ErrorCode::Infeasible, "fold maps a face to itself");
            }
            std::array<int, 3> from{a, b, c};
            std::array<int, 3> to{};
            for (int k = 0; k < 3; ++k) {
                to[static_cast<std::size_t>(k)] =
                    ref.verts[static_cast<std::size_t>(pos[static_cast<std::size_t>(k)])];
            }
            set_glue(cx, t, face, ref.tet, from, to, GlueType::Fold, 0);
        }
    }
}

inline std::array<int, 6> edge_ids(const WalkStep& s, const std::array<Vec, 4>& v)
{
    std::array<int, 6> out{};
    for (int e = 0; e < 6; ++e) {
        auto [a, b] = edge_vertices(e);
        Vec d = v[static_cast<std::size_t>(b)] - v[static_cast<std::size_t>(a)];
        if (parallel(d, s.p)) {
            out[static_cast<std::size_t>(e)] = s.id_p;
        } else if (parallel(d, s.q)) {
            out[static_cast<std::size_t>(e)] = s.id_q;
        } else if (parallel(d, s.r)) {
            out[static_cast<std::size_t>(e)] = s.id_r;
        } else {
            out[static_cast<std::size_t>(e)] = s.id_rprev;
        }
    }
    return out;
}

inline std::array<Vec, 4> shifted(const std::array<Vec, 4>& v, Vec t)
{
    return {v[0] + t, v[1] + t, v[2] + t, v[3] + t};
}
}  // namespace detail

/** Layered complex of a cyclic word: layers 0..m-1 closed up by the monodromy */
inline Complex bundle_complex(const std::vector<Letter>& letters, Model model)
{
    const int m = static_cast<int>(letters.size());
    // the window starts late enough that the initial vertices have left the walk
    auto walk = farey_walk_local(letters, 3 * m + 1);
    Complex cx;
    cx.model = model;
    const int per = model == Model::Torus ? 1 : 2;
    std::vector<std::vector<int>> byLayer(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const auto& st = walk[static_cast<std::size_t>(2 * m + i)].step;
        auto v = parallelogram(st);
        auto ids = detail::edge_ids(st, v);
        for (int& id : ids) {
            id = ((id - 3) % m + m) % m;
        }
        for (int k = 0; k < per; ++k) {
            Tet t;
            t.layer = i;
            t.v = k == 0 ? v : detail::shifted(v, st.p);
            t.vertex_id = ids;
            byLayer[static_cast<std::size_t>(i)].push_back(static_cast<int>(cx.tets.size()));
            cx.tets.push_back(t);
        }
    }
    const auto& s0 = walk[static_cast<std::size_t>(2 * m)].step;
    const auto& sm = walk[static_cast<std::size_t>(3 * m)].step;
    if (s0.p != sm.p || s0.q != sm.q || s0.rprev != sm.rprev) {
        throw Error(ErrorCode::Infeasible, "walk is not periodic in its local frame");
    }
    cx.glue.assign(cx.tets.size(), {});
    // layer i+1 (or layer 0 one period up) in the frame of layer i
    auto below = [&](int i, int upper) {
        const auto& T = walk[static_cast<std::size_t>(2 * m + i)];
        std::vector<std::array<Vec, 4>> pos;
        for (int t : byLayer[static_cast<std::size_t>(upper)]) {
            const auto& tv = cx.tets[static_cast<std::size_t>(t)].v;
            pos.push_back({T.to_this(tv[0]), T.to_this(tv[1]), T.to_this(tv[2]), T.to_this(tv[3])});
        }
        return pos;
    };
    for (int i = 0; i + 1 < m; ++i) {
        detail::glue_layers(cx, byLayer[static_cast<std::size_t>(i)],
                            byLayer[static_cast<std::size_t>(i + 1)], below(i, i + 1), GlueType::Stack);
    }
    detail::glue_layers(cx, byLayer[static_cast<std::size_t>(m - 1)], byLayer[0], below(m - 1, 0),
                        GlueType::Seam);
    return cx;
}

/** Walk data of a two-bridge word: letters[j] is the (j+1)-th letter */
struct BridgeWalk {
    std::vector<WalkStep> steps;  // e_0 .. e_c
    int bottom_peripheral{};      // Farey id
    int top_peripheral{};
    std::array<int, 2> bottom_core{};
    std::array<int, 2> top_core{};
};

inline BridgeWalk bridge_walk(const std::vector<Letter>& letters)
{
    const int c = static_cast<int>(letters.size());
    BridgeWalk bw;
    // TODO: use farey_walk_local with the frame tracked mod 2 so edge_lift survives long words
    bw.steps = farey_walk(letters, c + 1);
    const auto& s0 = bw.steps[0];
    bw.bottom_core = {s0.id_p, s0.id_q};
    bw.bottom_peripheral = s0.id_r;
    const auto& sc = bw.steps[static_cast<std::size_t>(c)];
    bw.top_core = {sc.id_p, sc.id_q};
    bw.top_peripheral = sc.id_rprev;
    return bw;
}

inline Complex bridge_complex(const std::vector<Letter>& letters)
{
    const int c = static_cast<int>(letters.size());
    auto bw = bridge_walk(letters);
    Complex cx;
    cx.model = Model::Sphere;
    std::vector<std::vector<int>> byLayer(static_cast<std::size_t>(c));
    for (int i = 1; i <= c - 1; ++i) {
        const auto& st = bw.steps[static_cast<std::size_t>(i)];
        auto v = parallelogram(st);
        auto ids = detail::edge_ids(st, v);
        for (int k = 0; k < 2; ++k) {
            Tet t;
            t.layer = i;
            t.v = k == 0 ? v : detail::shifted(v, st.p);
            t.vertex_id = ids;
            byLayer[static_cast<std::size_t>(i)].push_back(static_cast<int>(cx.tets.size()));
            cx.tets.push_back(t);
        }
    }
    cx.glue.assign(cx.tets.size(), {});
    for (int i = 1; i + 1 <= c - 1; ++i) {
        std::vector<std::array<Vec, 4>> pos;
        for (int t : byLayer[static_cast<std::size_t>(i + 1)]) {
            pos.push_back(cx.tets[static_cast<std::size_t>(t)].v);
        }
        detail::glue_layers(cx, byLayer[static_cast<std::size_t>(i)],
                            byLayer[static_cast<std::size_t>(i + 1)], pos, GlueType::Stack);
    }
    detail::fold(cx, byLayer[1], true, bw.steps[0].r);
    const auto& last = bw.steps[static_cast<std::size_t>(c)];
    detail::fold(cx, byLayer[static_cast<std::size_t>(c - 1)], false, last.rprev);
    return cx;
}

/** Lift index (0/1) of a tetrahedron edge in the sphere model */
inline int edge_lift(const Tet& t, int e)
{
    auto [a, b] = edge_vertices(e);
    Vec X = t.v[static_cast<std::size_t>(a)];
    Vec s = t.v[static_cast<std::size_t>(b)] - X;
    auto enc = [](Vec u) {
        return static_cast<int>(((u[0] % 2) + 2) % 2) * 2 + static_cast<int>(((u[1] % 2) + 2) % 2);
    };
    int c1 = enc(X), c2 = enc(X + s);
    int lo = std::min(c1, c2);
    // the two classes of segments of slope s are {c, c+s}; label by the smallest code
    int next = 0;
    std::array<int, 4> cls{-1, -1, -1, -1};
    for (int code = 0; code < 4; ++code) {
        if (cls[static_cast<std::size_t>(code)] >= 0) {
            continue;
        }
        Vec u{code / 2, code % 2};
        int partner = enc(u + s);
        cls[static_cast<std::size_t>(code)] = next;
        cls[static_cast<std::size_t>(partner)] = next;
        ++next;
    }
    return cls[static_cast<std::size_t>(lo)];
}

}  // namespace lattice

/** One triangle of the cusp tessellation, i.e. a vertex link of a tetrahedron */
struct CuspTriangle {
    int tet{};
    int vertex{};
    int layer{};
    /** Tetrahedron vertices at the corners, counterclockwise */
    std::array<int, 3> corners{};
    std::array<Label, 3> labels{};
    /** Apex (the z corner) points up */
    bool apex_up{};
    bool hinge{};
    int component{};
};

struct CuspSide {
    int tri{-1};
    int side{-1};
    /** corner_map[c] = corner of the neighbour matched to corner c (-1 for the opposite corner) */
    std::array<int, 3> corner_map{-1, -1, -1};
    int vshift{};
    /** Hairpin turn through a clasp fold */
    bool fold{};
    /** Side lies on the top face of its tetrahedron */
    bool top{};
};

struct CuspGraph {
    std::vector<CuspTriangle> triangles;
    std::vector<std::array<CuspSide, 3>> adj;
    /** Cusp vertex id of each corner */
    std::vector<std::array<int, 3>> corner_vertex;
    /** Edge class of each cusp vertex */
    std::vector<int> vertex_class;
    int vertices{};
    int components{};
    /** Quotient by the hyperelliptic involution */
    bool quotient{};
    /** Triangles per layer across the horizontal period */
    int horizontal_period{};
    int vertical_period{};
};

struct LayeredTriangulation {
    Kind kind{Kind::TorusBundle};
    std::string word;
    /** letters[j] is the turn between the layers at w-indices j and j+1 (bundles: cyclic) */
    std::vector<Letter> letters;
    std::vector<Layer> layers;
    std::vector<EdgeClass> edge_classes;
    /** Lattice realisation used for the cusp graph */
    lattice::Complex complex;
    CuspGraph cusp;

    /** m for bundles, c for two-bridge */
    [[nodiscard]] int size() const { return static_cast<int>(letters.size()); }
    [[nodiscard]] int multiplicity() const { return kind == Kind::TorusBundle ? 1 : 2; }
    [[nodiscard]] int tetrahedra() const
    {
        return static_cast<int>(layers.size()) * multiplicity();
    }
    /** Length of the w vector */
    [[nodiscard]] int w_size() const
    {
        return kind == Kind::TwoBridge ? size() + 1 : size();
    }
    [[nodiscard]] int hinge_count() const
    {
        return static_cast<int>(std::count_if(layers.begin(), layers.end(),
                                              [](const Layer& l) { return l.hinge; }));
    }
};

namespace detail
{
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a)
    {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        }
    }
};

inline void add_slot(std::vector<Slot>& slots, int layer, Label l, int count)
{
    for (auto& s : slots) {
        if (s.layer == layer && s.label == l) {
            s.count += count;
            return;
        }
    }
    slots.push_back({layer, l, count});
}

inline void finish_class(EdgeClass& e)
{
    std::sort(e.slots.begin(), e.slots.end(), [](const Slot& a, const Slot& b) {
        return std::tie(a.layer, a.label) < std::tie(b.layer, b.label);
    });
    e.valence = 0;
    for (const auto& s : e.slots) {
        e.valence += s.count;
    }
}

// Per-lift slots of every Farey vertex over the given walk steps
inline std::map<int, std::vector<Slot>> fan_slots(const std::vector<lattice::WalkStep>& steps,
                                                  int first, int last, int layerOffset,
                                                  int idMod)
{
    std::map<int, std::vector<Slot>> out;
    auto key = [&](int id) { return idMod > 0 ? ((id - 3) % idMod + idMod) % idMod : id; };
    for (int i = first; i <= last; ++i) {
        const auto& s = steps[static_cast<std::size_t>(i)];
        const int layer = i - layerOffset;
        add_slot(out[key(s.id_p)], layer, Label::x, 2);
        add_slot(out[key(s.id_q)], layer, Label::y, 2);
        add_slot(out[key(s.id_r)], layer, Label::z, 1);
        add_slot(out[key(s.id_rprev)], layer, Label::z, 1);
    }
    return out;
}

inline std::array<int, 3> ccw_corners(const lattice::Tet& t, int k)
{
    using lattice::operator-;
    std::array<int, 3> js{};
    int n = 0;
    for (int j = 0; j < 4; ++j) {
        if (j != k) {
            js[static_cast<std::size_t>(n++)] = j;
        }
    }
    double sx = 0, sy = 0;
    std::array<double, 3> th{}, h{};
    for (int i = 0; i < 3; ++i) {
        auto d = t.v[static_cast<std::size_t>(js[static_cast<std::size_t>(i)])] -
                 t.v[static_cast<std::size_t>(k)];
        double len = std::hypot(static_cast<double>(d[0]), static_cast<double>(d[1]));
        sx += static_cast<double>(d[0]) / len;
        sy += static_cast<double>(d[1]) / len;
    }
    const double ref = std::atan2(sy, sx);
    for (int i = 0; i < 3; ++i) {
        const int j = js[static_cast<std::size_t>(i)];
        auto d = t.v[static_cast<std::size_t>(j)] - t.v[static_cast<std::size_t>(k)];
        double a = std::atan2(static_cast<double>(d[1]), static_cast<double>(d[0]));
        th[static_cast<std::size_t>(i)] = ref + std::remainder(a - ref, 2 * std::numbers::pi);
        const int lo = std::min(j, k), hi = std::max(j, k);
        h[static_cast<std::size_t>(i)] = (lo == 0 && hi == 1) ? 0.0 : (lo == 2 && hi == 3) ? 1.0 : 0.5;
    }
    const double area = (th[1] - th[0]) * (h[2] - h[0]) - (th[2] - th[0]) * (h[1] - h[0]);
    if (area < 0) {
        std::swap(js[1], js[2]);
    }
    return js;
}

inline int sigma(int k) { return k ^ 1; }
}  // namespace detail

/**
 * @brief Cusp tessellation from a lattice complex.
 *
 * With `quotient` set (bundles), triangles are taken modulo the hyperelliptic
 * involution, which swaps the endpoints of both diagonals of every tetrahedron.
 */
inline CuspGraph build_cusp_graph(const lattice::Complex& cx, const std::vector<Layer>& layers,
                                  bool quotient)
{
    CuspGraph g;
    g.quotient = quotient;
    std::map<std::pair<int, int>, int> index;
    auto hingeOf = [&](int layer) {
        for (const auto& l : layers) {
            if (l.index == layer) {
                return l.hinge;
            }
        }
        return false;
    };
    for (std::size_t t = 0; t < cx.tets.size(); ++t) {
        for (int k = 0; k < 4; ++k) {
            if (quotient && (k == 1 || k == 3)) {
                continue;
            }
            CuspTriangle tri;
            tri.tet = static_cast<int>(t);
            tri.vertex = k;
            tri.layer = cx.tets[t].layer;
            tri.corners = detail::ccw_corners(cx.tets[t], k);
            for (int c = 0; c < 3; ++c) {
                tri.labels[static_cast<std::size_t>(c)] =
                    lattice::edge_label(k, tri.corners[static_cast<std::size_t>(c)]);
            }
            tri.apex_up = k >= 2;
            tri.hinge = hingeOf(tri.layer);
            index[{static_cast<int>(t), k}] = static_cast<int>(g.triangles.size());
            g.triangles.push_back(tri);
        }
    }
    g.adj.resize(g.triangles.size());
    for (std::size_t ti = 0; ti < g.triangles.size(); ++ti) {
        const auto& T = g.triangles[ti];
        for (int s = 0; s < 3; ++s) {
            const int face = T.corners[static_cast<std::size_t>(s)];
            const auto& gl = cx.glue[static_cast<std::size_t>(T.tet)][static_cast<std::size_t>(face)];
            std::array<int, 4> perm = gl.perm;
            int k2 = perm[static_cast<std::size_t>(T.vertex)];
            if (quotient && (k2 == 1 || k2 == 3)) {
                for (auto& p : perm) {
                    p = detail::sigma(p);
                }
                k2 = perm[static_cast<std::size_t>(T.vertex)];
            }
            const int t2 = index.at({gl.tet, k2});
            const auto& U = g.triangles[static_cast<std::size_t>(t2)];
            CuspSide side;
            side.tri = t2;
            side.vshift = gl.vshift;
            side.fold = gl.type == lattice::GlueType::Fold;
            side.top = face <= 1;
            for (int c = 0; c < 3; ++c) {
                if (c == s) {
                    continue;
                }
                const int img = perm[static_cast<std::size_t>(T.corners[static_cast<std::size_t>(c)])];
                side.corner_map[static_cast<std::size_t>(c)] = static_cast<int>(
                    std::find(U.corners.begin(), U.corners.end(), img) - U.corners.begin());
            }
            const int opp = perm[static_cast<std::size_t>(face)];
            side.side = static_cast<int>(std::find(U.corners.begin(), U.corners.end(), opp) -
                                         U.corners.begin());
            g.adj[ti][static_cast<std::size_t>(s)] = side;
        }
    }
    // cusp vertices and components
    detail::UnionFind uf(3 * g.triangles.size());
    detail::UnionFind comp(g.triangles.size());
    for (std::size_t ti = 0; ti < g.triangles.size(); ++ti) {
        for (int s = 0; s < 3; ++s) {
            const auto& sd = g.adj[ti][static_cast<std::size_t>(s)];
            comp.unite(static_cast<int>(ti), sd.tri);
            for (int c = 0; c < 3; ++c) {
                if (sd.corner_map[static_cast<std::size_t>(c)] >= 0) {
                    uf.unite(static_cast<int>(3 * ti) + c,
                             3 * sd.tri + sd.corner_map[static_cast<std::size_t>(c)]);
                }
            }
        }
    }
    std::map<int, int> vid, cid;
    g.corner_vertex.resize(g.triangles.size());
    for (std::size_t ti = 0; ti < g.triangles.size(); ++ti) {
        for (int c = 0; c < 3; ++c) {
            int root = uf.find(static_cast<int>(3 * ti) + c);
            auto it = vid.find(root);
            if (it == vid.end()) {
                it = vid.emplace(root, static_cast<int>(vid.size())).first;
            }
            g.corner_vertex[ti][static_cast<std::size_t>(c)] = it->second;
        }
        int r = comp.find(static_cast<int>(ti));
        auto it = cid.find(r);
        if (it == cid.end()) {
            it = cid.emplace(r, static_cast<int>(cid.size())).first;
        }
        g.triangles[ti].component = it->second;
    }
    g.vertices = static_cast<int>(vid.size());
    g.components = static_cast<int>(cid.size());
    g.vertex_class.assign(static_cast<std::size_t>(g.vertices), -1);
    g.horizontal_period = quotient ? 2 : 4;
    g.vertical_period = static_cast<int>(layers.size());
    return g;
}

namespace detail
{
inline std::vector<Layer> make_layers(const std::vector<Letter>& letters, bool bridge)
{
    std::vector<Layer> out;
    const int n = static_cast<int>(letters.size());
    if (!bridge) {
        for (int i = 0; i < n; ++i) {
            Layer l;
            l.index = i;
            l.before = letters[static_cast<std::size_t>((i - 1 + n) % n)];
            l.after = letters[static_cast<std::size_t>(i)];
            l.hinge = l.before != l.after;
            out.push_back(l);
        }
    } else {
        for (int i = 1; i <= n - 1; ++i) {
            Layer l;
            l.index = i;
            l.before = letters[static_cast<std::size_t>(i - 1)];
            l.after = letters[static_cast<std::size_t>(i)];
            l.hinge = l.before != l.after;
            l.tetrahedra = 2;
            l.boundary = i == 1 || i == n - 1;
            out.push_back(l);
        }
    }
    return out;
}

// Map each cusp vertex to an edge class via the Farey vertex (and lift) of its tetrahedron edge
inline void attach_classes(LayeredTriangulation& tri)
{
    auto& g = tri.cusp;
    std::map<std::pair<int, int>, int> byKey;
    for (const auto& e : tri.edge_classes) {
        if (e.is_clasp_core) {
            continue;
        }
        byKey[{e.farey_vertex, e.lift}] = e.id;
    }
    std::map<int, int> coreOf;
    for (const auto& e : tri.edge_classes) {
        if (e.is_clasp_core) {
            coreOf[e.farey_vertex] = e.id;
        }
    }
    for (std::size_t ti = 0; ti < g.triangles.size(); ++ti) {
        const auto& T = g.triangles[ti];
        const auto& tet = tri.complex.tets[static_cast<std::size_t>(T.tet)];
        for (int c = 0; c < 3; ++c) {
            const int e = lattice::edge_index(T.vertex, T.corners[static_cast<std::size_t>(c)]);
            const int fid = tet.vertex_id[static_cast<std::size_t>(e)];
            int cls = -1;
            auto core = coreOf.find(fid);
            if (core != coreOf.end()) {
                cls = core->second;
            } else {
                const int lift = tri.complex.model == lattice::Model::Sphere &&
                                         tri.kind == Kind::TwoBridge
                                     ? lattice::edge_lift(tet, e)
                                     : 0;
                cls = byKey.at({fid, lift});
            }
            auto& slot = g.vertex_class[static_cast<std::size_t>(
                g.corner_vertex[ti][static_cast<std::size_t>(c)])];
            if (slot >= 0 && slot != cls) {
                throw Error(ErrorCode::Infeasible, "cusp vertex meets two edge classes");
            }
            slot = cls;
        }
    }
}
}  // namespace detail

/**
 * @brief Layered triangulation of a punctured-torus bundle (one tetrahedron
 * per letter) or of the corresponding 4-punctured-sphere bundle (two per letter).
 */
inline LayeredTriangulation build_bundle_triangulation(const MonodromyWord& w,
                                                       Kind kind = Kind::TorusBundle)
{
    if (kind == Kind::TwoBridge) {
        throw Error(ErrorCode::Infeasible, "use build_bridge_triangulation");
    }
    LayeredTriangulation tri;
    tri.kind = kind;
    tri.word = w.str();
    tri.letters = w.letters();
    const int m = tri.size();
    tri.layers = detail::make_layers(tri.letters, false);
    for (auto& l : tri.layers) {
        l.tetrahedra = kind == Kind::SphereBundle ? 2 : 1;
    }
    std::vector<lattice::WalkStep> walk;
    for (const auto& ls : lattice::farey_walk_local(tri.letters, 3 * m + 1)) {
        walk.push_back(ls.step);
    }
    auto slots = detail::fan_slots(walk, 2 * m, 3 * m - 1, 2 * m, m);
    const int lifts = kind == Kind::SphereBundle ? 2 : 1;
    for (int v = 0; v < m; ++v) {
        for (int lift = 0; lift < lifts; ++lift) {
            EdgeClass e;
            e.id = static_cast<int>(tri.edge_classes.size());
            e.farey_vertex = v;
            e.lift = lift;
            e.slots = slots.at(v);
            e.crossing = v + 1;
            detail::finish_class(e);
            tri.edge_classes.push_back(e);
        }
    }
    tri.complex = lattice::bundle_complex(tri.letters, lattice::Model::Torus);
    tri.cusp = build_cusp_graph(tri.complex, tri.layers, true);
    if (kind == Kind::TorusBundle) {
        detail::attach_classes(tri);
    } else {
        // the cusp picture is that of the torus bundle; its vertices carry lift 0
        LayeredTriangulation torus = tri;
        torus.kind = Kind::TorusBundle;
        torus.edge_classes.clear();
        for (const auto& e : tri.edge_classes) {
            if (e.lift == 0) {
                EdgeClass c = e;
                c.id = static_cast<int>(torus.edge_classes.size());
                torus.edge_classes.push_back(c);
            }
        }
        detail::attach_classes(torus);
        tri.cusp = torus.cusp;
        for (auto& cls : tri.cusp.vertex_class) {
            cls *= 2;
        }
    }
    return tri;
}

/** @brief Two-bridge link complement: c-1 layers of two tetrahedra, closed by two clasps */
inline LayeredTriangulation build_bridge_triangulation(const BridgeWord& w)
{
    LayeredTriangulation tri;
    tri.kind = Kind::TwoBridge;
    tri.word = w.str();
    tri.letters = w.letters();
    const int c = tri.size();
    tri.layers = detail::make_layers(tri.letters, true);
    auto bw = lattice::bridge_walk(tri.letters);
    auto slots = detail::fan_slots(bw.steps, 1, c - 1, 0, 0);
    auto addCore = [&](const std::array<int, 2>& ids) {
        EdgeClass e;
        e.id = static_cast<int>(tri.edge_classes.size());
        e.farey_vertex = std::min(ids[0], ids[1]);
        e.is_clasp_core = true;
        for (int id : ids) {
            auto it = slots.find(id);
            if (it == slots.end()) {
                continue;
            }
            for (const auto& s : it->second) {
                detail::add_slot(e.slots, s.layer, s.label, 2 * s.count);
            }
        }
        detail::finish_class(e);
        tri.edge_classes.push_back(e);
    };
    addCore(bw.bottom_core);
    for (const auto& [id, sl] : slots) {
        if (id == bw.bottom_core[0] || id == bw.bottom_core[1] || id == bw.top_core[0] ||
            id == bw.top_core[1]) {
            continue;
        }
        for (int lift = 0; lift < 2; ++lift) {
            EdgeClass e;
            e.id = static_cast<int>(tri.edge_classes.size());
            e.farey_vertex = id;
            e.lift = lift;
            e.slots = sl;
            e.crossing = id - 2;
            detail::finish_class(e);
            tri.edge_classes.push_back(e);
        }
    }
    addCore(bw.top_core);
    // cores share a farey_vertex key with nothing else
    tri.edge_classes.back().farey_vertex = std::min(bw.top_core[0], bw.top_core[1]);
    tri.complex = lattice::bridge_complex(tri.letters);
    tri.cusp = build_cusp_graph(tri.complex, tri.layers, false);
    {
        // core lookup must resolve both merged Farey vertices
        auto g = tri;
        std::vector<EdgeClass> extra;
        for (const auto& e : tri.edge_classes) {
            if (e.is_clasp_core) {
                const auto& ids = e.id == 0 ? bw.bottom_core : bw.top_core;
                for (int id : ids) {
                    EdgeClass alias = e;
                    alias.farey_vertex = id;
                    extra.push_back(alias);
                }
            }
        }
        g.edge_classes = extra;
        for (const auto& e : tri.edge_classes) {
            if (!e.is_clasp_core) {
                g.edge_classes.push_back(e);
            }
        }
        detail::attach_classes(g);
        tri.cusp = g.cusp;
    }
    return tri;
}

inline const CuspGraph& cusp_graph(const LayeredTriangulation& tri) { return tri.cusp; }

}  // namespace pleat
