#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pleat/angles.hpp"
#include "support.hpp"

using namespace pleat;

namespace
{

constexpr double pi = std::numbers::pi;

std::vector<LayeredTriangulation> sample()
{
    std::vector<LayeredTriangulation> out;
    for (const char* w : {"RL", "RRLL", "R3L", "R2LRL", "R4L4", "RLRLRL", "R2L3R4L"}) {
        out.push_back(build_bundle_triangulation(parse_bundle_word(w)));
        out.push_back(build_bundle_triangulation(parse_bundle_word(w), Kind::SphereBundle));
    }
    for (const char* w : {"RL", "R3L2R", "RRL", "RLRLR", "R2L5R"}) {
        out.push_back(build_bridge_triangulation(parse_bridge_word(w)));
    }
    return out;
}

// random interior point near the initial structure
std::vector<double> jitter(const LayeredTriangulation& t, std::mt19937_64& rng)
{
    const auto base = initial_structure(t).w;
    std::uniform_real_distribution<double> d(-1, 1);
    for (double eps = 0.05; eps > 1e-6; eps *= 0.5) {
        auto w = base;
        for (int i : free_indices(t)) {
            w[static_cast<std::size_t>(i)] += eps * d(rng);
        }
        if (min_margin(t, w) > 0) {
            return w;
        }
    }
    return base;
}

}  // namespace

TEST(Angles, EdgeSumsAndTetrahedronSums)
{
    std::mt19937_64 rng(7);
    for (const auto& t : sample()) {
        for (int rep = 0; rep < 10; ++rep) {
            const auto s = angles_from_w(t, jitter(t, rng));
            ASSERT_TRUE(s.interior) << t.word;
            for (const auto& a : s.angles) {
                EXPECT_NEAR(a.x + a.y + a.z, pi, 1e-13);
                EXPECT_GT(a.x, 0);
                EXPECT_GT(a.y, 0);
                EXPECT_GT(a.z, 0);
            }
            for (const auto& e : t.edge_classes) {
                EXPECT_NEAR(edge_angle_sum(t, s, e), 2 * pi, 1e-12) << t.word << " class " << e.id;
            }
        }
    }
}

TEST(Angles, InitialStructureIsInteriorForSmallWords)
{
    for (int m = 2; m <= 10; ++m) {
        for (unsigned bits = 1; bits + 1 < (1U << m); ++bits) {
            std::vector<Letter> letters;
            for (int k = 0; k < m; ++k) {
                letters.push_back((bits >> k) & 1U ? Letter::L : Letter::R);
            }
            const auto t = build_bundle_triangulation(MonodromyWord::from_letters(letters));
            EXPECT_GT(min_margin(t, initial_structure(t).w), 0) << t.word;
            if (detail::group(letters).size() >= 2) {
                const auto b = build_bridge_triangulation(BridgeWord::from_letters(letters));
                const auto s = initial_structure(b);
                EXPECT_GT(min_margin(b, s.w), 0) << b.word;
                EXPECT_DOUBLE_EQ(s.w.front(), pi / 2);
                EXPECT_DOUBLE_EQ(s.w.back(), pi / 2);
            }
        }
    }
}

TEST(Angles, CatMapAtThirds)
{
    const auto t = build_bundle_triangulation(parse_bundle_word("RL"));
    const auto s = angles_from_w(t, {pi / 3, pi / 3});
    for (const auto& a : s.angles) {
        EXPECT_NEAR(a.x, pi / 3, 1e-15);
        EXPECT_NEAR(a.y, pi / 3, 1e-15);
        EXPECT_NEAR(a.z, pi / 3, 1e-15);
    }
}

TEST(Angles, DimensionMismatch)
{
    const auto t = build_bundle_triangulation(parse_bundle_word("RRLL"));
    EXPECT_EQ(support::code_of([&] { angles_from_w(t, {1.0, 1.0}); }), ErrorCode::DimensionMismatch);
    const auto b = build_bridge_triangulation(parse_bridge_word("RL"));
    EXPECT_EQ(support::code_of([&] { angles_from_w(b, {1.0, 1.0}); }), ErrorCode::DimensionMismatch);
}

TEST(Angles, PleatingAnglesCancel)
{
    const std::vector<double> w{0.3, 0.7, 1.1, 0.4};
    for (int i = 0; i < 4; ++i) {
        const auto p = pleating_angles(w, i);
        EXPECT_NEAR(p[0] + p[1] + p[2], 0, 1e-15);
    }
}

TEST(Angles, ConstraintsDetectBoundary)
{
    const auto t = build_bundle_triangulation(parse_bundle_word("RRLL"));
    auto w = initial_structure(t).w;
    EXPECT_GT(min_margin(t, w), 0);
    w[0] = 0;
    EXPECT_LE(min_margin(t, w), 0);
    EXPECT_FALSE(angles_from_w(t, w).interior);
}
