#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <vector>

#include "mms/hardgen.hpp"
#include "mms/harness/instance_io.hpp"

using namespace mms;

namespace {

std::size_t brute_min_distance(const BinaryPoint& z, const std::vector<BinaryPoint>& set)
{
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const auto& x : set) best = std::min(best, hamming_distance(x, z));
    return best;
}

/// All points of {0,1}^{outer} supported on the first t coordinates.
std::vector<BinaryPoint> inner_cube(std::size_t t, std::size_t outer)
{
    std::vector<BinaryPoint> out;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << t); ++m) {
        BinaryPoint p(outer);
        for (std::size_t i = 0; i < t; ++i) p.set(i, (m >> i) & 1u);
        out.push_back(std::move(p));
    }
    return out;
}

HardInstanceParams small_params()
{
    HardInstanceParams p;
    p.base_t = 3;
    p.level = 2;
    p.q = 4;
    p.delta2 = 0.5;
    p.consts = {2, 1, 2};
    return p;
}

} // namespace

TEST(HammingSphere, Examples)
{
    auto s = hamming_sphere(BinaryPoint::from_string("000"), 2);
    std::vector<std::string> got;
    for (const auto& p : s) got.push_back(p.to_string());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, (std::vector<std::string>{"011", "101", "110"}));
    const auto u = BinaryPoint::from_string("10110");
    EXPECT_EQ(hamming_sphere(u, 0), std::vector<BinaryPoint>{u});
    EXPECT_EQ(hamming_sphere(u, 2).size(), 10u);
    EXPECT_THROW(hamming_sphere(u, 6), InvalidArgument);
}

TEST(D1, ShapeAndDeterminism)
{
    EXPECT_THROW(gen_hard_d1(2, 0), InvalidArgument);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto a = gen_hard_d1(3, seed);
        EXPECT_GE(a.hidden.points.size(), 3u);
        EXPECT_LE(a.hidden.points.size(), 6u);
    }
    for (std::size_t d : {5u, 12u, 33u}) {
        const auto a = gen_hard_d1(d, 42);
        const auto b = gen_hard_d1(d, 42);
        EXPECT_EQ(a.u, b.u);
        EXPECT_EQ(a.s_flips, b.s_flips);
        EXPECT_EQ(a.hidden.points, b.hidden.points);
        EXPECT_EQ(a.hidden.points.size(), d * (d - 1) / 2 + a.s_flips.size());
        EXPECT_LE(a.hidden.points.size(), d * d);
        for (const auto& x : a.hidden.points) {
            const auto w = hamming_distance(x, a.u);
            EXPECT_TRUE(w == 1 || w == 2);
        }
    }
}

TEST(D1, BlockingExamples)
{
    const auto u = BinaryPoint::from_string("000000");
    EXPECT_TRUE(check_d1_blocking(u, BinaryPoint::from_string("110000")));
    EXPECT_TRUE(check_d1_blocking(u, BinaryPoint::from_string("111110")));
    EXPECT_FALSE(check_d1_blocking(u, u));
    EXPECT_FALSE(check_d1_blocking(u, BinaryPoint::from_string("010000")));
}

TEST(D1, BlockingClosedFormMatchesEnumeration)
{
    Engine eng = make_engine(70);
    for (std::size_t d : {3u, 6u, 10u}) {
        const auto u = uniform_point(eng, d);
        const auto n1 = hamming_sphere(u, 1);
        const auto n2 = hamming_sphere(u, 2);
        for (int i = 0; i < 300; ++i) {
            const auto z = uniform_point(eng, d);
            EXPECT_EQ(check_d1_blocking(u, z), brute_min_distance(z, n2) < brute_min_distance(z, n1));
        }
    }
}

TEST(D1, ResponsesIgnoreS)
{
    Engine eng = make_engine(71);
    const auto inst = gen_hard_d1(10, 5);
    Oracle a(inst.hidden, TieBreakPolicy::LexMin);
    Engine other = make_engine(1234);
    const auto resampled = make_d1_instance(inst.u, other);
    Oracle b(resampled.hidden, TieBreakPolicy::LexMin);
    for (int i = 0; i < 200; ++i) {
        const auto z = uniform_point(eng, 10);
        if (hamming_distance(z, inst.u) < 2) continue;
        const auto ra = a.nearest_binary(z);
        EXPECT_EQ(hamming_distance(ra, inst.u), 2u);
        EXPECT_EQ(ra, b.nearest_binary(z));
    }
}

TEST(Recursive, CeilLog2)
{
    EXPECT_EQ(ceil_log2(1), 0u);
    EXPECT_EQ(ceil_log2(2), 1u);
    EXPECT_EQ(ceil_log2(3), 2u);
    EXPECT_EQ(ceil_log2(4096), 12u);
    EXPECT_EQ(ceil_log2(4097), 13u);
    EXPECT_EQ(ceil_log2(512), 9u);
    EXPECT_THROW(ceil_log2(0), InvalidArgument);
}

TEST(Recursive, StepShapeExample)
{
    HardInstanceParams p;
    p.q = 1024;
    p.delta2 = 0.25;
    const auto s = step_shape(4, p);
    EXPECT_EQ(s.log_term, 12u);
    EXPECT_EQ(s.ell, 1600u);
    EXPECT_EQ(s.m1, 400u);
    EXPECT_EQ(s.outer_dim, 640004u);

    p.dim_cap = 640003;
    EXPECT_THROW(step_shape(4, p), DimensionCapExceeded);
    p.dim_cap = 1u << 24;
    p.delta2 = 1.0;
    EXPECT_THROW(step_shape(4, p), InvalidArgument);
    p.delta2 = 0.25;
    p.consts = {100, 26, 2500};
    EXPECT_THROW(step_shape(4, p), InvalidArgument);
}

TEST(Recursive, StructureOfOneStep)
{
    const auto p = small_params();
    const auto inst = gen_hard_recursive(p, 9);
    const auto& m = inst.meta;
    const auto shape = step_shape(3, p);
    ASSERT_NE(m.inner, nullptr);
    EXPECT_EQ(m.level, 2u);
    EXPECT_EQ(m.inner_dim, 3u);
    EXPECT_EQ(m.outer_dim, shape.outer_dim);
    EXPECT_EQ(inst.hidden.d, shape.outer_dim);
    EXPECT_EQ(m.block_supports.size(), shape.m1);
    EXPECT_EQ(inst.hidden.points.size(), m.inner->s_flips.size() + 3 + shape.m1);

    std::size_t expected_begin = 3;
    for (const auto& b : m.block_supports) {
        EXPECT_EQ(b.begin, expected_begin);
        EXPECT_EQ(b.end - b.begin, shape.ell);
        EXPECT_LE(b.end, m.outer_dim);
        expected_begin = b.end;
    }

    // XOR with u again: the inner D1 points padded with zeros, plus the block indicators.
    const auto base = gen_hard_d1(3, derive_seed(9, 1));
    std::vector<BinaryPoint> expect;
    for (const auto& x : base.hidden.points) expect.push_back(x.resized(m.outer_dim));
    for (const auto& b : m.block_supports) {
        BinaryPoint x(m.outer_dim);
        for (std::size_t j = b.begin; j < b.end; ++j) x.set(j, true);
        expect.push_back(x);
    }
    std::sort(expect.begin(), expect.end());
    auto unshifted = xor_all(inst.hidden.points, m.u);
    std::sort(unshifted.begin(), unshifted.end());
    EXPECT_EQ(unshifted, expect);
    EXPECT_EQ(xor_all(unshifted, m.u).size(), inst.hidden.points.size());
}

TEST(Recursive, SizeAndDimensionFormulasAcrossLevels)
{
    auto p = small_params();
    p.level = 3;
    const auto inst = gen_hard_recursive(p, 4);
    const auto* level3 = &inst.meta;
    const auto* level2 = level3->inner.get();
    ASSERT_NE(level2, nullptr);
    const auto s2 = step_shape(3, p);
    const auto s3 = step_shape(s2.outer_dim, p);
    EXPECT_EQ(level2->outer_dim, s2.outer_dim);
    EXPECT_EQ(level3->outer_dim, s3.outer_dim);
    EXPECT_EQ(level3->inner_dim, s2.outer_dim);
    EXPECT_EQ(inst.hidden.points.size(), 3 + level2->inner->s_flips.size() + s2.m1 + s3.m1);
}

TEST(Recursive, LevelOneIsTheBaseInstance)
{
    HardInstanceParams p;
    p.level = 1;
    p.base_t = 6;
    const auto inst = gen_hard_recursive(p, 3);
    EXPECT_EQ(inst.hidden.points, gen_hard_d1(6, derive_seed(3, 1)).hidden.points);
    EXPECT_EQ(inst.meta.inner, nullptr);
}

TEST(Recursive, DimensionCap)
{
    auto p = small_params();
    p.dim_cap = 50;
    EXPECT_THROW(gen_hard_recursive(p, 0), DimensionCapExceeded);
}

TEST(Distances, InnerCubeClosedFormMatchesBruteForce)
{
    Engine eng = make_engine(72);
    for (std::size_t t = 1; t <= 12; ++t) {
        const std::size_t outer = t + 9;
        const auto cube = inner_cube(t, outer);
        for (int i = 0; i < 20; ++i) {
            const auto z = uniform_point(eng, outer);
            EXPECT_EQ(distance_to_inner_cube(z, t), brute_min_distance(z, cube));
        }
    }
}

TEST(Distances, BlockersMatchBruteForce)
{
    const auto inst = gen_hard_recursive(small_params(), 2);
    const auto& m = inst.meta;
    std::vector<BinaryPoint> blockers;
    for (const auto& b : m.block_supports) {
        BinaryPoint x(m.outer_dim);
        for (std::size_t j = b.begin; j < b.end; ++j) x.set(j, true);
        blockers.push_back(x);
    }
    Engine eng = make_engine(73);
    for (int i = 0; i < 100; ++i) {
        const auto z = uniform_point(eng, m.outer_dim);
        EXPECT_EQ(distance_to_blockers(z, m), brute_min_distance(z, blockers));
    }
    EXPECT_EQ(distance_to_blockers(blockers[1], m), 0u);
    EXPECT_GT(distance_to_inner_cube(blockers[1], m.inner_dim), 0u);
    const BinaryPoint zero(m.outer_dim);
    EXPECT_EQ(distance_to_inner_cube(zero, m.inner_dim), 0u);
    EXPECT_EQ(distance_to_blockers(zero, m), m.ell);
}

TEST(Distances, NearerConditionForHeavyOverlap)
{
    const auto p = small_params();
    const auto inst = gen_hard_recursive(p, 5);
    const auto& m = inst.meta;
    const auto cube = inner_cube(m.inner_dim, m.outer_dim);
    Engine eng = make_engine(74);
    std::size_t checked = 0;
    for (int i = 0; i < 400; ++i) {
        // heavy on one random block, uniform elsewhere
        auto z = uniform_point(eng, m.outer_dim);
        const auto& b = m.block_supports[uniform_below(eng, m.block_supports.size())];
        for (std::size_t j = b.begin; j < b.end; ++j)
            if (uniform01(eng) < 0.85) z.set(j, true);
        for (const auto& blk : m.block_supports) {
            const std::size_t overlap = z.popcount_range(blk.begin, blk.end);
            if (2 * overlap <= m.ell + 2 * m.inner_dim) continue;
            BinaryPoint x(m.outer_dim);
            for (std::size_t j = blk.begin; j < blk.end; ++j) x.set(j, true);
            ++checked;
            for (const auto& y : cube) EXPECT_LT(hamming_distance(z, x), hamming_distance(z, y));
        }
    }
    EXPECT_GT(checked, 100u);
}

TEST(Blocking, ShardingDoesNotChangeTheCount)
{
    const auto inst = gen_hard_recursive(small_params(), 6);
    const auto one = estimate_blocking(inst.meta, 3000, 11, 1);
    const auto four = estimate_blocking(inst.meta, 3000, 11, 4);
    const auto seven = estimate_blocking(inst.meta, 3000, 11, 7);
    EXPECT_EQ(one.successes, four.successes);
    EXPECT_EQ(one.successes, seven.successes);
    EXPECT_EQ(one.samples, 3000u);
    EXPECT_THROW(estimate_blocking(inst.meta, 0, 11), InvalidArgument);
    EXPECT_THROW(estimate_blocking(*inst.meta.inner, 10, 11), InvalidArgument);
}

TEST(Meta, SidecarFields)
{
    const auto inst = gen_hard_recursive(small_params(), 1);
    const auto j = harness::meta_to_json(inst.meta);
    for (const char* key : {"level", "u", "block_supports", "inner_dim", "outer_dim", "ell", "m1", "log_term", "consts",
                            "paper_constants", "s_flips", "inner_instance"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_FALSE(j["paper_constants"].get<bool>());
    EXPECT_EQ(j["inner_instance"]["level"].get<int>(), 1);
    EXPECT_TRUE(j["inner_instance"]["inner_instance"].is_null());
}
