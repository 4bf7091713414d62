#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mms/bitvec.hpp"
#include "mms/errors.hpp"
#include "mms/geometry.hpp"
#include "mms/oracle.hpp"
#include "mms/rng.hpp"

namespace mms {

/// N(u, radius): the points at Hamming distance exactly `radius` from u.
inline std::vector<BinaryPoint> hamming_sphere(const BinaryPoint& u, std::size_t radius)
{
    std::vector<BinaryPoint> out;
    for_each_at_distance(u, radius, [&](const BinaryPoint& p) { out.push_back(p); });
    return out;
}

inline std::vector<BinaryPoint> xor_all(std::vector<BinaryPoint> points, const BinaryPoint& u)
{
    for (auto& p : points) p ^= u;
    return points;
}

// ---------------------------------------------------------------------------------------
// Base distribution: all of N(u,2) plus a random subset S of N(u,1).

struct D1Instance
{
    BinaryHiddenSet hidden;
    BinaryPoint u;
    std::vector<std::size_t> s_flips; ///< S = { u with bit i flipped : i in s_flips }, increasing
};

/// Builds the instance for a given u, drawing S with one fair coin per neighbour.
inline D1Instance make_d1_instance(const BinaryPoint& u, Engine& eng)
{
    const std::size_t d = u.size();
    if (d < 3) throw InvalidArgument("D1 instances need d >= 3");
    D1Instance inst;
    inst.u = u;
    std::vector<BinaryPoint> points = hamming_sphere(u, 2);
    for (std::size_t i = 0; i < d; ++i) {
        if (coin(eng)) {
            inst.s_flips.push_back(i);
            BinaryPoint p = u;
            p.flip(i);
            points.push_back(std::move(p));
        }
    }
    inst.hidden = make_binary_hidden_set(std::move(points));
    return inst;
}

inline D1Instance gen_hard_d1(std::size_t d, std::uint64_t seed)
{
    if (d < 3) throw InvalidArgument("D1 instances need d >= 3");
    Engine eng = make_engine(seed);
    const BinaryPoint u = uniform_point(eng, d);
    return make_d1_instance(u, eng);
}

/// dist(z, N(u,2)) < dist(z, N(u,1)), from w = dist(z,u) in closed form:
/// dist(z, N(u,2)) = |w-2| and dist(z, N(u,1)) = |w-1| (for d >= 2).
inline bool check_d1_blocking(const BinaryPoint& u, const BinaryPoint& z)
{
    const auto w = static_cast<long long>(hamming_distance(u, z));
    return std::llabs(w - 2) < std::llabs(w - 1);
}

// ---------------------------------------------------------------------------------------
// Recursive distribution

struct HardgenConstants
{
    std::size_t ell_mult = 100;  ///< block length l = ell_mult * t^2
    std::size_t m1_mult = 25;    ///< blocker count m1 = m1_mult * (t + L)
    std::size_t dim_mult = 2500; ///< t' = dim_mult * t^2 * (t + L) + t

    bool is_paper() const noexcept { return ell_mult == 100 && m1_mult == 25 && dim_mult == 2500; }
};

struct HardInstanceParams
{
    std::size_t base_t = 3;  ///< dimension of the D1 base instance
    std::size_t level = 1;   ///< 1 = D1 only; each further level applies one inductive step
    double q = 64;           ///< query budget the construction is hard against
    double delta2 = 0.125;   ///< per-step failure allowance, in (0, 1)
    HardgenConstants consts;
    std::size_t dim_cap = std::size_t{1} << 24;
};

/// Half-open 0-based coordinate range [begin, end).
struct BlockRange
{
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const BlockRange&, const BlockRange&) = default;
};

struct HardInstanceMeta
{
    std::size_t level = 1;
    BinaryPoint u;                        ///< XOR mask applied at this level
    std::vector<BlockRange> block_supports;
    std::size_t inner_dim = 0;            ///< t (0 at the base level)
    std::size_t outer_dim = 0;            ///< t'
    std::size_t ell = 0;
    std::size_t m1 = 0;
    std::size_t log_term = 0;             ///< L = ceil(log2(q / delta2))
    HardgenConstants consts;
    std::vector<std::size_t> s_flips;     ///< base level only: the subset S of N(u,1)
    std::shared_ptr<const HardInstanceMeta> inner;
};

struct HardInstance
{
    BinaryHiddenSet hidden;
    HardInstanceMeta meta;
};

/// ceil(log2(x)) for x > 0, exact on powers of two.
inline std::size_t ceil_log2(double x)
{
    if (!(x > 0.0) || !std::isfinite(x)) throw InvalidArgument("log2 of a non-positive or non-finite value");
    int exp = 0;
    const double mant = std::frexp(x, &exp); // x = mant * 2^exp, mant in [0.5, 1)
    const long long c = (mant == 0.5) ? exp - 1 : exp;
    return c < 0 ? 0 : static_cast<std::size_t>(c);
}

/// Closed forms of one inductive step over an inner instance of dimension t.
struct StepShape
{
    std::size_t log_term = 0;
    std::size_t ell = 0;
    std::size_t m1 = 0;
    std::size_t outer_dim = 0;
};

inline StepShape step_shape(std::size_t t, const HardInstanceParams& params)
{
    if (params.q < 1.0) throw InvalidArgument("query budget q must be >= 1");
    if (!(params.delta2 > 0.0 && params.delta2 < 1.0)) throw InvalidArgument("delta2 must lie in (0, 1)");
    const auto& c = params.consts;
    if (c.ell_mult == 0 || c.m1_mult == 0 || c.dim_mult == 0) throw InvalidArgument("constants must be positive");
    if (c.ell_mult * c.m1_mult > c.dim_mult) throw InvalidArgument("blocks do not fit: ell_mult * m1_mult > dim_mult");

    StepShape s;
    s.log_term = ceil_log2(params.q / params.delta2);
    using u128 = unsigned __int128;
    const u128 tt = static_cast<u128>(t) * t;
    const u128 outer = static_cast<u128>(c.dim_mult) * tt * (t + s.log_term) + t;
    if (outer > params.dim_cap)
        throw DimensionCapExceeded("generated dimension exceeds the cap of " + std::to_string(params.dim_cap));
    s.outer_dim = static_cast<std::size_t>(outer);
    s.ell = static_cast<std::size_t>(c.ell_mult * tt);
    s.m1 = c.m1_mult * (t + s.log_term);
    return s;
}

/// Level-1 instance from D1 at base_t; every further level pads the inner points with zeros
/// to t', adds m1 blockers with disjoint supports of size l at [t + (i-1) l, t + i l), and
/// XORs everything with a fresh uniform u. Level j draws from stream derive_seed(seed, j).
inline HardInstance gen_hard_recursive(const HardInstanceParams& params, std::uint64_t seed)
{
    if (params.level < 1) throw InvalidArgument("level must be >= 1");
    if (params.base_t < 3) throw InvalidArgument("base dimension must be >= 3");
    if (params.base_t > params.dim_cap) throw DimensionCapExceeded("base dimension exceeds the cap");

    auto base = gen_hard_d1(params.base_t, derive_seed(seed, 1));
    HardInstance inst;
    inst.hidden = std::move(base.hidden);
    inst.meta.level = 1;
    inst.meta.u = base.u;
    inst.meta.outer_dim = params.base_t;
    inst.meta.consts = params.consts;
    inst.meta.s_flips = std::move(base.s_flips);

    for (std::size_t level = 2; level <= params.level; ++level) {
        const std::size_t t = inst.hidden.d;
        const auto shape = step_shape(t, params);
        Engine eng = make_engine(derive_seed(seed, level));
        const BinaryPoint u = uniform_point(eng, shape.outer_dim);

        std::vector<BinaryPoint> points;
        points.reserve(inst.hidden.points.size() + shape.m1);
        for (const auto& x : inst.hidden.points) points.push_back(x.resized(shape.outer_dim) ^ u);

        HardInstanceMeta meta;
        for (std::size_t i = 0; i < shape.m1; ++i) {
            const BlockRange block{t + i * shape.ell, t + (i + 1) * shape.ell};
            BinaryPoint x(shape.outer_dim);
            for (std::size_t j = block.begin; j < block.end; ++j) x.set(j, true);
            points.push_back(x ^ u);
            meta.block_supports.push_back(block);
        }

        meta.level = level;
        meta.u = u;
        meta.inner_dim = t;
        meta.outer_dim = shape.outer_dim;
        meta.ell = shape.ell;
        meta.m1 = shape.m1;
        meta.log_term = shape.log_term;
        meta.consts = params.consts;
        meta.inner = std::make_shared<const HardInstanceMeta>(std::move(inst.meta));
        inst.meta = std::move(meta);
        inst.hidden = make_binary_hidden_set(std::move(points));
    }
    return inst;
}

/// dist(z, C) for C = all points supported on the first t coordinates: the nearest member
/// copies z there, so the distance is the weight of z outside them.
inline std::size_t distance_to_inner_cube(const BinaryPoint& z, std::size_t t)
{
    return z.popcount_range(t, z.size());
}

/// dist(z, B) over the blockers of one recursive level (un-shifted frame).
inline std::size_t distance_to_blockers(const BinaryPoint& z, const HardInstanceMeta& meta)
{
    if (meta.block_supports.empty()) throw InvalidArgument("meta has no blockers (base level)");
    const std::size_t wt = z.popcount();
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const auto& b : meta.block_supports) {
        const std::size_t overlap = z.popcount_range(b.begin, b.end);
        best = std::min(best, wt + (b.end - b.begin) - 2 * overlap);
    }
    return best;
}

struct BlockingEstimate
{
    std::uint64_t successes = 0;
    std::uint64_t samples = 0;

    double fraction() const { return samples == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(samples); }
};

/// Monte Carlo estimate of P[dist(z, C) > dist(z, B)] for uniform z in {0,1}^{t'}. Sample j
/// uses its own stream derive_seed(seed, j), so any split over `workers` threads gives the
/// same count.
inline BlockingEstimate estimate_blocking(const HardInstanceMeta& meta, std::uint64_t samples, std::uint64_t seed,
                                          unsigned workers = 1)
{
    if (samples == 0) throw InvalidArgument("estimate_blocking needs at least one sample");
    if (meta.block_supports.empty()) throw InvalidArgument("meta has no blockers (base level)");
    workers = std::max(1u, workers);

    auto run = [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t hits = 0;
        for (std::uint64_t j = begin; j < end; ++j) {
            Engine eng = make_engine(derive_seed(seed, j));
            const BinaryPoint z = uniform_point(eng, meta.outer_dim);
            if (distance_to_inner_cube(z, meta.inner_dim) > distance_to_blockers(z, meta)) ++hits;
        }
        return hits;
    };

    std::vector<std::uint64_t> counts(workers, 0);
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (samples + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t begin = std::min(samples, w * chunk);
        const std::uint64_t end = std::min(samples, begin + chunk);
        pool.emplace_back([&, w, begin, end] { counts[w] = run(begin, end); });
    }
    for (auto& th : pool) th.join();

    BlockingEstimate est;
    est.samples = samples;
    for (auto c : counts) est.successes += c;
    return est;
}

} // namespace mms
