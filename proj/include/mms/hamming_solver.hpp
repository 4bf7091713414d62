#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mms/bitvec.hpp"
#include "mms/errors.hpp"
#include "mms/geometry.hpp"
#include "mms/oracle.hpp"
#include "mms/rng.hpp"

namespace mms {

enum class ParamMode
{
    Paper, ///< t and r from the explicit sufficiency condition; astronomically large t
    Desk,  ///< caller-supplied (t, r)
};

inline std::string_view to_string(ParamMode m) { return m == ParamMode::Paper ? "paper" : "desk"; }

inline ParamMode parse_param_mode(std::string_view s)
{
    if (s == "paper") return ParamMode::Paper;
    if (s == "desk") return ParamMode::Desk;
    throw InvalidArgument("unknown mode '" + std::string(s) + "' (paper, desk)");
}

struct TwoRoundParams
{
    std::uint64_t t = 1;  ///< round-1 query count
    std::size_t r = 0;    ///< round-2 ball radius
    /// Paper mode: t is ceil(exp(t_exponent)) with t_exponent = 96 d ln(12 n^2) / r. When that
    /// does not fit in 64 bits, t saturates and the parameters are descriptive only.
    std::optional<double> t_exponent;
    bool t_saturated = false;
};

/// 96 d ln(12 n^2) / r: round 1 suffices once ln t exceeds this.
inline double two_round_exponent(std::size_t d, std::size_t n, std::size_t r)
{
    const double nn = static_cast<double>(n);
    return 96.0 * static_cast<double>(d) * std::log(12.0 * nn * nn) / static_cast<double>(r);
}

/// ln(sum_{i<=r} C(d, i)), stable for large d.
inline double log_hamming_ball_size(std::size_t d, std::size_t r)
{
    double m = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    for (std::size_t i = 0; i <= std::min(r, d); ++i) {
        const double lt = std::lgamma(static_cast<double>(d) + 1.0) - std::lgamma(static_cast<double>(i) + 1.0) -
                          std::lgamma(static_cast<double>(d - i) + 1.0);
        terms.push_back(lt);
        m = std::max(m, lt);
    }
    double s = 0.0;
    for (double lt : terms) s += std::exp(lt - m);
    return m + std::log(s);
}

/// Paper mode scans r in [1, floor(d/8)], takes t(r) = ceil(exp(96 d ln(12 n^2) / r)) and keeps
/// the pair minimising t(r) * (1 + |ball(r)|). Desk mode returns `overrides` unchanged.
inline TwoRoundParams choose_two_round_params(std::size_t d, std::size_t n, ParamMode mode,
                                              std::optional<TwoRoundParams> overrides = std::nullopt)
{
    if (d < 1 || n < 1) throw InvalidArgument("two-round parameters need d >= 1 and n >= 1");
    if (mode == ParamMode::Desk) {
        if (!overrides) throw InvalidArgument("desk mode requires explicit (t, r)");
        if (overrides->t < 1 || overrides->r > d) throw InvalidArgument("desk parameters out of range (t >= 1, r <= d)");
        return *overrides;
    }
    if (d / 8 < 1) throw InvalidArgument("paper mode needs d >= 8 (radius range [1, d/8] is empty)");

    std::size_t best_r = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t r = 1; r <= d / 8; ++r) {
        // log of t(r) * (1 + ball); ceil() shifts the log by < 1/t, far below double resolution here
        const double log_ball = log_hamming_ball_size(d, r);
        const double cost = two_round_exponent(d, n, r) + log_ball + std::log1p(std::exp(-log_ball));
        if (cost < best_cost) {
            best_cost = cost;
            best_r = r;
        }
    }

    TwoRoundParams p;
    p.r = best_r;
    p.t_exponent = two_round_exponent(d, n, best_r);
    constexpr double max_exact = 43.6; // ln(2^63)
    if (*p.t_exponent < max_exact) {
        const long double bound = std::exp(static_cast<long double>(*p.t_exponent));
        p.t = static_cast<std::uint64_t>(std::floor(bound)) + 1;
    } else {
        p.t = std::numeric_limits<std::uint64_t>::max();
        p.t_saturated = true;
    }
    return p;
}

struct TwoRoundReport
{
    std::vector<BinaryPoint> recovered;       ///< sorted distinct responses of both rounds
    std::vector<BinaryPoint> round1_distinct; ///< sorted distinct round-1 responses
    std::size_t round1_size = 0;
    std::size_t round2_size = 0;
    std::uint64_t queries = 0;
    std::size_t rounds = 0;
};

/// Round 1: t i.i.d. uniform queries (with replacement). Round 2: the deduplicated union of
/// the radius-r Hamming balls around the distinct round-1 responses. Output: every distinct
/// point returned. Success is probabilistic; the solver makes no guarantee.
inline TwoRoundReport solve_hamming_two_round(HammingNearestOracle oracle, const TwoRoundParams& params,
                                              std::uint64_t seed)
{
    const std::size_t d = oracle.dim();
    if (params.t_saturated) throw InvalidArgument("round-1 size exceeds 64 bits; use desk mode");
    if (params.t < 1) throw InvalidArgument("t must be at least 1");
    if (params.r > d) throw InvalidArgument("radius larger than the dimension");

    const std::uint64_t q0 = oracle.ledger().total;
    const std::size_t r0 = oracle.ledger().round_count();
    TwoRoundReport report;

    Engine eng = make_engine(seed);
    std::vector<BinaryPoint> round1;
    round1.reserve(params.t);
    for (std::uint64_t i = 0; i < params.t; ++i) round1.push_back(uniform_point(eng, d));
    auto h1 = oracle.open_round();
    auto z = oracle.submit_round(h1, round1);
    report.round1_size = round1.size();

    std::sort(z.begin(), z.end());
    z.erase(std::unique(z.begin(), z.end()), z.end());
    report.round1_distinct = z;

    std::vector<BinaryPoint> round2;
    std::unordered_set<BinaryPoint, BitVectorHash> seen;
    for (const auto& center : z)
        for_each_in_hamming_ball(center, params.r, [&](const BinaryPoint& p) {
            if (seen.insert(p).second) round2.push_back(p);
        });
    auto h2 = oracle.open_round();
    auto w = oracle.submit_round(h2, round2);
    report.round2_size = round2.size();

    w.insert(w.end(), z.begin(), z.end());
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
    report.recovered = std::move(w);
    report.queries = oracle.ledger().total - q0;
    report.rounds = oracle.ledger().round_count() - r0;
    return report;
}

} // namespace mms
