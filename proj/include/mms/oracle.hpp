#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mms/bitvec.hpp"
#include "mms/errors.hpp"
#include "mms/geometry.hpp"

namespace mms {

enum class TieBreakPolicy
{
    LexMin,
    LexMax,
    PreferRevealed, ///< an already revealed candidate if any (largest such), else the largest
};

inline constexpr TieBreakPolicy all_tie_policies[] = {TieBreakPolicy::LexMin, TieBreakPolicy::LexMax,
                                                      TieBreakPolicy::PreferRevealed};

inline std::string_view to_string(TieBreakPolicy p)
{
    switch (p) {
        case TieBreakPolicy::LexMin: return "lex-min";
        case TieBreakPolicy::LexMax: return "lex-max";
        case TieBreakPolicy::PreferRevealed: return "prefer-revealed";
    }
    return "?";
}

inline TieBreakPolicy parse_tie_policy(std::string_view s)
{
    for (auto p : all_tie_policies)
        if (to_string(p) == s) return p;
    throw InvalidArgument("unknown tie policy '" + std::string(s) + "' (lex-min, lex-max, prefer-revealed)");
}

// ---------------------------------------------------------------------------------------
// Hidden sets

struct BinaryHiddenSet
{
    std::size_t d = 0;
    std::vector<BinaryPoint> points; ///< sorted lexicographically, pairwise distinct
};

struct SphereHiddenSet
{
    std::size_t d = 0;
    std::vector<SpherePoint> points; ///< sorted lexicographically by coordinates
};

using HiddenSet = std::variant<BinaryHiddenSet, SphereHiddenSet>;

inline BinaryHiddenSet make_binary_hidden_set(std::vector<BinaryPoint> points)
{
    if (points.empty()) throw EmptyInput("hidden set must be nonempty");
    const std::size_t d = points.front().size();
    for (const auto& p : points)
        if (p.size() != d) throw DimensionMismatch("hidden points of different dimensions");
    std::sort(points.begin(), points.end());
    if (std::adjacent_find(points.begin(), points.end()) != points.end())
        throw InvalidArgument("hidden set contains a duplicate point");
    return BinaryHiddenSet{d, std::move(points)};
}

inline SphereHiddenSet make_sphere_hidden_set(std::vector<SpherePoint> points, double eps_tie = Tolerances{}.eps_tie)
{
    if (points.empty()) throw EmptyInput("hidden set must be nonempty");
    const std::size_t d = points.front().dim();
    for (const auto& p : points)
        if (p.dim() != d) throw DimensionMismatch("hidden points of different dimensions");
    std::sort(points.begin(), points.end(),
              [](const SpherePoint& a, const SpherePoint& b) { return lex_less(a.coords(), b.coords()); });
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (distance(points[i].coords(), points[j].coords()) <= 2.0 * eps_tie)
                throw InvalidArgument("hidden sphere points closer than 2*eps_tie");
    return SphereHiddenSet{d, std::move(points)};
}

inline std::size_t hidden_set_size(const HiddenSet& h)
{
    return std::visit([](const auto& s) { return s.points.size(); }, h);
}

inline std::size_t hidden_set_dim(const HiddenSet& h)
{
    return std::visit([](const auto& s) { return s.d; }, h);
}

// ---------------------------------------------------------------------------------------
// Strong-model queries

/// A query of {0,1,2}^d; symbol 2 leaves a coordinate unconstrained.
struct TernaryPattern
{
    std::vector<std::uint8_t> symbols;

    static TernaryPattern from_string(std::string_view s)
    {
        TernaryPattern t;
        for (char c : s) {
            if (c < '0' || c > '2') throw ParseError("ternary pattern symbol outside {0,1,2}");
            t.symbols.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        return t;
    }

    std::string to_string() const
    {
        std::string s;
        for (auto c : symbols) s.push_back(static_cast<char>('0' + c));
        return s;
    }

    friend bool operator==(const TernaryPattern&, const TernaryPattern&) = default;
};

/// Query(I, pattern): the restriction to coordinate set I (0-based here) and the required
/// bits there. Stored as two d-bit masks so distances are word-wise popcounts.
class RestrictedQuery
{
public:
    RestrictedQuery() = default;

    RestrictedQuery(std::span<const std::size_t> indices, const BitVector& pattern, std::size_t d)
        : mask_(d), values_(d)
    {
        if (indices.size() != pattern.size()) throw InvalidArgument("pattern length differs from |I|");
        for (std::size_t j = 0; j < indices.size(); ++j) {
            if (indices[j] >= d) throw InvalidArgument("restricted index out of range");
            if (j > 0 && indices[j] <= indices[j - 1]) throw InvalidArgument("restricted indices must be strictly increasing");
            mask_.set(indices[j], true);
            values_.set(indices[j], pattern[j]);
        }
    }

    /// Query(C_i, prefix) with C_i the first prefix.size() coordinates.
    static RestrictedQuery on_prefix(const BitVector& prefix, std::size_t d)
    {
        if (prefix.size() > d) throw InvalidArgument("prefix longer than the dimension");
        RestrictedQuery q;
        q.mask_ = BitVector(d);
        for (std::size_t i = 0; i < prefix.size(); ++i) q.mask_.set(i, true);
        q.values_ = prefix.resized(d);
        return q;
    }

    std::size_t dim() const noexcept { return mask_.size(); }

    std::vector<std::size_t> indices() const
    {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < mask_.size(); ++i)
            if (mask_[i]) out.push_back(i);
        return out;
    }

    BitVector pattern() const
    {
        BitVector p;
        for (std::size_t i = 0; i < mask_.size(); ++i)
            if (mask_[i]) p.push_back(values_[i]);
        return p;
    }

    /// |{i in I : x[i] != pattern[i]}|
    std::size_t mismatches(const BitVector& x) const
    {
        if (x.size() != dim()) throw DimensionMismatch("point and restricted query differ in dimension");
        auto wx = x.words();
        auto wm = mask_.words();
        auto wv = values_.words();
        std::size_t c = 0;
        for (std::size_t w = 0; w < wx.size(); ++w) c += static_cast<std::size_t>(std::popcount((wx[w] ^ wv[w]) & wm[w]));
        return c;
    }

    friend bool operator==(const RestrictedQuery&, const RestrictedQuery&) = default;

private:
    BitVector mask_;
    BitVector values_;
};

inline RestrictedQuery ternary_to_restricted(const TernaryPattern& t)
{
    std::vector<std::size_t> idx;
    BitVector pattern;
    for (std::size_t i = 0; i < t.symbols.size(); ++i) {
        if (t.symbols[i] > 2) throw InvalidArgument("ternary symbol outside {0,1,2}");
        if (t.symbols[i] != 2) {
            idx.push_back(i);
            pattern.push_back(t.symbols[i] == 1);
        }
    }
    return RestrictedQuery(idx, pattern, t.symbols.size());
}

inline TernaryPattern restricted_to_ternary(const RestrictedQuery& q)
{
    TernaryPattern t;
    t.symbols.assign(q.dim(), 2);
    const auto idx = q.indices();
    const auto pat = q.pattern();
    for (std::size_t j = 0; j < idx.size(); ++j) t.symbols[idx[j]] = pat[j] ? 1 : 0;
    return t;
}

// ---------------------------------------------------------------------------------------
// Ledger

enum class QueryKind
{
    NearestBinary,
    NearestSphere,
    MinDistance,
};

/// One closed batch. Responses are stored compactly: the hidden-set index of the returned
/// point for nearest-point kinds, the distance for MinDistance.
struct RoundRecord
{
    std::size_t index = 0;
    QueryKind kind = QueryKind::NearestBinary;
    std::vector<std::uint32_t> responses;

    std::size_t size() const noexcept { return responses.size(); }
};

struct QueryLedger
{
    std::uint64_t total = 0;
    std::vector<RoundRecord> rounds;
    bool round_open = false;

    std::size_t round_count() const noexcept { return rounds.size(); }

    std::vector<std::size_t> round_sizes() const
    {
        std::vector<std::size_t> s;
        for (const auto& r : rounds) s.push_back(r.size());
        return s;
    }
};

struct RoundHandle
{
    std::size_t index = 0;
};

// ---------------------------------------------------------------------------------------
// Oracle

/// The codemaker. Holds the hidden set, answers queries and records every batch.
///
/// Queries go either through an explicit round (open_round, then one submit_round with the
/// whole batch) or through the single-query calls, which form a round of size one and are
/// only allowed while no round is open. Not thread-safe; distinct instances are independent.
class Oracle
{
public:
    explicit Oracle(HiddenSet hidden, TieBreakPolicy policy = TieBreakPolicy::PreferRevealed, Tolerances tol = {})
        : hidden_(std::move(hidden)), policy_(policy), tol_(tol), revealed_(hidden_set_size(hidden_), false)
    {
    }

    std::size_t dim() const { return hidden_set_dim(hidden_); }
    TieBreakPolicy policy() const noexcept { return policy_; }
    const Tolerances& tolerances() const noexcept { return tol_; }
    bool is_binary() const noexcept { return std::holds_alternative<BinaryHiddenSet>(hidden_); }

    BinaryPoint nearest_binary(const BinaryPoint& q)
    {
        const auto h = open_round();
        return single<BinaryPoint>(h, std::span<const BinaryPoint>(&q, 1));
    }

    SpherePoint nearest_sphere(const SpherePoint& q)
    {
        const auto h = open_round();
        return single<SpherePoint>(h, std::span<const SpherePoint>(&q, 1));
    }

    std::size_t min_distance(const RestrictedQuery& q)
    {
        const auto h = open_round();
        return single<std::size_t>(h, std::span<const RestrictedQuery>(&q, 1));
    }

    RoundHandle open_round()
    {
        if (ledger_.round_open) throw AdaptivityViolation("a round is already open");
        ledger_.round_open = true;
        return RoundHandle{ledger_.rounds.size()};
    }

    std::vector<BinaryPoint> submit_round(RoundHandle h, std::span<const BinaryPoint> queries)
    {
        const auto& set = binary_set("nearest-point (Hamming) query");
        check_submit(h);
        for (const auto& q : queries)
            if (q.size() != set.d) throw DimensionMismatch("query dimension differs from the hidden set");
        RoundRecord rec{h.index, QueryKind::NearestBinary, {}};
        std::vector<BinaryPoint> out;
        out.reserve(queries.size());
        for (const auto& q : queries) {
            const auto i = answer_binary(set, q);
            rec.responses.push_back(static_cast<std::uint32_t>(i));
            out.push_back(set.points[i]);
        }
        close(std::move(rec));
        return out;
    }

    std::vector<SpherePoint> submit_round(RoundHandle h, std::span<const SpherePoint> queries)
    {
        const auto& set = sphere_set("nearest-point (sphere) query");
        check_submit(h);
        for (const auto& q : queries) {
            if (q.dim() != set.d) throw DimensionMismatch("query dimension differs from the hidden set");
            if (std::abs(norm(q.coords()) - 1.0) > tol_.eps_norm) throw InvalidArgument("sphere query is not unit-norm");
        }
        RoundRecord rec{h.index, QueryKind::NearestSphere, {}};
        std::vector<SpherePoint> out;
        out.reserve(queries.size());
        for (const auto& q : queries) {
            const auto i = answer_sphere(set, q);
            rec.responses.push_back(static_cast<std::uint32_t>(i));
            out.push_back(set.points[i]);
        }
        close(std::move(rec));
        return out;
    }

    std::vector<std::size_t> submit_round(RoundHandle h, std::span<const RestrictedQuery> queries)
    {
        const auto& set = binary_set("min-distance query");
        check_submit(h);
        for (const auto& q : queries)
            if (q.dim() != set.d) throw DimensionMismatch("query dimension differs from the hidden set");
        RoundRecord rec{h.index, QueryKind::MinDistance, {}};
        std::vector<std::size_t> out;
        out.reserve(queries.size());
        for (const auto& q : queries) {
            std::size_t best = set.d + 1;
            for (const auto& x : set.points) best = std::min(best, q.mismatches(x));
            rec.responses.push_back(static_cast<std::uint32_t>(best));
            out.push_back(best);
        }
        close(std::move(rec));
        return out;
    }

    /// Raw responses of a closed round; reading a round that has not been submitted is an
    /// AdaptivityViolation.
    std::span<const std::uint32_t> responses(RoundHandle h) const
    {
        if (h.index >= ledger_.rounds.size())
            throw AdaptivityViolation("responses of round " + std::to_string(h.index) + " read before submission");
        return ledger_.rounds[h.index].responses;
    }

    const QueryLedger& ledger() const noexcept { return ledger_; }
    QueryLedger ledger_report() const { return ledger_; }

    /// Hidden-set indices in the order they were first revealed by nearest-point queries.
    const std::vector<std::size_t>& reveal_history() const noexcept { return reveal_order_; }

    /// Codemaker-side view of the hidden set; for verification, never handed to solvers.
    const HiddenSet& hidden() const noexcept { return hidden_; }

private:
    /// A rejected single query must not leave its implicit round open.
    template <class R, class Q>
    R single(RoundHandle h, std::span<const Q> q)
    {
        try {
            return submit_round(h, q).front();
        } catch (...) {
            ledger_.round_open = false;
            throw;
        }
    }

    const BinaryHiddenSet& binary_set(const char* what) const
    {
        if (const auto* s = std::get_if<BinaryHiddenSet>(&hidden_)) return *s;
        throw VariantMismatch(std::string(what) + " sent to a sphere oracle");
    }

    const SphereHiddenSet& sphere_set(const char* what) const
    {
        if (const auto* s = std::get_if<SphereHiddenSet>(&hidden_)) return *s;
        throw VariantMismatch(std::string(what) + " sent to a binary oracle");
    }

    void check_submit(RoundHandle h) const
    {
        if (!ledger_.round_open || h.index != ledger_.rounds.size())
            throw AdaptivityViolation("submission to a round that is not open");
    }

    void close(RoundRecord rec)
    {
        ledger_.total += rec.responses.size();
        ledger_.rounds.push_back(std::move(rec));
        ledger_.round_open = false;
    }

    // Candidates arrive in lexicographic order because hidden sets are stored sorted.
    std::size_t select(std::span<const std::size_t> candidates)
    {
        std::size_t pick = candidates.back();
        switch (policy_) {
            case TieBreakPolicy::LexMin: pick = candidates.front(); break;
            case TieBreakPolicy::LexMax: pick = candidates.back(); break;
            case TieBreakPolicy::PreferRevealed:
                for (auto it = candidates.rbegin(); it != candidates.rend(); ++it)
                    if (revealed_[*it]) {
                        pick = *it;
                        break;
                    }
                break;
        }
        if (!revealed_[pick]) {
            revealed_[pick] = true;
            reveal_order_.push_back(pick);
        }
        return pick;
    }

    std::size_t answer_binary(const BinaryHiddenSet& set, const BinaryPoint& q)
    {
        std::size_t best = q.size() + 1;
        scratch_.clear();
        for (std::size_t i = 0; i < set.points.size(); ++i) {
            const std::size_t dist = hamming_distance(set.points[i], q);
            if (dist < best) {
                best = dist;
                scratch_.clear();
            }
            if (dist == best) scratch_.push_back(i);
        }
        return select(scratch_);
    }

    std::size_t answer_sphere(const SphereHiddenSet& set, const SpherePoint& q)
    {
        std::vector<double> ip(set.points.size());
        double best = -2.0;
        for (std::size_t i = 0; i < set.points.size(); ++i) {
            ip[i] = dot(set.points[i].coords(), q.coords());
            best = std::max(best, ip[i]);
        }
        scratch_.clear();
        for (std::size_t i = 0; i < set.points.size(); ++i)
            if (ip[i] >= best - tol_.eps_tie) scratch_.push_back(i);
        return select(scratch_);
    }

    HiddenSet hidden_;
    TieBreakPolicy policy_;
    Tolerances tol_;
    QueryLedger ledger_;
    std::vector<bool> revealed_;
    std::vector<std::size_t> reveal_order_;
    std::vector<std::size_t> scratch_;
};

// ---------------------------------------------------------------------------------------
// Capability views. A solver receives exactly one of these, so it can only use the query
// power of its problem.

/// Problem 2 power: nearest hidden point under Hamming distance.
class HammingNearestOracle
{
public:
    explicit HammingNearestOracle(Oracle& o) : o_(&o)
    {
        if (!o.is_binary()) throw VariantMismatch("Hamming nearest-point view of a sphere oracle");
    }
    std::size_t dim() const { return o_->dim(); }
    BinaryPoint query(const BinaryPoint& q) { return o_->nearest_binary(q); }
    RoundHandle open_round() { return o_->open_round(); }
    std::vector<BinaryPoint> submit_round(RoundHandle h, std::span<const BinaryPoint> qs) { return o_->submit_round(h, qs); }
    const QueryLedger& ledger() const { return o_->ledger(); }

private:
    Oracle* o_;
};

/// Problem 3 power: nearest hidden point on the sphere.
class SphereNearestOracle
{
public:
    explicit SphereNearestOracle(Oracle& o) : o_(&o)
    {
        if (o.is_binary()) throw VariantMismatch("sphere nearest-point view of a binary oracle");
    }
    std::size_t dim() const { return o_->dim(); }
    const Tolerances& tolerances() const { return o_->tolerances(); }
    SpherePoint query(const SpherePoint& q) { return o_->nearest_sphere(q); }
    RoundHandle open_round() { return o_->open_round(); }
    std::vector<SpherePoint> submit_round(RoundHandle h, std::span<const SpherePoint> qs) { return o_->submit_round(h, qs); }
    const QueryLedger& ledger() const { return o_->ledger(); }

private:
    Oracle* o_;
};

/// Problem 1 power: minimum restricted Hamming distance, no point revealed.
class DistanceOracle
{
public:
    explicit DistanceOracle(Oracle& o) : o_(&o)
    {
        if (!o.is_binary()) throw VariantMismatch("distance view of a sphere oracle");
    }
    std::size_t dim() const { return o_->dim(); }
    std::size_t query(const RestrictedQuery& q) { return o_->min_distance(q); }
    std::size_t query(const TernaryPattern& t) { return o_->min_distance(ternary_to_restricted(t)); }
    RoundHandle open_round() { return o_->open_round(); }
    std::vector<std::size_t> submit_round(RoundHandle h, std::span<const RestrictedQuery> qs) { return o_->submit_round(h, qs); }
    const QueryLedger& ledger() const { return o_->ledger(); }

private:
    Oracle* o_;
};

} // namespace mms
