#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "mms/bitvec.hpp"
#include "mms/errors.hpp"
#include "mms/oracle.hpp"

namespace mms {

/// Binary trie of the discovered points, plus a mark on every missing child that has
/// already been probed. A negated prefix of a discovered point is always "existing prefix
/// + the other bit", so the probe memo lives on the parent node.
class PrefixTrie
{
public:
    PrefixTrie() : nodes_(1) {}

    void insert(const BinaryPoint& x)
    {
        std::size_t node = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const int b = x[i] ? 1 : 0;
            if (nodes_[node].child[b] < 0) {
                nodes_[node].child[b] = static_cast<std::int32_t>(nodes_.size());
                nodes_.emplace_back();
            }
            node = static_cast<std::size_t>(nodes_[node].child[b]);
        }
        ++points_;
    }

    /// True iff p is a prefix of some inserted point (the empty prefix always is, once
    /// anything was inserted).
    bool contains_prefix(const BitVector& p) const { return find(p, p.size()) >= 0; }

    bool probed(const BitVector& p) const
    {
        if (p.empty()) return false;
        const auto parent = find(p, p.size() - 1);
        return parent >= 0 && nodes_[static_cast<std::size_t>(parent)].probed[p[p.size() - 1] ? 1 : 0];
    }

    /// Records a probe of p; p minus its last bit must already be in the trie.
    void mark_probed(const BitVector& p)
    {
        if (p.empty()) throw InvalidArgument("the empty prefix is never probed");
        const auto parent = find(p, p.size() - 1);
        if (parent < 0) throw InvalidArgument("probe whose parent prefix is unknown");
        nodes_[static_cast<std::size_t>(parent)].probed[p[p.size() - 1] ? 1 : 0] = true;
    }

    std::size_t point_count() const noexcept { return points_; }

private:
    struct Node
    {
        std::array<std::int32_t, 2> child{-1, -1};
        std::array<bool, 2> probed{false, false};
    };

    std::int64_t find(const BitVector& p, std::size_t length) const
    {
        if (points_ == 0) return -1;
        std::size_t node = 0;
        for (std::size_t i = 0; i < length; ++i) {
            const auto next = nodes_[node].child[p[i] ? 1 : 0];
            if (next < 0) return -1;
            node = static_cast<std::size_t>(next);
        }
        return static_cast<std::int64_t>(node);
    }

    std::vector<Node> nodes_;
    std::size_t points_ = 0;
};

struct StrongSolveReport
{
    std::vector<BinaryPoint> recovered; ///< sorted
    std::uint64_t queries = 0;
    std::size_t rounds = 0;
    std::vector<BitVector> probes; ///< every negated prefix queried, in order
    std::size_t sweeps = 0;        ///< iterations of the outer while loop
};

namespace detail {

/// Coordinate descent for several prefixes at once. Descent j extends prefixes[j] by one
/// coordinate per round (Query(C_{i+1}, p0) = 0 means the next bit is 0); descents that
/// are still running share a round. Each prefix must be a prefix of some hidden point.
inline std::vector<BinaryPoint> descend_in_lockstep(DistanceOracle& oracle, std::vector<BitVector> prefixes)
{
    const std::size_t d = oracle.dim();
    while (true) {
        std::vector<std::size_t> running;
        std::vector<RestrictedQuery> queries;
        for (std::size_t j = 0; j < prefixes.size(); ++j) {
            if (prefixes[j].size() >= d) continue;
            BitVector extended = prefixes[j];
            extended.push_back(false);
            queries.push_back(RestrictedQuery::on_prefix(extended, d));
            running.push_back(j);
        }
        if (running.empty()) break;
        const auto h = oracle.open_round();
        const auto answers = oracle.submit_round(h, queries);
        for (std::size_t q = 0; q < running.size(); ++q) prefixes[running[q]].push_back(answers[q] != 0);
    }
    return prefixes;
}

} // namespace detail

/// Recovers a hidden point whose first prefix.size() coordinates equal `prefix`, using
/// d - |prefix| descent queries (one round each). With verify_pre, Query(C_i, prefix) is
/// asked first and a nonzero answer raises NoSuchPrefix.
inline BinaryPoint find_point_with_prefix(DistanceOracle oracle, const BitVector& prefix, bool verify_pre = true)
{
    const std::size_t d = oracle.dim();
    if (prefix.size() > d) throw InvalidArgument("prefix longer than the dimension");
    if (verify_pre && oracle.query(RestrictedQuery::on_prefix(prefix, d)) != 0)
        throw NoSuchPrefix("no hidden point has prefix " + prefix.to_string());
    return detail::descend_in_lockstep(oracle, {prefix}).front();
}

/// Adaptive O(nd)-query recovery in the restricted-distance model.
///
/// After one descent from the empty prefix, each sweep collects the negated prefixes
/// x[1..i-1]·(1 - x_i) of all known points that are neither a prefix of a known point nor
/// probed before, queries them in one round, and descends (in lockstep) from every probe
/// that answered 0. The loop ends after a sweep that finds nothing.
inline StrongSolveReport solve_strong(DistanceOracle oracle)
{
    const std::size_t d = oracle.dim();
    const std::uint64_t q0 = oracle.ledger().total;
    const std::size_t r0 = oracle.ledger().round_count();

    StrongSolveReport report;
    PrefixTrie trie;
    std::vector<BinaryPoint> known;

    // Query(C_0, empty) is 0 for any nonempty hidden set, so the precheck is skipped.
    known.push_back(find_point_with_prefix(oracle, BitVector{}, false));
    trie.insert(known.back());
    std::size_t fresh = 1;

    while (fresh > 0) {
        ++report.sweeps;
        std::vector<BitVector> probes;
        for (const auto& x : known) {
            BitVector negated;
            for (std::size_t i = 0; i < d; ++i) {
                negated.push_back(!x[i]);
                if (!trie.contains_prefix(negated) && !trie.probed(negated)) {
                    trie.mark_probed(negated);
                    probes.push_back(negated);
                }
                negated.flip(i);
            }
        }
        fresh = 0;
        if (probes.empty()) break;

        std::vector<RestrictedQuery> queries;
        for (const auto& p : probes) queries.push_back(RestrictedQuery::on_prefix(p, d));
        const auto h = oracle.open_round();
        const auto answers = oracle.submit_round(h, queries);

        std::vector<BitVector> live;
        for (std::size_t j = 0; j < probes.size(); ++j)
            if (answers[j] == 0) live.push_back(probes[j]);
        report.probes.insert(report.probes.end(), probes.begin(), probes.end());

        for (auto& x : detail::descend_in_lockstep(oracle, std::move(live))) {
            trie.insert(x);
            known.push_back(std::move(x));
            ++fresh;
        }
    }

    std::sort(known.begin(), known.end());
    report.recovered = std::move(known);
    report.queries = oracle.ledger().total - q0;
    report.rounds = oracle.ledger().round_count() - r0;
    return report;
}

struct LeveledSolveReport
{
    std::vector<BinaryPoint> recovered; ///< sorted
    std::uint64_t queries = 0;
    std::size_t rounds = 0;
    std::vector<std::size_t> level_sizes; ///< |P_i| for i = 0..d
};

/// d-round recovery: round i+1 asks Query(C_{i+1}, p0) and Query(C_{i+1}, p1) for every
/// p in P_i (all length-i prefixes of hidden points) and keeps the extensions answering 0.
inline LeveledSolveReport solve_strong_leveled(DistanceOracle oracle)
{
    const std::size_t d = oracle.dim();
    const std::uint64_t q0 = oracle.ledger().total;
    const std::size_t r0 = oracle.ledger().round_count();

    LeveledSolveReport report;
    std::vector<BitVector> level{BitVector{}};
    report.level_sizes.push_back(level.size());
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<BitVector> candidates;
        std::vector<RestrictedQuery> queries;
        for (const auto& p : level) {
            for (bool bit : {false, true}) {
                BitVector e = p;
                e.push_back(bit);
                queries.push_back(RestrictedQuery::on_prefix(e, d));
                candidates.push_back(std::move(e));
            }
        }
        const auto h = oracle.open_round();
        const auto answers = oracle.submit_round(h, queries);
        level.clear();
        for (std::size_t j = 0; j < candidates.size(); ++j)
            if (answers[j] == 0) level.push_back(std::move(candidates[j]));
        report.level_sizes.push_back(level.size());
    }

    std::sort(level.begin(), level.end());
    report.recovered = std::move(level);
    report.queries = oracle.ledger().total - q0;
    report.rounds = oracle.ledger().round_count() - r0;
    return report;
}

} // namespace mms
