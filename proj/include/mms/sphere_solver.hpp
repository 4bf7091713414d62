#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mms/errors.hpp"
#include "mms/geometry.hpp"
#include "mms/oracle.hpp"

namespace mms {

struct SphereSolverOptions
{
    /// Cap on the hidden-set size the solver is prepared for; the hull loop aborts with
    /// IterationBudgetExceeded after max_points + 1 iterations.
    std::size_t max_points = 100000;
};

struct SphereSolveReport
{
    std::vector<SpherePoint> recovered; ///< lexicographically sorted
    std::size_t basis_size = 0;         ///< k, the rank of the hidden set
    std::uint64_t queries = 0;
    std::size_t rounds = 0;
    std::size_t basis_iterations = 0;
    std::size_t hull_iterations = 0;
};

namespace detail {

inline std::vector<Vector> coords_of(const std::vector<SpherePoint>& pts)
{
    std::vector<Vector> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(p.coords());
    return out;
}

inline bool contains_point(const std::vector<SpherePoint>& pts, const SpherePoint& x, double eps_tie)
{
    return std::any_of(pts.begin(), pts.end(),
                       [&](const SpherePoint& p) { return distance(p.coords(), x.coords()) <= eps_tie; });
}

} // namespace detail

/// Basis phase: repeatedly query +-v for an orthonormal basis v_1..v_t of span(B)^perp and
/// add one returned point with a nonzero component along some v_j, until nothing is added.
/// Each repetition is one round of at most 2d queries. `iterations`, when given, receives
/// the number of repetitions.
inline std::vector<SpherePoint> find_basis(SphereNearestOracle oracle, std::size_t* iterations = nullptr)
{
    const std::size_t d = oracle.dim();
    const Tolerances& tol = oracle.tolerances();
    std::vector<SpherePoint> basis;
    std::size_t iters = 0;
    while (true) {
        std::vector<Vector> directions;
        if (basis.empty()) {
            for (std::size_t axis = 0; axis < d; ++axis) directions.push_back(unit_vector(d, axis));
        } else {
            directions = orthonormal_complement_basis(detail::coords_of(basis), d, tol.eps_pivot);
        }
        if (directions.empty()) break; // B already spans R^d
        ++iters;

        std::vector<SpherePoint> queries;
        for (const auto& v : directions) {
            queries.push_back(SpherePoint::make(v, tol.eps_norm));
            queries.push_back(-queries.back());
        }
        const auto h = oracle.open_round();
        const auto learned = oracle.submit_round(h, queries);

        // The candidate with the largest component outside span(B) keeps B well conditioned.
        const SpherePoint* best = nullptr;
        double best_component = tol.eps_side;
        for (const auto& x : learned) {
            for (const auto& v : directions) {
                const double c = std::abs(dot(x.coords(), v));
                if (c > best_component) {
                    best_component = c;
                    best = &x;
                }
            }
        }
        if (best == nullptr) break;
        basis.push_back(*best);
    }
    if (iterations != nullptr) *iterations = iters;
    return basis;
}

/// One hull-expansion round: queries every direction of enumerate_query_normals(current)
/// in a single batch and returns the responses not already known. An empty result means
/// the known set is the whole hidden set.
inline std::vector<SpherePoint> expand_hull_once(SphereNearestOracle oracle, const std::vector<SpherePoint>& current)
{
    if (current.empty()) throw EmptyInput("hull expansion needs at least one known point");
    const Tolerances& tol = oracle.tolerances();
    const auto directions = enumerate_query_normals(detail::coords_of(current), tol);
    std::vector<SpherePoint> queries;
    queries.reserve(directions.size());
    for (const auto& m : directions.normals) queries.push_back(SpherePoint::make(m, tol.eps_norm));

    const auto h = oracle.open_round();
    const auto learned = oracle.submit_round(h, queries);
    std::vector<SpherePoint> fresh;
    for (const auto& x : learned)
        if (!detail::contains_point(current, x, tol.eps_tie) && !detail::contains_point(fresh, x, tol.eps_tie))
            fresh.push_back(x);
    return fresh;
}

/// Recovers a hidden set on the unit sphere: basis phase, then hull expansion until a round
/// reveals nothing new.
inline SphereSolveReport solve_sphere(SphereNearestOracle oracle, const SphereSolverOptions& options = {})
{
    const std::uint64_t q0 = oracle.ledger().total;
    const std::size_t r0 = oracle.ledger().round_count();

    SphereSolveReport report;
    std::vector<SpherePoint> known = find_basis(oracle, &report.basis_iterations);
    report.basis_size = known.size();
    if (known.empty()) throw Error("basis phase returned no point; oracle is inconsistent");

    while (true) {
        if (report.hull_iterations >= options.max_points + 1)
            throw IterationBudgetExceeded("hull loop exceeded " + std::to_string(options.max_points + 1) + " iterations");
        ++report.hull_iterations;
        auto fresh = expand_hull_once(oracle, known);
        if (fresh.empty()) break;
        known.insert(known.end(), fresh.begin(), fresh.end());
    }

    std::sort(known.begin(), known.end(),
              [](const SpherePoint& a, const SpherePoint& b) { return lex_less(a.coords(), b.coords()); });
    report.recovered = std::move(known);
    report.queries = oracle.ledger().total - q0;
    report.rounds = oracle.ledger().round_count() - r0;
    return report;
}

} // namespace mms
