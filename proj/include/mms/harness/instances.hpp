#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mms/bitvec.hpp"
#include "mms/errors.hpp"
#include "mms/geometry.hpp"
#include "mms/oracle.hpp"
#include "mms/rng.hpp"

namespace mms::harness {

/// n distinct uniform points of {0,1}^d.
inline BinaryHiddenSet random_binary_set(std::size_t d, std::size_t n, Engine& eng)
{
    if (d == 0 || n == 0) throw InvalidArgument("random binary set needs d >= 1 and n >= 1");
    if (d < 63 && n > (std::uint64_t{1} << d)) throw InvalidArgument("more points requested than the cube has");
    std::unordered_set<BinaryPoint, BitVectorHash> seen;
    std::vector<BinaryPoint> pts;
    while (pts.size() < n) {
        auto p = uniform_point(eng, d);
        if (seen.insert(p).second) pts.push_back(std::move(p));
    }
    return make_binary_hidden_set(std::move(pts));
}

/// n unit vectors spanning a random k-dimensional subspace of R^d. Pairs closer than
/// 10 * eps_tie are rejected; for n >= k the rank is exactly k. k = 1 allows n <= 2 ({v, -v}).
inline SphereHiddenSet random_sphere_set(std::size_t d, std::size_t n, std::size_t k, Engine& eng,
                                         const Tolerances& tol = {})
{
    if (d == 0 || n == 0 || k == 0 || k > d) throw InvalidArgument("random sphere set needs 1 <= k <= d and n >= 1");
    if (k == 1 && n > 2) throw InvalidArgument("a rank-1 set of unit vectors has at most 2 points");
    const std::size_t want_rank = std::min(n, k);

    while (true) {
        std::vector<Vector> gauss(k, Vector(d));
        for (auto& g : gauss)
            for (double& x : g) x = gaussian(eng);
        const auto basis = orthonormal_span_basis(gauss, 1e-6);
        if (basis.size() != k) continue;

        std::vector<Vector> pts;
        if (k == 1) {
            pts.push_back(basis[0]);
            if (n == 2) pts.push_back(scaled(basis[0], -1.0));
        } else {
            std::size_t attempts = 0;
            while (pts.size() < n && attempts++ < 1000 * n) {
                Vector v(d, 0.0);
                for (const auto& b : basis) axpy(v, gaussian(eng), b);
                v = SpherePoint::normalize(std::move(v)).coords();
                const bool close = std::any_of(pts.begin(), pts.end(),
                                               [&](const Vector& p) { return distance(p, v) < 10.0 * tol.eps_tie; });
                if (!close) pts.push_back(std::move(v));
            }
            if (pts.size() < n) continue;
        }
        if (rank_of(pts, 1e-6) != want_rank) continue;

        std::vector<SpherePoint> sp;
        for (auto& v : pts) sp.push_back(SpherePoint::make(std::move(v), 1e-12));
        return make_sphere_hidden_set(std::move(sp), tol.eps_tie);
    }
}

// ---------------------------------------------------------------------------------------
// Structured sphere corpus

namespace detail {

inline SphereHiddenSet sphere_set_of(std::vector<Vector> vs)
{
    std::vector<SpherePoint> sp;
    for (auto& v : vs) sp.push_back(SpherePoint::normalize(std::move(v)));
    return make_sphere_hidden_set(std::move(sp));
}

} // namespace detail

/// Regular simplex with k+1 vertices: e_i minus the centroid in R^{k+1}, normalized
/// (rank k inside a (k+1)-dimensional ambient space).
inline SphereHiddenSet corpus_simplex(std::size_t k)
{
    const std::size_t d = k + 1;
    std::vector<Vector> vs;
    for (std::size_t i = 0; i < d; ++i) {
        Vector v(d, -1.0 / static_cast<double>(d));
        v[i] += 1.0;
        vs.push_back(std::move(v));
    }
    return detail::sphere_set_of(std::move(vs));
}

/// Regular tetrahedron, full-dimensional in R^3.
inline SphereHiddenSet corpus_tetrahedron()
{
    return detail::sphere_set_of({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}});
}

/// Cross-polytope {+-e_i} in R^d.
inline SphereHiddenSet corpus_cross_polytope(std::size_t d)
{
    std::vector<Vector> vs;
    for (std::size_t i = 0; i < d; ++i) {
        vs.push_back(unit_vector(d, i));
        vs.push_back(scaled(unit_vector(d, i), -1.0));
    }
    return detail::sphere_set_of(std::move(vs));
}

/// {v, -v} for a fixed generic direction v in R^d.
inline SphereHiddenSet corpus_antipodal(std::size_t d)
{
    Vector v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = 1.0 + static_cast<double>(i) * 0.5;
    return detail::sphere_set_of({v, scaled(v, -1.0)});
}

/// n points on the circle {z = height} of S^2, equally spaced starting at angle phase.
/// With height != 0 all points are coplanar off the origin (hull of affine dimension 2 in a
/// rank-3 span); height = 0 gives a great circle (rank 2).
inline SphereHiddenSet corpus_circle(std::size_t n, double height, double phase = 0.3)
{
    const double radius = std::sqrt(1.0 - height * height);
    std::vector<Vector> vs;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = phase + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        vs.push_back({radius * std::cos(a), radius * std::sin(a), height});
    }
    return detail::sphere_set_of(std::move(vs));
}

/// Coplanar circle points plus the pole on the far side; the first hull steps face a
/// degenerate hull with a point hiding behind it.
inline SphereHiddenSet corpus_circle_with_pole(std::size_t n, double height)
{
    auto s = corpus_circle(n, height);
    std::vector<Vector> vs;
    for (const auto& p : s.points) vs.push_back(p.coords());
    vs.push_back({0.0, 0.0, height > 0 ? -1.0 : 1.0});
    return detail::sphere_set_of(std::move(vs));
}

struct CorpusEntry
{
    std::string name;
    SphereHiddenSet set;
};

inline std::vector<CorpusEntry> structured_corpus()
{
    std::vector<CorpusEntry> c;
    for (std::size_t k = 1; k <= 4; ++k) c.push_back({"simplex-k" + std::to_string(k), corpus_simplex(k)});
    c.push_back({"tetrahedron-d3", corpus_tetrahedron()});
    for (std::size_t d = 1; d <= 5; ++d) c.push_back({"cross-d" + std::to_string(d), corpus_cross_polytope(d)});
    for (std::size_t d = 1; d <= 5; ++d) c.push_back({"antipodal-d" + std::to_string(d), corpus_antipodal(d)});
    for (std::size_t n : {3, 4, 5, 6, 8}) c.push_back({"circle-d3-n" + std::to_string(n), corpus_circle(n, 0.6)});
    c.push_back({"circle-d3-n7-low", corpus_circle(7, -0.35)});
    c.push_back({"great-circle-d3-n6", corpus_circle(6, 0.0)});
    c.push_back({"circle-pole-d3-n5", corpus_circle_with_pole(5, 0.6)});
    return c;
}

inline SphereHiddenSet corpus_by_name(std::string_view name)
{
    for (auto& e : structured_corpus())
        if (e.name == name) return std::move(e.set);
    throw InvalidArgument("unknown corpus entry '" + std::string(name) + "'");
}

} // namespace mms::harness
