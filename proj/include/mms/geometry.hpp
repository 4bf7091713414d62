#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mms/bitvec.hpp"
#include "mms/errors.hpp"

namespace mms {

using Vector = std::vector<double>;

/// Numerical tolerances shared by the geometry, the sphere oracle and the sphere solver.
struct Tolerances
{
    double eps_side = 1e-9;   ///< slack for "on the hyperplane" / "on one side"
    double eps_norm = 1e-9;   ///< accepted deviation of a unit vector's norm from 1
    double eps_pivot = 1e-10; ///< residual norm below which a vector counts as dependent
    double eps_tie = 1e-9;    ///< inner-product window treated as a tie by the sphere oracle
    double dedup_tol = 1e-7;  ///< angular distance (radians) under which two normals coincide
};

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Vector scaled(std::span<const double> a, double s)
{
    Vector r(a.begin(), a.end());
    for (double& x : r) x *= s;
    return r;
}

inline Vector difference(std::span<const double> a, std::span<const double> b)
{
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

/// a += s * b
inline void axpy(Vector& a, double s, std::span<const double> b)
{
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
}

inline Vector unit_vector(std::size_t d, std::size_t axis)
{
    Vector e(d, 0.0);
    e[axis] = 1.0;
    return e;
}

inline double distance(std::span<const double> a, std::span<const double> b) { return norm(difference(a, b)); }

/// Angular distance between two unit vectors, computed from the chord for accuracy near 0.
inline double angle_between(std::span<const double> a, std::span<const double> b)
{
    const double chord = distance(a, b);
    return 2.0 * std::asin(std::min(1.0, chord / 2.0));
}

inline bool lex_less(const Vector& a, const Vector& b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

/// A point of the unit sphere S^{d-1}.
class SpherePoint
{
public:
    SpherePoint() = default;

    /// Validates finiteness and unit norm; does not renormalize.
    static SpherePoint make(Vector v, double eps_norm = Tolerances{}.eps_norm)
    {
        for (double x : v)
            if (!std::isfinite(x)) throw NonFiniteInput("sphere point has a non-finite coordinate");
        if (v.empty()) throw InvalidArgument("sphere point of dimension 0");
        if (std::abs(norm(v) - 1.0) > eps_norm)
            throw InvalidArgument("vector is not unit-norm within tolerance (norm " + std::to_string(norm(v)) + ")");
        SpherePoint p;
        p.v_ = std::move(v);
        return p;
    }

    /// Divides by the norm; rejects the zero vector.
    static SpherePoint normalize(Vector v)
    {
        const double n = norm(v);
        if (!std::isfinite(n) || n == 0.0) throw InvalidArgument("cannot normalize a zero or non-finite vector");
        for (double& x : v) x /= n;
        SpherePoint p;
        p.v_ = std::move(v);
        return p;
    }

    const Vector& coords() const noexcept { return v_; }
    std::size_t dim() const noexcept { return v_.size(); }
    double operator[](std::size_t i) const noexcept { return v_[i]; }

    SpherePoint operator-() const
    {
        SpherePoint p;
        p.v_ = scaled(v_, -1.0);
        return p;
    }

    friend bool operator==(const SpherePoint&, const SpherePoint&) = default;

private:
    Vector v_;
};

inline void require_finite(std::span<const Vector> points)
{
    for (const auto& p : points)
        for (double x : p)
            if (!std::isfinite(x)) throw NonFiniteInput("non-finite coordinate in point set");
}

inline std::size_t common_dimension(std::span<const Vector> points)
{
    if (points.empty()) return 0;
    const std::size_t d = points.front().size();
    for (const auto& p : points)
        if (p.size() != d) throw DimensionMismatch("points of different dimensions");
    return d;
}

namespace detail {

/// Subtracts the projection onto an orthonormal family, twice (classical Gram-Schmidt
/// with one reorthogonalization pass).
inline void project_out(Vector& v, std::span<const Vector> basis)
{
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) axpy(v, -dot(v, q), q);
}

} // namespace detail

/// Orthonormal basis of span(points) by Gram-Schmidt with column pivoting: each step takes
/// the point with the largest residual and stops once every residual is <= eps_pivot.
inline std::vector<Vector> orthonormal_span_basis(std::span<const Vector> points, double eps_pivot)
{
    require_finite(points);
    common_dimension(points);
    std::vector<Vector> residual(points.begin(), points.end());
    std::vector<Vector> basis;
    while (true) {
        std::size_t best = residual.size();
        double best_norm = eps_pivot;
        for (std::size_t i = 0; i < residual.size(); ++i) {
            const double n = norm(residual[i]);
            if (n > best_norm) {
                best_norm = n;
                best = i;
            }
        }
        if (best == residual.size()) break;
        Vector q = residual[best];
        detail::project_out(q, basis);
        const double qn = norm(q);
        if (qn <= eps_pivot) break;
        for (double& x : q) x /= qn;
        for (auto& r : residual) axpy(r, -dot(r, q), q);
        residual[best].assign(residual[best].size(), 0.0);
        basis.push_back(std::move(q));
    }
    return basis;
}

/// Numerical rank of a point set.
inline std::size_t rank_of(std::span<const Vector> points, double eps_pivot = Tolerances{}.eps_pivot)
{
    return orthonormal_span_basis(points, eps_pivot).size();
}

/// Orthonormal basis of span(points)^perp in R^d, of size d - rank_of(points).
inline std::vector<Vector> orthonormal_complement_basis(std::span<const Vector> points, std::size_t d,
                                                        double eps_pivot = Tolerances{}.eps_pivot)
{
    for (const auto& p : points)
        if (p.size() != d) throw DimensionMismatch("point dimension differs from d");
    std::vector<Vector> basis = orthonormal_span_basis(points, eps_pivot);
    const std::size_t k = basis.size();
    std::vector<Vector> complement;
    for (std::size_t slot = k; slot < d; ++slot) {
        // Of the standard basis vectors, extend with the one least explained by the current basis.
        Vector best;
        double best_norm = -1.0;
        for (std::size_t axis = 0; axis < d; ++axis) {
            Vector r = unit_vector(d, axis);
            detail::project_out(r, basis);
            const double n = norm(r);
            if (n > best_norm) {
                best_norm = n;
                best = std::move(r);
            }
        }
        for (double& x : best) x /= best_norm;
        basis.push_back(best);
        complement.push_back(std::move(best));
    }
    return complement;
}

/// Dimension of the affine hull: rank of {p - p0}.
inline std::size_t affine_dimension(std::span<const Vector> points, double eps_pivot = Tolerances{}.eps_pivot)
{
    if (points.empty()) throw EmptyInput("affine dimension of an empty point set");
    require_finite(points);
    common_dimension(points);
    std::vector<Vector> diffs;
    for (std::size_t i = 1; i < points.size(); ++i) diffs.push_back(difference(points[i], points[0]));
    return rank_of(diffs, eps_pivot);
}

/// Supporting hyperplane {x : <normal, x> = offset} with every point on the side <= offset.
struct Hyperplane
{
    Vector normal;
    double offset = 0.0;
};

/// Directions normal to facets of a hull; the set queried by one hull-expansion round.
struct FacetNormalSet
{
    std::vector<Vector> normals;
    double dedup_tol = Tolerances{}.dedup_tol;

    std::size_t size() const noexcept { return normals.size(); }
};

namespace detail {

/// Affine frame of a point set: origin points[0] plus an orthonormal basis of the
/// direction space span{p - p0}.
struct AffineFrame
{
    Vector origin;
    std::vector<Vector> axes;

    static AffineFrame of(std::span<const Vector> points, double eps_pivot)
    {
        AffineFrame f;
        f.origin = points.front();
        std::vector<Vector> diffs;
        for (std::size_t i = 1; i < points.size(); ++i) diffs.push_back(difference(points[i], points[0]));
        f.axes = orthonormal_span_basis(diffs, eps_pivot);
        return f;
    }

    Vector coords(std::span<const double> p) const
    {
        Vector rel = difference(p, origin);
        Vector c(axes.size());
        for (std::size_t j = 0; j < axes.size(); ++j) c[j] = dot(rel, axes[j]);
        return c;
    }

    Vector lift_direction(std::span<const double> c) const
    {
        Vector v(origin.size(), 0.0);
        for (std::size_t j = 0; j < axes.size(); ++j) axpy(v, c[j], axes[j]);
        return v;
    }
};

/// The unit normal (in frame coordinates) of the hyperplane through `subset`, or nothing
/// if the subset is affinely dependent. `subset` has exactly dim members in R^dim.
inline std::optional<Vector> facet_candidate_normal(std::span<const Vector> coords, std::span<const std::size_t> subset,
                                                    std::size_t dim, double eps_pivot)
{
    std::vector<Vector> diffs;
    for (std::size_t j = 1; j < subset.size(); ++j) diffs.push_back(difference(coords[subset[j]], coords[subset[0]]));
    if (rank_of(diffs, eps_pivot) + 1 != subset.size()) return std::nullopt;
    auto normals = orthonormal_complement_basis(diffs, dim, eps_pivot);
    if (normals.size() != 1) return std::nullopt;
    return normals.front();
}

/// Orients `normal` so all points satisfy <normal, p> <= offset + eps_side, if possible.
inline std::optional<Hyperplane> orient_supporting(std::span<const Vector> points, Vector normal,
                                                   std::span<const double> on_plane, double eps_side)
{
    const double offset = dot(normal, on_plane);
    bool below = true;
    bool above = true;
    for (const auto& p : points) {
        const double s = dot(normal, p) - offset;
        if (s > eps_side) below = false;
        if (s < -eps_side) above = false;
    }
    if (below) return Hyperplane{std::move(normal), offset};
    if (above) return Hyperplane{scaled(normal, -1.0), -offset};
    return std::nullopt;
}

/// Calls f(indices) for every size-k subset of {0..n-1} in lexicographic order.
template <typename F>
void for_each_combination(std::size_t n, std::size_t k, F&& f)
{
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        f(std::span<const std::size_t>(idx));
        if (k == 0) return;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

inline bool same_direction(std::span<const double> a, std::span<const double> b, double dedup_tol)
{
    return angle_between(a, b) <= dedup_tol;
}

inline void push_unique_normal(std::vector<Vector>& out, Vector n, double dedup_tol)
{
    for (const auto& m : out)
        if (same_direction(m, n, dedup_tol)) return;
    out.push_back(std::move(n));
}

} // namespace detail

/// Tests whether the points indexed by `subset` span a facet of Conv(points) inside the
/// affine hull of `points`. The subset must contain aff-dim(points) affinely independent
/// points, otherwise NotAFaceCandidate is thrown. On success the returned normal lies in
/// the direction space of the affine hull (the span itself when the hull is full-dimensional
/// there) and all points satisfy <normal, p> <= offset + eps_side.
inline std::optional<Hyperplane> supporting_hyperplane_test(std::span<const Vector> points,
                                                            std::span<const std::size_t> subset,
                                                            double eps_side = Tolerances{}.eps_side,
                                                            double eps_pivot = Tolerances{}.eps_pivot)
{
    const std::size_t a = affine_dimension(points, eps_pivot);
    if (a == 0) throw NotAFaceCandidate("a single point has no facets");
    if (subset.size() != a) throw NotAFaceCandidate("subset size differs from the hull dimension");
    for (std::size_t i : subset)
        if (i >= points.size()) throw InvalidArgument("subset index out of range");
    const auto frame = detail::AffineFrame::of(points, eps_pivot);
    std::vector<Vector> coords;
    for (const auto& p : points) coords.push_back(frame.coords(p));
    auto local = detail::facet_candidate_normal(coords, subset, a, eps_pivot);
    if (!local) throw NotAFaceCandidate("subset is affinely dependent");
    Vector normal = frame.lift_direction(*local);
    return detail::orient_supporting(points, std::move(normal), points[subset[0]], eps_side);
}

/// All facets of Conv(points) within its affine hull, as outward hyperplanes. Brute force
/// over subsets of size aff-dim; hyperplanes equal within (dedup_tol, eps_side) are merged.
inline std::vector<Hyperplane> enumerate_facets(std::span<const Vector> points, const Tolerances& tol = {})
{
    const std::size_t a = affine_dimension(points, tol.eps_pivot);
    if (a == 0) return {};
    const auto frame = detail::AffineFrame::of(points, tol.eps_pivot);
    std::vector<Vector> coords;
    for (const auto& p : points) coords.push_back(frame.coords(p));

    std::vector<Hyperplane> facets;
    detail::for_each_combination(points.size(), a, [&](std::span<const std::size_t> subset) {
        auto local = detail::facet_candidate_normal(coords, subset, a, tol.eps_pivot);
        if (!local) return;
        auto h = detail::orient_supporting(points, frame.lift_direction(*local), points[subset[0]], tol.eps_side);
        if (!h) return;
        for (const auto& f : facets)
            if (detail::same_direction(f.normal, h->normal, tol.dedup_tol) && std::abs(f.offset - h->offset) <= tol.eps_side)
                return;
        facets.push_back(std::move(*h));
    });
    return facets;
}

/// The query directions for one hull-expansion round over the known points.
///
/// With k = rank and a = affine dimension of the points:
///  - a single point x gives {x, -x};
///  - a = k (hull full-dimensional in the span) gives both unit normals of every facet;
///  - a = k - 1 (hull lies in an affine hyperplane of the span, e.g. k independent points
///    or a circle of coplanar points) gives +-w for the unit normal w of that affine hyperplane
///    plus the outward normal of every facet of the polytope inside it.
/// Every unit vector of the span that is not one of the points is strictly separated from
/// all points by at least one returned direction.
inline FacetNormalSet enumerate_query_normals(std::span<const Vector> points, const Tolerances& tol = {})
{
    if (points.empty()) throw EmptyInput("no points to take the hull of");
    require_finite(points);
    common_dimension(points);

    FacetNormalSet out;
    out.dedup_tol = tol.dedup_tol;
    if (points.size() == 1) {
        out.normals.push_back(points.front());
        out.normals.push_back(scaled(points.front(), -1.0));
        return out;
    }

    const std::size_t k = rank_of(points, tol.eps_pivot);
    const std::size_t a = affine_dimension(points, tol.eps_pivot);
    const auto facets = enumerate_facets(points, tol);

    if (a == k) {
        for (const auto& f : facets) {
            detail::push_unique_normal(out.normals, f.normal, tol.dedup_tol);
            detail::push_unique_normal(out.normals, scaled(f.normal, -1.0), tol.dedup_tol);
        }
        return out;
    }
    if (a + 1 != k) throw InvalidArgument("affine dimension inconsistent with rank; are the points distinct unit vectors?");

    // Normal of the affine hull inside the span, oriented away from the origin.
    const auto span_basis = orthonormal_span_basis(points, tol.eps_pivot);
    const auto frame = detail::AffineFrame::of(points, tol.eps_pivot);
    Vector w;
    double best = -1.0;
    for (const auto& q : span_basis) {
        Vector r = q;
        detail::project_out(r, frame.axes);
        if (const double n = norm(r); n > best) {
            best = n;
            w = std::move(r);
        }
    }
    for (double& x : w) x /= best;
    if (dot(w, points.front()) < 0.0) w = scaled(w, -1.0);

    detail::push_unique_normal(out.normals, w, tol.dedup_tol);
    detail::push_unique_normal(out.normals, scaled(w, -1.0), tol.dedup_tol);
    for (const auto& f : facets) detail::push_unique_normal(out.normals, f.normal, tol.dedup_tol);
    return out;
}

/// sum_i weights[i] * points[i]
inline Vector convex_combination(std::span<const Vector> points, std::span<const double> weights)
{
    if (points.empty()) throw EmptyInput("convex combination of no points");
    if (points.size() != weights.size()) throw InvalidArgument("one weight per point required");
    Vector x(points.front().size(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) axpy(x, weights[i], points[i]);
    return x;
}

/// Number of points at Hamming distance <= radius in {0,1}^d; saturates at UINT64_MAX.
inline std::uint64_t hamming_ball_size(std::size_t d, std::size_t radius)
{
    std::uint64_t total = 0;
    std::uint64_t binom = 1; // C(d, i)
    for (std::size_t i = 0; i <= std::min(radius, d); ++i) {
        if (i > 0) {
            // C(d,i) = C(d,i-1) * (d-i+1) / i, exact in 128-bit
            const unsigned __int128 next = static_cast<unsigned __int128>(binom) * (d - i + 1) / i;
            if (next > UINT64_MAX) return UINT64_MAX;
            binom = static_cast<std::uint64_t>(next);
        }
        if (total > UINT64_MAX - binom) return UINT64_MAX;
        total += binom;
    }
    return total;
}

/// Visits every point at Hamming distance exactly `dist` from center, flipping index
/// sets in lexicographic order.
template <typename F>
void for_each_at_distance(const BinaryPoint& center, std::size_t dist, F&& f)
{
    if (dist > center.size()) throw InvalidArgument("radius out of range");
    BinaryPoint p = center;
    detail::for_each_combination(center.size(), dist, [&](std::span<const std::size_t> flips) {
        for (std::size_t i : flips) p.flip(i);
        f(static_cast<const BinaryPoint&>(p));
        for (std::size_t i : flips) p.flip(i);
    });
}

/// Streams the Hamming ball of the given radius: increasing distance, then lexicographic
/// order of the flipped index sets.
template <typename F>
void for_each_in_hamming_ball(const BinaryPoint& center, std::size_t radius, F&& f)
{
    if (radius > center.size()) throw InvalidArgument("radius out of range");
    for (std::size_t dist = 0; dist <= radius; ++dist) for_each_at_distance(center, dist, f);
}

inline std::vector<BinaryPoint> hamming_ball(const BinaryPoint& center, std::size_t radius)
{
    std::vector<BinaryPoint> out;
    for_each_in_hamming_ball(center, radius, [&](const BinaryPoint& p) { out.push_back(p); });
    return out;
}

} // namespace mms
