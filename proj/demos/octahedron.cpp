// Recovers the octahedron through nearest-point queries and prints the query trace size.

#include <iostream>

#include "mms/harness/instances.hpp"
#include "mms/sphere_solver.hpp"

int main()
{
    mms::Oracle oracle(mms::harness::corpus_cross_polytope(3), mms::TieBreakPolicy::PreferRevealed);
    const auto rep = mms::solve_sphere(mms::SphereNearestOracle(oracle));
    std::cout << "rank " << rep.basis_size << ", " << rep.recovered.size() << " points, " << rep.queries
              << " queries in " << rep.rounds << " rounds\n";
    for (const auto& p : rep.recovered) {
        for (std::size_t i = 0; i < p.dim(); ++i) std::cout << (i ? " " : "") << p[i];
        std::cout << '\n';
    }
}
