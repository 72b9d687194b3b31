#pragma once

// Lattice animals: finite unions of closed unit cubes with integer centres,
// connected under l-infinity adjacency (cubes sharing at least a corner).

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "vacant/capacity.hpp"
#include "vacant/geometry.hpp"
#include "vacant/shape.hpp"

namespace vacant {

struct LatticeAnimal {
    int d = 2;
    std::vector<IVec> cells;  // sorted lexicographically, no repeats

    std::size_t size() const { return cells.size(); }
    bool contains(const IVec& c) const;
    /// Connected under l-infinity distance 1.
    bool connected() const;
    void normalize();  // sort and dedupe
};

bool lex_less(const IVec& a, const IVec& b);

class BudgetExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Enumeration {
    int d = 2;
    int max_size = 1;
    /// counts[q] = number of animals with exactly q cubes containing the
    /// origin cube (counts[0] = 0).
    std::vector<std::uint64_t> counts;
    std::vector<LatticeAnimal> animals;  // filled only when requested

    /// Number with at most q cubes.
    std::uint64_t cumulative(int q) const;
};

/// Every animal of at most Q cubes that contains the origin cube, each once.
/// Redelmeier's untried-set recursion rooted at the origin; with no
/// half-space restriction it lists all translates that contain the origin.
/// Throws BudgetExceeded (and returns nothing) once more than `budget`
/// animals would be produced.
Enumeration enumerate(int Q, int d, std::uint64_t budget = 50'000'000, bool keep_animals = false);

struct GrowthCheck {
    std::vector<double> ratios;  // log(cumulative(q)) / q, q = 1..Q
    double constant = 0.0;       // max of ratios
    bool strictly_increasing = true;
};
GrowthCheck growth_bound_check(const Enumeration& e);

class PreconditionError : public std::invalid_argument {
  public:
    PreconditionError(const std::string& what, int minimal_n)
        : std::invalid_argument(what), minimal_n(minimal_n) {}
    int minimal_n;
};

struct Approximation {
    LatticeAnimal animal;
    double scale = 1.0;  // E(A) = scale * (union of the cubes), scale = 1/(n phi)
    double outer = 0.0;  // rho / phi: E(A) lies within this of E
};

/// All unit cubes meeting n phi E_{rho/(4 phi)}, tested exactly per primitive.
/// Requires rho n >= 2 sqrt(d); otherwise throws PreconditionError carrying
/// the least admissible n.
Approximation approximate_set(const ShapeSpec& E, int n, double phi, double rho);

struct SandwichCheck {
    std::size_t samples = 0;
    std::size_t inner_violations = 0;  // points of E outside E(A)
    std::size_t outer_violations = 0;  // points of E(A) farther than rho/phi from E
};
SandwichCheck sandwich_violations(const ShapeSpec& E, const Approximation& a, std::size_t samples,
                                  std::uint64_t seed);

/// Whether x lies in the union of scale * cubes.
bool in_union(const Approximation& a, const Vec& x);

/// Adds the bounded face-connected components of the complement.
LatticeAnimal fill_holes(const LatticeAnimal& a);
/// Number of face-connected components of the complement (1 for class E_c).
int complement_components(const LatticeAnimal& a);

/// Panel centres on the exposed faces of scale * A, for the energy method.
SurfaceCloud animal_surface(const LatticeAnimal& a, double scale);

/// One animal per line, centres as space-separated tuples "(x,y,...)".
void write_animals(std::ostream& os, const std::vector<LatticeAnimal>& animals);

}  // namespace vacant
