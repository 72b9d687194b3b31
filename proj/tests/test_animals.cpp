#include <doctest.h>

#include <set>
#include <sstream>

#include "vacant/animals.hpp"

using namespace vacant;

namespace {

using Cells = std::vector<std::vector<int>>;

// All l-infinity connected sets containing the origin, grown one cell at a
// time and deduplicated through a std::set.
std::vector<std::uint64_t> brute_counts(int Q, int d) {
    std::vector<std::vector<int>> nb;
    std::vector<int> off(d, -1);
    while (true) {
        if (std::any_of(off.begin(), off.end(), [](int v) { return v != 0; })) nb.push_back(off);
        int k = 0;
        while (k < d && off[k] == 1) {
            off[k] = -1;
            ++k;
        }
        if (k == d) break;
        ++off[k];
    }
    std::vector<std::uint64_t> counts(Q + 1, 0);
    std::set<Cells> level{Cells{std::vector<int>(d, 0)}};
    counts[1] = 1;
    for (int q = 2; q <= Q; ++q) {
        std::set<Cells> next;
        for (const auto& a : level) {
            for (const auto& c : a) {
                for (const auto& o : nb) {
                    std::vector<int> w(d);
                    for (int k = 0; k < d; ++k) w[k] = c[k] + o[k];
                    if (std::find(a.begin(), a.end(), w) != a.end()) continue;
                    Cells b = a;
                    b.push_back(w);
                    std::sort(b.begin(), b.end());
                    next.insert(std::move(b));
                }
            }
        }
        counts[q] = next.size();
        level = std::move(next);
    }
    return counts;
}

IVec iv(std::initializer_list<int> v) {
    IVec x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (int a : v) x[i++] = a;
    return x;
}

}  // namespace

TEST_CASE("small counts") {
    for (int d = 1; d <= 4; ++d) CHECK(enumerate(1, d).counts[1] == 1);
    CHECK(enumerate(2, 2).counts[2] == 8);
    CHECK(enumerate(2, 3).counts[2] == 26);
    CHECK_THROWS(enumerate(0, 2));
}

TEST_CASE("enumeration matches the brute-force oracle") {
    const auto e2 = enumerate(6, 2);
    CHECK(e2.counts == brute_counts(6, 2));
    const auto e3 = enumerate(4, 3);
    CHECK(e3.counts == brute_counts(4, 3));
}

TEST_CASE("enumerated animals are distinct, connected and contain the origin") {
    const auto e = enumerate(5, 2, 50'000'000, true);
    std::set<std::vector<std::pair<int, int>>> seen;
    for (const auto& a : e.animals) {
        REQUIRE(a.connected());
        REQUIRE(a.contains(iv({0, 0})));
        std::vector<std::pair<int, int>> key;
        for (const auto& c : a.cells) key.emplace_back(c[0], c[1]);
        REQUIRE(seen.insert(key).second);
    }
    CHECK(seen.size() == e.cumulative(5));
}

TEST_CASE("budget refusal") {
    CHECK_THROWS_AS(enumerate(6, 3, 1000), BudgetExceeded);
}

TEST_CASE("growth bound") {
    const auto g = growth_bound_check(enumerate(6, 2));
    REQUIRE(g.ratios.size() == 6);
    CHECK(g.ratios[0] == 0.0);
    CHECK(g.strictly_increasing);
    CHECK(std::isfinite(g.constant));
    for (double r : g.ratios) CHECK(r <= g.constant);
    CHECK(g.constant < std::log(9.0));
}

TEST_CASE("fill holes") {
    LatticeAnimal square;
    square.d = 2;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) square.cells.push_back(iv({i, j}));
    square.normalize();
    CHECK(fill_holes(square).cells == square.cells);

    LatticeAnimal ring = square;
    ring.cells.erase(std::find(ring.cells.begin(), ring.cells.end(), iv({1, 1})));
    CHECK(complement_components(ring) == 2);
    const LatticeAnimal filled = fill_holes(ring);
    CHECK(filled.contains(iv({1, 1})));
    CHECK(filled.size() == 9);
    CHECK(complement_components(filled) == 1);
    CHECK(fill_holes(filled).cells == filled.cells);

    // Diagonal pinch: still one complement component under face adjacency.
    LatticeAnimal pinch;
    pinch.d = 2;
    pinch.cells = {iv({0, 0}), iv({1, 1})};
    pinch.normalize();
    CHECK(complement_components(pinch) == 1);
}

TEST_CASE("approximation sandwich") {
    const double phi = 1.0, rho = 0.2;
    const int n = int(std::ceil(2 * std::sqrt(3.0) / rho));
    const ShapeSpec ball = ShapeSpec::ball(Vec::Zero(3), 0.3);
    const Approximation a = approximate_set(ball, n, phi, rho);
    CHECK(a.animal.connected());
    const SandwichCheck s = sandwich_violations(ball, a, 10000, 1);
    CHECK(s.inner_violations == 0);
    CHECK(s.outer_violations == 0);

    const ShapeSpec L = l_shape(3, 0.5, 0.15);
    const Approximation b = approximate_set(L, n, phi, rho);
    const SandwichCheck t = sandwich_violations(L, b, 10000, 2);
    CHECK(t.inner_violations == 0);
    CHECK(t.outer_violations == 0);

    const ShapeSpec point = ShapeSpec::ball(Vec::Zero(3), 0.0);
    const Approximation c = approximate_set(point, n, phi, rho);
    CHECK(c.animal.size() >= 1);
    CHECK(in_union(c, Vec::Zero(3)));

    try {
        approximate_set(ball, 5, phi, rho);
        FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
        CHECK(e.minimal_n == n);
    }
}

TEST_CASE("approximation is monotone in the set") {
    const int n = 40;
    const ShapeSpec small = ShapeSpec::ball(Vec::Zero(3), 0.2);
    const ShapeSpec big = ShapeSpec::ball(Vec::Constant(3, 0.02), 0.3);
    const auto a = approximate_set(small, n, 1.0, 0.1);
    const auto b = approximate_set(big, n, 1.0, 0.1);
    for (const auto& c : a.animal.cells) CHECK(b.animal.contains(c));
}

TEST_CASE("animal file format") {
    LatticeAnimal a;
    a.d = 2;
    a.cells = {iv({0, 0}), iv({1, -1})};
    a.normalize();
    std::ostringstream os;
    write_animals(os, {a});
    CHECK(os.str() == "(0,0) (1,-1)\n");
}
