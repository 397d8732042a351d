#include <random>

#include "doctest.h"
#include "qe/oracle.hpp"
#include "support/instances.hpp"

using namespace qe;
using qe::testing::example1;

namespace {

Assignment point(std::initializer_list<int> bits) {
    Assignment a;
    Var v = 1;
    for (int b : bits) a.set(v++, b != 0);
    return a;
}

Assignment total(std::uint32_t m, Var n) {
    Assignment a;
    for (Var v = 1; v <= n; ++v) a.set(v, (m >> (v - 1)) & 1);
    return a;
}

Assignment random_cube(std::mt19937_64& rng, Var n, double density) {
    Assignment a;
    std::bernoulli_distribution take(density), bit(0.5);
    for (Var v = 1; v <= n; ++v)
        if (take(rng)) a.set(v, bit(rng));
    return a;
}

bool satisfies(const CnfFormula& f, const Assignment& p) {
    for (const auto& c : f.clauses())
        if (evaluate(c, p) != true) return false;
    return true;
}

}  // namespace

TEST_CASE("boundary points of the running example") {
    auto f = example1().formula();
    auto p = point({0, 0, 1, 0, 0});
    CHECK(is_z_boundary_point(p, f, {1}));
    CHECK(is_z_boundary_point(p, f, {2, 3}));
    CHECK_FALSE(is_z_boundary_point(p, f, {1, 2}));
    CHECK_FALSE(is_z_boundary_point(p, f, {}));
    CHECK_FALSE(is_z_boundary_point(point({1, 1, 0, 1, 1}), f, {1}));
}

TEST_CASE("removability") {
    auto prob = example1();
    CHECK(is_removable(point({0, 0, 1, 0, 0}), prob, {1, 2, 3}));
    CHECK_FALSE(is_removable(point({0, 0, 1, 1, 1}), prob, {1, 2, 3}));

    CnfFormula f(1);
    f.add_dimacs({1});
    CHECK_FALSE(is_removable({{1, false}}, EcnfProblem(f, {1}), {1}));

    CHECK_THROWS_AS(is_removable(point({1, 1, 0, 1, 1}), prob, {1, 2, 3}), NotBoundaryPoint);
    CHECK_THROWS_AS(is_removable(point({0, 0, 1, 0, 0}), prob, {1, 4}), NotBoundaryPoint);
}

TEST_CASE("qe_by_enumeration and equiv_quantified") {
    auto prob = example1();
    CnfFormula expected(5);
    expected.add_dimacs({4, 5});
    CHECK(equiv_quantified(expected, prob));
    CHECK(equiv_quantified(qe_by_enumeration(prob), prob));

    CnfFormula weak(5);
    weak.add_dimacs({4});
    CHECK_FALSE(equiv_quantified(weak, prob));
    auto cex = equivalence_counterexample(weak, prob);
    REQUIRE(cex);
    CHECK(*cex == Assignment{{4, false}, {5, true}});

    CnfFormula free_only(3);
    free_only.add_dimacs({1, -2});
    free_only.add_dimacs({3});
    EcnfProblem no_x(free_only, {});
    CHECK(equiv_quantified(free_only, no_x));

    CnfFormula contra(2);
    contra.add_dimacs({1});
    contra.add_dimacs({-1});
    auto star = qe_by_enumeration(EcnfProblem(contra, {1}));
    REQUIRE(star.size() == 1);
    CHECK(star.clauses()[0].is_false());

    CHECK_THROWS_AS(equiv_quantified(expected, prob, OracleLimits{4}), OracleTooLarge);
    CnfFormula mentions_x(5);
    mentions_x.add_dimacs({1});
    CHECK_THROWS_AS(equiv_quantified(mentions_x, prob), std::invalid_argument);
}

TEST_CASE("is_redundant_set") {
    // x1=1, x2=2, y=3; C1 and C2 are copies
    CnfFormula f(3);
    f.add_dimacs({1, 3});
    f.add_dimacs({1, 3});
    f.add_dimacs({-1, 2});
    f.add_dimacs({-2, -1});
    EcnfProblem prob(f, {1, 2});
    CHECK(is_redundant_set({1}, prob, {}).redundant);
    auto both = is_redundant_set({1, 2}, prob, {});
    CHECK_FALSE(both.redundant);
    REQUIRE(both.witness);
    // the witness falsifies only the removed clauses and cannot be repaired over X
    for (const auto& c : f.clauses())
        if (c.id() > 2) CHECK(evaluate(c, *both.witness) == true);
    CHECK(is_removable(*both.witness, prob, {1, 2}));

    // a clause satisfied by q
    CHECK(is_redundant_set({1, 2}, prob, {{3, true}}).redundant);
}

TEST_CASE("quantified redundancy without plain redundancy") {
    CnfFormula f(2);
    f.add_dimacs({1, 2});
    EcnfProblem prob(f, {1, 2});
    CHECK(is_redundant_set({1}, prob, {}).redundant);
    // F is not equivalent to the empty formula: (0,0) falsifies it
    CHECK_FALSE(satisfies(f, {{1, false}, {2, false}}));
}

TEST_CASE("virtual redundancy") {
    CnfFormula unit(1);
    unit.add_dimacs({1});
    EcnfProblem prob(unit, {1});
    CHECK(is_virtually_redundant(1, prob, {}));
    // F|q is unsatisfiable, so the point is removable there, but not in F itself
    CHECK(is_virtually_redundant(1, prob, {{1, false}}));

    CnfFormula contra(1);
    contra.add_dimacs({1});
    contra.add_dimacs({-1});
    CHECK_FALSE(is_virtually_redundant(1, EcnfProblem(contra, {1}), {{1, false}}));

    auto ex = example1();
    CnfFormula doubled = ex.formula();
    doubled.add_dimacs({1, 2});
    CHECK(is_virtually_redundant(1, ex.with_formula(doubled), {}));
}

TEST_CASE("removability is preserved in subspaces") {
    std::mt19937_64 rng(21);
    int checked = 0;
    for (int iter = 0; iter < 200; ++iter) {
        auto prob = testing::random_instance(rng, {3, 8, 2, 10, 3});
        auto q = random_cube(rng, prob.num_vars(), 0.3);
        auto fq = prob.with_formula(cofactor_formula(prob.formula(), q));
        std::vector<Var> rest_x;
        for (Var v : prob.x_vars())
            if (!q.assigns(v)) rest_x.push_back(v);
        for (std::uint32_t m = 0; m < (1u << prob.num_vars()); ++m) {
            auto p = total(m, prob.num_vars());
            if (!q.subset_of(p)) continue;
            bool removable = false;
            try {
                removable = is_removable(p, prob, prob.x_vars());
            } catch (const NotBoundaryPoint&) {
                continue;
            }
            if (!removable) continue;
            bool in_subspace = false;
            try {
                in_subspace = is_removable(p, fq, rest_x);
            } catch (const NotBoundaryPoint&) {
                continue;
            }
            CHECK(in_subspace);
            ++checked;
        }
    }
    CHECK(checked > 20);
}

TEST_CASE("redundancy is incremental") {
    std::mt19937_64 rng(22);
    int checked = 0;
    for (int iter = 0; iter < 300; ++iter) {
        auto prob = testing::random_instance(rng, {4, 12, 3, 14, 3});
        auto xs = prob.x_clause_ids();
        if (xs.size() < 2) continue;
        std::vector<ClauseId> h{xs[0]};
        ClauseId c = xs[1];
        if (!is_redundant_set(h, prob, {}).redundant) continue;
        auto rest = prob.with_formula(prob.formula().without(h));
        if (!is_redundant_set({c}, rest, {}).redundant) continue;
        CHECK(is_redundant_set({xs[0], c}, prob, {}).redundant);
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("redundancy implies virtual redundancy in finer subspaces") {
    std::mt19937_64 rng(23);
    int checked = 0;
    for (int iter = 0; iter < 300; ++iter) {
        auto prob = testing::random_instance(rng, {3, 9, 2, 12, 3});
        auto xs = prob.x_clause_ids();
        if (xs.empty()) continue;
        ClauseId c = xs[rng() % xs.size()];
        auto q = random_cube(rng, prob.num_vars(), 0.2);
        if (!is_redundant_set({c}, prob, q).redundant) continue;
        for (int k = 0; k < 4; ++k) {
            auto r = q.unite(Assignment{});
            for (const auto& b : random_cube(rng, prob.num_vars(), 0.3).bindings())
                if (!r.assigns(b.var)) r.set(b.var, b.value);
            CHECK(is_virtually_redundant(c, prob, r));
            ++checked;
        }
    }
    CHECK(checked > 40);
}

TEST_CASE("satisfiable formulas have single-variable boundary points next to a model") {
    std::mt19937_64 rng(24);
    for (int iter = 0; iter < 200; ++iter) {
        const auto f = testing::random_instance(rng, {2, 8, 1, 12, 3}).formula();
        const Var n = f.num_vars();
        bool sat = false, found = false;
        for (std::uint32_t m = 0; m < (1u << n) && !found; ++m) {
            auto s = total(m, n);
            if (!satisfies(f, s)) continue;
            sat = true;
            for (Var v = 1; v <= n && !found; ++v)
                found = is_z_boundary_point(total(m ^ (1u << (v - 1)), n), f, {v});
        }
        CHECK(found == sat);
    }
}

TEST_CASE("dsequent_holds matches virtual redundancy when W is forced to F") {
    std::mt19937_64 rng(25);
    for (int iter = 0; iter < 300; ++iter) {
        auto prob = testing::random_instance(rng, {3, 8, 2, 9, 3});
        auto xs = prob.x_clause_ids();
        if (xs.empty()) continue;
        ClauseId c = xs[rng() % xs.size()];
        std::vector<ClauseId> others;
        for (ClauseId id : prob.formula().ids())
            if (id != c) others.push_back(id);
        auto q = random_cube(rng, prob.num_vars(), 0.25);
        CHECK(dsequent_holds(prob, q, others, c) == is_virtually_redundant(c, prob, q));
    }
}
