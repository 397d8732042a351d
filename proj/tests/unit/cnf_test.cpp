#include <random>

#include "doctest.h"
#include "qe/cnf.hpp"
#include "support/instances.hpp"

using namespace qe;

namespace {

Clause cl(std::initializer_list<int> lits, ClauseId id = 1) { return Clause::from_dimacs(id, std::vector<int>(lits)); }

std::vector<int> dimacs(const Clause& c) {
    std::vector<int> r;
    for (const auto& l : c.literals()) r.push_back(l.to_dimacs());
    return r;
}

Assignment random_assignment(std::mt19937_64& rng, Var n, double density) {
    Assignment a;
    std::bernoulli_distribution take(density), bit(0.5);
    for (Var v = 1; v <= n; ++v)
        if (take(rng)) a.set(v, bit(rng));
    return a;
}

}  // namespace

TEST_CASE("clauses are sorted, deduplicated and reject tautologies") {
    auto c = cl({3, -1, 3, 2});
    CHECK(dimacs(c) == std::vector<int>{-1, 2, 3});
    CHECK(c.state() == ClauseState::Normal);
    CHECK_THROWS_AS(cl({1, -1}), CnfError);
    CHECK(cl({}).state() == ClauseState::False);
}

TEST_CASE("cofactor_clause") {
    CHECK(dimacs(cofactor_clause(cl({1, 2}), {{1, false}})) == std::vector<int>{2});
    CHECK(cofactor_clause(cl({-1, 4}), {{1, false}}).is_true());
    Assignment p{{1, false}, {2, false}, {3, true}, {4, false}, {5, false}};
    auto r = cofactor_clause(cl({1, -3, 5}, 7), p);
    CHECK(r.is_false());
    CHECK(r.id() == 7);
}

TEST_CASE("cofactor_formula keeps satisfied clauses and ids") {
    auto f = testing::example1().formula();
    auto g = cofactor_formula(f, {{1, true}});
    REQUIRE(g.size() == 4);
    CHECK(g.at(1).is_true());
    CHECK(dimacs(g.at(2)) == std::vector<int>{4});
    CHECK(g.at(3).is_true());
    CHECK(dimacs(g.at(4)) == std::vector<int>{-2, 5});

    auto same = cofactor_formula(f, {});
    for (const auto& c : f.clauses()) CHECK(same.at(c.id()).same_literals(c));

    CnfFormula unit(1);
    unit.add_dimacs({1});
    CHECK(cofactor_formula(unit, {{1, false}}).at(1).is_false());
}

TEST_CASE("resolve") {
    auto r = resolve(cl({1, 2}), cl({-1, 4}), 1);
    REQUIRE(r);
    CHECK(dimacs(*r) == std::vector<int>{2, 4});

    auto f = testing::example1().formula();
    auto r1 = resolve(f.at(1), f.at(2), 1);
    REQUIRE(r1);
    auto r2 = resolve(*r1, f.at(4), 2);
    REQUIRE(r2);
    CHECK(dimacs(*r2) == std::vector<int>{4, 5});

    CHECK_FALSE(resolve(cl({1, 2}), cl({-1, -2}), 1).has_value());
    CHECK_THROWS_AS(resolve(cl({1, 2}), cl({1, 3}), 1), CnfError);
    CHECK_THROWS_AS(resolve(cl({1, 2}), cl({3}), 1), CnfError);
}

TEST_CASE("is_blocked") {
    CnfFormula f(2);
    f.add_dimacs({1, 2});
    CHECK(is_blocked(f, f.at(1), 1));

    CnfFormula g(3);
    g.add_dimacs({1, 2});
    g.add_dimacs({-1, 3});
    CHECK_FALSE(is_blocked(g, g.at(1), 1));
    CHECK_THROWS_AS(is_blocked(g, g.at(1), 3), CnfError);

    // only a tautological resolvent: still blocked
    CnfFormula h(2);
    h.add_dimacs({1, 2});
    h.add_dimacs({-1, -2});
    CHECK(is_blocked(h, h.at(1), 1));
}

TEST_CASE("is_blocked after the partner clauses are satisfied or removed") {
    // x5=5, x10=10, y1=1, y2=2, y3=3, y5=4
    CnfFormula f(10);
    f.add(Clause::from_dimacs(3, {5, 10}));
    f.add(Clause::from_dimacs(6, {-5, 1}));
    f.add(Clause::from_dimacs(8, {-5, 3, 4}));
    f.add(Clause::from_dimacs(10, {-10, 2}));
    Assignment q{{1, true}, {2, false}, {10, true}};
    auto fq = cofactor_formula(f, q);
    CHECK(fq.at(6).is_true());
    CHECK_FALSE(is_blocked(fq, f.at(3), 5));
    CHECK(is_blocked(fq.without({8}), f.at(3), 5));
}

TEST_CASE("resolve_assignments and compatible") {
    CHECK(resolve_assignments({{1, false}, {2, true}}, {{1, true}, {2, true}}, 1) == Assignment{{2, true}});
    CHECK(resolve_assignments({{1, false}}, {{1, true}}, 1).empty());
    CHECK_THROWS_AS(resolve_assignments({{1, false}, {2, false}}, {{1, true}, {2, true}}, 1), CnfError);
    CHECK_THROWS_AS(resolve_assignments({{1, false}}, {{1, false}}, 1), CnfError);

    CHECK(compatible({{1, false}, {2, true}}, {{2, true}, {3, false}}));
    CHECK_FALSE(compatible({{1, false}}, {{1, true}}));
    CHECK(compatible({}, {{1, true}}));
}

TEST_CASE("assignment algebra") {
    Assignment a{{3, true}, {1, false}};
    CHECK(a.bindings().front().var == 1);
    CHECK(a.value(3) == true);
    CHECK_FALSE(a.value(2).has_value());
    CHECK(Assignment{{1, false}}.subset_of(a));
    CHECK_FALSE(Assignment{{1, true}}.subset_of(a));
    CHECK_THROWS_AS(a.unite({{1, true}}), CnfError);
    CHECK(a.unite({{2, true}}).size() == 3);
}

TEST_CASE("cofactor properties on random formulas") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 300; ++iter) {
        auto f = testing::random_instance(rng, {4, 10, 1, 15, 4}).formula();
        auto q = random_assignment(rng, f.num_vars(), 0.3);
        auto r = random_assignment(rng, f.num_vars(), 0.3);
        auto fq = cofactor_formula(f, q);
        auto twice = cofactor_formula(fq, q);
        CHECK(fq.ids() == f.ids());
        for (const auto& c : fq.clauses()) CHECK(twice.at(c.id()).same_literals(c));
        if (compatible(q, r)) {
            auto joint = cofactor_formula(f, q.unite(r));
            auto step = cofactor_formula(fq, r);
            for (const auto& c : joint.clauses()) CHECK(step.at(c.id()).same_literals(c));
        }
    }
}

TEST_CASE("resolution soundness and assignment-resolvent symmetry") {
    std::mt19937_64 rng(12);
    int checked = 0;
    for (int iter = 0; iter < 2000; ++iter) {
        auto f = testing::random_instance(rng, {3, 10, 2, 2, 5}).formula();
        const auto& a = f.clauses()[0];
        const auto& b = f.clauses()[1];
        for (const auto& l : a.literals()) {
            if (!b.contains(~l)) continue;
            auto r = resolve(a, b, l.var);
            if (!r) continue;
            ++checked;
            const Var n = f.num_vars();
            for (std::uint32_t m = 0; m < (1u << n); ++m) {
                Assignment p;
                for (Var v = 1; v <= n; ++v) p.set(v, (m >> (v - 1)) & 1);
                if (evaluate(a, p) == true && evaluate(b, p) == true) CHECK(evaluate(*r, p) == true);
            }
        }
        auto q1 = random_assignment(rng, 6, 0.5);
        auto q2 = random_assignment(rng, 6, 0.5);
        if (clash_count(q1, q2) == 1) {
            for (const auto& bnd : q1.bindings()) {
                auto o = q2.value(bnd.var);
                if (o && *o != bnd.value) CHECK(resolve_assignments(q1, q2, bnd.var) == resolve_assignments(q2, q1, bnd.var));
            }
        }
    }
    CHECK(checked > 50);
}
