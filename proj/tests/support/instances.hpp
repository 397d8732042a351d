#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "qe/cnf.hpp"

namespace qe::testing {

// The four-clause running example: x1..x3 are vars 1..3, y1=4, y2=5.
inline EcnfProblem example1() {
    CnfFormula f(5);
    f.add_dimacs({1, 2});
    f.add_dimacs({-1, 4});
    f.add_dimacs({1, -3, 5});
    f.add_dimacs({-2, 5});
    return EcnfProblem(f, {1, 2, 3});
}

struct InstanceShape {
    unsigned min_vars = 6;
    unsigned max_vars = 14;
    unsigned min_clauses = 3;
    unsigned max_clauses = 30;
    unsigned max_width = 4;
};

// Random exists-CNF: nonempty X, clause widths 1..max_width, no tautologies.
inline EcnfProblem random_instance(std::mt19937_64& rng, const InstanceShape& shape = {}) {
    auto pick = [&](unsigned lo, unsigned hi) { return std::uniform_int_distribution<unsigned>(lo, hi)(rng); };
    unsigned n = pick(shape.min_vars, shape.max_vars);
    unsigned nx = pick(1, n - 1);
    std::vector<Var> vars(n);
    for (unsigned i = 0; i < n; ++i) vars[i] = i + 1;
    std::shuffle(vars.begin(), vars.end(), rng);
    std::vector<Var> xs(vars.begin(), vars.begin() + nx);

    unsigned m = pick(shape.min_clauses, shape.max_clauses);
    CnfFormula f(n);
    for (unsigned k = 0; k < m; ++k) {
        unsigned w = pick(1, std::min(shape.max_width, n));
        std::vector<Var> pool(n);
        for (unsigned i = 0; i < n; ++i) pool[i] = i + 1;
        std::shuffle(pool.begin(), pool.end(), rng);
        std::vector<Literal> lits;
        for (unsigned i = 0; i < w; ++i) lits.push_back(Literal{pool[i], pick(0, 1) == 1});
        f.add_literals(lits);
    }
    return EcnfProblem(f, xs);
}

}  // namespace qe::testing
