#pragma once

// Enumeration-based reference semantics. Everything here sweeps the full
// point space, so sizes are capped and exceeding the cap throws.

#include <optional>
#include <stdexcept>
#include <vector>

#include "qe/cnf.hpp"

namespace qe {

struct OracleLimits {
    unsigned max_vars = 24;
    // Cap on clauses that dsequent_holds may leave out of a member formula.
    unsigned max_free_clauses = 22;
};

class OracleTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotBoundaryPoint : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RedundancyVerdict {
    bool redundant = true;
    std::optional<Assignment> witness;
};

// CNF over the free variables, one full-width clause per Y-point where
// Exists X F is false; a single empty clause when it is false everywhere.
CnfFormula qe_by_enumeration(const EcnfProblem& prob, const OracleLimits& lim = {});

bool is_z_boundary_point(const Assignment& p, const CnfFormula& f, const std::vector<Var>& z);

// p must be a Z-boundary point for some Z within x_prime; throws NotBoundaryPoint otherwise.
bool is_removable(const Assignment& p, const EcnfProblem& prob, const std::vector<Var>& x_prime,
                  const OracleLimits& lim = {});

RedundancyVerdict is_redundant_set(const std::vector<ClauseId>& g, const EcnfProblem& prob, const Assignment& q,
                                   const OracleLimits& lim = {});

bool is_virtually_redundant(ClauseId c, const EcnfProblem& prob, const Assignment& q, const OracleLimits& lim = {});

bool equiv_quantified(const CnfFormula& candidate, const EcnfProblem& prob, const OracleLimits& lim = {});

// A Y-point where candidate and Exists X F differ.
std::optional<Assignment> equivalence_counterexample(const CnfFormula& candidate, const EcnfProblem& prob,
                                                     const OracleLimits& lim = {});

enum class MemberRule {
    // any W with h+c <= W <= F equivalent to F at q
    AnySubset,
    // additionally, every clause of F outside W is an X-clause at q
    DropSubspaceXClausesOnly,
};

// Semantic check of (q, h) -> c against prob's formula: for every W with
// h+c <= W <= F and Exists X[W|q] == Exists X[F|q], c is virtually redundant
// in W at q. Enumerates every such W.
bool dsequent_holds(const EcnfProblem& prob, const Assignment& q, const std::vector<ClauseId>& h, ClauseId c,
                    const OracleLimits& lim = {}, MemberRule rule = MemberRule::AnySubset);

// dsequent_holds at q extended by every full assignment to the free
// variables. Implies dsequent_holds at q itself; unlike it, survives
// further extension of the conditional.
bool dsequent_holds_in_all_subspaces(const EcnfProblem& prob, const Assignment& q, const std::vector<ClauseId>& h,
                                     ClauseId c, const OracleLimits& lim = {});

}  // namespace qe
