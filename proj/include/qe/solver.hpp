#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qe/cnf.hpp"
#include "qe/dsequent.hpp"

namespace qe {

class ResourceLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Provenance { FirstKind, SecondKind, ThirdKind, Residual, Reuse, Join, Substitute, Relax };

const char* to_string(Provenance p);

// Observation points for tests and debugging. Default implementations do nothing.
class SolverHooks {
public:
    virtual ~SolverHooks() = default;
    // every D-sequent the solver constructs, with the formula it refers to
    virtual void on_emit(const DSequent&, Provenance, const EcnfProblem&) {}
    // active set at each return of dcds_plus
    virtual void on_active(const ActiveSet&, const Assignment& /*q*/, const EcnfProblem&) {}
    virtual void on_relax(const std::vector<DSequent>& /*set*/, std::size_t /*i*/, ClauseId /*m*/,
                          const DSequent& /*out*/) {}
    virtual void on_derived(const Clause&) {}
};

struct SolverStats {
    std::uint64_t branches = 0;
    std::uint64_t reuse_attempts = 0;
    std::uint64_t reuses = 0;
    std::uint64_t joins = 0;
    std::uint64_t fix_dseq_calls = 0;
    std::uint64_t fix_dseq_fallbacks = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t derived_clauses = 0;
    std::uint64_t first_kind = 0;
    std::uint64_t second_kind = 0;
    std::uint64_t third_kind = 0;
    std::uint64_t residual_closures = 0;
    std::uint64_t consistency_violations = 0;
    std::uint64_t max_depth = 0;
    std::uint64_t store_size = 0;

    std::vector<std::pair<std::string, std::uint64_t>> items() const;
};

struct SolveOptions {
    bool reuse = true;
    std::size_t store_conditional_cap = 8;
    std::size_t store_capacity = 100000;
    std::uint64_t branch_budget = 0;  // 0: unlimited
    // 0: off; 1: count consistency violations; 2: throw on the first one
    int debug_level = 1;
    const StoreSnapshot* warm_start = nullptr;
    SolverHooks* hooks = nullptr;
};

struct SolveResult {
    CnfFormula f_star;
    CnfFormula final_formula;
    std::size_t original_clause_count = 0;
    std::vector<ClauseId> derived;
    DSequentStore final_store;
    SolverStats stats;
    bool unsatisfiable = false;

    StoreSnapshot snapshot(const EcnfProblem& original) const;
};

struct SolverState {
    EcnfProblem problem;
    FormulaLineage lineage;
    Assignment q;
    ActiveSet active;
    DSequentStore store;
    std::vector<ClauseId> derived;
    std::vector<ClauseId> x_clauses;
    std::size_t original_clause_count = 0;
    bool unsatisfiable = false;
    SolverStats stats;

    FormulaTag tag() const { return lineage.current(); }
};

class Solver {
public:
    Solver(const EcnfProblem& problem, SolveOptions options = {});

    SolveResult run();

    void dcds_plus();
    std::optional<DSequent> try_reuse(ClauseId c);
    ActiveSet join_dseqs_plus(const ActiveSet& ds0, const ActiveSet& ds1, Var v);
    // ds: the set being built by join_dseqs_plus; ds0/ds1: the branch results
    DSequent fix_dseq(const DSequent& s0, const DSequent& s1, Var v, const ActiveSet& ds, const ActiveSet& ds0,
                      const ActiveSet& ds1);
    // true when some D-sequent was activated
    bool atomic_pass();
    ClauseId handle_conflict();
    std::optional<Var> pick_branch_var() const;

    SolverState& state() { return st_; }
    const SolverState& state() const { return st_; }

    // Adds an implied clause to the formula and re-tags the active set.
    ClauseId add_derived(std::vector<Literal> lits);

private:
    struct EmptyClauseDerived {};

    bool prove(ClauseId c);
    void activate(const DSequent& s, Provenance p);
    void emit(const DSequent& s, Provenance p);
    bool all_proved() const;
    std::vector<ClauseId> unproven() const;
    void close_y_complete();
    void check_active();
    DSequent relax_in(const ActiveSet& branch, const DSequent& s, ClauseId m);
    DSequent aligned(const DSequent& s) const;
    void admit(const DSequent& s);
    void load_warm_start(const StoreSnapshot& snap);

    SolverState st_;
    SolveOptions opt_;
    unsigned depth_ = 0;
};

SolveResult solve(const EcnfProblem& problem, const SolveOptions& options = {});

// Result of an X-only search on clauses whose free literals are all false.
struct XRefutation {
    bool satisfiable = false;
    std::vector<Literal> clause;  // when unsatisfiable: the derived clause, free literals only
};

XRefutation refute_over_x(const EcnfProblem& prob, const std::vector<ClauseId>& ids);

// DPLL check that f implies c.
bool implies(const CnfFormula& f, const Clause& c);

}  // namespace qe
