#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qe {

using Var = std::uint32_t;
using ClauseId = std::uint32_t;

enum class CnfErrc { Tautology, NotResolvable, VarNotInClause, ConflictingBinding, UnknownClause, BadLiteral };

class CnfError : public std::runtime_error {
public:
    CnfError(CnfErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    CnfErrc code() const noexcept { return code_; }

private:
    CnfErrc code_;
};

struct Literal {
    Var var = 0;
    bool negative = false;

    static Literal from_dimacs(int lit);
    int to_dimacs() const { return negative ? -static_cast<int>(var) : static_cast<int>(var); }
    Literal operator~() const { return {var, !negative}; }
    // true when assigning `value` to var satisfies this literal
    bool satisfied_by(bool value) const { return value != negative; }

    friend bool operator==(const Literal&, const Literal&) = default;
    friend bool operator<(const Literal& a, const Literal& b) {
        return a.var != b.var ? a.var < b.var : (a.negative < b.negative);
    }
};

struct Binding {
    Var var = 0;
    bool value = false;
    friend bool operator==(const Binding&, const Binding&) = default;
};

// Partial assignment, kept sorted by variable.
class Assignment {
public:
    Assignment() = default;
    Assignment(std::initializer_list<std::pair<Var, bool>> bindings);

    std::optional<bool> value(Var v) const;
    bool assigns(Var v) const { return value(v).has_value(); }
    void set(Var v, bool b);
    void erase(Var v);
    std::size_t size() const { return bindings_.size(); }
    bool empty() const { return bindings_.empty(); }
    const std::vector<Binding>& bindings() const { return bindings_; }

    bool subset_of(const Assignment& other) const;
    // Union of two compatible assignments; throws ConflictingBinding otherwise.
    Assignment unite(const Assignment& other) const;
    Assignment without(Var v) const;

    std::string to_string() const;

    friend bool operator==(const Assignment&, const Assignment&) = default;
    friend bool operator<(const Assignment& a, const Assignment& b);

private:
    std::vector<Binding> bindings_;
};

bool compatible(const Assignment& a, const Assignment& b);

// Number of variables assigned differently.
std::size_t clash_count(const Assignment& a, const Assignment& b);

// q1 and q2 must clash exactly on v; result is their union without v.
Assignment resolve_assignments(const Assignment& q1, const Assignment& q2, Var v);

enum class ClauseState { Normal, True, False };

class Clause {
public:
    Clause() = default;
    // Sorts and deduplicates; throws Tautology on complementary literals.
    Clause(ClauseId id, std::vector<Literal> lits);
    static Clause from_dimacs(ClauseId id, const std::vector<int>& lits);
    static Clause satisfied(ClauseId id);

    ClauseId id() const { return id_; }
    const std::vector<Literal>& literals() const { return lits_; }
    ClauseState state() const { return state_; }
    bool is_true() const { return state_ == ClauseState::True; }
    bool is_false() const { return state_ == ClauseState::False; }
    std::size_t size() const { return lits_.size(); }

    bool contains(const Literal& l) const;
    std::optional<Literal> literal_of(Var v) const;
    bool mentions(Var v) const { return literal_of(v).has_value(); }
    // literals of this clause are a subset of the other's
    bool subsumes(const Clause& other) const;
    bool same_literals(const Clause& other) const { return lits_ == other.lits_ && state_ == other.state_; }

    std::string to_string() const;

private:
    ClauseId id_ = 0;
    std::vector<Literal> lits_;
    ClauseState state_ = ClauseState::Normal;
};

// Clauses keyed by stable id, iterated in id order.
class CnfFormula {
public:
    CnfFormula() = default;
    explicit CnfFormula(Var num_vars) : num_vars_(num_vars) {}

    Var num_vars() const { return num_vars_; }
    void set_num_vars(Var n) { num_vars_ = n; }
    std::size_t size() const { return clauses_.size(); }
    bool empty() const { return clauses_.empty(); }

    const std::vector<Clause>& clauses() const { return clauses_; }
    const Clause* find(ClauseId id) const;
    const Clause& at(ClauseId id) const;
    bool contains(ClauseId id) const { return find(id) != nullptr; }
    ClauseId next_id() const { return clauses_.empty() ? 1 : clauses_.back().id() + 1; }

    // Inserts, keeping id order; throws if the id exists.
    void add(Clause c);
    ClauseId add_literals(std::vector<Literal> lits);
    ClauseId add_dimacs(const std::vector<int>& lits);

    CnfFormula without(const std::vector<ClauseId>& ids) const;
    CnfFormula restricted_to(const std::vector<ClauseId>& ids) const;
    std::vector<ClauseId> ids() const;

private:
    Var num_vars_ = 0;
    std::vector<Clause> clauses_;
};

// Existentially quantified CNF: X quantified, everything else free (Y).
class EcnfProblem {
public:
    EcnfProblem() = default;
    EcnfProblem(CnfFormula f, const std::vector<Var>& x_vars);

    const CnfFormula& formula() const { return formula_; }
    CnfFormula& formula() { return formula_; }
    Var num_vars() const { return formula_.num_vars(); }
    const std::vector<Var>& x_vars() const { return x_vars_; }
    const std::vector<Var>& y_vars() const { return y_vars_; }
    bool is_x(Var v) const { return v < quantified_.size() && quantified_[v]; }

    // Clause contains a quantified variable.
    bool is_x_clause(const Clause& c) const;
    bool is_x_clause(ClauseId id) const { return is_x_clause(formula_.at(id)); }
    std::vector<ClauseId> x_clause_ids() const;

    // Restrict an assignment to its free-variable bindings.
    Assignment y_part(const Assignment& q) const;

    EcnfProblem with_formula(CnfFormula f) const { return EcnfProblem(std::move(f), x_vars_); }

private:
    CnfFormula formula_;
    std::vector<Var> x_vars_;
    std::vector<Var> y_vars_;
    std::vector<bool> quantified_;
};

Clause cofactor_clause(const Clause& c, const Assignment& q);
CnfFormula cofactor_formula(const CnfFormula& f, const Assignment& q);

// Resolvent of a and b on v; nullopt when another variable also clashes.
// Throws NotResolvable when v does not occur with opposite polarities.
std::optional<Clause> resolve(const Clause& a, const Clause& b, Var v, ClauseId result_id = 0);

// No Normal clause of f other than c holds the complement of c's literal on v.
bool is_blocked(const CnfFormula& f, const Clause& c, Var v);

// Evaluate a clause under a total-enough assignment: nullopt if undetermined.
std::optional<bool> evaluate(const Clause& c, const Assignment& q);

}  // namespace qe
