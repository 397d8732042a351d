#pragma once

#include <cstdint>
#include <iosfwd>
#include <list>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "qe/cnf.hpp"

namespace qe {

using FormulaTag = std::uint32_t;

enum class DseqErrc {
    NotSatisfying,
    NoImplication,
    IncompleteCover,
    InconsistentPremises,
    IncompatibleConditionals,
    TargetMismatch,
    FormulaTagMismatch,
    NotResolvable,
    TagNotExtension,
    NotInConstraint,
    InconsistentPair,
    PreconditionViolated,
};

class DseqError : public std::runtime_error {
public:
    DseqError(DseqErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    DseqErrc code() const noexcept { return code_; }

private:
    DseqErrc code_;
};

// (q, H) -> C against the formula version `tag`.
struct DSequent {
    Assignment conditional;
    std::vector<ClauseId> order_constraint;  // sorted, unique
    ClauseId target = 0;
    FormulaTag tag = 0;

    DSequent() = default;
    DSequent(Assignment q, std::vector<ClauseId> h, ClauseId c, FormulaTag t = 0);

    bool constrains(ClauseId id) const;
    std::string to_string() const;

    friend bool operator==(const DSequent&, const DSequent&) = default;
};

bool is_robust(const DSequent& s, const EcnfProblem& prob);

// Versions of a growing formula: version t+1 adds clauses to version t.
class FormulaLineage {
public:
    FormulaTag current() const { return static_cast<FormulaTag>(steps_.size()); }
    FormulaTag extend(std::vector<ClauseId> added, bool implied);
    // clauses added after `from` up to and including `to`
    std::vector<ClauseId> added_between(FormulaTag from, FormulaTag to) const;
    bool implied_between(FormulaTag from, FormulaTag to) const;

private:
    struct Step {
        std::vector<ClauseId> added;
        bool implied = true;
    };
    std::vector<Step> steps_;
};

DSequent atomic_first_kind(const EcnfProblem& prob, ClauseId c, Var v, bool b, FormulaTag tag = 0);
DSequent atomic_second_kind(const EcnfProblem& prob, const Assignment& q, ClauseId b, ClauseId c, FormulaTag tag = 0);
DSequent atomic_third_kind(const EcnfProblem& prob, ClauseId c, Var v, const std::vector<DSequent>& premises,
                           FormulaTag tag = 0);

// Clauses of prob resolvable with c on v (non-tautological resolvent).
std::vector<ClauseId> resolvable_partners(const EcnfProblem& prob, ClauseId c, Var v);

DSequent join(const DSequent& s1, const DSequent& s2, Var v);
bool check_consistent(const std::vector<DSequent>& set);
DSequent align(const DSequent& s, const FormulaLineage& lineage, FormulaTag extended_tag,
               const std::vector<ClauseId>& r);
DSequent substitute(const DSequent& s1, const DSequent& s2);

// Removes m from set[i]'s constraint by substituting out constraint clauses,
// largest topological index first. Ids that are not targets of the set are
// carried through. Intermediate substitutions are appended to `steps`.
DSequent relax_constraint(const std::vector<DSequent>& set, std::size_t i, ClauseId m,
                          std::vector<DSequent>* steps = nullptr);

// Targets of a consistent set in an order where C_i precedes every member
// of H_i; nullopt when the order relation has a cycle.
std::optional<std::vector<ClauseId>> topological_order(const std::vector<DSequent>& set);

// Active D-sequents (at most one per target) plus the order graph.
class ActiveSet {
public:
    bool contains(ClauseId target) const { return dseqs_.count(target) != 0; }
    const DSequent* find(ClauseId target) const;
    std::size_t size() const { return dseqs_.size(); }
    bool empty() const { return dseqs_.empty(); }

    // Consistent with the set: free target, compatible conditional, no cycle.
    bool can_insert(const DSequent& s) const;
    bool try_insert(const DSequent& s);
    void erase(ClauseId target);
    void clear();

    // Ids whose edges, together with s's, close a cycle through s.target.
    std::vector<ClauseId> cycle_members(const DSequent& s) const;

    std::vector<DSequent> to_vector() const;
    const std::map<ClauseId, DSequent>& entries() const { return dseqs_; }

private:
    bool reaches(ClauseId from, ClauseId to) const;

    std::map<ClauseId, DSequent> dseqs_;
};

// Persisted D-sequents keyed by target, least recently used evicted first.
class DSequentStore {
public:
    explicit DSequentStore(std::size_t capacity = 100000) : capacity_(capacity) {}

    // false when an identical entry is already stored
    bool add(const DSequent& s);
    // entries for target whose conditional is contained in q, shortest constraint first
    std::vector<DSequent> lookup(ClauseId target, const Assignment& q);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::vector<DSequent> all() const;

private:
    using Items = std::list<DSequent>;
    std::size_t capacity_;
    Items items_;  // front = most recently used
    std::unordered_map<ClauseId, std::vector<Items::iterator>> by_target_;
};

// Text form of a store plus the derived clauses it depends on.
struct StoreSnapshot {
    bool has_header = false;
    Var num_vars = 0;
    std::size_t num_original_clauses = 0;
    std::uint64_t fingerprint = 0;
    std::vector<Clause> derived;
    std::vector<DSequent> dseqs;
};

class StoreFormatError : public std::runtime_error {
public:
    StoreFormatError(std::size_t line, const std::string& what)
        : std::runtime_error("store line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

std::uint64_t formula_fingerprint(const CnfFormula& f);
void write_snapshot(std::ostream& os, const StoreSnapshot& snap);
StoreSnapshot read_snapshot(std::istream& is);

}  // namespace qe
