#include "qe/cnf.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace qe {

Literal Literal::from_dimacs(int lit) {
    if (lit == 0) throw CnfError(CnfErrc::BadLiteral, "literal 0");
    return {static_cast<Var>(std::abs(lit)), lit < 0};
}

Assignment::Assignment(std::initializer_list<std::pair<Var, bool>> bindings) {
    for (const auto& [v, b] : bindings) set(v, b);
}

std::optional<bool> Assignment::value(Var v) const {
    auto it = std::lower_bound(bindings_.begin(), bindings_.end(), v,
                               [](const Binding& b, Var x) { return b.var < x; });
    if (it == bindings_.end() || it->var != v) return std::nullopt;
    return it->value;
}

void Assignment::set(Var v, bool b) {
    auto it = std::lower_bound(bindings_.begin(), bindings_.end(), v,
                               [](const Binding& x, Var y) { return x.var < y; });
    if (it != bindings_.end() && it->var == v) {
        if (it->value != b)
            throw CnfError(CnfErrc::ConflictingBinding, "conflicting binding for var " + std::to_string(v));
        return;
    }
    bindings_.insert(it, Binding{v, b});
}

void Assignment::erase(Var v) {
    auto it = std::lower_bound(bindings_.begin(), bindings_.end(), v,
                               [](const Binding& x, Var y) { return x.var < y; });
    if (it != bindings_.end() && it->var == v) bindings_.erase(it);
}

bool Assignment::subset_of(const Assignment& other) const {
    if (size() > other.size()) return false;
    auto j = other.bindings_.begin();
    for (const auto& b : bindings_) {
        while (j != other.bindings_.end() && j->var < b.var) ++j;
        if (j == other.bindings_.end() || j->var != b.var || j->value != b.value) return false;
    }
    return true;
}

Assignment Assignment::unite(const Assignment& other) const {
    Assignment r;
    r.bindings_.reserve(size() + other.size());
    auto i = bindings_.begin();
    auto j = other.bindings_.begin();
    while (i != bindings_.end() || j != other.bindings_.end()) {
        if (j == other.bindings_.end() || (i != bindings_.end() && i->var < j->var)) {
            r.bindings_.push_back(*i++);
        } else if (i == bindings_.end() || j->var < i->var) {
            r.bindings_.push_back(*j++);
        } else {
            if (i->value != j->value)
                throw CnfError(CnfErrc::ConflictingBinding, "conflicting binding for var " + std::to_string(i->var));
            r.bindings_.push_back(*i);
            ++i;
            ++j;
        }
    }
    return r;
}

Assignment Assignment::without(Var v) const {
    Assignment r = *this;
    r.erase(v);
    return r;
}

std::string Assignment::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < bindings_.size(); ++i) {
        if (i) os << ',';
        os << bindings_[i].var << '=' << (bindings_[i].value ? 1 : 0);
    }
    os << ')';
    return os.str();
}

bool operator<(const Assignment& a, const Assignment& b) {
    return std::lexicographical_compare(
        a.bindings_.begin(), a.bindings_.end(), b.bindings_.begin(), b.bindings_.end(),
        [](const Binding& x, const Binding& y) {
            return x.var != y.var ? x.var < y.var : x.value < y.value;
        });
}

std::size_t clash_count(const Assignment& a, const Assignment& b) {
    std::size_t n = 0;
    auto i = a.bindings().begin();
    auto j = b.bindings().begin();
    while (i != a.bindings().end() && j != b.bindings().end()) {
        if (i->var < j->var) {
            ++i;
        } else if (j->var < i->var) {
            ++j;
        } else {
            if (i->value != j->value) ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

bool compatible(const Assignment& a, const Assignment& b) { return clash_count(a, b) == 0; }

Assignment resolve_assignments(const Assignment& q1, const Assignment& q2, Var v) {
    auto a = q1.value(v);
    auto b = q2.value(v);
    if (!a || !b || *a == *b || clash_count(q1, q2) != 1)
        throw CnfError(CnfErrc::NotResolvable,
                       "assignments " + q1.to_string() + " and " + q2.to_string() +
                           " do not clash exactly on var " + std::to_string(v));
    return q1.without(v).unite(q2.without(v));
}

Clause::Clause(ClauseId id, std::vector<Literal> lits) : id_(id), lits_(std::move(lits)) {
    std::sort(lits_.begin(), lits_.end());
    lits_.erase(std::unique(lits_.begin(), lits_.end()), lits_.end());
    for (std::size_t i = 1; i < lits_.size(); ++i) {
        if (lits_[i].var == lits_[i - 1].var)
            throw CnfError(CnfErrc::Tautology, "tautological clause on var " + std::to_string(lits_[i].var));
    }
    state_ = lits_.empty() ? ClauseState::False : ClauseState::Normal;
}

Clause Clause::from_dimacs(ClauseId id, const std::vector<int>& lits) {
    std::vector<Literal> l;
    l.reserve(lits.size());
    for (int x : lits) l.push_back(Literal::from_dimacs(x));
    return Clause(id, std::move(l));
}

Clause Clause::satisfied(ClauseId id) {
    Clause c;
    c.id_ = id;
    c.state_ = ClauseState::True;
    return c;
}

std::optional<Literal> Clause::literal_of(Var v) const {
    auto it = std::lower_bound(lits_.begin(), lits_.end(), Literal{v, false});
    if (it == lits_.end() || it->var != v) return std::nullopt;
    return *it;
}

bool Clause::contains(const Literal& l) const {
    auto found = literal_of(l.var);
    return found && *found == l;
}

bool Clause::subsumes(const Clause& other) const {
    return std::includes(other.lits_.begin(), other.lits_.end(), lits_.begin(), lits_.end());
}

std::string Clause::to_string() const {
    if (state_ == ClauseState::True) return "C" + std::to_string(id_) + ":true";
    std::ostringstream os;
    os << 'C' << id_ << ":(";
    for (std::size_t i = 0; i < lits_.size(); ++i) {
        if (i) os << ' ';
        os << lits_[i].to_dimacs();
    }
    os << ')';
    return os.str();
}

const Clause* CnfFormula::find(ClauseId id) const {
    auto it = std::lower_bound(clauses_.begin(), clauses_.end(), id,
                               [](const Clause& c, ClauseId x) { return c.id() < x; });
    if (it == clauses_.end() || it->id() != id) return nullptr;
    return &*it;
}

const Clause& CnfFormula::at(ClauseId id) const {
    const Clause* c = find(id);
    if (!c) throw CnfError(CnfErrc::UnknownClause, "unknown clause id " + std::to_string(id));
    return *c;
}

void CnfFormula::add(Clause c) {
    auto it = std::lower_bound(clauses_.begin(), clauses_.end(), c.id(),
                               [](const Clause& x, ClauseId y) { return x.id() < y; });
    if (it != clauses_.end() && it->id() == c.id())
        throw CnfError(CnfErrc::UnknownClause, "duplicate clause id " + std::to_string(c.id()));
    for (const auto& l : c.literals()) num_vars_ = std::max(num_vars_, l.var);
    clauses_.insert(it, std::move(c));
}

ClauseId CnfFormula::add_literals(std::vector<Literal> lits) {
    ClauseId id = next_id();
    add(Clause(id, std::move(lits)));
    return id;
}

ClauseId CnfFormula::add_dimacs(const std::vector<int>& lits) {
    ClauseId id = next_id();
    add(Clause::from_dimacs(id, lits));
    return id;
}

CnfFormula CnfFormula::without(const std::vector<ClauseId>& ids) const {
    CnfFormula r(num_vars_);
    for (const auto& c : clauses_)
        if (std::find(ids.begin(), ids.end(), c.id()) == ids.end()) r.clauses_.push_back(c);
    return r;
}

CnfFormula CnfFormula::restricted_to(const std::vector<ClauseId>& ids) const {
    CnfFormula r(num_vars_);
    for (const auto& c : clauses_)
        if (std::find(ids.begin(), ids.end(), c.id()) != ids.end()) r.clauses_.push_back(c);
    return r;
}

std::vector<ClauseId> CnfFormula::ids() const {
    std::vector<ClauseId> r;
    r.reserve(clauses_.size());
    for (const auto& c : clauses_) r.push_back(c.id());
    return r;
}

EcnfProblem::EcnfProblem(CnfFormula f, const std::vector<Var>& x_vars) : formula_(std::move(f)) {
    Var n = formula_.num_vars();
    for (Var v : x_vars) n = std::max(n, v);
    formula_.set_num_vars(n);
    quantified_.assign(n + 1, false);
    for (Var v : x_vars) {
        if (v == 0) throw CnfError(CnfErrc::BadLiteral, "variable 0");
        quantified_[v] = true;
    }
    for (Var v = 1; v <= n; ++v) (quantified_[v] ? x_vars_ : y_vars_).push_back(v);
}

bool EcnfProblem::is_x_clause(const Clause& c) const {
    return std::any_of(c.literals().begin(), c.literals().end(), [&](const Literal& l) { return is_x(l.var); });
}

std::vector<ClauseId> EcnfProblem::x_clause_ids() const {
    std::vector<ClauseId> r;
    for (const auto& c : formula_.clauses())
        if (is_x_clause(c)) r.push_back(c.id());
    return r;
}

Assignment EcnfProblem::y_part(const Assignment& q) const {
    Assignment r;
    for (const auto& b : q.bindings())
        if (!is_x(b.var)) r.set(b.var, b.value);
    return r;
}

Clause cofactor_clause(const Clause& c, const Assignment& q) {
    if (c.is_true()) return c;
    std::vector<Literal> rest;
    for (const auto& l : c.literals()) {
        auto v = q.value(l.var);
        if (!v) {
            rest.push_back(l);
        } else if (l.satisfied_by(*v)) {
            return Clause::satisfied(c.id());
        }
    }
    return Clause(c.id(), std::move(rest));
}

CnfFormula cofactor_formula(const CnfFormula& f, const Assignment& q) {
    CnfFormula r(f.num_vars());
    for (const auto& c : f.clauses()) r.add(cofactor_clause(c, q));
    return r;
}

std::optional<Clause> resolve(const Clause& a, const Clause& b, Var v, ClauseId result_id) {
    auto la = a.literal_of(v);
    auto lb = b.literal_of(v);
    if (!la || !lb || la->negative == lb->negative)
        throw CnfError(CnfErrc::NotResolvable, a.to_string() + " and " + b.to_string() +
                                                   " do not clash on var " + std::to_string(v));
    std::vector<Literal> lits;
    for (const auto& l : a.literals())
        if (l.var != v) lits.push_back(l);
    for (const auto& l : b.literals()) {
        if (l.var == v) continue;
        auto other = a.literal_of(l.var);
        if (other && other->negative != l.negative) return std::nullopt;
        lits.push_back(l);
    }
    return Clause(result_id, std::move(lits));
}

bool is_blocked(const CnfFormula& f, const Clause& c, Var v) {
    auto lit = c.literal_of(v);
    if (!lit) throw CnfError(CnfErrc::VarNotInClause, "var " + std::to_string(v) + " not in " + c.to_string());
    for (const auto& d : f.clauses()) {
        if (d.id() == c.id() || d.state() != ClauseState::Normal) continue;
        if (!d.contains(~*lit)) continue;
        if (resolve(c, d, v).has_value()) return false;
    }
    return true;
}

std::optional<bool> evaluate(const Clause& c, const Assignment& q) {
    if (c.is_true()) return true;
    bool open = false;
    for (const auto& l : c.literals()) {
        auto v = q.value(l.var);
        if (!v) {
            open = true;
        } else if (l.satisfied_by(*v)) {
            return true;
        }
    }
    if (open) return std::nullopt;
    return false;
}

}  // namespace qe
