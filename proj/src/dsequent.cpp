#include "qe/dsequent.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_set>

namespace qe {
namespace {

std::vector<ClauseId> sorted_unique(std::vector<ClauseId> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

std::vector<ClauseId> set_union(const std::vector<ClauseId>& a, const std::vector<ClauseId>& b) {
    std::vector<ClauseId> r;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

bool pairwise_compatible(const std::vector<DSequent>& set) {
    for (std::size_t i = 0; i < set.size(); ++i)
        for (std::size_t j = i + 1; j < set.size(); ++j)
            if (!compatible(set[i].conditional, set[j].conditional)) return false;
    return true;
}

const Clause& clause_or_throw(const EcnfProblem& prob, ClauseId id) {
    const Clause* c = prob.formula().find(id);
    if (!c) throw DseqError(DseqErrc::PreconditionViolated, "unknown clause id " + std::to_string(id));
    return *c;
}

}  // namespace

DSequent::DSequent(Assignment q, std::vector<ClauseId> h, ClauseId c, FormulaTag t)
    : conditional(std::move(q)), order_constraint(sorted_unique(std::move(h))), target(c), tag(t) {
    if (constrains(target))
        throw DseqError(DseqErrc::PreconditionViolated, "target C" + std::to_string(target) + " in its own constraint");
}

bool DSequent::constrains(ClauseId id) const {
    return std::binary_search(order_constraint.begin(), order_constraint.end(), id);
}

std::string DSequent::to_string() const {
    std::ostringstream os;
    os << conditional.to_string() << ",{";
    for (std::size_t i = 0; i < order_constraint.size(); ++i) os << (i ? "," : "") << 'C' << order_constraint[i];
    os << "} -> C" << target << " @" << tag;
    return os.str();
}

bool is_robust(const DSequent& s, const EcnfProblem& prob) {
    return std::none_of(s.order_constraint.begin(), s.order_constraint.end(),
                        [&](ClauseId id) { return prob.is_x_clause(id); });
}

FormulaTag FormulaLineage::extend(std::vector<ClauseId> added, bool implied) {
    steps_.push_back(Step{sorted_unique(std::move(added)), implied});
    return current();
}

std::vector<ClauseId> FormulaLineage::added_between(FormulaTag from, FormulaTag to) const {
    std::vector<ClauseId> r;
    for (FormulaTag t = from; t < to && t < steps_.size(); ++t)
        r.insert(r.end(), steps_[t].added.begin(), steps_[t].added.end());
    return sorted_unique(std::move(r));
}

bool FormulaLineage::implied_between(FormulaTag from, FormulaTag to) const {
    for (FormulaTag t = from; t < to && t < steps_.size(); ++t)
        if (!steps_[t].implied) return false;
    return true;
}

DSequent atomic_first_kind(const EcnfProblem& prob, ClauseId c, Var v, bool b, FormulaTag tag) {
    const Clause& cl = clause_or_throw(prob, c);
    if (!prob.is_x_clause(cl)) throw DseqError(DseqErrc::PreconditionViolated, cl.to_string() + " is not an X-clause");
    auto lit = cl.literal_of(v);
    if (!lit || !lit->satisfied_by(b))
        throw DseqError(DseqErrc::NotSatisfying, std::to_string(v) + "=" + (b ? "1" : "0") + " does not satisfy " +
                                                     cl.to_string());
    return DSequent(Assignment{{v, b}}, {}, c, tag);
}

DSequent atomic_second_kind(const EcnfProblem& prob, const Assignment& q, ClauseId b, ClauseId c, FormulaTag tag) {
    if (b == c) throw DseqError(DseqErrc::PreconditionViolated, "second kind needs two distinct clauses");
    auto cq = cofactor_clause(clause_or_throw(prob, c), q);
    if (cq.state() != ClauseState::Normal || !prob.is_x_clause(cq))
        throw DseqError(DseqErrc::PreconditionViolated, "C" + std::to_string(c) + " is not an X-clause at " + q.to_string());
    auto bq = cofactor_clause(clause_or_throw(prob, b), q);
    if (bq.is_true() || !bq.subsumes(cq))
        throw DseqError(DseqErrc::NoImplication, bq.to_string() + " does not imply " + cq.to_string());
    return DSequent(q, {b}, c, tag);
}

std::vector<ClauseId> resolvable_partners(const EcnfProblem& prob, ClauseId c, Var v) {
    const Clause& cl = clause_or_throw(prob, c);
    auto lit = cl.literal_of(v);
    if (!lit) throw DseqError(DseqErrc::PreconditionViolated, "var " + std::to_string(v) + " not in " + cl.to_string());
    std::vector<ClauseId> r;
    for (const auto& d : prob.formula().clauses()) {
        if (d.id() == c || !d.contains(~*lit)) continue;
        if (resolve(cl, d, v).has_value()) r.push_back(d.id());
    }
    return r;
}

DSequent atomic_third_kind(const EcnfProblem& prob, ClauseId c, Var v, const std::vector<DSequent>& premises,
                           FormulaTag tag) {
    if (!prob.is_x(v)) throw DseqError(DseqErrc::PreconditionViolated, "var " + std::to_string(v) + " is not quantified");
    auto partners = resolvable_partners(prob, c, v);
    std::vector<ClauseId> covered;
    for (const auto& s : premises) {
        if (s.tag != tag) throw DseqError(DseqErrc::FormulaTagMismatch, "premise " + s.to_string() + " has another tag");
        covered.push_back(s.target);
    }
    std::sort(covered.begin(), covered.end());
    for (ClauseId id : partners)
        if (!std::binary_search(covered.begin(), covered.end(), id))
            throw DseqError(DseqErrc::IncompleteCover, "no premise for resolvable clause C" + std::to_string(id));
    if (covered.size() != partners.size())
        throw DseqError(DseqErrc::IncompleteCover, "premises do not match the resolvable clauses");
    if (!pairwise_compatible(premises))
        throw DseqError(DseqErrc::IncompatibleConditionals, "premise conditionals are incompatible");
    if (!check_consistent(premises))
        throw DseqError(DseqErrc::InconsistentPremises, "premise order constraints are cyclic");

    Assignment q;
    std::vector<ClauseId> h;
    for (const auto& s : premises) {
        q = q.unite(s.conditional);
        h = set_union(h, s.order_constraint);
    }
    if (std::binary_search(h.begin(), h.end(), c))
        throw DseqError(DseqErrc::InconsistentPremises, "a premise requires C" + std::to_string(c) + " to stay");
    return DSequent(std::move(q), std::move(h), c, tag);
}

DSequent join(const DSequent& s1, const DSequent& s2, Var v) {
    if (s1.target != s2.target) throw DseqError(DseqErrc::TargetMismatch, "join of different targets");
    if (s1.tag != s2.tag) throw DseqError(DseqErrc::FormulaTagMismatch, "join across formula versions");
    Assignment q;
    try {
        q = resolve_assignments(s1.conditional, s2.conditional, v);
    } catch (const CnfError& e) {
        throw DseqError(DseqErrc::NotResolvable, e.what());
    }
    return DSequent(std::move(q), set_union(s1.order_constraint, s2.order_constraint), s1.target, s1.tag);
}

std::optional<std::vector<ClauseId>> topological_order(const std::vector<DSequent>& set) {
    std::map<ClauseId, std::vector<ClauseId>> out;
    std::map<ClauseId, int> indegree;
    for (const auto& s : set) {
        indegree.emplace(s.target, 0);
        for (ClauseId h : s.order_constraint) {
            indegree.emplace(h, 0);
            out[s.target].push_back(h);
        }
    }
    for (const auto& [from, tos] : out)
        for (ClauseId to : tos) ++indegree[to];
    std::priority_queue<ClauseId, std::vector<ClauseId>, std::greater<>> ready;
    for (const auto& [id, d] : indegree)
        if (d == 0) ready.push(id);
    std::vector<ClauseId> order;
    while (!ready.empty()) {
        ClauseId id = ready.top();
        ready.pop();
        order.push_back(id);
        for (ClauseId to : out[id])
            if (--indegree[to] == 0) ready.push(to);
    }
    if (order.size() != indegree.size()) return std::nullopt;
    std::set<ClauseId> targets;
    for (const auto& s : set) targets.insert(s.target);
    std::vector<ClauseId> r;
    for (ClauseId id : order)
        if (targets.count(id)) r.push_back(id);
    return r;
}

bool check_consistent(const std::vector<DSequent>& set) {
    return pairwise_compatible(set) && topological_order(set).has_value();
}

DSequent align(const DSequent& s, const FormulaLineage& lineage, FormulaTag extended_tag,
               const std::vector<ClauseId>& r) {
    if (extended_tag < s.tag || extended_tag > lineage.current())
        throw DseqError(DseqErrc::TagNotExtension, "tag " + std::to_string(extended_tag) + " does not extend " +
                                                       std::to_string(s.tag));
    if (lineage.added_between(s.tag, extended_tag) != sorted_unique(r))
        throw DseqError(DseqErrc::TagNotExtension, "added clauses do not match the lineage");
    if (!lineage.implied_between(s.tag, extended_tag))
        throw DseqError(DseqErrc::TagNotExtension, "extension adds clauses not implied by the formula");
    DSequent out = s;
    out.tag = extended_tag;
    return out;
}

DSequent substitute(const DSequent& s1, const DSequent& s2) {
    if (!s1.constrains(s2.target))
        throw DseqError(DseqErrc::NotInConstraint, "C" + std::to_string(s2.target) + " not in constraint of " +
                                                       s1.to_string());
    if (s1.tag != s2.tag) throw DseqError(DseqErrc::FormulaTagMismatch, "substitution across formula versions");
    if (!check_consistent({s1, s2})) throw DseqError(DseqErrc::InconsistentPair, s1.to_string() + " / " + s2.to_string());
    std::vector<ClauseId> h;
    for (ClauseId id : s1.order_constraint)
        if (id != s2.target) h.push_back(id);
    return DSequent(s1.conditional.unite(s2.conditional), set_union(h, s2.order_constraint), s1.target, s1.tag);
}

DSequent relax_constraint(const std::vector<DSequent>& set, std::size_t i, ClauseId m, std::vector<DSequent>* steps) {
    if (i >= set.size()) throw DseqError(DseqErrc::PreconditionViolated, "index out of range");
    if (!check_consistent(set)) throw DseqError(DseqErrc::PreconditionViolated, "set is not consistent");
    const DSequent& si = set[i];
    if (!si.constrains(m)) throw DseqError(DseqErrc::PreconditionViolated, "C" + std::to_string(m) + " not in constraint");

    std::map<ClauseId, std::size_t> by_target;
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (!by_target.emplace(set[k].target, k).second)
            throw DseqError(DseqErrc::PreconditionViolated, "two D-sequents for C" + std::to_string(set[k].target));
    }
    if (!by_target.count(m)) throw DseqError(DseqErrc::PreconditionViolated, "C" + std::to_string(m) + " has no D-sequent");

    auto order = *topological_order(set);
    std::map<ClauseId, std::size_t> pos;
    for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;

    std::vector<ClauseId> keep;
    for (ClauseId id : si.order_constraint)
        if (id != m) keep.push_back(id);

    DSequent s = substitute(si, set[by_target[m]]);
    if (steps) steps->push_back(s);
    for (;;) {
        std::optional<ClauseId> next;
        for (ClauseId h : s.order_constraint) {
            if (!by_target.count(h) || std::binary_search(keep.begin(), keep.end(), h)) continue;
            if (!next || pos[h] > pos[*next]) next = h;
        }
        if (!next) break;
        s = substitute(s, set[by_target[*next]]);
        if (steps) steps->push_back(s);
    }
    return s;
}

const DSequent* ActiveSet::find(ClauseId target) const {
    auto it = dseqs_.find(target);
    return it == dseqs_.end() ? nullptr : &it->second;
}

bool ActiveSet::reaches(ClauseId from, ClauseId to) const {
    std::vector<ClauseId> stack{from};
    std::unordered_set<ClauseId> seen{from};
    while (!stack.empty()) {
        ClauseId id = stack.back();
        stack.pop_back();
        if (id == to) return true;
        auto it = dseqs_.find(id);
        if (it == dseqs_.end()) continue;
        for (ClauseId h : it->second.order_constraint)
            if (seen.insert(h).second) stack.push_back(h);
    }
    return false;
}

std::vector<ClauseId> ActiveSet::cycle_members(const DSequent& s) const {
    std::vector<ClauseId> r;
    for (ClauseId h : s.order_constraint)
        if (reaches(h, s.target)) r.push_back(h);
    return r;
}

bool ActiveSet::can_insert(const DSequent& s) const {
    if (contains(s.target)) return false;
    for (const auto& [id, other] : dseqs_)
        if (!compatible(other.conditional, s.conditional)) return false;
    return cycle_members(s).empty();
}

bool ActiveSet::try_insert(const DSequent& s) {
    if (!can_insert(s)) return false;
    dseqs_.emplace(s.target, s);
    return true;
}

void ActiveSet::erase(ClauseId target) { dseqs_.erase(target); }

void ActiveSet::clear() { dseqs_.clear(); }

std::vector<DSequent> ActiveSet::to_vector() const {
    std::vector<DSequent> r;
    r.reserve(dseqs_.size());
    for (const auto& [id, s] : dseqs_) r.push_back(s);
    return r;
}

bool DSequentStore::add(const DSequent& s) {
    auto& bucket = by_target_[s.target];
    for (auto it : bucket)
        if (*it == s) return false;
    items_.push_front(s);
    bucket.push_back(items_.begin());
    while (items_.size() > capacity_) {
        auto last = std::prev(items_.end());
        auto& b = by_target_[last->target];
        b.erase(std::find(b.begin(), b.end(), last));
        items_.erase(last);
    }
    return true;
}

std::vector<DSequent> DSequentStore::lookup(ClauseId target, const Assignment& q) {
    std::vector<DSequent> r;
    auto found = by_target_.find(target);
    if (found == by_target_.end()) return r;
    std::vector<Items::iterator> hits;
    for (auto it : found->second)
        if (it->conditional.subset_of(q)) hits.push_back(it);
    for (auto it : hits) items_.splice(items_.begin(), items_, it);
    for (auto it : hits) r.push_back(*it);
    std::stable_sort(r.begin(), r.end(), [](const DSequent& a, const DSequent& b) {
        return a.order_constraint.size() < b.order_constraint.size();
    });
    return r;
}

std::vector<DSequent> DSequentStore::all() const { return {items_.rbegin(), items_.rend()}; }

std::uint64_t formula_fingerprint(const CnfFormula& f) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](std::int64_t x) {
        for (int i = 0; i < 8; ++i) {
            h ^= static_cast<std::uint64_t>(x >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(f.num_vars());
    for (const auto& c : f.clauses()) {
        mix(c.id());
        for (const auto& l : c.literals()) mix(l.to_dimacs());
        mix(0);
    }
    return h;
}

void write_snapshot(std::ostream& os, const StoreSnapshot& snap) {
    os << "c d-sequent store\n";
    if (snap.has_header)
        os << "p store " << snap.num_vars << ' ' << snap.num_original_clauses << ' ' << std::hex << snap.fingerprint
       << std::dec << '\n';
    for (const auto& c : snap.derived) {
        os << "r " << c.id();
        for (const auto& l : c.literals()) os << ' ' << l.to_dimacs();
        os << " 0\n";
    }
    for (const auto& s : snap.dseqs) {
        os << "d " << s.target << " q";
        for (const auto& b : s.conditional.bindings()) os << ' ' << b.var << '=' << (b.value ? 1 : 0);
        os << " h";
        for (ClauseId id : s.order_constraint) os << ' ' << id;
        os << " tag " << s.tag << '\n';
    }
}

namespace {

unsigned long long parse_number(const std::string& tok, std::size_t line) {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
        throw StoreFormatError(line, "expected a number, got '" + tok + "'");
    return std::stoull(tok);
}

}  // namespace

StoreSnapshot read_snapshot(std::istream& is) {
    StoreSnapshot snap;
    std::string text;
    std::size_t line = 0;
    bool header = false;
    while (std::getline(is, text)) {
        ++line;
        std::istringstream ls(text);
        std::string kind;
        if (!(ls >> kind) || kind == "c") continue;
        std::vector<std::string> toks;
        for (std::string t; ls >> t;) toks.push_back(t);
        if (kind == "p") {
            if (toks.size() != 4 || toks[0] != "store") throw StoreFormatError(line, "bad header");
            snap.num_vars = static_cast<Var>(parse_number(toks[1], line));
            snap.num_original_clauses = parse_number(toks[2], line);
            try {
                snap.fingerprint = std::stoull(toks[3], nullptr, 16);
            } catch (const std::exception&) {
                throw StoreFormatError(line, "bad fingerprint");
            }
            header = true;
        } else if (kind == "r") {
            if (toks.size() < 2 || toks.back() != "0") throw StoreFormatError(line, "derived clause must end with 0");
            auto id = static_cast<ClauseId>(parse_number(toks[0], line));
            std::vector<int> lits;
            for (std::size_t k = 1; k + 1 < toks.size(); ++k) {
                try {
                    std::size_t used = 0;
                    int x = std::stoi(toks[k], &used);
                    if (used != toks[k].size() || x == 0) throw std::invalid_argument("");
                    lits.push_back(x);
                } catch (const std::exception&) {
                    throw StoreFormatError(line, "bad literal '" + toks[k] + "'");
                }
            }
            try {
                snap.derived.push_back(Clause::from_dimacs(id, lits));
            } catch (const CnfError& e) {
                throw StoreFormatError(line, e.what());
            }
        } else if (kind == "d") {
            std::size_t k = 0;
            if (toks.size() < 4) throw StoreFormatError(line, "truncated d-line");
            auto target = static_cast<ClauseId>(parse_number(toks[k++], line));
            if (toks[k++] != "q") throw StoreFormatError(line, "expected 'q'");
            Assignment q;
            for (; k < toks.size() && toks[k] != "h"; ++k) {
                auto eq = toks[k].find('=');
                if (eq == std::string::npos) throw StoreFormatError(line, "bad binding '" + toks[k] + "'");
                auto v = static_cast<Var>(parse_number(toks[k].substr(0, eq), line));
                auto bit = toks[k].substr(eq + 1);
                if (v == 0 || (bit != "0" && bit != "1")) throw StoreFormatError(line, "bad binding '" + toks[k] + "'");
                try {
                    q.set(v, bit == "1");
                } catch (const CnfError& e) {
                    throw StoreFormatError(line, e.what());
                }
            }
            if (k == toks.size()) throw StoreFormatError(line, "expected 'h'");
            ++k;
            std::vector<ClauseId> h;
            for (; k < toks.size() && toks[k] != "tag"; ++k) h.push_back(static_cast<ClauseId>(parse_number(toks[k], line)));
            if (k + 2 != toks.size()) throw StoreFormatError(line, "expected 'tag <n>' at end");
            auto tag = static_cast<FormulaTag>(parse_number(toks[k + 1], line));
            try {
                snap.dseqs.emplace_back(std::move(q), std::move(h), target, tag);
            } catch (const DseqError& e) {
                throw StoreFormatError(line, e.what());
            }
        } else {
            throw StoreFormatError(line, "unknown line kind '" + kind + "'");
        }
    }
    if (!header && !snap.derived.empty()) throw StoreFormatError(line, "derived clauses need a 'p store' header");
    snap.has_header = header;
    return snap;
}

}  // namespace qe
