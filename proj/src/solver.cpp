#include "qe/solver.hpp"

#include <algorithm>
#include <climits>
#include <map>

namespace qe {

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::FirstKind: return "first-kind";
        case Provenance::SecondKind: return "second-kind";
        case Provenance::ThirdKind: return "third-kind";
        case Provenance::Residual: return "residual";
        case Provenance::Reuse: return "reuse";
        case Provenance::Join: return "join";
        case Provenance::Substitute: return "substitute";
        case Provenance::Relax: return "relax";
    }
    return "?";
}

std::vector<std::pair<std::string, std::uint64_t>> SolverStats::items() const {
    return {
        {"branches", branches},
        {"reuse_attempts", reuse_attempts},
        {"reuses", reuses},
        {"joins", joins},
        {"fix_dseq_calls", fix_dseq_calls},
        {"fix_dseq_fallbacks", fix_dseq_fallbacks},
        {"conflicts", conflicts},
        {"derived_clauses", derived_clauses},
        {"first_kind", first_kind},
        {"second_kind", second_kind},
        {"third_kind", third_kind},
        {"residual_closures", residual_closures},
        {"consistency_violations", consistency_violations},
        {"max_depth", max_depth},
        {"store_size", store_size},
    };
}

StoreSnapshot SolveResult::snapshot(const EcnfProblem& original) const {
    StoreSnapshot s;
    s.has_header = true;
    s.num_vars = original.num_vars();
    s.num_original_clauses = original.formula().size();
    s.fingerprint = formula_fingerprint(original.formula());
    for (ClauseId id : derived) s.derived.push_back(final_formula.at(id));
    s.dseqs = final_store.all();
    return s;
}

namespace {

XRefutation refute(const EcnfProblem& prob, const std::vector<const Clause*>& clauses, Assignment& path) {
    const Clause* pick = nullptr;
    Literal pick_lit;
    int pick_open = INT_MAX;
    for (const Clause* cl : clauses) {
        bool sat = false;
        int open = 0;
        Literal open_lit;
        for (const auto& l : cl->literals()) {
            if (!prob.is_x(l.var)) continue;
            auto v = path.value(l.var);
            if (!v) {
                ++open;
                if (open == 1) open_lit = l;
            } else if (l.satisfied_by(*v)) {
                sat = true;
                break;
            }
        }
        if (sat) continue;
        if (open == 0) return {false, cl->literals()};
        if (open < pick_open) {
            pick = cl;
            pick_open = open;
            pick_lit = open_lit;
        }
    }
    if (!pick) return {true, {}};

    const Var x = pick_lit.var;
    const bool first = !pick_lit.negative;
    path.set(x, first);
    XRefutation r0 = refute(prob, clauses, path);
    path.erase(x);
    if (r0.satisfiable) return r0;
    Clause k0(0, r0.clause);
    if (!k0.mentions(x)) return r0;

    path.set(x, !first);
    XRefutation r1 = refute(prob, clauses, path);
    path.erase(x);
    if (r1.satisfiable) return r1;
    Clause k1(0, r1.clause);
    if (!k1.mentions(x)) return r1;

    auto res = resolve(k0, k1, x);
    if (!res) throw std::logic_error("tautological resolvent in X-refutation");
    return {false, res->literals()};
}

bool dpll(const std::vector<const Clause*>& clauses, Assignment& a) {
    // unit propagation
    std::vector<Var> trail;
    for (bool changed = true; changed;) {
        changed = false;
        for (const Clause* c : clauses) {
            bool sat = false;
            int open = 0;
            Literal last;
            for (const auto& l : c->literals()) {
                auto v = a.value(l.var);
                if (!v) {
                    ++open;
                    last = l;
                } else if (l.satisfied_by(*v)) {
                    sat = true;
                    break;
                }
            }
            if (sat) continue;
            if (open == 0) {
                for (Var v : trail) a.erase(v);
                return false;
            }
            if (open == 1) {
                a.set(last.var, !last.negative);
                trail.push_back(last.var);
                changed = true;
            }
        }
    }
    const Clause* pick = nullptr;
    for (const Clause* c : clauses) {
        bool sat = false;
        for (const auto& l : c->literals()) {
            auto v = a.value(l.var);
            if (v && l.satisfied_by(*v)) {
                sat = true;
                break;
            }
        }
        if (!sat) {
            pick = c;
            break;
        }
    }
    if (!pick) return true;
    Var x = 0;
    for (const auto& l : pick->literals())
        if (!a.assigns(l.var)) {
            x = l.var;
            break;
        }
    for (bool b : {false, true}) {
        a.set(x, b);
        if (dpll(clauses, a)) return true;
        a.erase(x);
    }
    for (Var v : trail) a.erase(v);
    return false;
}

}  // namespace

XRefutation refute_over_x(const EcnfProblem& prob, const std::vector<ClauseId>& ids) {
    std::vector<const Clause*> clauses;
    for (ClauseId id : ids) clauses.push_back(&prob.formula().at(id));
    Assignment path;
    XRefutation r = refute(prob, clauses, path);
    if (!r.satisfiable) {
        for (const auto& l : r.clause)
            if (prob.is_x(l.var)) throw std::logic_error("refutation left a quantified literal");
    }
    return r;
}

bool implies(const CnfFormula& f, const Clause& c) {
    std::vector<const Clause*> clauses;
    for (const auto& cl : f.clauses()) clauses.push_back(&cl);
    Assignment a;
    // F and not c: fix c's literals false
    for (const auto& l : c.literals()) a.set(l.var, l.negative);
    return !dpll(clauses, a);
}

Solver::Solver(const EcnfProblem& problem, SolveOptions options) : opt_(options) {
    st_.problem = problem;
    st_.store = DSequentStore(opt_.store_capacity);
    st_.original_clause_count = problem.formula().size();
    st_.x_clauses = problem.x_clause_ids();
    if (opt_.warm_start) load_warm_start(*opt_.warm_start);
}

void Solver::load_warm_start(const StoreSnapshot& snap) {
    if (snap.has_header) {
        if (snap.num_vars != st_.problem.num_vars() || snap.num_original_clauses != st_.original_clause_count ||
            snap.fingerprint != formula_fingerprint(st_.problem.formula()))
            throw std::invalid_argument("store was produced for a different formula");
    }
    auto derived = snap.derived;
    std::sort(derived.begin(), derived.end(), [](const Clause& a, const Clause& b) { return a.id() < b.id(); });
    for (const auto& c : derived) {
        if (c.id() != st_.problem.formula().next_id())
            throw std::invalid_argument("derived clause ids in the store are not contiguous");
        if (!implies(st_.problem.formula(), c))
            throw std::invalid_argument("stored clause C" + std::to_string(c.id()) + " is not implied by the formula");
        if (st_.problem.is_x_clause(c))
            throw std::invalid_argument("stored clause C" + std::to_string(c.id()) + " mentions a quantified variable");
        add_derived(c.literals());
    }
    std::vector<ClauseId> xs = st_.x_clauses;
    for (const auto& s : snap.dseqs) {
        if (s.tag > st_.tag()) throw std::invalid_argument("stored D-sequent refers to an unknown formula version");
        if (!std::binary_search(xs.begin(), xs.end(), s.target))
            throw std::invalid_argument("stored D-sequent targets C" + std::to_string(s.target) +
                                        ", which is not a quantified clause");
        for (ClauseId h : s.order_constraint)
            if (!st_.problem.formula().contains(h))
                throw std::invalid_argument("stored D-sequent refers to unknown clause C" + std::to_string(h));
        st_.store.add(s);
    }
}

ClauseId Solver::add_derived(std::vector<Literal> lits) {
    Clause probe(0, lits);
    for (const auto& c : st_.problem.formula().clauses())
        if (c.same_literals(probe)) return c.id();
    ClauseId id = st_.problem.formula().next_id();
    Clause c(id, std::move(lits));
    st_.problem.formula().add(c);
    st_.lineage.extend({id}, true);
    st_.derived.push_back(id);
    ++st_.stats.derived_clauses;
    if (opt_.hooks) opt_.hooks->on_derived(c);

    ActiveSet retagged;
    for (const auto& [target, s] : st_.active.entries()) retagged.try_insert(aligned(s));
    st_.active = std::move(retagged);
    return id;
}

DSequent Solver::aligned(const DSequent& s) const {
    if (s.tag == st_.tag()) return s;
    return align(s, st_.lineage, st_.tag(), st_.lineage.added_between(s.tag, st_.tag()));
}

void Solver::emit(const DSequent& s, Provenance p) {
    if (opt_.hooks) opt_.hooks->on_emit(s, p, st_.problem);
}

void Solver::activate(const DSequent& s, Provenance p) {
    if (!st_.active.try_insert(s)) throw std::logic_error("activation breaks consistency: " + s.to_string());
    switch (p) {
        case Provenance::FirstKind: ++st_.stats.first_kind; break;
        case Provenance::SecondKind: ++st_.stats.second_kind; break;
        case Provenance::ThirdKind: ++st_.stats.third_kind; break;
        case Provenance::Residual: ++st_.stats.residual_closures; break;
        case Provenance::Reuse: ++st_.stats.reuses; break;
        default: break;
    }
    emit(s, p);
}

std::vector<ClauseId> Solver::unproven() const {
    std::vector<ClauseId> r;
    for (ClauseId c : st_.x_clauses)
        if (!st_.active.contains(c)) r.push_back(c);
    return r;
}

bool Solver::all_proved() const { return st_.active.size() == st_.x_clauses.size(); }

std::optional<DSequent> Solver::try_reuse(ClauseId c) {
    ++st_.stats.reuse_attempts;
    for (const auto& s : st_.store.lookup(c, st_.q)) {
        DSequent a = aligned(s);
        if (st_.active.can_insert(a)) return a;
    }
    return std::nullopt;
}

bool Solver::prove(ClauseId c) {
    const auto& f = st_.problem.formula();
    const Clause& cl = f.at(c);
    const FormulaTag tag = st_.tag();
    Clause cq = cofactor_clause(cl, st_.q);

    if (cq.is_true()) {
        for (const auto& l : cl.literals()) {
            auto v = st_.q.value(l.var);
            if (v && l.satisfied_by(*v)) {
                activate(atomic_first_kind(st_.problem, c, l.var, *v, tag), Provenance::FirstKind);
                return true;
            }
        }
    }

    if (opt_.reuse) {
        if (auto s = try_reuse(c)) {
            activate(*s, Provenance::Reuse);
            return true;
        }
    }

    // second kind: some B with B|q inside C|q; free-variable clauses first, shorter residual first
    std::vector<std::pair<std::pair<int, std::size_t>, ClauseId>> candidates;
    for (const auto& b : f.clauses()) {
        if (b.id() == c) continue;
        Clause bq = cofactor_clause(b, st_.q);
        if (bq.is_true() || !bq.subsumes(cq)) continue;
        candidates.push_back({{st_.problem.is_x_clause(b) ? 1 : 0, bq.size()}, b.id()});
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [key, b] : candidates) {
        // only bindings that falsify B's literals outside C matter
        Assignment qmin;
        for (const auto& l : f.at(b).literals()) {
            if (cl.contains(l)) continue;
            auto v = st_.q.value(l.var);
            if (v) qmin.set(l.var, *v);
        }
        DSequent s = atomic_second_kind(st_.problem, qmin, b, c, tag);
        if (st_.active.can_insert(s)) {
            activate(s, Provenance::SecondKind);
            return true;
        }
    }

    for (const auto& l : cq.literals()) {
        if (!st_.problem.is_x(l.var)) continue;
        auto partners = resolvable_partners(st_.problem, c, l.var);
        std::vector<DSequent> premises;
        bool ready = true;
        for (ClauseId d : partners) {
            const DSequent* s = st_.active.find(d);
            if (!s) {
                ready = false;
                break;
            }
            premises.push_back(*s);
        }
        if (!ready) continue;
        try {
            DSequent s = atomic_third_kind(st_.problem, c, l.var, premises, tag);
            if (st_.active.can_insert(s)) {
                activate(s, Provenance::ThirdKind);
                return true;
            }
        } catch (const DseqError&) {
            // c is needed by a premise; try another variable
        }
    }
    return false;
}

bool Solver::atomic_pass() {
    bool any = false;
    for (bool progress = true; progress;) {
        progress = false;
        for (ClauseId c : unproven())
            if (prove(c)) progress = any = true;
    }
    return any;
}

std::optional<Var> Solver::pick_branch_var() const {
    std::map<Var, std::size_t> count;
    for (ClauseId c : unproven()) {
        Clause cq = cofactor_clause(st_.problem.formula().at(c), st_.q);
        if (cq.state() != ClauseState::Normal) continue;
        for (const auto& l : cq.literals()) ++count[l.var];
    }
    std::optional<Var> best_y, best_x;
    std::size_t ny = 0, nx = 0;
    for (const auto& [v, n] : count) {
        auto& best = st_.problem.is_x(v) ? best_x : best_y;
        auto& bn = st_.problem.is_x(v) ? nx : ny;
        if (!best || n > bn) {
            best = v;
            bn = n;
        }
    }
    return best_y ? best_y : best_x;
}

ClauseId Solver::handle_conflict() {
    const auto& f = st_.problem.formula();
    std::optional<ClauseId> falsified_x;
    for (const auto& c : f.clauses()) {
        if (!cofactor_clause(c, st_.q).is_false()) continue;
        if (!st_.problem.is_x_clause(c)) {
            ++st_.stats.conflicts;
            return c.id();
        }
        if (!falsified_x) falsified_x = c.id();
    }
    if (!falsified_x) throw std::logic_error("handle_conflict: no clause is falsified by " + st_.q.to_string());
    ++st_.stats.conflicts;

    // search over X in the free-variable part of q for a clause without X-literals
    Assignment qy = st_.problem.y_part(st_.q);
    std::vector<ClauseId> usable;
    for (const auto& c : f.clauses()) {
        Clause r = cofactor_clause(c, qy);
        if (r.state() == ClauseState::True) continue;
        bool pure_x = std::all_of(r.literals().begin(), r.literals().end(),
                                  [&](const Literal& l) { return st_.problem.is_x(l.var); });
        if (pure_x) usable.push_back(c.id());
    }
    XRefutation ref = refute_over_x(st_.problem, usable);
    if (ref.satisfiable) return *falsified_x;
    ClauseId id = add_derived(ref.clause);
    if (f.at(id).is_false()) st_.unsatisfiable = true;
    return id;
}

void Solver::close_y_complete() {
    auto open = unproven();
    XRefutation ref = refute_over_x(st_.problem, open);
    if (!ref.satisfiable) {
        ++st_.stats.conflicts;
        ClauseId id = add_derived(ref.clause);
        if (st_.problem.formula().at(id).is_false()) {
            st_.unsatisfiable = true;
            throw EmptyClauseDerived{};
        }
        atomic_pass();
        if (!all_proved()) throw std::logic_error("conflict clause did not close the branch");
        return;
    }
    // the residual is satisfiable for every completion of q: the open clauses
    // only need the free-variable clauses that q leaves unsatisfied
    std::vector<ClauseId> h;
    for (const auto& c : st_.problem.formula().clauses())
        if (!st_.problem.is_x_clause(c) && !cofactor_clause(c, st_.q).is_true()) h.push_back(c.id());
    for (ClauseId c : open) activate(DSequent(st_.q, h, c, st_.tag()), Provenance::Residual);
}

void Solver::check_active() {
    if (opt_.hooks) opt_.hooks->on_active(st_.active, st_.q, st_.problem);
    if (opt_.debug_level <= 0) return;
    bool ok = check_consistent(st_.active.to_vector());
    for (const auto& [target, s] : st_.active.entries())
        if (!s.conditional.subset_of(st_.q) || s.tag != st_.tag()) ok = false;
    if (!ok) {
        ++st_.stats.consistency_violations;
        if (opt_.debug_level >= 2) throw std::logic_error("active set inconsistent at " + st_.q.to_string());
    }
}

void Solver::admit(const DSequent& s) {
    if (s.conditional.size() <= opt_.store_conditional_cap) st_.store.add(s);
}

void Solver::dcds_plus() {
    atomic_pass();
    if (all_proved()) {
        check_active();
        return;
    }
    auto v = pick_branch_var();
    if (!v || st_.problem.is_x(*v)) {
        close_y_complete();
        check_active();
        return;
    }
    if (opt_.branch_budget && st_.stats.branches >= opt_.branch_budget)
        throw ResourceLimit("branch budget of " + std::to_string(opt_.branch_budget) + " exhausted");
    ++st_.stats.branches;
    ++depth_;
    st_.stats.max_depth = std::max<std::uint64_t>(st_.stats.max_depth, depth_);

    st_.q.set(*v, false);
    dcds_plus();
    ActiveSet ds0 = st_.active;
    for (const auto& [target, s] : ds0.entries()) {
        if (!s.conditional.assigns(*v)) continue;
        st_.active.erase(target);
        admit(s);
    }
    st_.q.erase(*v);
    st_.q.set(*v, true);
    dcds_plus();
    ActiveSet ds1 = st_.active;
    st_.q.erase(*v);
    --depth_;

    st_.active = join_dseqs_plus(ds0, ds1, *v);
    check_active();
}

ActiveSet Solver::join_dseqs_plus(const ActiveSet& ds0_in, const ActiveSet& ds1_in, Var v) {
    ActiveSet ds0, ds1, ds;
    for (const auto& [t, s] : ds0_in.entries()) ds0.try_insert(aligned(s));
    for (const auto& [t, s] : ds1_in.entries()) ds1.try_insert(aligned(s));

    std::vector<ClauseId> pending;
    for (const auto& [t, s] : ds1.entries()) {
        if (s.conditional.assigns(v)) {
            pending.push_back(t);
        } else if (!ds.try_insert(s)) {
            throw std::logic_error("symmetric D-sequents are inconsistent");
        }
    }
    for (ClauseId c : pending) {
        const DSequent* s0 = ds0.find(c);
        const DSequent* s1 = ds1.find(c);
        if (!s0 || !s0->conditional.assigns(v))
            throw std::logic_error("no v-dependent D-sequent for C" + std::to_string(c) + " in the first branch");
        DSequent s = join(*s0, *s1, v);
        ++st_.stats.joins;
        emit(s, Provenance::Join);
        if (!ds.can_insert(s)) s = fix_dseq(*s0, *s1, v, ds, ds0, ds1);
        if (!ds.try_insert(s)) throw std::logic_error("fix_dseq result is still inconsistent");
        if (opt_.reuse) admit(s);
    }
    return ds;
}

DSequent Solver::relax_in(const ActiveSet& branch, const DSequent& s, ClauseId m) {
    std::vector<DSequent> set;
    std::size_t i = 0;
    for (const auto& [t, e] : branch.entries()) {
        if (t == s.target) i = set.size();
        set.push_back(t == s.target ? s : e);
    }
    std::vector<DSequent> steps;
    DSequent out = relax_constraint(set, i, m, &steps);
    for (std::size_t k = 0; k + 1 < steps.size(); ++k) emit(steps[k], Provenance::Substitute);
    emit(out, Provenance::Relax);
    if (opt_.hooks) opt_.hooks->on_relax(set, i, m, out);
    return out;
}

DSequent Solver::fix_dseq(const DSequent& s0, const DSequent& s1, Var v, const ActiveSet& ds, const ActiveSet& ds0,
                          const ActiveSet& ds1) {
    ++st_.stats.fix_dseq_calls;
    DSequent plain = join(s0, s1, v);
    auto cyclic = ds.cycle_members(plain);
    if (cyclic.empty()) return plain;

    DSequent r0 = s0, r1 = s1;
    for (ClauseId h : cyclic) {
        if (r0.constrains(h) && ds0.contains(h)) r0 = relax_in(ds0, r0, h);
        if (r1.constrains(h) && ds1.contains(h)) r1 = relax_in(ds1, r1, h);
    }
    DSequent s = join(r0, r1, v);
    emit(s, Provenance::Join);
    if (ds.can_insert(s)) return s;

    ++st_.stats.fix_dseq_fallbacks;
    auto robustify = [&](const ActiveSet& branch, DSequent d) {
        for (;;) {
            std::optional<ClauseId> m;
            for (ClauseId h : d.order_constraint)
                if (branch.contains(h)) {
                    m = h;
                    break;
                }
            if (!m) return d;
            d = relax_in(branch, d, *m);
        }
    };
    s = join(robustify(ds0, r0), robustify(ds1, r1), v);
    emit(s, Provenance::Join);
    return s;
}

SolveResult Solver::run() {
    SolveResult res;
    try {
        dcds_plus();
    } catch (const EmptyClauseDerived&) {
    }
    if (!st_.unsatisfiable) {
        for (const auto& [t, s] : st_.active.entries())
            if (opt_.reuse) admit(s);
    }
    res.final_formula = st_.problem.formula();
    res.original_clause_count = st_.original_clause_count;
    res.derived = st_.derived;
    res.unsatisfiable = st_.unsatisfiable;
    res.f_star = CnfFormula(st_.problem.num_vars());
    if (st_.unsatisfiable) {
        res.f_star.add(Clause(1, {}));
    } else {
        for (const auto& c : res.final_formula.clauses())
            if (!st_.problem.is_x_clause(c)) res.f_star.add(c);
    }
    st_.stats.store_size = st_.store.size();
    res.final_store = st_.store;
    res.stats = st_.stats;
    return res;
}

SolveResult solve(const EcnfProblem& problem, const SolveOptions& options) { return Solver(problem, options).run(); }

}  // namespace qe
