#include "qe/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <string>

namespace qe {
namespace {

using Mask = std::uint32_t;

Mask bit(Var v) { return Mask{1} << (v - 1); }

struct ClauseMask {
    Mask pos = 0;
    Mask neg = 0;
    bool always_true = false;
    bool falsified(Mask p) const { return !always_true && ((p & pos) | (~p & neg)) == 0; }
};

ClauseMask mask_of(const Clause& c) {
    ClauseMask m;
    if (c.is_true()) {
        m.always_true = true;
        return m;
    }
    for (const auto& l : c.literals()) (l.negative ? m.neg : m.pos) |= bit(l.var);
    return m;
}

// Bit-level view of a problem.
struct Space {
    Var n = 0;
    Mask all = 0;
    Mask xmask = 0;
    Mask ymask = 0;
    std::vector<ClauseMask> clauses;
    std::vector<ClauseId> ids;

    Space(const EcnfProblem& prob, const OracleLimits& lim) {
        n = prob.num_vars();
        if (n > lim.max_vars || n > 30)
            throw OracleTooLarge("oracle limit exceeded: " + std::to_string(n) + " variables");
        all = n == 0 ? 0 : static_cast<Mask>((std::uint64_t{1} << n) - 1);
        for (Var v : prob.x_vars()) xmask |= bit(v);
        ymask = all & ~xmask;
        for (const auto& c : prob.formula().clauses()) {
            clauses.push_back(mask_of(c));
            ids.push_back(c.id());
        }
    }

    std::size_t index_of(ClauseId id) const {
        auto it = std::find(ids.begin(), ids.end(), id);
        if (it == ids.end()) throw CnfError(CnfErrc::UnknownClause, "unknown clause id " + std::to_string(id));
        return static_cast<std::size_t>(it - ids.begin());
    }

    bool sat(Mask p) const {
        for (const auto& c : clauses)
            if (c.falsified(p)) return false;
        return true;
    }

    std::uint64_t points() const { return std::uint64_t{1} << n; }
};

struct Cube {
    Mask care = 0;
    Mask val = 0;
    bool contains(Mask p) const { return (p & care) == val; }
};

Cube cube_of(const Assignment& q, Var n) {
    Cube c;
    for (const auto& b : q.bindings()) {
        if (b.var == 0 || b.var > n) continue;
        c.care |= bit(b.var);
        if (b.value) c.val |= bit(b.var);
    }
    return c;
}

Mask point_of(const Assignment& p, Var n) { return cube_of(p, n).val; }

Assignment assignment_of(Mask p, Var n) {
    Assignment a;
    for (Var v = 1; v <= n; ++v) a.set(v, (p & bit(v)) != 0);
    return a;
}

Assignment y_assignment_of(Mask p, const EcnfProblem& prob) {
    Assignment a;
    for (Var v : prob.y_vars()) a.set(v, (p & bit(v)) != 0);
    return a;
}

void require_total(const Assignment& p, const CnfFormula& f) {
    for (const auto& c : f.clauses())
        for (const auto& l : c.literals())
            if (!p.assigns(l.var))
                throw std::invalid_argument("point does not assign var " + std::to_string(l.var));
}

// exists[y] over y-keys (point with X bits cleared) for points inside cube.
std::vector<std::uint8_t> exists_table(const Space& s, const Cube& cube) {
    std::vector<std::uint8_t> e(s.points(), 0);
    for (std::uint64_t i = 0; i < s.points(); ++i) {
        Mask p = static_cast<Mask>(i);
        if (!cube.contains(p)) continue;
        if (s.sat(p)) e[p & s.ymask] = 1;
    }
    return e;
}

}  // namespace

CnfFormula qe_by_enumeration(const EcnfProblem& prob, const OracleLimits& lim) {
    Space s(prob, lim);
    auto e = exists_table(s, Cube{});
    CnfFormula out(prob.num_vars());
    if (std::find(e.begin(), e.end(), 1) == e.end()) {
        out.add_literals({});
        return out;
    }
    for (std::uint64_t i = 0; i < s.points(); ++i) {
        Mask y = static_cast<Mask>(i);
        if ((y & s.xmask) != 0 || e[y]) continue;
        std::vector<Literal> lits;
        for (Var v : prob.y_vars()) lits.push_back(Literal{v, (y & bit(v)) != 0});
        out.add_literals(std::move(lits));
    }
    return out;
}

bool is_z_boundary_point(const Assignment& p, const CnfFormula& f, const std::vector<Var>& z) {
    require_total(p, f);
    if (z.empty()) return false;
    std::vector<const Clause*> falsified;
    for (const auto& c : f.clauses())
        if (evaluate(c, p) == false) falsified.push_back(&c);
    if (falsified.empty()) return false;
    auto covered = [&](const std::vector<Var>& zs) {
        return std::all_of(falsified.begin(), falsified.end(), [&](const Clause* c) {
            return std::any_of(zs.begin(), zs.end(), [&](Var v) { return c->mentions(v); });
        });
    };
    if (!covered(z)) return false;
    // covering is monotone in Z, so checking the maximal proper subsets suffices
    for (std::size_t i = 0; i < z.size(); ++i) {
        std::vector<Var> smaller;
        for (std::size_t j = 0; j < z.size(); ++j)
            if (j != i) smaller.push_back(z[j]);
        if (covered(smaller)) return false;
    }
    for (Var v : z) {
        bool in_f = std::any_of(f.clauses().begin(), f.clauses().end(), [&](const Clause& c) { return c.mentions(v); });
        if (!in_f) return false;
    }
    return true;
}

bool is_removable(const Assignment& p, const EcnfProblem& prob, const std::vector<Var>& x_prime,
                  const OracleLimits& lim) {
    const auto& f = prob.formula();
    require_total(p, f);
    for (Var v : x_prime)
        if (!prob.is_x(v)) throw NotBoundaryPoint("x_prime contains free variable " + std::to_string(v));
    bool any_false = false;
    for (const auto& c : f.clauses()) {
        if (evaluate(c, p) != false) continue;
        any_false = true;
        bool hit = std::any_of(x_prime.begin(), x_prime.end(), [&](Var v) { return c.mentions(v); });
        if (!hit) throw NotBoundaryPoint(c.to_string() + " is falsified but has no variable of x_prime");
    }
    if (!any_false) throw NotBoundaryPoint("point satisfies the formula");

    Space s(prob, lim);
    Mask flip = 0;
    for (Var v : x_prime) flip |= bit(v);
    Mask base = point_of(p, s.n) & ~flip;
    // enumerate submasks of flip
    Mask sub = 0;
    do {
        if (s.sat(base | sub)) return false;
        sub = (sub - flip) & flip;
    } while (sub != 0);
    return true;
}

RedundancyVerdict is_redundant_set(const std::vector<ClauseId>& g, const EcnfProblem& prob, const Assignment& q,
                                   const OracleLimits& lim) {
    Space s(prob, lim);
    std::vector<bool> in_g(s.clauses.size(), false);
    for (ClauseId id : g) in_g[s.index_of(id)] = true;
    Cube cube = cube_of(q, s.n);

    std::vector<std::uint8_t> e_full(s.points(), 0);
    std::vector<std::int64_t> e_rest(s.points(), -1);  // a satisfying point of F\G, by y-key
    for (std::uint64_t i = 0; i < s.points(); ++i) {
        Mask p = static_cast<Mask>(i);
        if (!cube.contains(p)) continue;
        bool rest = true;
        bool full = true;
        for (std::size_t k = 0; k < s.clauses.size() && rest; ++k) {
            if (!s.clauses[k].falsified(p)) continue;
            full = false;
            if (!in_g[k]) rest = false;
        }
        if (full) e_full[p & s.ymask] = 1;
        if (rest && e_rest[p & s.ymask] < 0) e_rest[p & s.ymask] = p;
    }
    RedundancyVerdict v;
    for (std::uint64_t y = 0; y < s.points(); ++y) {
        if (e_rest[y] >= 0 && !e_full[y]) {
            v.redundant = false;
            v.witness = assignment_of(static_cast<Mask>(e_rest[y]), s.n);
            return v;
        }
    }
    return v;
}

bool is_virtually_redundant(ClauseId c, const EcnfProblem& prob, const Assignment& q, const OracleLimits& lim) {
    Space s(prob, lim);
    std::size_t ci = s.index_of(c);
    Cube cube = cube_of(q, s.n);
    auto e_q = exists_table(s, cube);

    std::vector<Mask> b_points;
    for (std::uint64_t i = 0; i < s.points(); ++i) {
        Mask p = static_cast<Mask>(i);
        if (!cube.contains(p)) continue;
        bool only_c = s.clauses[ci].falsified(p);
        for (std::size_t k = 0; k < s.clauses.size() && only_c; ++k)
            if (k != ci && s.clauses[k].falsified(p)) only_c = false;
        if (only_c && !e_q[p & s.ymask]) b_points.push_back(p);
    }
    if (b_points.empty()) return true;

    // subspaces r with q* <= r < q: drop a nonempty subset of q's X-bindings
    Mask qx = cube.care & s.xmask;
    std::vector<std::vector<std::uint8_t>> e_r;
    for (Mask drop = qx; drop != 0; drop = (drop - 1) & qx) {
        Cube r{cube.care & ~drop, cube.val & ~drop};
        e_r.push_back(exists_table(s, r));
    }
    for (Mask p : b_points) {
        bool rescued = std::any_of(e_r.begin(), e_r.end(), [&](const auto& e) { return e[p & s.ymask] != 0; });
        if (!rescued) return false;
    }
    return true;
}

std::optional<Assignment> equivalence_counterexample(const CnfFormula& candidate, const EcnfProblem& prob,
                                                     const OracleLimits& lim) {
    Space s(prob, lim);
    std::vector<ClauseMask> cand;
    for (const auto& c : candidate.clauses()) {
        for (const auto& l : c.literals())
            if (prob.is_x(l.var) || l.var > s.n)
                throw std::invalid_argument("candidate mentions non-free variable " + std::to_string(l.var));
        cand.push_back(mask_of(c));
    }
    auto e = exists_table(s, Cube{});
    for (std::uint64_t i = 0; i < s.points(); ++i) {
        Mask y = static_cast<Mask>(i);
        if ((y & s.xmask) != 0) continue;
        bool cv = std::none_of(cand.begin(), cand.end(), [&](const ClauseMask& m) { return m.falsified(y); });
        if (cv != (e[y] != 0)) return y_assignment_of(y, prob);
    }
    return std::nullopt;
}

bool equiv_quantified(const CnfFormula& candidate, const EcnfProblem& prob, const OracleLimits& lim) {
    return !equivalence_counterexample(candidate, prob, lim).has_value();
}

bool dsequent_holds(const EcnfProblem& prob, const Assignment& q, const std::vector<ClauseId>& h, ClauseId c,
                    const OracleLimits& lim, MemberRule rule) {
    Space s(prob, lim);
    const std::size_t m = s.clauses.size();
    if (m > 64) throw OracleTooLarge("more than 64 clauses");
    auto full = [&](std::size_t k) { return std::uint64_t{1} << k; };

    std::uint64_t fixed = full(s.index_of(c));
    for (ClauseId id : h) fixed |= full(s.index_of(id));
    if (rule == MemberRule::DropSubspaceXClausesOnly) {
        const auto& clauses = prob.formula().clauses();
        for (std::size_t k = 0; k < m; ++k) {
            auto r = cofactor_clause(clauses[k], q);
            if (r.state() != ClauseState::Normal || !prob.is_x_clause(r)) fixed |= full(k);
        }
    }
    std::vector<std::size_t> free_idx;
    for (std::size_t k = 0; k < m; ++k)
        if (!(fixed & full(k))) free_idx.push_back(k);
    if (free_idx.size() > lim.max_free_clauses)
        throw OracleTooLarge("too many candidate member formulas: 2^" + std::to_string(free_idx.size()));
    const std::uint64_t c_bit = full(s.index_of(c));

    // falsified-clause set of every point
    std::vector<std::uint64_t> fs(s.points(), 0);
    for (std::uint64_t i = 0; i < s.points(); ++i)
        for (std::size_t k = 0; k < m; ++k)
            if (s.clauses[k].falsified(static_cast<Mask>(i))) fs[i] |= full(k);

    Cube cube = cube_of(q, s.n);
    std::vector<Mask> in_q;
    for (std::uint64_t i = 0; i < s.points(); ++i)
        if (cube.contains(static_cast<Mask>(i))) in_q.push_back(static_cast<Mask>(i));

    Mask qx = cube.care & s.xmask;
    std::vector<std::vector<Mask>> in_r;
    for (Mask drop = qx; drop != 0; drop = (drop - 1) & qx) {
        Cube r{cube.care & ~drop, cube.val & ~drop};
        std::vector<Mask> pts;
        for (std::uint64_t i = 0; i < s.points(); ++i)
            if (r.contains(static_cast<Mask>(i))) pts.push_back(static_cast<Mask>(i));
        in_r.push_back(std::move(pts));
    }

    std::vector<std::uint8_t> e_f(s.points(), 0);
    for (Mask p : in_q)
        if (fs[p] == 0) e_f[p & s.ymask] = 1;

    std::vector<std::uint8_t> e_w(s.points(), 0);
    std::vector<std::uint8_t> e_rw(s.points(), 0);
    const std::uint64_t combos = std::uint64_t{1} << free_idx.size();
    for (std::uint64_t sel = 0; sel < combos; ++sel) {
        std::uint64_t w = fixed;
        for (std::size_t j = 0; j < free_idx.size(); ++j)
            if (sel & (std::uint64_t{1} << j)) w |= full(free_idx[j]);

        for (Mask p : in_q) e_w[p & s.ymask] = 0;
        for (Mask p : in_q)
            if ((fs[p] & w) == 0) e_w[p & s.ymask] = 1;
        bool member = true;
        for (Mask p : in_q)
            if (e_w[p & s.ymask] != e_f[p & s.ymask]) {
                member = false;
                break;
            }
        if (!member) continue;

        // points of B: falsify only c within W and are X-removable in W|q
        std::vector<Mask> b;
        for (Mask p : in_q)
            if ((fs[p] & w) == c_bit && !e_w[p & s.ymask]) b.push_back(p);
        if (b.empty()) continue;
        std::vector<std::uint8_t> rescued(b.size(), 0);
        for (const auto& pts : in_r) {
            for (Mask p : pts) e_rw[p & s.ymask] = 0;
            for (Mask p : pts)
                if ((fs[p] & w) == 0) e_rw[p & s.ymask] = 1;
            for (std::size_t j = 0; j < b.size(); ++j)
                if (e_rw[b[j] & s.ymask]) rescued[j] = 1;
        }
        if (std::find(rescued.begin(), rescued.end(), 0) != rescued.end()) return false;
    }
    return true;
}

bool dsequent_holds_in_all_subspaces(const EcnfProblem& prob, const Assignment& q, const std::vector<ClauseId>& h,
                                     ClauseId c, const OracleLimits& lim) {
    if (prob.num_vars() > lim.max_vars) throw OracleTooLarge("oracle limit exceeded");
    std::vector<Var> open;
    for (Var v : prob.y_vars())
        if (!q.assigns(v)) open.push_back(v);
    if (open.size() > 20) throw OracleTooLarge("too many free variables");
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << open.size()); ++m) {
        Assignment r = q;
        for (std::size_t i = 0; i < open.size(); ++i) r.set(open[i], (m >> i) & 1);
        if (!dsequent_holds(prob, r, h, c, lim)) return false;
    }
    return true;
}

}  // namespace qe
