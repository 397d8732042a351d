#include "qe/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qe::cli {

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

long long to_int(std::string_view tok, std::size_t line) {
    long long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
    return v;
}

}  // namespace

EcnfProblem parse_qdimacs(std::string_view text) {
    std::optional<long long> num_vars, num_clauses;
    std::vector<Var> xs;
    bool seen_e = false;
    CnfFormula f;
    std::vector<Literal> pending;
    std::size_t pending_line = 0;

    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++lineno;

        auto t = tokens(line);
        if (t.empty() || t[0] == "c" || t[0][0] == 'c') continue;
        if (t[0] == "p") {
            if (num_vars) throw ParseError(lineno, "second header");
            if (t.size() != 4 || t[1] != "cnf") throw ParseError(lineno, "expected 'p cnf <vars> <clauses>'");
            num_vars = to_int(t[2], lineno);
            num_clauses = to_int(t[3], lineno);
            if (*num_vars < 0 || *num_clauses < 0) throw ParseError(lineno, "negative count in header");
            f.set_num_vars(static_cast<Var>(*num_vars));
            continue;
        }
        if (!num_vars) throw ParseError(lineno, "content before the header");
        if (t[0] == "a") throw UniversalNotSupported(lineno);
        if (t[0] == "e") {
            if (seen_e) throw ParseError(lineno, "only one existential block is supported");
            if (!f.empty() || !pending.empty()) throw ParseError(lineno, "quantifier block after clauses");
            seen_e = true;
            if (t.back() != "0") throw ParseError(lineno, "quantifier block must end with 0");
            for (std::size_t k = 1; k + 1 < t.size(); ++k) {
                long long v = to_int(t[k], lineno);
                if (v <= 0 || v > *num_vars) throw ParseError(lineno, "variable " + std::string(t[k]) + " out of range");
                xs.push_back(static_cast<Var>(v));
            }
            continue;
        }
        for (auto tok : t) {
            long long v = to_int(tok, lineno);
            if (v == 0) {
                try {
                    f.add(Clause(f.next_id(), std::move(pending)));
                } catch (const CnfError& e) {
                    throw ParseError(pending_line ? pending_line : lineno, e.what());
                }
                pending.clear();
                pending_line = 0;
                continue;
            }
            if (v < -*num_vars || v > *num_vars) throw ParseError(lineno, "literal " + std::string(tok) + " out of range");
            if (pending.empty()) pending_line = lineno;
            pending.push_back(Literal::from_dimacs(static_cast<int>(v)));
        }
    }
    if (!num_vars) throw ParseError(lineno, "missing header");
    if (!pending.empty()) throw ParseError(pending_line, "clause not terminated by 0");
    if (static_cast<long long>(f.size()) != *num_clauses)
        throw ParseError(lineno, "header announces " + std::to_string(*num_clauses) + " clauses, found " +
                                     std::to_string(f.size()));
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return EcnfProblem(std::move(f), xs);
}

std::string write_qdimacs(const EcnfProblem& prob) {
    std::ostringstream os;
    os << "p cnf " << prob.num_vars() << ' ' << prob.formula().size() << '\n';
    if (!prob.x_vars().empty()) {
        os << 'e';
        for (Var v : prob.x_vars()) os << ' ' << v;
        os << " 0\n";
    }
    for (const auto& c : prob.formula().clauses()) {
        for (const auto& l : c.literals()) os << l.to_dimacs() << ' ';
        os << "0\n";
    }
    return os.str();
}

std::string emit_result(const SolveResult& result, Var num_vars, StatsFormat fmt) {
    std::ostringstream os;
    auto items = result.stats.items();
    if (fmt == StatsFormat::Json) {
        nlohmann::ordered_json j;
        for (const auto& [k, v] : items) j[k] = v;
        os << "c stats " << j.dump() << '\n';
    } else {
        for (const auto& [k, v] : items) os << "c stat " << k << ' ' << v << '\n';
    }

    std::set<std::vector<int>> rows;
    for (const auto& c : result.f_star.clauses()) {
        std::vector<int> r;
        for (const auto& l : c.literals()) r.push_back(l.to_dimacs());
        rows.insert(r);
    }
    os << "p cnf " << num_vars << ' ' << rows.size() << '\n';
    for (const auto& r : rows) {
        for (int l : r) os << l << ' ';
        os << "0\n";
    }
    return os.str();
}

VerifyOutcome verify_result(const CnfFormula& f_star, const EcnfProblem& prob, unsigned limit) {
    if (prob.num_vars() > limit)
        throw OracleTooLarge("cannot verify: " + std::to_string(prob.num_vars()) + " variables exceed the oracle limit of " +
                             std::to_string(limit));
    OracleLimits lim;
    lim.max_vars = limit;
    VerifyOutcome out;
    out.counterexample = equivalence_counterexample(f_star, prob, lim);
    out.pass = !out.counterexample;
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw IoError("cannot write " + path);
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        EcnfProblem prob = parse_qdimacs(read_file(cfg.input));
        if (cfg.verify && prob.num_vars() > cfg.oracle_limit) {
            err << "error: " << prob.num_vars() << " variables exceed the oracle limit of " << cfg.oracle_limit
                << "; --verify refused\n";
            return 1;
        }

        std::optional<StoreSnapshot> warm;
        if (!cfg.load_store.empty()) {
            std::istringstream in(read_file(cfg.load_store));
            warm = read_snapshot(in);
        }
        SolveOptions opt;
        opt.reuse = cfg.reuse;
        if (warm) opt.warm_start = &*warm;
        SolveResult res = solve(prob, opt);

        std::string text = "c seed " + std::to_string(cfg.seed) + '\n' + emit_result(res, prob.num_vars(), cfg.stats);
        if (cfg.output.empty())
            out << text;
        else
            write_file(cfg.output, text);

        if (!cfg.dump_store.empty()) {
            std::ostringstream os;
            write_snapshot(os, res.snapshot(prob));
            write_file(cfg.dump_store, os.str());
        }

        if (cfg.verify) {
            auto v = verify_result(res.f_star, prob, cfg.oracle_limit);
            if (!v.pass) {
                err << "verify: FAIL, differs at " << v.counterexample->to_string() << '\n';
                return 2;
            }
            err << "verify: PASS\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace qe::cli
