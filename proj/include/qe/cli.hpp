#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qe/cnf.hpp"
#include "qe/oracle.hpp"
#include "qe/solver.hpp"

namespace qe::cli {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UniversalNotSupported : public ParseError {
public:
    explicit UniversalNotSupported(std::size_t line) : ParseError(line, "universal quantifier blocks are not supported") {}
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class StatsFormat { Text, Json };

struct RunConfig {
    std::string input;
    std::string output;  // empty: stdout
    bool verify = false;
    bool reuse = true;
    unsigned oracle_limit = 24;
    std::uint64_t seed = 0;
    std::string dump_store;
    std::string load_store;
    StatsFormat stats = StatsFormat::Text;
};

EcnfProblem parse_qdimacs(std::string_view text);
std::string write_qdimacs(const EcnfProblem& prob);

// DIMACS of f_star, clauses in canonical order, preceded by stat comments.
std::string emit_result(const SolveResult& result, Var num_vars, StatsFormat fmt);

struct VerifyOutcome {
    bool pass = true;
    std::optional<Assignment> counterexample;
};

// Throws OracleTooLarge when the instance has more than `limit` variables.
VerifyOutcome verify_result(const CnfFormula& f_star, const EcnfProblem& prob, unsigned limit);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// Exit code: 0 ok, 1 error, 2 verification failure.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace qe::cli
