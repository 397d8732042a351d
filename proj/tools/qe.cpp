#include <iostream>

#include <CLI11.hpp>

#include "qe/cli.hpp"

int main(int argc, char** argv) {
    qe::cli::RunConfig cfg;
    std::string stats = "text";

    CLI::App app{"Quantifier elimination for existentially quantified CNF"};
    app.require_subcommand(1);
    auto* solve = app.add_subcommand("solve", "eliminate the quantified variables of a QDIMACS file");
    solve->add_option("input", cfg.input, "input file")->required();
    solve->add_option("-o,--output", cfg.output, "output file (default: stdout)");
    solve->add_flag("--verify", cfg.verify, "check the result against the enumeration oracle");
    bool no_reuse = false;
    solve->add_flag("--no-reuse", no_reuse, "disable D-sequent reuse");
    solve->add_option("--dump-dseqs", cfg.dump_store, "write the D-sequent store here");
    solve->add_option("--load-dseqs", cfg.load_store, "start from a stored D-sequent file");
    solve->add_option("--oracle-limit", cfg.oracle_limit, "largest variable count --verify accepts")->capture_default_str();
    solve->add_option("--stats", stats, "statistics format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
    solve->add_option("--seed", cfg.seed, "recorded in the output")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    cfg.reuse = !no_reuse;
    cfg.stats = stats == "json" ? qe::cli::StatsFormat::Json : qe::cli::StatsFormat::Text;
    return qe::cli::run(cfg, std::cout, std::cerr);
}
