#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "loopmod/cycle_graph.hpp"

namespace loopmod {

// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitCapacity = 2,
    kExitDisagreement = 3,  // Euler methods or closed-form counts disagree
    kExitCheckFailed = 4,   // verify / tables found a failing check
    kExitInternal = 5,
};

enum class OutputFormat { json, csv, table };

struct RunConfig {
    std::string command;
    Family family = Family::mcolored;
    int s = 0;
    int m = 1;
    std::optional<std::string> method;
    bool exact = false;
    std::vector<std::uint32_t> primes;  // empty: library defaults
    std::size_t max_generators = 5'000'000;
    std::size_t max_snf = 0;  // 0 disables the Smith normal form
    int threads = 1;
    std::string cache_dir;  // empty: environment / per-user default
    bool no_cache = false;
    OutputFormat format = OutputFormat::table;
    bool cubes = false;
    std::optional<int> dim;
};

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_betti(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_euler(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_cells(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_tables(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace loopmod
