#include "loopmod/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <map>
#include <ostream>
#include <sstream>

#include "loopmod/cache.hpp"
#include "loopmod/errors.hpp"
#include "loopmod/families.hpp"
#include "loopmod/homology.hpp"

namespace loopmod {

namespace {

using ojson = nlohmann::ordered_json;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Reference values reproduced by `tables`.

struct BettiRow {
    Family family;
    int s;
    int m;
    std::vector<std::size_t> betti;
};

// Betti numbers of the m-colored spaces X_s^m.
const std::vector<BettiRow>& colored_rows() {
    static const std::vector<BettiRow> rows = {
        {Family::mcolored, 1, 2, {2}},
        {Family::mcolored, 2, 2, {1, 0}},
        {Family::mcolored, 3, 2, {1, 0, 6}},
        {Family::mcolored, 4, 2, {1, 0, 3, 9}},
        {Family::mcolored, 5, 2, {1, 0, 6, 0, 84}},
        {Family::mcolored, 1, 3, {3}},
        {Family::mcolored, 2, 3, {1, 1}},
        {Family::mcolored, 3, 3, {1, 0, 20}},
        {Family::mcolored, 4, 3, {1, 0, 3, 103}},
        {Family::mcolored, 1, 4, {4}},
        {Family::mcolored, 2, 4, {1, 3}},
        {Family::mcolored, 3, 4, {1, 0, 49}},
        {Family::mcolored, 4, 4, {1, 0, 3, 426}},
        {Family::mcolored, 1, 5, {5}},
        {Family::mcolored, 2, 5, {1, 6}},
        {Family::mcolored, 3, 5, {1, 0, 99}},
        {Family::mcolored, 1, 6, {6}},
        {Family::mcolored, 2, 6, {1, 10}},
        {Family::mcolored, 3, 6, {1, 0, 176}},
        {Family::mcolored, 1, 7, {7}},
        {Family::mcolored, 2, 7, {1, 15}},
        {Family::mcolored, 3, 7, {1, 0, 286}},
    };
    return rows;
}

// Holocolored X~_s.
const std::vector<BettiRow>& holo_rows() {
    static const std::vector<BettiRow> rows = {
        {Family::holocolored, 1, 1, {1}},
        {Family::holocolored, 2, 2, {1, 0}},
        {Family::holocolored, 3, 3, {1, 2, 1}},
        {Family::holocolored, 4, 4, {1, 0, 36, 3}},
        {Family::holocolored, 5, 5, {1, 0, 6, 824, 12}},
    };
    return rows;
}

// Remembered-edge X-_s.
const std::vector<BettiRow>& remembered_rows() {
    static const std::vector<BettiRow> rows = {
        {Family::remembered, 1, 1, {1}},
        {Family::remembered, 2, 2, {1, 0}},
        {Family::remembered, 3, 3, {1, 2, 1}},
        {Family::remembered, 4, 4, {1, 0, 18, 3}},
        {Family::remembered, 5, 5, {1, 0, 48, 166, 12}},
    };
    return rows;
}

// chi(X~_s), s = 1..8.
const std::vector<long>& holo_euler() {
    static const std::vector<long> values = {1, 1, 0, 34, -805, 26541, -1122506, 59485588};
    return values;
}

constexpr int kEulerCellsMaxLegs = 6;
constexpr int kEulerBettiMaxLegs = 5;

// ---------------------------------------------------------------------------

std::string join(const std::vector<std::size_t>& v, char sep = ' ') {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += std::to_string(v[i]);
    }
    return out;
}

ojson big_json(const BigInt& v) {
    if (v.fits_slong_p()) return v.get_si();
    return v.get_str();
}

FamilySpec spec_of(const RunConfig& c) {
    if (c.s < 1) throw UsageError("--legs is required and must be at least 1");
    try {
        return FamilySpec::make(c.family, c.s, c.m);
    } catch (const StructuralError& e) {
        throw UsageError(e.what());
    }
}

HomologyOptions homology_options(const RunConfig& c) {
    HomologyOptions h;
    if (!c.primes.empty()) h.rank.primes = c.primes;
    h.rank.exact = c.exact;
    h.rank.threads = c.threads;
    h.max_generators = c.max_generators;
    h.threads = c.threads;
    if (c.max_snf > 0) {
        h.integral = true;
        h.snf.max_dimension = c.max_snf;
    }
    return h;
}

std::optional<ComplexCache> open_cache(const RunConfig& c) {
    if (c.no_cache) return std::nullopt;
    return ComplexCache(c.cache_dir.empty() ? default_cache_root() : std::filesystem::path(c.cache_dir));
}

HomologyReport compute(const FamilySpec& spec, const RunConfig& c, const ComplexCache* cache) {
    const auto start = std::chrono::steady_clock::now();
    const auto h = homology_options(c);
    const auto cx = cached_complex(spec, {h.max_generators, h.threads}, cache);
    auto report = homology_of(cx, h);
    report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

bool fits(const FamilySpec& spec, std::size_t max_generators) {
    for (int d = 0; d < spec.dimensions(); ++d)
        if (count_generators_closed_form(spec, d) > static_cast<unsigned long>(max_generators)) return false;
    return true;
}

std::string torsion_suffix(const HomologyReport& r) {
    std::string out;
    for (std::size_t d = 0; d < r.torsion.size(); ++d) {
        if (r.torsion[d].empty()) continue;
        out += out.empty() ? " | torsion" : ";";
        out += " H" + std::to_string(d) + ":";
        for (const auto& t : r.torsion[d]) out += " Z/" + t.get_str();
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_betti(const RunConfig& c, std::ostream& out, std::ostream&) {
    const auto spec = spec_of(c);
    const auto cache = open_cache(c);
    const auto report = compute(spec, c, cache ? &*cache : nullptr);
    switch (c.format) {
        case OutputFormat::json: out << report_json(report) << '\n'; break;
        case OutputFormat::csv: out << report_csv_header() << '\n' << report_csv_row(report) << '\n'; break;
        case OutputFormat::table: out << report_table(report) << torsion_suffix(report) << '\n'; break;
    }
    return kExitOk;
}

int cmd_euler(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto spec = spec_of(c);
    std::vector<EulerMethod> methods;
    if (c.method) {
        EulerMethod m;
        if (!parse_euler_method(*c.method, m)) throw UsageError("unknown method " + *c.method);
        methods.push_back(m);
    } else {
        methods = {EulerMethod::cells, EulerMethod::betti, EulerMethod::closed_form};
    }
    const bool explicit_method = c.method.has_value();
    const auto cache = open_cache(c);
    const auto h = homology_options(c);

    std::vector<std::pair<EulerMethod, BigInt>> values;
    for (auto method : methods) {
        if (method != EulerMethod::closed_form && !fits(spec, c.max_generators)) {
            if (explicit_method)
                throw CapacityError(spec.label() + " exceeds the generator limit; use --method closed_form");
            continue;
        }
        if (method == EulerMethod::betti) {
            const auto r = compute(spec, c, cache ? &*cache : nullptr);
            values.emplace_back(method, *r.euler.betti);
        } else {
            values.emplace_back(method, euler_characteristic(spec, method, h));
        }
    }

    const bool agree = std::all_of(values.begin(), values.end(),
                                   [&](const auto& v) { return v.second == values.front().second; });
    switch (c.format) {
        case OutputFormat::json: {
            ojson j;
            j["family"] = std::string(family_name(spec.family));
            j["s"] = spec.s;
            j["m"] = spec.m;
            ojson e = ojson::object();
            for (auto method : {EulerMethod::cells, EulerMethod::betti, EulerMethod::closed_form}) {
                auto it = std::find_if(values.begin(), values.end(), [&](const auto& v) { return v.first == method; });
                e[std::string(euler_method_name(method))] = it == values.end() ? ojson(nullptr) : big_json(it->second);
            }
            j["euler"] = e;
            j["agree"] = agree;
            out << j.dump() << '\n';
            break;
        }
        case OutputFormat::csv:
            out << "family,s,m,method,value\n";
            for (const auto& [method, v] : values)
                out << family_name(spec.family) << ',' << spec.s << ',' << spec.m << ','
                    << euler_method_name(method) << ',' << v.get_str() << '\n';
            break;
        case OutputFormat::table:
            if (agree) {
                out << values.front().second.get_str() << '\n';
            } else {
                for (const auto& [method, v] : values) out << euler_method_name(method) << ' ' << v.get_str() << '\n';
            }
            break;
    }
    if (!agree) {
        err << "Euler characteristic methods disagree for " << space_label(spec) << ":";
        for (const auto& [method, v] : values) err << ' ' << euler_method_name(method) << '=' << v.get_str();
        err << '\n';
        return kExitDisagreement;
    }
    return kExitOk;
}

int cmd_cells(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto spec = spec_of(c);
    const bool cubes = c.cubes && is_cubical(spec.family);
    if (c.cubes && !cubes) throw UsageError("--cubes applies to the uncolored and mcolored families only");
    std::vector<int> dims;
    if (c.dim) {
        if (*c.dim < 0 || *c.dim >= spec.dimensions())
            throw UsageError("--dim must lie in 0.." + std::to_string(spec.dimensions() - 1));
        dims.push_back(*c.dim);
    } else {
        for (int d = 0; d < spec.dimensions(); ++d) dims.push_back(d);
    }

    std::vector<std::size_t> counts;
    std::vector<BigInt> expected;
    for (int d : dims) {
        const BigInt predicted = cubes ? count_cubes_closed_form(spec, d) : count_cells_closed_form(spec, d + 1);
        if (predicted > static_cast<unsigned long>(c.max_generators))
            throw CapacityError("dimension " + std::to_string(d) + " of " + spec.label() +
                                    " exceeds the generator limit",
                                d);
        counts.push_back(cubes ? enumerate_cubes(spec, d, c.threads).size()
                               : enumerate_graphs(spec, d + 1, c.threads).size());
        expected.push_back(predicted);
    }
    bool match = true;
    for (std::size_t i = 0; i < counts.size(); ++i)
        match = match && expected[i] == static_cast<unsigned long>(counts[i]);

    switch (c.format) {
        case OutputFormat::json: {
            ojson j;
            j["family"] = std::string(family_name(spec.family));
            j["s"] = spec.s;
            j["m"] = spec.m;
            j["kind"] = cubes ? "cubes" : "graphs";
            j["dims"] = dims;
            j["counts"] = counts;
            auto cf = ojson::array();
            for (const auto& e : expected) cf.push_back(big_json(e));
            j["closed_form"] = cf;
            j["match"] = match;
            out << j.dump() << '\n';
            break;
        }
        case OutputFormat::csv:
            out << "family,s,m,kind,dim,count,closed_form\n";
            for (std::size_t i = 0; i < dims.size(); ++i)
                out << family_name(spec.family) << ',' << spec.s << ',' << spec.m << ','
                    << (cubes ? "cubes" : "graphs") << ',' << dims[i] << ',' << counts[i] << ','
                    << expected[i].get_str() << '\n';
            break;
        case OutputFormat::table: out << join(counts) << '\n'; break;
    }
    if (!match) {
        err << "enumerated counts differ from the closed forms:";
        for (const auto& e : expected) err << ' ' << e.get_str();
        err << '\n';
        return kExitDisagreement;
    }
    return kExitOk;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream&) {
    auto config = VerifyConfig::defaults();
    config.homology = homology_options(c);
    const auto report = verify_suite(config);
    auto verdict = [](Verdict v) {
        switch (v) {
            case Verdict::pass: return "PASS";
            case Verdict::fail: return "FAIL";
            case Verdict::skipped: return "SKIPPED";
        }
        return "?";
    };
    switch (c.format) {
        case OutputFormat::json: {
            auto arr = ojson::array();
            for (const auto& ch : report.checks)
                arr.push_back({{"id", ch.id},
                               {"name", ch.name},
                               {"verdict", verdict(ch.verdict)},
                               {"conjecture", ch.conjecture},
                               {"detail", ch.detail}});
            out << ojson{{"checks", arr}, {"ok", report.ok()}}.dump() << '\n';
            break;
        }
        case OutputFormat::csv:
            out << "id,verdict,conjecture,name,detail\n";
            for (const auto& ch : report.checks)
                out << ch.id << ',' << verdict(ch.verdict) << ',' << (ch.conjecture ? "true" : "false") << ",\""
                    << ch.name << "\",\"" << ch.detail << "\"\n";
            break;
        case OutputFormat::table:
            for (const auto& ch : report.checks)
                out << '[' << ch.id << "] " << verdict(ch.verdict) << (ch.conjecture ? " (conjecture)" : "") << "  "
                    << ch.name << "  -- " << ch.detail << '\n';
            out << (report.ok() ? "all checks passed" : "some checks failed") << '\n';
            break;
    }
    return report.ok() ? kExitOk : kExitCheckFailed;
}

int cmd_tables(const RunConfig& c, std::ostream& out, std::ostream&) {
    const auto cache = open_cache(c);
    struct Line {
        std::string section, label, computed, expected, status;
    };
    std::vector<Line> lines;
    std::map<std::string, HomologyReport> reports;

    auto betti_section = [&](const std::string& section, const std::vector<BettiRow>& rows) {
        for (const auto& row : rows) {
            const auto spec = FamilySpec::make(row.family, row.s, row.m);
            Line line{section, space_label(spec), "-", join(row.betti), "SKIPPED"};
            try {
                const auto& r = reports.emplace(spec.label(), compute(spec, c, cache ? &*cache : nullptr)).first->second;
                line.computed = join(r.betti);
                line.status = r.betti == row.betti ? "MATCH" : "MISMATCH";
            } catch (const CapacityError&) {
            }
            lines.push_back(std::move(line));
        }
    };
    betti_section("betti", colored_rows());
    betti_section("betti", holo_rows());
    betti_section("betti", remembered_rows());

    const auto& chi = holo_euler();
    for (int s = 1; s <= static_cast<int>(chi.size()); ++s) {
        const auto spec = FamilySpec::make(Family::holocolored, s);
        const BigInt expected = chi[s - 1];
        const BigInt closed = euler_closed_form(spec);
        std::string computed = "closed_form=" + closed.get_str();
        bool match = closed == expected;
        if (s <= kEulerCellsMaxLegs && fits(spec, c.max_generators)) {
            const auto cells = euler_characteristic(spec, EulerMethod::cells, homology_options(c));
            computed += " cells=" + cells.get_str();
            match = match && cells == expected;
        }
        if (s <= kEulerBettiMaxLegs) {
            auto it = reports.find(spec.label());
            if (it != reports.end()) {
                computed += " betti=" + it->second.euler.betti->get_str();
                match = match && *it->second.euler.betti == expected;
            }
        }
        lines.push_back({"euler", space_label(spec), computed, expected.get_str(), match ? "MATCH" : "MISMATCH"});
    }

    bool ok = true;
    for (const auto& l : lines) ok = ok && l.status == "MATCH";
    switch (c.format) {
        case OutputFormat::json: {
            auto arr = ojson::array();
            for (const auto& l : lines)
                arr.push_back({{"section", l.section},
                               {"space", l.label},
                               {"computed", l.computed},
                               {"expected", l.expected},
                               {"status", l.status}});
            out << ojson{{"rows", arr}, {"ok", ok}}.dump() << '\n';
            break;
        }
        case OutputFormat::csv:
            out << "section,space,computed,expected,status\n";
            for (const auto& l : lines)
                out << l.section << ',' << l.label << ',' << l.computed << ',' << l.expected << ',' << l.status << '\n';
            break;
        case OutputFormat::table:
            for (const auto& l : lines)
                out << l.section << "  " << l.label << "  " << l.computed << "  [expected " << l.expected << "]  "
                    << l.status << '\n';
            break;
    }
    return ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"loopmod: homology of moduli spaces of colored one-loop graphs"};
    app.require_subcommand(1);
    RunConfig config;
    std::string family = "mcolored", format = "table", primes, method;

    auto add_common = [&](CLI::App* sub, bool needs_space) {
        if (needs_space) {
            sub->add_option("--family", family, "uncolored | mcolored | holo | remembered");
            sub->add_option("--legs", config.s, "number of legs s")->required();
            sub->add_option("--colors", config.m, "number of colors m (mcolored)");
        }
        sub->add_option("--format", format, "json | csv | table");
        sub->add_flag("--exact", config.exact, "certify ranks by exact elimination");
        sub->add_option("--primes", primes, "comma separated primes for modular ranks");
        sub->add_option("--threads", config.threads, "worker threads");
        sub->add_option("--cache-dir", config.cache_dir, "cache directory (overrides LOOPMOD_CACHE_DIR)");
        sub->add_flag("--no-cache", config.no_cache, "neither read nor write the cache");
        sub->add_option("--max-generators", config.max_generators, "refuse chain groups larger than this");
        sub->add_option("--max-snf", config.max_snf, "Smith normal form size cap; 0 disables integral homology");
    };

    auto* betti = app.add_subcommand("betti", "Betti numbers of one space");
    add_common(betti, true);
    auto* euler = app.add_subcommand("euler", "Euler characteristic, cross-checked between methods");
    add_common(euler, true);
    euler->add_option("--method", method, "cells | betti | closed_form");
    auto* cells = app.add_subcommand("cells", "generator counts per dimension");
    add_common(cells, true);
    cells->add_flag("--cubes", config.cubes, "count cubes (G,F) instead of graphs");
    int dim = -1;
    cells->add_option("--dim", dim, "only this dimension");
    auto* verify = app.add_subcommand("verify", "run the theorem checks");
    add_common(verify, false);
    auto* tables = app.add_subcommand("tables", "reproduce the reference tables");
    add_common(tables, false);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        config.command = app.get_subcommands().front()->get_name();
        if (!parse_family(family, config.family)) throw UsageError("unknown family " + family);
        if (format == "json") config.format = OutputFormat::json;
        else if (format == "csv") config.format = OutputFormat::csv;
        else if (format == "table") config.format = OutputFormat::table;
        else throw UsageError("unknown format " + format);
        if (!method.empty()) config.method = method;
        if (dim >= 0) config.dim = dim;
        else if (cells->count("--dim")) throw UsageError("--dim must be non-negative");
        if (config.threads < 1) throw UsageError("--threads must be at least 1");
        if (config.m < 1) throw UsageError("--colors must be at least 1");
        if (!primes.empty()) {
            std::stringstream in(primes);
            std::string item;
            while (std::getline(in, item, ',')) {
                std::uint64_t p = 0;
                try {
                    std::size_t used = 0;
                    p = std::stoull(item, &used);
                    if (used != item.size()) throw std::invalid_argument(item);
                } catch (const std::exception&) {
                    throw UsageError("not a prime: " + item);
                }
                if (p < 3 || p > 0xffffffffull || !is_prime(p)) throw UsageError("not an odd prime below 2^32: " + item);
                if (std::find(config.primes.begin(), config.primes.end(), p) != config.primes.end())
                    throw UsageError("repeated prime " + item);
                config.primes.push_back(static_cast<std::uint32_t>(p));
            }
        }

        if (config.command == "betti") return cmd_betti(config, out, err);
        if (config.command == "euler") return cmd_euler(config, out, err);
        if (config.command == "cells") return cmd_cells(config, out, err);
        if (config.command == "verify") return cmd_verify(config, out, err);
        return cmd_tables(config, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CapacityError& e) {
        err << "capacity exceeded: " << e.what() << '\n';
        return kExitCapacity;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace loopmod
