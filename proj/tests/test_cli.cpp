#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "loopmod/cache.hpp"
#include "loopmod/cli.hpp"
#include "loopmod/families.hpp"

using namespace loopmod;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

// Fresh directory under the system temp path, removed on destruction.
struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("loopmod-test-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string strip_timing(const std::string& json) {
    auto j = nlohmann::json::parse(json);
    j.erase("wall_ms");
    return j.dump();
}

}  // namespace

TEST_CASE("documented examples") {
    auto r = run({"betti", "--family", "holo", "--legs", "4", "--format", "table", "--no-cache"});
    CHECK(r.code == 0);
    CHECK(r.out == "X~_4 | 1 0 36 3\n");

    r = run({"betti", "--family", "mcolored", "--legs", "1", "--colors", "5", "--no-cache"});
    CHECK(r.code == 0);
    CHECK(r.out == "X_1^5 | 5\n");

    r = run({"euler", "--family", "holo", "--legs", "8", "--method", "closed_form"});
    CHECK(r.code == 0);
    CHECK(r.out == "59485588\n");
    r = run({"euler", "--family", "holo", "--legs", "7", "--method", "closed_form"});
    CHECK(r.out == "-1122506\n");
    r = run({"euler", "--family", "uncolored", "--legs", "2", "--no-cache"});
    CHECK(r.code == 0);
    CHECK(r.out == "1\n");

    CHECK(run({"cells", "--family", "holo", "--legs", "3"}).out == "3 9 6\n");
    CHECK(run({"cells", "--family", "holo", "--legs", "5", "--dim", "4"}).out == "1440\n");
    CHECK(run({"cells", "--family", "mcolored", "--legs", "2", "--colors", "2", "--cubes"}).out == "5 4\n");
}

TEST_CASE("usage errors exit 1") {
    CHECK(run({"betti", "--family", "holo", "--legs", "99"}).code == kExitUsage);
    CHECK(run({"betti", "--family", "holo", "--legs", "0"}).code == kExitUsage);
    CHECK(run({"betti", "--family", "bogus", "--legs", "3"}).code == kExitUsage);
    CHECK(run({"betti", "--family", "holo"}).code == kExitUsage);
    CHECK(run({"betti", "--legs", "3", "--colors", "0"}).code == kExitUsage);
    CHECK(run({"betti", "--legs", "3", "--format", "xml"}).code == kExitUsage);
    CHECK(run({"betti", "--legs", "3", "--threads", "0"}).code == kExitUsage);
    CHECK(run({"betti", "--legs", "3", "--primes", "15"}).code == kExitUsage);
    CHECK(run({"betti", "--legs", "3", "--primes", "101,101"}).code == kExitUsage);
    CHECK(run({"betti", "--legs", "3", "--primes", "abc"}).code == kExitUsage);
    CHECK(run({"euler", "--legs", "3", "--method", "guess"}).code == kExitUsage);
    CHECK(run({"cells", "--legs", "3", "--dim", "3"}).code == kExitUsage);
    CHECK(run({"cells", "--family", "holo", "--legs", "3", "--cubes"}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("capacity errors exit 2") {
    auto r = run({"betti", "--family", "holo", "--legs", "8", "--no-cache"});
    CHECK(r.code == kExitCapacity);
    CHECK(r.err.find("capacity") != std::string::npos);
    CHECK(run({"euler", "--family", "holo", "--legs", "8", "--method", "cells"}).code == kExitCapacity);
    CHECK(run({"cells", "--family", "holo", "--legs", "6", "--max-generators", "100"}).code == kExitCapacity);
    CHECK(run({"betti", "--family", "holo", "--legs", "5", "--max-snf", "10", "--no-cache"}).code == kExitCapacity);
    // without --method the affordable methods still run
    r = run({"euler", "--family", "holo", "--legs", "8"});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "59485588\n");
}

TEST_CASE("explicit primes and exact mode") {
    auto r = run({"betti", "--family", "holo", "--legs", "4", "--primes", "1000003,998244353", "--format", "json",
                  "--no-cache"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["primes"] == nlohmann::json::array({1000003, 998244353}));
    CHECK(j["exact"] == false);
    r = run({"betti", "--family", "holo", "--legs", "4", "--exact", "--format", "json", "--no-cache"});
    j = nlohmann::json::parse(r.out);
    CHECK(j["exact"] == true);
    CHECK(j["betti"] == nlohmann::json::array({1, 0, 36, 3}));
}

TEST_CASE("integral homology in table and json output") {
    auto r = run({"betti", "--family", "holo", "--legs", "5", "--max-snf", "100000", "--no-cache"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("X~_5 | 1 0 6 824 12", 0) == 0);
    r = run({"betti", "--family", "holo", "--legs", "4", "--max-snf", "100000", "--format", "json", "--no-cache"});
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["torsion"].size() == 4);
    CHECK(j["torsion"][3].empty());
}

TEST_CASE("csv output") {
    auto r = run({"betti", "--family", "mcolored", "--legs", "3", "--colors", "2", "--format", "csv", "--no-cache"});
    CHECK(r.out.rfind("family,s,m,betti,", 0) == 0);
    CHECK(r.out.find("\nmcolored,3,2,1 0 6,") != std::string::npos);
    r = run({"cells", "--family", "holo", "--legs", "3", "--format", "csv"});
    CHECK(r.out == "family,s,m,kind,dim,count,closed_form\nholo,3,3,graphs,0,3,3\nholo,3,3,graphs,1,9,9\nholo,3,3,graphs,2,6,6\n");
    r = run({"euler", "--family", "holo", "--legs", "4", "--format", "csv", "--no-cache"});
    CHECK(r.out == "family,s,m,method,value\nholo,4,4,cells,34\nholo,4,4,betti,34\nholo,4,4,closed_form,34\n");
}

TEST_CASE("cache round trip") {
    TempDir dir;
    const std::vector<std::string> args = {"betti", "--family", "remembered", "--legs", "4", "--format", "json",
                                           "--cache-dir", dir.path.string()};
    const auto first = run(args);
    REQUIRE(first.code == 0);
    const ComplexCache cache(dir.path);
    const auto spec = FamilySpec::make(Family::remembered, 4);
    CHECK(fs::exists(cache.generator_file(spec, 0)));
    CHECK(fs::exists(cache.generator_file(spec, 3)));
    CHECK(fs::exists(cache.boundary_file(spec, 3)));
    CHECK(cache.generator_file(spec, 2).filename() == "gen_remembered_s4_m4_d2.txt");
    CHECK(cache.boundary_file(spec, 2).filename() == "bnd_remembered_s4_m4_d2.mtx-like.txt");
    CHECK(cache.directory().parent_path() == dir.path);

    const auto second = run(args);
    CHECK(strip_timing(first.out) == strip_timing(second.out));
    const auto fresh = run({"betti", "--family", "remembered", "--legs", "4", "--format", "json", "--no-cache"});
    CHECK(strip_timing(first.out) == strip_timing(fresh.out));

    // the environment variable picks the cache when no flag is given
    TempDir env_dir;
    const char* previous = std::getenv("LOOPMOD_CACHE_DIR");
    const std::string saved = previous ? previous : "";
    setenv("LOOPMOD_CACHE_DIR", env_dir.path.string().c_str(), 1);
    CHECK(default_cache_root() == env_dir.path);
    run({"betti", "--family", "holo", "--legs", "3"});
    CHECK(fs::exists(ComplexCache(env_dir.path).generator_file(FamilySpec::make(Family::holocolored, 3), 0)));
    if (previous) setenv("LOOPMOD_CACHE_DIR", saved.c_str(), 1);
    else unsetenv("LOOPMOD_CACHE_DIR");
}

TEST_CASE("stale and corrupt cache entries") {
    TempDir dir;
    const auto spec = FamilySpec::make(Family::holocolored, 3);
    // files from another format version live in another directory and are never read
    fs::create_directories(dir.path / "fmt-0000000000000000");
    std::ofstream(dir.path / "fmt-0000000000000000" / "gen_holo_s3_m3_d0.txt") << "junk\n";
    auto r = run({"betti", "--family", "holo", "--legs", "3", "--cache-dir", dir.path.string()});
    CHECK(r.out == "X~_3 | 1 2 1\n");

    // unparsable entries are recomputed
    const ComplexCache cache(dir.path);
    std::ofstream(cache.generator_file(spec, 1)) << "not a graph\n";
    r = run({"betti", "--family", "holo", "--legs", "3", "--cache-dir", dir.path.string()});
    CHECK(r.out == "X~_3 | 1 2 1\n");
    CHECK(cache.load(spec).has_value());
}

TEST_CASE("method disagreement exits 3") {
    // A cached complex that lost a top cell (consistently in the generator
    // list and the boundary) makes the Betti-based Euler characteristic differ
    // from a fresh cell count.
    TempDir dir;
    const std::vector<std::string> base = {"--family", "holo", "--legs", "3", "--cache-dir", dir.path.string()};
    auto with = [&](std::vector<std::string> head) {
        head.insert(head.end(), base.begin(), base.end());
        return head;
    };
    REQUIRE(run(with({"betti"})).code == 0);
    const ComplexCache cache(dir.path);
    const auto spec = FamilySpec::make(Family::holocolored, 3);
    std::vector<std::string> lines;
    {
        std::ifstream in(cache.generator_file(spec, 2));
        for (std::string line; std::getline(in, line);) lines.push_back(line);
    }
    REQUIRE(lines.size() == 6);
    {
        std::ofstream out(cache.generator_file(spec, 2));
        for (std::size_t i = 0; i + 1 < lines.size(); ++i) out << lines[i] << '\n';
    }
    std::ofstream(cache.boundary_file(spec, 2)) << "9 5 0\n";
    const auto r = run(with({"euler"}));
    CHECK(r.code == kExitDisagreement);
    CHECK(r.err.find("disagree") != std::string::npos);
    CHECK(r.out.find("betti -1") != std::string::npos);
}

TEST_CASE("failed or skipped checks exit 4") {
    CHECK(run({"verify", "--max-generators", "10"}).code == kExitCheckFailed);
    const auto r = run({"tables", "--max-generators", "10", "--no-cache"});
    CHECK(r.code == kExitCheckFailed);
    CHECK(r.out.find("SKIPPED") != std::string::npos);
}
