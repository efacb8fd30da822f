#include "loopmod/cache.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "loopmod/errors.hpp"

namespace fs = std::filesystem;

namespace loopmod {

std::string format_hash() {
    // FNV-1a, 64 bit
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char* p = kCacheFormat; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

fs::path default_cache_root() {
    if (const char* env = std::getenv("LOOPMOD_CACHE_DIR"); env && *env) return env;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "loopmod";
    if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "loopmod";
    return fs::temp_directory_path() / "loopmod-cache";
}

ComplexCache::ComplexCache(fs::path root) : dir_(std::move(root) / ("fmt-" + format_hash())) {}

namespace {

std::string stem(const FamilySpec& spec, int d) {
    return std::string(family_name(spec.family)) + "_s" + std::to_string(spec.s) + "_m" + std::to_string(spec.m) +
           "_d" + std::to_string(d);
}

// Write to a sibling temp file and rename, so a crash never leaves a
// truncated file behind under the real name.
template <class Fn>
void write_atomically(const fs::path& target, Fn&& body) {
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write cache file " + tmp.string());
        body(out);
        if (!out) throw std::runtime_error("error writing cache file " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace

fs::path ComplexCache::generator_file(const FamilySpec& spec, int d) const {
    return dir_ / ("gen_" + stem(spec, d) + ".txt");
}

fs::path ComplexCache::boundary_file(const FamilySpec& spec, int d) const {
    return dir_ / ("bnd_" + stem(spec, d) + ".mtx-like.txt");
}

std::optional<ChainComplex> ComplexCache::load(const FamilySpec& spec) const {
    const int dims = spec.dimensions();
    std::vector<std::vector<CubeGenerator>> cells(dims);
    try {
        for (int d = 0; d < dims; ++d) {
            std::ifstream in(generator_file(spec, d));
            if (!in) return std::nullopt;
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                auto [g, f] = decode(line, spec.family);
                if (f.size() != (is_cubical(spec.family) ? d : 0)) return std::nullopt;
                cells[d].push_back({std::move(g), f});
            }
        }
        ChainComplex cx;
        cx.spec = spec;
        cx.tables = GeneratorTable(spec, std::move(cells));
        cx.boundaries.emplace_back(0, cx.tables.size(0));
        for (int d = 1; d < dims; ++d) {
            std::ifstream in(boundary_file(spec, d));
            if (!in) return std::nullopt;
            auto m = read_coordinate(in);
            if (m.rows() != cx.tables.size(d - 1) || m.cols() != cx.tables.size(d)) return std::nullopt;
            cx.boundaries.push_back(std::move(m));
        }
        return cx;
    } catch (const std::exception&) {
        return std::nullopt;  // corrupt entries are recomputed, not repaired
    }
}

void ComplexCache::store(const ChainComplex& cx) const {
    fs::create_directories(dir_);
    for (int d = 0; d < cx.dimensions(); ++d) {
        write_atomically(generator_file(cx.spec, d), [&](std::ostream& out) {
            for (std::size_t i = 0; i < cx.tables.size(d); ++i) out << cx.tables.key(d, i) << '\n';
        });
        if (d > 0)
            write_atomically(boundary_file(cx.spec, d),
                             [&](std::ostream& out) { write_coordinate(out, cx.boundaries[d]); });
    }
}

ChainComplex cached_complex(const FamilySpec& spec, const BuildOptions& options, const ComplexCache* cache) {
    for (int d = 0; d < spec.dimensions(); ++d)
        if (count_generators_closed_form(spec, d) > static_cast<unsigned long>(options.max_generators))
            throw CapacityError("chain group " + std::to_string(d) + " of " + spec.label() +
                                    " exceeds the generator limit",
                                d);
    if (cache)
        if (auto hit = cache->load(spec)) return std::move(*hit);
    auto cx = build_complex(spec, options);
    if (cache) {
        try {
            cache->store(cx);
        } catch (const std::exception&) {
            // an unwritable cache only costs recomputation
        }
    }
    return cx;
}

}  // namespace loopmod
