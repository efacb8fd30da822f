#pragma once

// On-disk cache of generator tables and boundary matrices.
//
// Layout: <root>/fmt-<hash>/gen_<family>_s<s>_m<m>_d<d>.txt and
// bnd_<family>_s<s>_m<m>_d<d>.mtx-like.txt. The hash covers the file format
// version, so files written by an older format are simply never looked at.

#include <filesystem>
#include <optional>
#include <string>

#include "loopmod/complex.hpp"

namespace loopmod {

inline constexpr const char* kCacheFormat = "loopmod-cache/1;encoding=k,V,E,F;coordinate=rows cols nnz";

// LOOPMOD_CACHE_DIR, else $XDG_CACHE_HOME/loopmod, else ~/.cache/loopmod.
std::filesystem::path default_cache_root();

class ComplexCache {
public:
    explicit ComplexCache(std::filesystem::path root);

    const std::filesystem::path& directory() const { return dir_; }

    std::filesystem::path generator_file(const FamilySpec& spec, int d) const;
    std::filesystem::path boundary_file(const FamilySpec& spec, int d) const;

    // Nothing if any file is missing or unreadable.
    std::optional<ChainComplex> load(const FamilySpec& spec) const;
    void store(const ChainComplex& complex) const;

private:
    std::filesystem::path dir_;
};

std::string format_hash();

// Loads from cache when possible, otherwise builds and stores. The capacity
// check runs either way so results do not depend on cache state.
ChainComplex cached_complex(const FamilySpec& spec, const BuildOptions& options, const ComplexCache* cache);

}  // namespace loopmod
