#pragma once

// Enumeration of chain-complex generators per family and dimension, together
// with closed-form counts that serve as independent oracles.

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "loopmod/cycle_graph.hpp"

namespace loopmod {

struct FamilySpec {
    Family family = Family::uncolored;
    int s = 1;
    int m = 1;

    // Validates s and m; forces m = 1 for uncolored and m = s for the
    // holocolored and remembered families.
    static FamilySpec make(Family family, int s, int m = 1);

    int dimensions() const { return s; }  // chain groups live in 0 .. s-1
    ContractMode contract_mode() const {
        return family == Family::remembered ? ContractMode::remember : ContractMode::forget;
    }
    // "holo_s4_m4"
    std::string label() const;

    bool operator==(const FamilySpec&) const = default;
};

// (G, F, c); the simplicial families use an empty forest.
struct CubeGenerator {
    CycleGraph graph;
    ForestMark forest;

    int dimension() const { return forest.size(); }
    bool operator==(const CubeGenerator&) const = default;
};

using SimplexGenerator = CycleGraph;

// Canonical generators per dimension, sorted by canonical encoding.
class GeneratorTable {
public:
    GeneratorTable() = default;
    GeneratorTable(FamilySpec spec, std::vector<std::vector<CubeGenerator>> per_dimension);

    const FamilySpec& spec() const { return spec_; }
    int dimensions() const { return static_cast<int>(cells_.size()); }
    std::size_t size(int d) const { return cells_[d].size(); }
    std::vector<std::size_t> sizes() const;
    const CubeGenerator& at(int d, std::size_t i) const { return cells_[d][i]; }
    const std::string& key(int d, std::size_t i) const { return keys_[d][i]; }
    const std::vector<CubeGenerator>& cells(int d) const { return cells_[d]; }

    std::optional<std::size_t> find(int d, std::string_view key) const;
    std::optional<std::size_t> find(int d, const CycleGraph& g, ForestMark f = {}) const;

private:
    FamilySpec spec_;
    std::vector<std::vector<CubeGenerator>> cells_;
    std::vector<std::vector<std::string>> keys_;
    std::vector<std::unordered_map<std::string, std::size_t>> index_;
};

// Isomorphism classes of admissible k-edge graphs of the family, canonical,
// sorted by encoding. Empty when k > s.
std::vector<CycleGraph> enumerate_graphs(const FamilySpec& spec, int k, int threads = 1);

// Canonical cubes (G, F, c) with |F| = d over all edge counts d < k <= s.
std::vector<CubeGenerator> enumerate_cubes(const FamilySpec& spec, int d, int threads = 1);

// Remembered-edge generators reached as iterated remember-mode faces of the
// top simplices; index k-1 holds the k-edge graphs.
std::vector<std::vector<CycleGraph>> remembered_graphs_by_faces(int s);

mpz_class stirling2(int n, int k);
mpz_class binomial(int n, int k);
mpz_class factorial(int n);

// Number of k-edge graph classes in the family, from the counting formulas.
mpz_class count_cells_closed_form(const FamilySpec& spec, int k);

// Number of cubes of dimension d (cubical families only).
mpz_class count_cubes_closed_form(const FamilySpec& spec, int d);

// Generator count of chain group d, by closed form.
mpz_class count_generators_closed_form(const FamilySpec& spec, int d);

struct EnumerationOptions {
    std::size_t max_generators = 5'000'000;
    int threads = 1;
};

// All chain groups of the family. Throws CapacityError naming the first
// dimension whose closed-form size exceeds max_generators.
GeneratorTable build_generator_table(const FamilySpec& spec, const EnumerationOptions& options = {});

}  // namespace loopmod
