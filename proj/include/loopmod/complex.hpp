#pragma once

// Cubical (uncolored / m-colored) and semi-simplicial (holocolored /
// remembered) chain complexes.

#include <cstddef>
#include <utility>
#include <vector>

#include "loopmod/exact_linalg.hpp"
#include "loopmod/families.hpp"

namespace loopmod {

template <class Gen>
using Chain = std::vector<std::pair<Gen, int>>;

// Signed faces of a cube, identical faces summed; zero terms dropped.
// Forest edges are taken in ascending canonical position.
Chain<CubeGenerator> boundary_cubical(const CubeGenerator& cube);

// True when some symmetry of G fixes F while permuting it with odd parity,
// i.e. the cube would be identified with its own negative.
bool folds(const CubeGenerator& cube);

// Signed faces (G/e_i, c_{e_i}), edges taken in ascending colour order.
// Empty for a rose.
Chain<CycleGraph> boundary_simplicial(const CycleGraph& g, ContractMode mode);

struct ChainComplex {
    FamilySpec spec;
    GeneratorTable tables;
    // boundaries[d] : C_d -> C_{d-1}; boundaries[0] has zero rows.
    std::vector<SparseIntMatrix> boundaries;

    int dimensions() const { return tables.dimensions(); }
    std::size_t chain_group_size(int d) const { return tables.size(d); }
};

struct BuildOptions {
    std::size_t max_generators = 5'000'000;
    int threads = 1;
};

// Throws CapacityError (from enumeration) naming the offending dimension.
ChainComplex build_complex(const FamilySpec& spec, const BuildOptions& options = {});

// Boundary matrices for an already enumerated generator table.
std::vector<SparseIntMatrix> assemble_boundaries(const GeneratorTable& tables, int threads = 1);

}  // namespace loopmod
