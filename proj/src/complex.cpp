#include "loopmod/complex.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "loopmod/errors.hpp"
#include "loopmod/parallel.hpp"

namespace loopmod {

namespace {

template <class Gen>
Chain<Gen> collect(std::map<std::string, std::pair<Gen, int>>& terms) {
    Chain<Gen> out;
    for (auto& [key, term] : terms)
        if (term.second != 0) out.push_back(std::move(term));
    return out;
}

template <class Gen>
void add_term(std::map<std::string, std::pair<Gen, int>>& terms, std::string key, Gen gen, int coeff) {
    auto [it, inserted] = terms.try_emplace(std::move(key), std::move(gen), coeff);
    if (!inserted) it->second.second += coeff;
}

}  // namespace

bool folds(const CubeGenerator& cube) {
    const int k = cube.graph.edge_count();
    for (const auto& sym : stabilizer(cube.graph))
        if (apply(cube.forest, sym, k) == cube.forest && forest_parity(cube.forest, sym, k) < 0) return true;
    return false;
}

Chain<CubeGenerator> boundary_cubical(const CubeGenerator& cube) {
    std::map<std::string, std::pair<CubeGenerator, int>> terms;
    const auto edges = cube.forest.edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const int sign = (i % 2 == 0) ? 1 : -1;
        auto kept = canonical_form(cube.graph, cube.forest.without(edges[i]));
        auto key = encode(kept.graph, kept.forest);
        add_term(terms, std::move(key), CubeGenerator{std::move(kept.graph), kept.forest}, sign * kept.sign);

        auto shrunk = contract_edge(cube.graph, cube.forest, edges[i], ContractMode::forget);
        key = encode(shrunk.graph, shrunk.forest);
        add_term(terms, std::move(key), CubeGenerator{std::move(shrunk.graph), shrunk.forest},
                 -sign * shrunk.sign);
    }
    return collect(terms);
}

Chain<CycleGraph> boundary_simplicial(const CycleGraph& g, ContractMode mode) {
    const int k = g.edge_count();
    if (k == 1) return {};
    std::vector<int> by_color(k);
    for (int e = 0; e < k; ++e) by_color[e] = e;
    std::sort(by_color.begin(), by_color.end(),
              [&](int a, int b) { return g.edge_color(a) < g.edge_color(b); });
    std::map<std::string, std::pair<CycleGraph, int>> terms;
    for (int i = 0; i < k; ++i) {
        auto face = contract_edge(g, by_color[i], mode);
        auto key = encode(face);
        add_term(terms, std::move(key), std::move(face), (i % 2 == 0) ? 1 : -1);
    }
    return collect(terms);
}

std::vector<SparseIntMatrix> assemble_boundaries(const GeneratorTable& tables, int threads) {
    const auto& spec = tables.spec();
    const bool cubical = is_cubical(spec.family);
    const int dims = tables.dimensions();
    std::vector<SparseIntMatrix> out;
    out.emplace_back(0, dims > 0 ? tables.size(0) : 0);

    if (cubical) {
        for (int d = 0; d < dims; ++d)
            for (const auto& cube : tables.cells(d))
                if (folds(cube))
                    throw StructuralError("cube " + encode(cube.graph, cube.forest) +
                                          " is identified with its negative");
    }

    for (int d = 1; d < dims; ++d) {
        const std::size_t cols = tables.size(d);
        std::vector<std::vector<MatrixEntry>> columns(cols);
        parallel_for(cols, threads, [&](std::size_t j) {
            const auto& gen = tables.at(d, j);
            auto resolve = [&](const std::string& key) {
                auto row = tables.find(d - 1, key);
                if (!row) throw StructuralError("face " + key + " missing from dimension " + std::to_string(d - 1));
                return static_cast<std::uint32_t>(*row);
            };
            if (cubical) {
                for (const auto& [face, coeff] : boundary_cubical(gen))
                    columns[j].push_back({resolve(encode(face.graph, face.forest)), static_cast<std::uint32_t>(j), coeff});
            } else {
                for (const auto& [face, coeff] : boundary_simplicial(gen.graph, spec.contract_mode()))
                    columns[j].push_back({resolve(encode(face)), static_cast<std::uint32_t>(j), coeff});
            }
        });
        std::vector<MatrixEntry> entries;
        for (auto& c : columns)
            for (auto& e : c) entries.push_back(std::move(e));
        out.push_back(SparseIntMatrix::from_triplets(tables.size(d - 1), cols, std::move(entries)));
    }
    return out;
}

ChainComplex build_complex(const FamilySpec& spec, const BuildOptions& options) {
    ChainComplex cx;
    cx.spec = spec;
    cx.tables = build_generator_table(spec, {options.max_generators, options.threads});
    cx.boundaries = assemble_boundaries(cx.tables, options.threads);
    return cx;
}

}  // namespace loopmod
