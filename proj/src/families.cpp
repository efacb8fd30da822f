#include "loopmod/families.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>

#include "loopmod/errors.hpp"
#include "loopmod/parallel.hpp"

namespace loopmod {

FamilySpec FamilySpec::make(Family family, int s, int m) {
    if (s < 1 || s > kMaxLegs) throw StructuralError("leg count s must lie in 1..16");
    if (m < 1 || m > kMaxColors) throw StructuralError("color count m must lie in 1..255");
    switch (family) {
        case Family::uncolored: m = 1; break;
        case Family::mcolored: break;
        case Family::holocolored:
        case Family::remembered: m = s; break;
    }
    return FamilySpec{family, s, m};
}

std::string FamilySpec::label() const {
    return std::string(family_name(family)) + "_s" + std::to_string(s) + "_m" + std::to_string(m);
}

GeneratorTable::GeneratorTable(FamilySpec spec, std::vector<std::vector<CubeGenerator>> per_dimension)
    : spec_(spec) {
    const std::size_t dims = per_dimension.size();
    cells_.resize(dims);
    keys_.resize(dims);
    index_.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        std::vector<std::pair<std::string, CubeGenerator>> keyed;
        keyed.reserve(per_dimension[d].size());
        for (auto& c : per_dimension[d]) keyed.emplace_back(encode(c.graph, c.forest), std::move(c));
        std::sort(keyed.begin(), keyed.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < keyed.size(); ++i) {
            if (!index_[d].emplace(keyed[i].first, i).second)
                throw StructuralError("duplicate generator " + keyed[i].first);
            keys_[d].push_back(std::move(keyed[i].first));
            cells_[d].push_back(std::move(keyed[i].second));
        }
    }
}

std::vector<std::size_t> GeneratorTable::sizes() const {
    std::vector<std::size_t> out;
    for (const auto& c : cells_) out.push_back(c.size());
    return out;
}

std::optional<std::size_t> GeneratorTable::find(int d, std::string_view key) const {
    if (d < 0 || d >= dimensions()) return std::nullopt;
    auto it = index_[d].find(std::string(key));
    if (it == index_[d].end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> GeneratorTable::find(int d, const CycleGraph& g, ForestMark f) const {
    return find(d, encode(g, f));
}

namespace {

// Set partitions of {1..s} into exactly k blocks (restricted growth strings).
// Block 0 always contains leg 1.
std::vector<std::vector<LabelMask>> set_partitions(int s, int k) {
    std::vector<std::vector<LabelMask>> out;
    std::vector<int> rgs(s, 0);
    auto rec = [&](auto&& self, int i, int used) -> void {
        if (used + (s - i) < k) return;
        if (i == s) {
            if (used != k) return;
            std::vector<LabelMask> blocks(k, 0);
            for (int j = 0; j < s; ++j) blocks[rgs[j]] |= label_bit(j + 1);
            out.push_back(std::move(blocks));
            return;
        }
        for (int b = 0; b <= std::min(used, k - 1); ++b) {
            rgs[i] = b;
            self(self, i + 1, std::max(used, b + 1));
        }
    };
    if (k >= 1 && k <= s) rec(rec, 0, 0);
    return out;
}

using LocalSet = std::map<std::string, CycleGraph>;

void emit(LocalSet& out, Family family, const std::vector<VertexData>& vs,
          const std::vector<int>& colors) {
    CycleGraph g(family, vs, colors);
    auto canon = canonical_form(g).graph;
    auto key = encode(canon);
    out.emplace(std::move(key), std::move(canon));
}

// Distributes `pool` over the vertices, vertex i receiving |legs_i| - 1 colors.
void distribute_remembered(LocalSet& out, std::vector<VertexData>& vs, std::size_t vi,
                           std::uint32_t pool, const std::vector<int>& colors) {
    if (vi == vs.size()) {
        if (pool == 0) emit(out, Family::remembered, vs, colors);
        return;
    }
    const int need = std::popcount(static_cast<unsigned>(vs[vi].legs)) - 1;
    // Enumerate subsets of pool with `need` elements.
    for (std::uint32_t sub = pool;; sub = (sub - 1) & pool) {
        if (std::popcount(sub) == need) {
            vs[vi].remembered = static_cast<LabelMask>(sub);
            distribute_remembered(out, vs, vi + 1, pool & ~sub, colors);
        }
        if (sub == 0) break;
    }
    vs[vi].remembered = 0;
}

void colorings(LocalSet& out, const FamilySpec& spec, std::vector<VertexData>& vs) {
    const int k = static_cast<int>(vs.size());
    std::vector<int> colors(k, 1);
    switch (spec.family) {
        case Family::uncolored:
            emit(out, spec.family, vs, colors);
            return;
        case Family::mcolored:
            for (;;) {
                emit(out, spec.family, vs, colors);
                int i = 0;
                while (i < k && colors[i] == spec.m) colors[i++] = 1;
                if (i == k) return;
                ++colors[i];
            }
        case Family::holocolored:
        case Family::remembered: {
            const std::uint32_t all = (1u << spec.s) - 1u;
            auto rec = [&](auto&& self, int i, std::uint32_t used) -> void {
                if (i == k) {
                    if (spec.family == Family::holocolored)
                        emit(out, spec.family, vs, colors);
                    else
                        distribute_remembered(out, vs, 0, all & ~used, colors);
                    return;
                }
                for (int c = 1; c <= spec.s; ++c) {
                    if (used & (1u << (c - 1))) continue;
                    colors[i] = c;
                    self(self, i + 1, used | (1u << (c - 1)));
                }
            };
            rec(rec, 0, 0);
            return;
        }
    }
}

LocalSet graphs_for_partition(const FamilySpec& spec, const std::vector<LabelMask>& blocks) {
    LocalSet out;
    const int k = static_cast<int>(blocks.size());
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::vector<VertexData> vs(k);
    // Block 0 stays at position 0; reflections are folded by canonicalization.
    do {
        for (int i = 0; i < k; ++i) vs[i] = VertexData{blocks[order[i]], 0};
        colorings(out, spec, vs);
    } while (std::next_permutation(order.begin() + 1, order.end()));
    return out;
}

std::vector<CubeGenerator> cubes_of(const std::vector<CycleGraph>& graphs, int d) {
    std::map<std::string, CubeGenerator> found;
    for (const auto& g : graphs) {
        const int k = g.edge_count();
        if (d >= k) continue;
        for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
            if (std::popcount(mask) != d) continue;
            auto canon = canonical_form(g, ForestMark(mask));
            auto key = encode(canon.graph, canon.forest);
            found.emplace(std::move(key), CubeGenerator{std::move(canon.graph), canon.forest});
        }
    }
    std::vector<CubeGenerator> out;
    out.reserve(found.size());
    for (auto& [key, c] : found) out.push_back(std::move(c));
    return out;
}

}  // namespace

std::vector<CycleGraph> enumerate_graphs(const FamilySpec& spec, int k, int threads) {
    if (k < 1 || k > spec.s) return {};
    const auto partitions = set_partitions(spec.s, k);
    std::vector<LocalSet> partial(partitions.size());
    parallel_for(partitions.size(), threads,
                 [&](std::size_t i) { partial[i] = graphs_for_partition(spec, partitions[i]); });
    LocalSet merged;
    for (auto& p : partial) merged.merge(p);
    std::vector<CycleGraph> out;
    out.reserve(merged.size());
    for (auto& [key, g] : merged) out.push_back(std::move(g));
    return out;
}

std::vector<CubeGenerator> enumerate_cubes(const FamilySpec& spec, int d, int threads) {
    if (!is_cubical(spec.family))
        throw StructuralError("cubes exist only for the uncolored and m-colored families");
    std::vector<CycleGraph> graphs;
    for (int k = d + 1; k <= spec.s; ++k) {
        auto gk = enumerate_graphs(spec, k, threads);
        graphs.insert(graphs.end(), std::make_move_iterator(gk.begin()),
                      std::make_move_iterator(gk.end()));
    }
    return cubes_of(graphs, d);
}

std::vector<std::vector<CycleGraph>> remembered_graphs_by_faces(int s) {
    const auto spec = FamilySpec::make(Family::remembered, s);
    std::vector<std::vector<CycleGraph>> out(s);
    out[s - 1] = enumerate_graphs(spec, s);
    for (int k = s; k >= 2; --k) {
        std::map<std::string, CycleGraph> faces;
        for (const auto& g : out[k - 1])
            for (int e = 0; e < k; ++e) {
                auto f = contract_edge(g, e, ContractMode::remember);
                faces.emplace(encode(f), std::move(f));
            }
        for (auto& [key, g] : faces) out[k - 2].push_back(std::move(g));
    }
    return out;
}

mpz_class factorial(int n) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

mpz_class binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

mpz_class stirling2(int n, int k) {
    if (k < 0 || k > n) return 0;
    // (1/k!) * sum_j (-1)^(k-j) C(k,j) j^n, with 0^0 = 1
    mpz_class sum = 0;
    for (int j = 0; j <= k; ++j) {
        mpz_class power;
        mpz_ui_pow_ui(power.get_mpz_t(), static_cast<unsigned long>(j), static_cast<unsigned long>(n));
        mpz_class term = binomial(k, j) * power;
        if ((k - j) % 2) sum -= term;
        else sum += term;
    }
    return sum / factorial(k);
}

namespace {

mpz_class pow_mpz(int base, int exp) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(exp));
    return r;
}

// Vertex configurations of k labelled blocks on a cycle, up to rotation and
// reflection: (k-1)!/2 for k >= 3.
mpz_class cyclic_arrangements(int k) { return k <= 2 ? mpz_class(1) : factorial(k - 1) / 2; }

// Integer partitions of s into exactly k parts, non-decreasing.
void integer_partitions(int s, int k, int min_part, std::vector<int>& cur,
                        std::vector<std::vector<int>>& out) {
    if (k == 0) {
        if (s == 0) out.push_back(cur);
        return;
    }
    for (int p = min_part; p * k <= s; ++p) {
        cur.push_back(p);
        integer_partitions(s - p, k - 1, p, cur, out);
        cur.pop_back();
    }
}

mpz_class remembered_count(int s, int k) {
    std::vector<std::vector<int>> parts;
    std::vector<int> cur;
    integer_partitions(s, k, 1, cur, parts);
    mpq_class sum = 0;
    for (const auto& p : parts) {
        mpz_class g = factorial(k);
        mpz_class denom = 1;
        for (std::size_t i = 0; i < p.size();) {
            std::size_t j = i;
            while (j < p.size() && p[j] == p[i]) ++j;
            g /= factorial(static_cast<int>(j - i));
            i = j;
        }
        for (int part : p) denom *= factorial(part) * factorial(part - 1);
        sum += mpq_class(g, denom);
    }
    sum.canonicalize();
    const mpz_class sf = factorial(s);
    mpq_class n = mpq_class(sf * sf * (k == 1 ? 2 : 1), 2 * k) * sum;
    n.canonicalize();
    if (n.get_den() != 1) throw StructuralError("remembered-edge count is not an integer");
    return n.get_num();
}

}  // namespace

mpz_class count_cells_closed_form(const FamilySpec& spec, int k) {
    const int s = spec.s;
    if (k < 1 || k > s) return 0;
    switch (spec.family) {
        case Family::uncolored:
        case Family::mcolored: {
            const int m = spec.m;
            if (k == 1) return m;
            if (k == 2) return stirling2(s, 2) * (m * (m + 1) / 2);
            return stirling2(s, k) * cyclic_arrangements(k) * pow_mpz(m, k);
        }
        case Family::holocolored: {
            // C(s,k) k! S(s,k) (k-1)!/2 (1 + delta_{k,1})
            mpz_class n = binomial(s, k) * factorial(k) * stirling2(s, k) * factorial(k - 1);
            if (k == 1) return n;
            return n / 2;
        }
        case Family::remembered:
            return remembered_count(s, k);
    }
    return 0;
}

mpz_class count_cubes_closed_form(const FamilySpec& spec, int d) {
    if (!is_cubical(spec.family))
        throw StructuralError("cubes exist only for the uncolored and m-colored families");
    const int s = spec.s;
    const int m = spec.m;
    mpz_class total = 0;
    for (int k = d + 1; k <= s; ++k) {
        if (k == 1) total += m;
        else if (k == 2) total += stirling2(s, 2) * (d == 0 ? mpz_class(m * (m + 1) / 2) : mpz_class(m * m));
        else total += count_cells_closed_form(spec, k) * binomial(k, d);
    }
    return total;
}

mpz_class count_generators_closed_form(const FamilySpec& spec, int d) {
    if (is_cubical(spec.family)) return count_cubes_closed_form(spec, d);
    return count_cells_closed_form(spec, d + 1);
}

GeneratorTable build_generator_table(const FamilySpec& spec, const EnumerationOptions& options) {
    for (int d = 0; d < spec.dimensions(); ++d) {
        if (count_generators_closed_form(spec, d) > options.max_generators) {
            throw CapacityError("chain group C_" + std::to_string(d) + " of " + spec.label() +
                                    " exceeds the generator limit of " +
                                    std::to_string(options.max_generators),
                                d);
        }
    }
    std::vector<std::vector<CycleGraph>> graphs(spec.s);
    for (int k = 1; k <= spec.s; ++k) graphs[k - 1] = enumerate_graphs(spec, k, options.threads);

    std::vector<std::vector<CubeGenerator>> cells(spec.dimensions());
    if (is_cubical(spec.family)) {
        std::vector<CycleGraph> all;
        for (auto& gk : graphs) all.insert(all.end(), gk.begin(), gk.end());
        parallel_for(cells.size(), options.threads,
                     [&](std::size_t d) { cells[d] = cubes_of(all, static_cast<int>(d)); });
    } else {
        for (int d = 0; d < spec.dimensions(); ++d)
            for (auto& g : graphs[d]) cells[d].push_back(CubeGenerator{std::move(g), {}});
    }
    return GeneratorTable(spec, std::move(cells));
}

}  // namespace loopmod
