#pragma once

// One-loop graphs with labelled legs: k vertices on a cycle, vertex i sitting
// between edge i-1 and edge i (indices mod k). The rose (k = 1) is a single
// vertex with a self-loop.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace loopmod {

// Bit (i - 1) stands for label i. Legs and holocolors are capped at 16.
using LabelMask = std::uint16_t;
inline constexpr int kMaxLegs = 16;
inline constexpr int kMaxColors = 255;

enum class Family : std::uint8_t { uncolored, mcolored, holocolored, remembered };

// CLI / file-name spelling: uncolored, mcolored, holo, remembered.
std::string_view family_name(Family family);
bool parse_family(std::string_view name, Family& out);
inline bool is_cubical(Family f) { return f == Family::uncolored || f == Family::mcolored; }

enum class ContractMode : std::uint8_t { forget, remember };

inline LabelMask label_bit(int label) { return static_cast<LabelMask>(1u << (label - 1)); }
std::vector<int> mask_labels(std::uint32_t mask);  // ascending, 1-based
LabelMask labels_mask(std::span<const int> labels);

// Lexicographic comparison of the ascending label sequences of two masks.
int compare_label_sequences(std::uint32_t a, std::uint32_t b);

struct VertexData {
    LabelMask legs = 0;
    LabelMask remembered = 0;

    bool operator==(const VertexData&) const = default;
};

// Subset of edge positions {0, ..., k-1}; always ascending by construction.
class ForestMark {
public:
    ForestMark() = default;
    explicit ForestMark(std::uint32_t mask) : mask_(mask) {}
    static ForestMark of(std::initializer_list<int> edges);

    std::uint32_t mask() const { return mask_; }
    bool empty() const { return mask_ == 0; }
    bool contains(int e) const { return (mask_ >> e) & 1u; }
    int size() const;
    std::vector<int> edges() const;
    ForestMark without(int e) const { return ForestMark(mask_ & ~(1u << e)); }

    bool operator==(const ForestMark&) const = default;

private:
    std::uint32_t mask_ = 0;
};

class CycleGraph {
public:
    CycleGraph() = default;

    // Throws StructuralError when an invariant of `family` is violated.
    CycleGraph(Family family, std::vector<VertexData> vertices, std::vector<int> edge_colors);

    Family family() const { return family_; }
    int edge_count() const { return static_cast<int>(colors_.size()); }
    int leg_count() const;
    const std::vector<VertexData>& vertices() const { return vertices_; }
    const std::vector<std::uint8_t>& edge_colors() const { return colors_; }
    int edge_color(int e) const { return colors_[e]; }
    // Edge colours together with remembered colours.
    std::uint32_t used_colors() const;

    bool operator==(const CycleGraph&) const = default;

private:
    friend struct CycleGraphAccess;

    Family family_ = Family::uncolored;
    std::vector<VertexData> vertices_;
    std::vector<std::uint8_t> colors_;
};

// Element of the dihedral group of order 2k acting on the alternating
// vertex/edge sequence. Image position i receives vertex source_vertex(i)
// and edge source_edge(i) of the original.
struct DihedralElement {
    int shift = 0;
    bool reflect = false;

    bool operator==(const DihedralElement&) const = default;

    int source_vertex(int i, int k) const;
    int source_edge(int i, int k) const;
    int image_edge(int e, int k) const;
};

CycleGraph apply(const CycleGraph& g, DihedralElement sym);
ForestMark apply(ForestMark f, DihedralElement sym, int k);

// Parity (+1 / -1) of the permutation carrying the ascending forest edges
// to the ascending order of their images.
int forest_parity(ForestMark f, DihedralElement sym, int k);

struct CanonicalForm {
    CycleGraph graph;
    ForestMark forest;
    int sign = 1;
};

CanonicalForm canonical_form(const CycleGraph& g, ForestMark forest = {});
bool is_canonical(const CycleGraph& g, ForestMark forest = {});

// All dihedral elements fixing g.
std::vector<DihedralElement> stabilizer(const CycleGraph& g);

// Merges the endpoints of edge e; result is canonical. Throws IndexError on a
// bad edge index and StructuralError when contracting the rose's loop.
CycleGraph contract_edge(const CycleGraph& g, int e, ContractMode mode);

// Same, carrying a forest mark: returns the canonical (G/e, F/e) with the
// parity sign of the induced order on the remaining forest edges.
CanonicalForm contract_edge(const CycleGraph& g, ForestMark forest, int e, ContractMode mode);

// `k=<k>;V=(legs|remembered),...;E=<colors>;F=<forest edges>`
std::string encode(const CycleGraph& g, ForestMark forest = {});
std::pair<CycleGraph, ForestMark> decode(std::string_view text, Family family);

}  // namespace loopmod
