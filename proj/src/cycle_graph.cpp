#include "loopmod/cycle_graph.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <sstream>

#include "loopmod/errors.hpp"

namespace loopmod {

struct CycleGraphAccess {
    static CycleGraph make(Family family, std::vector<VertexData> vertices,
                           std::vector<std::uint8_t> colors) {
        CycleGraph g;
        g.family_ = family;
        g.vertices_ = std::move(vertices);
        g.colors_ = std::move(colors);
        return g;
    }
};

namespace {

int mod(int a, int k) {
    int r = a % k;
    return r < 0 ? r + k : r;
}

int compare_vertex(const VertexData& a, const VertexData& b) {
    if (int c = compare_label_sequences(a.legs, b.legs)) return c;
    return compare_label_sequences(a.remembered, b.remembered);
}

// Compares the images of g under two symmetries (with forest flags).
int compare_images(const CycleGraph& g, ForestMark f, DihedralElement x, DihedralElement y) {
    const int k = g.edge_count();
    const auto& vs = g.vertices();
    const auto& cs = g.edge_colors();
    for (int i = 0; i < k; ++i) {
        if (int c = compare_vertex(vs[x.source_vertex(i, k)], vs[y.source_vertex(i, k)])) return c;
        const int ex = x.source_edge(i, k);
        const int ey = y.source_edge(i, k);
        if (cs[ex] != cs[ey]) return cs[ex] < cs[ey] ? -1 : 1;
        const bool fx = f.contains(ex);
        const bool fy = f.contains(ey);
        if (fx != fy) return fx ? 1 : -1;
    }
    return 0;
}

void validate(Family family, const std::vector<VertexData>& vertices,
              const std::vector<int>& colors) {
    const std::size_t k = colors.size();
    if (k == 0 || vertices.size() != k)
        throw StructuralError("cycle graph needs k >= 1 vertices and k edge colors");
    if (k > static_cast<std::size_t>(kMaxLegs))
        throw StructuralError("cycle graph has more than 16 edges");

    std::uint32_t legs = 0;
    std::uint32_t used = 0;
    for (const auto& v : vertices) {
        if (v.legs == 0) throw StructuralError("vertex without legs is not admissible");
        if (legs & v.legs) throw StructuralError("leg sets overlap");
        legs |= v.legs;
        if (v.remembered != 0) {
            if (family != Family::remembered)
                throw StructuralError("remembered colors outside the remembered family");
            if (used & v.remembered) throw StructuralError("duplicate remembered color");
            used |= v.remembered;
        }
    }
    const int s = std::popcount(legs);
    if (legs != (1u << s) - 1u) throw StructuralError("legs do not partition {1,...,s}");

    for (int c : colors) {
        if (c < 1 || c > kMaxColors) throw StructuralError("edge color out of range");
        if (family == Family::uncolored && c != 1)
            throw StructuralError("uncolored graph with color != 1");
        if (family == Family::holocolored || family == Family::remembered) {
            if (c > s) throw StructuralError("holocolor exceeds the color set {1,...,s}");
            const std::uint32_t bit = 1u << (c - 1);
            if (used & bit) throw StructuralError("duplicate holocolor");
            used |= bit;
        }
    }
    if (family == Family::remembered && (used >> s) != 0)
        throw StructuralError("remembered color exceeds the color set {1,...,s}");
}

}  // namespace

std::string_view family_name(Family family) {
    switch (family) {
        case Family::uncolored: return "uncolored";
        case Family::mcolored: return "mcolored";
        case Family::holocolored: return "holo";
        case Family::remembered: return "remembered";
    }
    return "?";
}

bool parse_family(std::string_view name, Family& out) {
    if (name == "uncolored") out = Family::uncolored;
    else if (name == "mcolored") out = Family::mcolored;
    else if (name == "holo" || name == "holocolored") out = Family::holocolored;
    else if (name == "remembered") out = Family::remembered;
    else return false;
    return true;
}

std::vector<int> mask_labels(std::uint32_t mask) {
    std::vector<int> out;
    while (mask) {
        out.push_back(std::countr_zero(mask) + 1);
        mask &= mask - 1;
    }
    return out;
}

LabelMask labels_mask(std::span<const int> labels) {
    LabelMask m = 0;
    for (int l : labels) m |= label_bit(l);
    return m;
}

int compare_label_sequences(std::uint32_t a, std::uint32_t b) {
    if (a == b) return 0;
    const int t = std::countr_zero(a ^ b);
    const std::uint32_t above = ~((2u << t) - 1u);
    // The sequence holding t is smaller unless the other one ends at t.
    if ((a >> t) & 1u) return (b & above) ? -1 : 1;
    return (a & above) ? 1 : -1;
}

ForestMark ForestMark::of(std::initializer_list<int> edges) {
    std::uint32_t m = 0;
    for (int e : edges) m |= 1u << e;
    return ForestMark(m);
}

int ForestMark::size() const { return std::popcount(mask_); }

std::vector<int> ForestMark::edges() const {
    std::vector<int> out;
    for (std::uint32_t m = mask_; m; m &= m - 1) out.push_back(std::countr_zero(m));
    return out;
}

CycleGraph::CycleGraph(Family family, std::vector<VertexData> vertices, std::vector<int> edge_colors)
    : family_(family), vertices_(std::move(vertices)) {
    validate(family_, vertices_, edge_colors);
    colors_.assign(edge_colors.begin(), edge_colors.end());
}

int CycleGraph::leg_count() const {
    std::uint32_t legs = 0;
    for (const auto& v : vertices_) legs |= v.legs;
    return std::popcount(legs);
}

std::uint32_t CycleGraph::used_colors() const {
    std::uint32_t used = 0;
    for (auto c : colors_) used |= 1u << (c - 1);
    for (const auto& v : vertices_) used |= v.remembered;
    return used;
}

int DihedralElement::source_vertex(int i, int k) const {
    return reflect ? mod(shift - i, k) : mod(i + shift, k);
}

int DihedralElement::source_edge(int i, int k) const {
    return reflect ? mod(shift - i - 1, k) : mod(i + shift, k);
}

int DihedralElement::image_edge(int e, int k) const {
    return reflect ? mod(shift - 1 - e, k) : mod(e - shift, k);
}

CycleGraph apply(const CycleGraph& g, DihedralElement sym) {
    const int k = g.edge_count();
    std::vector<VertexData> vs(k);
    std::vector<std::uint8_t> cs(k);
    for (int i = 0; i < k; ++i) {
        vs[i] = g.vertices()[sym.source_vertex(i, k)];
        cs[i] = g.edge_colors()[sym.source_edge(i, k)];
    }
    return CycleGraphAccess::make(g.family(), std::move(vs), std::move(cs));
}

ForestMark apply(ForestMark f, DihedralElement sym, int k) {
    std::uint32_t m = 0;
    for (int e : f.edges()) m |= 1u << sym.image_edge(e, k);
    return ForestMark(m);
}

int forest_parity(ForestMark f, DihedralElement sym, int k) {
    const auto edges = f.edges();
    int inversions = 0;
    for (std::size_t a = 0; a < edges.size(); ++a)
        for (std::size_t b = a + 1; b < edges.size(); ++b)
            if (sym.image_edge(edges[a], k) > sym.image_edge(edges[b], k)) ++inversions;
    return (inversions & 1) ? -1 : 1;
}

CanonicalForm canonical_form(const CycleGraph& g, ForestMark forest) {
    const int k = g.edge_count();
    DihedralElement best{0, false};
    for (int r = 0; r < k; ++r) {
        for (bool refl : {false, true}) {
            DihedralElement cand{r, refl};
            if (cand == best) continue;
            if (compare_images(g, forest, cand, best) < 0) best = cand;
        }
    }
    return {apply(g, best), apply(forest, best, k), forest_parity(forest, best, k)};
}

bool is_canonical(const CycleGraph& g, ForestMark forest) {
    const auto c = canonical_form(g, forest);
    return c.graph == g && c.forest == forest;
}

std::vector<DihedralElement> stabilizer(const CycleGraph& g) {
    const int k = g.edge_count();
    std::vector<DihedralElement> out;
    for (int r = 0; r < k; ++r)
        for (bool refl : {false, true}) {
            DihedralElement e{r, refl};
            if (compare_images(g, {}, e, DihedralElement{}) == 0) out.push_back(e);
        }
    return out;
}

namespace {

// Contraction on the raw cycle; surviving edges keep their relative order.
CycleGraph contract_raw(const CycleGraph& g, int e, ContractMode mode, ForestMark& forest) {
    const int k = g.edge_count();
    if (e < 0 || e >= k) throw IndexError("edge index out of range");
    if (k == 1) throw StructuralError("cannot contract the loop of a rose");

    const auto& vs = g.vertices();
    const auto& cs = g.edge_colors();
    VertexData merged{static_cast<LabelMask>(vs[e].legs | vs[(e + 1) % k].legs), 0};
    if (mode == ContractMode::remember) {
        merged.remembered = static_cast<LabelMask>(vs[e].remembered | vs[(e + 1) % k].remembered |
                                                   label_bit(cs[e]));
    }

    std::vector<VertexData> nv;
    std::vector<std::uint8_t> nc;
    nv.reserve(k - 1);
    nc.reserve(k - 1);
    std::uint32_t nf = 0;
    if (e < k - 1) {
        for (int i = 0; i < e; ++i) nv.push_back(vs[i]);
        nv.push_back(merged);
        for (int i = e + 2; i < k; ++i) nv.push_back(vs[i]);
    } else {
        nv.push_back(merged);
        for (int i = 1; i < k - 1; ++i) nv.push_back(vs[i]);
    }
    for (int i = 0; i < k; ++i) {
        if (i == e) continue;
        if (forest.contains(i)) nf |= 1u << nc.size();
        nc.push_back(cs[i]);
    }
    forest = ForestMark(nf);
    return CycleGraphAccess::make(g.family(), std::move(nv), std::move(nc));
}

}  // namespace

CycleGraph contract_edge(const CycleGraph& g, int e, ContractMode mode) {
    ForestMark none;
    return canonical_form(contract_raw(g, e, mode, none)).graph;
}

CanonicalForm contract_edge(const CycleGraph& g, ForestMark forest, int e, ContractMode mode) {
    ForestMark f = forest.without(e);
    CycleGraph h = contract_raw(g, e, mode, f);
    return canonical_form(h, f);
}

namespace {

void put_list(std::string& out, std::uint32_t mask) {
    bool first = true;
    for (int l : mask_labels(mask)) {
        if (!first) out += ',';
        out += std::to_string(l);
        first = false;
    }
}

std::vector<int> parse_ints(std::string_view s) {
    std::vector<int> out;
    while (!s.empty()) {
        const auto comma = s.find(',');
        const auto tok = s.substr(0, comma);
        int v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size())
            throw StructuralError("malformed integer list in graph encoding");
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

std::string_view take_field(std::string_view& s, std::string_view key) {
    if (s.substr(0, key.size()) != key) throw StructuralError("malformed graph encoding");
    s.remove_prefix(key.size());
    const auto semi = s.find(';');
    auto field = s.substr(0, semi);
    s = semi == std::string_view::npos ? std::string_view{} : s.substr(semi + 1);
    return field;
}

}  // namespace

std::string encode(const CycleGraph& g, ForestMark forest) {
    std::string out = "k=" + std::to_string(g.edge_count()) + ";V=";
    bool first = true;
    for (const auto& v : g.vertices()) {
        if (!first) out += ',';
        first = false;
        out += '(';
        put_list(out, v.legs);
        out += '|';
        put_list(out, v.remembered);
        out += ')';
    }
    out += ";E=";
    for (int i = 0; i < g.edge_count(); ++i) {
        if (i) out += ',';
        out += std::to_string(g.edge_color(i));
    }
    out += ";F=";
    first = true;
    for (int e : forest.edges()) {
        if (!first) out += ',';
        out += std::to_string(e);
        first = false;
    }
    return out;
}

std::pair<CycleGraph, ForestMark> decode(std::string_view text, Family family) {
    auto rest = text;
    const auto k_field = parse_ints(take_field(rest, "k="));
    auto v_field = take_field(rest, "V=");
    const auto colors = parse_ints(take_field(rest, "E="));
    const auto forest = parse_ints(take_field(rest, "F="));
    if (k_field.size() != 1) throw StructuralError("malformed graph encoding");

    std::vector<VertexData> vertices;
    while (!v_field.empty()) {
        if (v_field.front() != '(') throw StructuralError("malformed vertex in graph encoding");
        const auto close = v_field.find(')');
        const auto bar = v_field.find('|');
        if (close == std::string_view::npos || bar == std::string_view::npos || bar > close)
            throw StructuralError("malformed vertex in graph encoding");
        const auto legs = parse_ints(v_field.substr(1, bar - 1));
        const auto rem = parse_ints(v_field.substr(bar + 1, close - bar - 1));
        for (int l : legs)
            if (l < 1 || l > kMaxLegs) throw StructuralError("leg label out of range");
        for (int l : rem)
            if (l < 1 || l > kMaxLegs) throw StructuralError("remembered color out of range");
        vertices.push_back({labels_mask(legs), labels_mask(rem)});
        v_field.remove_prefix(close + 1);
        if (!v_field.empty()) {
            if (v_field.front() != ',') throw StructuralError("malformed graph encoding");
            v_field.remove_prefix(1);
        }
    }
    if (static_cast<int>(vertices.size()) != k_field[0])
        throw StructuralError("vertex count does not match k");

    CycleGraph g(family, std::move(vertices), colors);
    std::uint32_t fm = 0;
    for (int e : forest) {
        if (e < 0 || e >= g.edge_count()) throw StructuralError("forest edge out of range");
        fm |= 1u << e;
    }
    if (std::popcount(fm) >= g.edge_count()) throw StructuralError("forest mark covers the loop");
    return {std::move(g), ForestMark(fm)};
}

}  // namespace loopmod
