// End-to-end acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "loopmod/cli.hpp"
#include "loopmod/homology.hpp"
#include "oracles.hpp"

using namespace loopmod;
using Betti = std::vector<std::size_t>;

namespace {

struct Criterion {
    int id;
    std::string title;
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("failed: " + what);
        }
    }
};

std::string join(const Betti& b) {
    std::string s;
    for (std::size_t i = 0; i < b.size(); ++i) s += (i ? " " : "") + std::to_string(b[i]);
    return s;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// Memoised Betti computations shared between criteria.
class Reports {
public:
    const HomologyReport& get(Family f, int s, int m = 1) {
        const auto spec = FamilySpec::make(f, s, m);
        auto it = cache_.find(spec.label());
        if (it == cache_.end()) it = cache_.emplace(spec.label(), betti_numbers(spec)).first;
        return it->second;
    }
    const std::map<std::string, HomologyReport>& all() const { return cache_; }

private:
    std::map<std::string, HomologyReport> cache_;
};

void check_rows(Criterion& c, Reports& reports, Family f, const std::vector<std::tuple<int, int, Betti>>& rows) {
    double slowest = 0;
    for (const auto& [s, m, expected] : rows) {
        const auto t = std::chrono::steady_clock::now();
        const auto& r = reports.get(f, s, m);
        slowest = std::max(slowest, seconds_since(t));
        c.require(r.betti == expected, space_label(r.spec) + " gave " + join(r.betti) + ", expected " + join(expected));
        c.require(*r.euler.cells == *r.euler.betti, space_label(r.spec) + " Euler characteristic mismatch");
    }
    std::ostringstream note;
    note << rows.size() << " rows, slowest " << slowest << " s";
    c.notes.push_back(note.str());
}

Criterion colored_table(Reports& reports) {
    Criterion c{1, "Betti numbers of X_s^m"};
    check_rows(c, reports, Family::mcolored,
               {{1, 2, {2}},       {2, 2, {1, 0}},       {3, 2, {1, 0, 6}},     {4, 2, {1, 0, 3, 9}},
                {5, 2, {1, 0, 6, 0, 84}},                {1, 3, {3}},           {2, 3, {1, 1}},
                {3, 3, {1, 0, 20}}, {4, 3, {1, 0, 3, 103}}, {1, 4, {4}},       {2, 4, {1, 3}},
                {3, 4, {1, 0, 49}}, {4, 4, {1, 0, 3, 426}}, {1, 5, {5}},       {2, 5, {1, 6}},
                {3, 5, {1, 0, 99}}, {1, 6, {6}},          {2, 6, {1, 10}},      {3, 6, {1, 0, 176}},
                {1, 7, {7}},        {2, 7, {1, 15}},      {3, 7, {1, 0, 286}}});
    return c;
}

Criterion holo_table(Reports& reports) {
    Criterion c{2, "Betti numbers of holocolored X~_s, s <= 5"};
    check_rows(c, reports, Family::holocolored,
               {{1, 1, {1}}, {2, 2, {1, 0}}, {3, 3, {1, 2, 1}}, {4, 4, {1, 0, 36, 3}}, {5, 5, {1, 0, 6, 824, 12}}});
    return c;
}

Criterion remembered_table(Reports& reports) {
    Criterion c{3, "Betti numbers of remembered-edge X-_s, s <= 5"};
    check_rows(c, reports, Family::remembered,
               {{1, 1, {1}}, {2, 2, {1, 0}}, {3, 3, {1, 2, 1}}, {4, 4, {1, 0, 18, 3}}, {5, 5, {1, 0, 48, 166, 12}}});
    return c;
}

Criterion holo_euler(Reports& reports) {
    Criterion c{4, "Euler characteristic of X~_s, s <= 8"};
    const long expected[] = {1, 1, 0, 34, -805, 26541, -1122506, 59485588};
    for (int s = 1; s <= 8; ++s) {
        const auto spec = FamilySpec::make(Family::holocolored, s);
        const auto closed = euler_closed_form(spec);
        c.require(closed == expected[s - 1], "closed form at s=" + std::to_string(s) + " is " + closed.get_str());
        if (s <= 6) {
            const auto cells = euler_characteristic(spec, EulerMethod::cells);
            c.require(cells == expected[s - 1], "cell count at s=" + std::to_string(s) + " is " + cells.get_str());
        }
        if (s <= 5) {
            const auto& r = reports.get(Family::holocolored, s);
            c.require(*r.euler.betti == expected[s - 1] && *r.euler.cells == expected[s - 1],
                      "three-way agreement at s=" + std::to_string(s));
        }
    }
    c.notes.push_back("closed form s<=8, cells s<=6, Betti s<=5");
    return c;
}

Criterion uncolored(Reports& reports) {
    Criterion c{5, "uncolored Betti numbers and Euler characteristic"};
    for (int s = 1; s <= 6; ++s) {
        Betti expected;
        for (int k = 0; k < s; ++k) expected.push_back(k % 2 == 0 ? binomial(s - 1, k).get_ui() : 0);
        const auto& r = reports.get(Family::uncolored, s);
        c.require(r.betti == expected, "s=" + std::to_string(s) + " gave " + join(r.betti));
    }
    for (int s = 2; s <= 10; ++s) {
        mpz_class expected = 1;
        expected <<= (s - 2);
        // the general m-colored formula at m = 1 is an independent evaluation
        c.require(euler_closed_form(FamilySpec::make(Family::mcolored, s, 1)) == expected,
                  "m-colored formula at m=1, s=" + std::to_string(s));
        c.require(euler_closed_form(FamilySpec::make(Family::uncolored, s)) == expected, "closed form s=" + std::to_string(s));
        if (s <= 8)
            c.require(euler_characteristic(FamilySpec::make(Family::uncolored, s), EulerMethod::cells) == expected,
                      "cell count s=" + std::to_string(s));
    }
    c.notes.push_back("Betti s<=6; chi closed form s<=10, by cells s<=8");
    return c;
}

Criterion theorems(Reports& reports) {
    Criterion c{6, "H1 vanishing, b1(X_2^m), top homology, circulant rank"};
    std::size_t h1 = 0;
    for (const auto& [label, r] : reports.all())
        if (r.spec.family == Family::mcolored && r.spec.s >= 3) {
            c.require(r.betti[1] == 0, "b1 of " + space_label(r.spec));
            ++h1;
        }
    for (int m = 1; m <= 10; ++m) {
        const auto& r = reports.get(Family::mcolored, 2, m);
        c.require(r.betti[1] == static_cast<std::size_t>((m - 1) * (m - 2) / 2), "b1 of X_2^" + std::to_string(m));
    }
    HomologyOptions integral;
    integral.integral = true;
    for (Family f : {Family::holocolored, Family::remembered})
        for (int s = 2; s <= 5; ++s) {
            const auto r = betti_numbers(FamilySpec::make(f, s), integral);
            const BigInt expected = factorial(s - 1) / 2;
            const auto label = space_label(r.spec);
            if (s >= 3) c.require(r.betti[s - 1] == expected, "top Betti number of " + label);
            c.require(r.torsion[s - 1].empty(), "torsion in the top homology of " + label);
            if (s >= 3) c.require(circulant_top_check(s).nullity == expected, "circulant oracle at s=" + std::to_string(s));
        }
    for (int s = 3; s <= 8; ++s)
        c.require(rank_rational(circulant_block(s)) == static_cast<std::size_t>(s - 1) &&
                      rank_exact(circulant_block(s)) == static_cast<std::size_t>(s - 1),
                  "circulant rank at s=" + std::to_string(s));
    c.notes.push_back(std::to_string(h1) + " spaces with s>=3 checked for H1 = 0");
    return c;
}

Criterion properties() {
    Criterion c{7, "property suites"};

    // boundary squares to zero
    std::vector<FamilySpec> specs;
    for (int s = 1; s <= 6; ++s) specs.push_back(FamilySpec::make(Family::uncolored, s));
    for (int s = 1; s <= 5; ++s) {
        specs.push_back(FamilySpec::make(Family::mcolored, s, 2));
        specs.push_back(FamilySpec::make(Family::holocolored, s));
        specs.push_back(FamilySpec::make(Family::remembered, s));
    }
    for (int m = 3; m <= 4; ++m)
        for (int s = 1; s <= 4; ++s) specs.push_back(FamilySpec::make(Family::mcolored, s, m));
    for (int m = 5; m <= 10; ++m)
        for (int s = 1; s <= 3; ++s) specs.push_back(FamilySpec::make(Family::mcolored, s, m));
    for (const auto& spec : specs) {
        const auto cx = build_complex(spec);
        for (int d = 2; d < cx.dimensions(); ++d)
            c.require((cx.boundaries[d - 1] * cx.boundaries[d]).is_zero(), "d^2 = 0 for " + spec.label());
    }
    c.notes.push_back(std::to_string(specs.size()) + " complexes with d^2 = 0");

    // enumeration against closed forms
    std::size_t counted = 0;
    for (Family f : {Family::uncolored, Family::mcolored, Family::holocolored, Family::remembered})
        for (int s = 1; s <= 6; ++s)
            for (int m = 1; m <= (f == Family::mcolored ? 4 : 1); ++m) {
                const auto spec = FamilySpec::make(f, s, m);
                for (int k = 1; k <= s; ++k, ++counted)
                    c.require(count_cells_closed_form(spec, k) == enumerate_graphs(spec, k).size(),
                              "count of " + spec.label() + " k=" + std::to_string(k));
            }
    c.notes.push_back(std::to_string(counted) + " enumeration counts");

    // chain maps
    for (int s = 1; s <= 4; ++s) {
        const auto plain = build_complex(FamilySpec::make(Family::uncolored, s));
        for (int m = 1; m <= 4; ++m) {
            const auto colored = build_complex(FamilySpec::make(Family::mcolored, s, m));
            for (int d = 0; d < s; ++d) {
                const auto f = forget_map(colored, plain, d);
                const auto cm = average_map(plain, colored, d);
                const std::string where = " on " + colored.spec.label() + " degree " + std::to_string(d);
                c.require(f * cm == RationalMatrix::identity(plain.tables.size(d)), "f.c = id" + where);
                if (d == 0) continue;
                const auto dm = RationalMatrix::from_integer(colored.boundaries[d]);
                const auto d1 = RationalMatrix::from_integer(plain.boundaries[d]);
                c.require(d1 * f == forget_map(colored, plain, d - 1) * dm, "f chain map" + where);
                c.require(dm * cm == average_map(plain, colored, d - 1) * d1, "c chain map" + where);
            }
        }
    }

    // canonical forms on whole dihedral orbits
    std::size_t orbits = 0;
    for (int k = 1; k <= 6; ++k) {
        std::vector<int> perm(k);
        std::iota(perm.begin(), perm.end(), 1);
        do {
            std::vector<VertexData> v;
            for (int x : perm) v.push_back({label_bit(x), 0});
            oracle::for_each_word(k, 2, [&](const std::vector<int>& colors) {
                const CycleGraph g(Family::mcolored, v, colors);
                for (std::uint32_t fm : {0u, 1u, (1u << (k - 1)) - 1}) {
                    if (fm + 1 >= (1u << k)) continue;
                    const ForestMark forest(fm);
                    const auto canon = canonical_form(g, forest);
                    bool ok = canonical_form(canon.graph, canon.forest).sign == 1 && is_canonical(canon.graph, canon.forest);
                    for (int r = 0; r < k; ++r)
                        for (bool refl : {false, true}) {
                            const DihedralElement sym{r, refl};
                            const auto img = canonical_form(apply(g, sym), apply(forest, sym, k));
                            ok = ok && img.graph == canon.graph && img.forest == canon.forest &&
                                 img.sign * forest_parity(forest, sym, k) == canon.sign;
                        }
                    c.require(ok, "orbit invariance for " + encode(g, forest));
                    ++orbits;
                }
            });
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    c.notes.push_back(std::to_string(orbits) + " dihedral orbits");

    // rank engine against dense elimination
    std::mt19937 rng(424242);
    std::uniform_int_distribution<int> dim(1, 50), val(-4, 4), inner(1, 10);
    std::uniform_real_distribution<double> coin(0, 1);
    for (int i = 0; i < 200; ++i) {
        auto random = [&](int r, int cols, double density) {
            std::vector<MatrixEntry> e;
            for (int a = 0; a < r; ++a)
                for (int b = 0; b < cols; ++b)
                    if (coin(rng) < density) e.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), val(rng)});
            return SparseIntMatrix::from_triplets(r, cols, std::move(e));
        };
        const int rows = dim(rng), cols = dim(rng);
        const double density = 0.05 + 0.3 * coin(rng);
        SparseIntMatrix m = i % 2 ? random(rows, cols, density) : [&] {
            const int k = inner(rng);
            return random(rows, k, density) * random(k, cols, density);
        }();
        oracle::Dense dense(m.rows(), std::vector<mpq_class>(m.cols(), 0));
        for (const auto& e : m.entries()) dense[e.row][e.col] = e.value;
        const auto expected = oracle::dense_rank(dense);
        c.require(rank_rational(m) == expected && rank_exact(m) == expected,
                  "random matrix " + std::to_string(i));
    }
    c.notes.push_back("200 random matrices");
    return c;
}

Criterion determinism() {
    Criterion c{8, "tables output independent of thread count"};
    auto run = [](const std::string& threads) {
        std::ostringstream out, err;
        const int code = run_cli({"tables", "--no-cache", "--threads", threads}, out, err);
        return std::make_pair(code, out.str());
    };
    const auto one = run("1");
    const auto four = run("4");
    c.require(one.first == 0 && four.first == 0, "tables exit code");
    c.require(one.second == four.second, "byte-identical output");
    c.require(one.second.find("MISMATCH") == std::string::npos, "no mismatching row");
    c.notes.push_back(std::to_string(one.second.size()) + " bytes compared");
    return c;
}

}  // namespace

int main() {
    Reports reports;
    std::vector<Criterion> results;
    const auto start = std::chrono::steady_clock::now();
    results.push_back(colored_table(reports));
    results.push_back(holo_table(reports));
    results.push_back(remembered_table(reports));
    results.push_back(holo_euler(reports));
    results.push_back(uncolored(reports));
    results.push_back(theorems(reports));
    results.push_back(properties());
    results.push_back(determinism());

    bool all = true;
    for (const auto& c : results) {
        all = all && c.pass;
        std::cout << "criterion " << c.id << ": " << (c.pass ? "PASS" : "FAIL") << "  " << c.title;
        for (const auto& n : c.notes) std::cout << " | " << n;
        std::cout << '\n';
    }
    std::cout << (all ? "all criteria passed" : "some criteria failed") << " in " << seconds_since(start) << " s\n";
    return all ? 0 : 1;
}
