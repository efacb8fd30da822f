#include "loopmod/homology.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <functional>
#include <sstream>

#include "loopmod/errors.hpp"
#include "loopmod/parallel.hpp"

namespace loopmod {

namespace {

BigInt alternating_sum(const std::vector<std::size_t>& values) {
    BigInt sum = 0;
    for (std::size_t d = 0; d < values.size(); ++d) {
        if (d % 2) sum -= static_cast<unsigned long>(values[d]);
        else sum += static_cast<unsigned long>(values[d]);
    }
    return sum;
}

}  // namespace

HomologyReport homology_of(const ChainComplex& complex, const HomologyOptions& options) {
    const int dims = complex.dimensions();
    HomologyReport report;
    report.spec = complex.spec;
    report.cells = complex.tables.sizes();
    report.boundary_ranks.assign(dims, 0);

    std::vector<RankReport> ranks(dims);
    RankOptions inner = options.rank;
    inner.threads = 1;
    parallel_for(dims > 0 ? dims - 1 : 0, options.threads, [&](std::size_t i) {
        ranks[i + 1] = rank_rational_report(complex.boundaries[i + 1], inner);
    });
    report.exact = dims > 1;
    for (int d = 1; d < dims; ++d) {
        report.boundary_ranks[d] = ranks[d].rank;
        report.exact = report.exact && ranks[d].exact;
        for (auto p : ranks[d].primes)
            if (std::find(report.primes.begin(), report.primes.end(), p) == report.primes.end())
                report.primes.push_back(p);
    }
    if (report.primes.empty()) report.primes = options.rank.primes;

    for (int d = 0; d < dims; ++d) {
        const std::size_t below = report.boundary_ranks[d];
        const std::size_t above = d + 1 < dims ? report.boundary_ranks[d + 1] : 0;
        report.betti.push_back(report.cells[d] - below - above);
    }

    if (options.integral) {
        report.integral = true;
        report.torsion.assign(dims, {});
        for (int d = 1; d < dims; ++d) {
            const auto snf = smith_normal_form(complex.boundaries[d], options.snf);
            if (snf.rank != report.boundary_ranks[d])
                throw StructuralError("Smith normal form rank disagrees with rational rank in dimension " +
                                      std::to_string(d));
            report.torsion[d - 1] = snf.torsion();
        }
    }

    report.euler.cells = alternating_sum(report.cells);
    report.euler.betti = alternating_sum(report.betti);
    report.euler.closed_form = euler_closed_form(complex.spec);
    return report;
}

HomologyReport betti_numbers(const FamilySpec& spec, const HomologyOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const auto complex = build_complex(spec, {options.max_generators, options.threads});
    auto report = homology_of(complex, options);
    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::string_view euler_method_name(EulerMethod method) {
    switch (method) {
        case EulerMethod::cells: return "cells";
        case EulerMethod::betti: return "betti";
        case EulerMethod::closed_form: return "closed_form";
    }
    return "?";
}

bool parse_euler_method(std::string_view name, EulerMethod& out) {
    if (name == "cells") out = EulerMethod::cells;
    else if (name == "betti") out = EulerMethod::betti;
    else if (name == "closed_form") out = EulerMethod::closed_form;
    else return false;
    return true;
}

BigInt euler_closed_form(const FamilySpec& spec) {
    const int s = spec.s;
    switch (spec.family) {
        case Family::uncolored: {
            if (s == 1) return 1;
            BigInt r;
            mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(s - 2));
            return r;
        }
        case Family::mcolored: {
            const BigInt m = spec.m;
            BigInt two_pow;
            mpz_ui_pow_ui(two_pow.get_mpz_t(), 2, static_cast<unsigned long>(s - 1));
            BigInt chi = two_pow * (m * (1 - m) / 2) + m * (m + 1) / 2;
            for (int k = 3; k <= s; ++k) {
                BigInt mk;
                mpz_pow_ui(mk.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(k));
                const BigInt term = stirling2(s, k) * factorial(k - 1) / 2 * mk;
                if (k % 2) chi += term;
                else chi -= term;
            }
            return chi;
        }
        case Family::holocolored:
        case Family::remembered: {
            BigInt chi = 0;
            for (int k = 1; k <= s; ++k) {
                if (k % 2) chi += count_cells_closed_form(spec, k);
                else chi -= count_cells_closed_form(spec, k);
            }
            return chi;
        }
    }
    return 0;
}

BigInt euler_characteristic(const FamilySpec& spec, EulerMethod method, const HomologyOptions& options) {
    switch (method) {
        case EulerMethod::closed_form:
            return euler_closed_form(spec);
        case EulerMethod::cells: {
            const auto table = build_generator_table(spec, {options.max_generators, options.threads});
            return alternating_sum(table.sizes());
        }
        case EulerMethod::betti:
            return alternating_sum(betti_numbers(spec, options).betti);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Chain maps

RationalMatrix RationalMatrix::from_integer(const SparseIntMatrix& m) {
    RationalMatrix r(m.rows(), m.cols());
    for (const auto& e : m.entries()) r.add(e.row, e.col, mpq_class(e.value));
    return r;
}

RationalMatrix RationalMatrix::identity(std::size_t n) {
    RationalMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i) r.add(i, i, 1);
    return r;
}

void RationalMatrix::add(std::size_t row, std::size_t col, const mpq_class& value) {
    if (row >= rows_ || col >= columns_.size()) throw IndexError("rational matrix entry out of range");
    auto& column = columns_[col];
    auto [it, inserted] = column.try_emplace(row, value);
    if (!inserted) it->second += value;
    if (it->second == 0) column.erase(it);
}

mpq_class RationalMatrix::at(std::size_t row, std::size_t col) const {
    auto it = columns_[col].find(row);
    return it == columns_[col].end() ? mpq_class(0) : it->second;
}

bool RationalMatrix::operator==(const RationalMatrix& other) const {
    return rows_ == other.rows_ && columns_ == other.columns_;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols() != b.rows()) throw StructuralError("rational matrix product dimension mismatch");
    RationalMatrix out(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (const auto& [k, bv] : b.column(j))
            for (const auto& [i, av] : a.column(k)) out.add(i, j, av * bv);
    return out;
}

ChainVector apply(const RationalMatrix& map, const ChainVector& x, int target_dimension) {
    ChainVector y;
    y.dimension = target_dimension;
    for (const auto& [j, xv] : x.coeffs) {
        if (j >= map.cols()) throw IndexError("chain vector ordinal out of range");
        for (const auto& [i, mv] : map.column(j)) {
            auto [it, inserted] = y.coeffs.try_emplace(i, mv * xv);
            if (!inserted) it->second += mv * xv;
            if (it->second == 0) y.coeffs.erase(it);
        }
    }
    return y;
}

namespace {

void check_pair(const ChainComplex& colored, const ChainComplex& uncolored, int d) {
    if (colored.spec.family != Family::mcolored || uncolored.spec.family != Family::uncolored ||
        colored.spec.s != uncolored.spec.s)
        throw StructuralError("chain maps relate an m-colored complex to the uncolored one with equal s");
    if (d < 0 || d >= colored.dimensions()) throw IndexError("chain map dimension out of range");
}

}  // namespace

RationalMatrix forget_map(const ChainComplex& colored, const ChainComplex& uncolored, int d) {
    check_pair(colored, uncolored, d);
    RationalMatrix f(uncolored.tables.size(d), colored.tables.size(d));
    for (std::size_t j = 0; j < colored.tables.size(d); ++j) {
        const auto& cube = colored.tables.at(d, j);
        CycleGraph plain(Family::uncolored, cube.graph.vertices(),
                         std::vector<int>(cube.graph.edge_count(), 1));
        const auto canon = canonical_form(plain, cube.forest);
        const auto row = uncolored.tables.find(d, canon.graph, canon.forest);
        if (!row) throw StructuralError("forgetful image missing from the uncolored complex");
        f.add(*row, j, canon.sign);
    }
    return f;
}

RationalMatrix average_map(const ChainComplex& uncolored, const ChainComplex& colored, int d) {
    check_pair(colored, uncolored, d);
    const int m = colored.spec.m;
    RationalMatrix c(colored.tables.size(d), uncolored.tables.size(d));
    for (std::size_t j = 0; j < uncolored.tables.size(d); ++j) {
        const auto& cube = uncolored.tables.at(d, j);
        const int k = cube.graph.edge_count();
        BigInt weight_den;
        mpz_ui_pow_ui(weight_den.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(k));
        const mpq_class weight(1, weight_den);
        std::vector<int> colors(k, 1);
        for (;;) {
            CycleGraph g(Family::mcolored, cube.graph.vertices(), colors);
            const auto canon = canonical_form(g, cube.forest);
            const auto row = colored.tables.find(d, canon.graph, canon.forest);
            if (!row) throw StructuralError("coloured cube missing from the m-colored complex");
            c.add(*row, j, weight * canon.sign);
            int i = 0;
            while (i < k && colors[i] == m) colors[i++] = 1;
            if (i == k) break;
            ++colors[i];
        }
    }
    return c;
}

ChainVector chain_map_forget(const ChainComplex& colored, const ChainComplex& uncolored, const ChainVector& x) {
    return apply(forget_map(colored, uncolored, x.dimension), x, x.dimension);
}

ChainVector chain_map_average(const ChainComplex& uncolored, const ChainComplex& colored, const ChainVector& x) {
    return apply(average_map(uncolored, colored, x.dimension), x, x.dimension);
}

// ---------------------------------------------------------------------------
// Top-dimensional oracle

SparseIntMatrix circulant_block(int s) {
    std::vector<MatrixEntry> e;
    const auto n = static_cast<std::uint32_t>(s);
    for (std::uint32_t i = 0; i < n; ++i) e.push_back({i, i, 1});
    for (std::uint32_t i = 0; i + 1 < n; ++i) e.push_back({i + 1, i, -1});
    e.push_back({0, n - 1, -1});
    return SparseIntMatrix::from_triplets(n, n, std::move(e));
}

CirculantCheck circulant_top_check(int s, const RankOptions& options) {
    if (s < 3) throw StructuralError("circulant check needs s >= 3");
    CirculantCheck out;
    out.rank = rank_rational(circulant_block(s), options);
    out.nullity = factorial(s - 1) / 2 * static_cast<unsigned long>(s - out.rank);
    return out;
}

// ---------------------------------------------------------------------------
// Verification suite

VerifyConfig VerifyConfig::defaults() {
    VerifyConfig c;
    for (int m = 1; m <= 7; ++m) c.h1_vanishing.emplace_back(3, m);
    for (int m = 1; m <= 4; ++m) c.h1_vanishing.emplace_back(4, m);
    for (int m = 1; m <= 2; ++m) c.h1_vanishing.emplace_back(5, m);
    for (int m = 2; m <= 7; ++m) c.conjecture.emplace_back(3, m);
    for (int m = 2; m <= 4; ++m) c.conjecture.emplace_back(4, m);
    c.conjecture.emplace_back(5, 2);
    c.interpolation_legs = {2, 3, 4};
    return c;
}

bool VerifyReport::ok() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.conjecture || c.verdict == Verdict::pass; });
}

namespace {

std::string join(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(v[i]);
    }
    return out;
}

class BettiCache {
public:
    explicit BettiCache(const HomologyOptions& options) : options_(options) {}

    const HomologyReport& get(const FamilySpec& spec) {
        auto it = reports_.find(spec.label());
        if (it == reports_.end()) it = reports_.emplace(spec.label(), betti_numbers(spec, options_)).first;
        return it->second;
    }

private:
    HomologyOptions options_;
    std::map<std::string, HomologyReport> reports_;
};

// Runs body, turning a CapacityError into a skipped verdict.
CheckResult guarded(std::string id, std::string name, bool conjecture,
                    const std::function<void(CheckResult&)>& body) {
    CheckResult r{std::move(id), std::move(name), Verdict::pass, conjecture, {}};
    try {
        body(r);
    } catch (const CapacityError& e) {
        r.verdict = Verdict::skipped;
        r.detail = e.what();
    }
    return r;
}

// Newton interpolation through (x_i, y_i); returns the coefficients in the
// monomial basis.
std::vector<mpq_class> interpolate(const std::vector<mpq_class>& xs, const std::vector<mpq_class>& ys) {
    const std::size_t n = xs.size();
    std::vector<mpq_class> dd = ys;
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = n - 1; i >= j; --i) {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
            if (i == j) break;
        }
    std::vector<mpq_class> poly(n, 0);
    std::vector<mpq_class> basis{1};  // prod (x - x_l) for l < j
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t t = 0; t < basis.size(); ++t) poly[t] += dd[j] * basis[t];
        std::vector<mpq_class> next(basis.size() + 1, 0);
        for (std::size_t t = 0; t < basis.size(); ++t) {
            next[t + 1] += basis[t];
            next[t] -= xs[j] * basis[t];
        }
        basis = std::move(next);
    }
    return poly;
}

mpq_class evaluate(const std::vector<mpq_class>& poly, const mpq_class& x) {
    mpq_class y = 0;
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) y = y * x + *it;
    return y;
}

}  // namespace

VerifyReport verify_suite(const VerifyConfig& config) {
    VerifyReport out;
    BettiCache cache(config.homology);
    auto mc = [](int s, int m) { return FamilySpec::make(Family::mcolored, s, m); };

    for (const auto& [s, m] : config.h1_vanishing) {
        out.checks.push_back(guarded("a", "H1(" + space_label(mc(s, m)) + ") = 0", false, [&](CheckResult& r) {
            const auto& rep = cache.get(mc(s, m));
            r.detail = "betti " + join(rep.betti);
            if (rep.betti.size() < 2 || rep.betti[1] != 0) r.verdict = Verdict::fail;
        }));
    }

    for (int m = 1; m <= config.s2_max_colors; ++m) {
        out.checks.push_back(guarded("b", "b1(" + space_label(mc(2, m)) + ") = (m-1)(m-2)/2", false, [&](CheckResult& r) {
            const auto& rep = cache.get(mc(2, m));
            const std::size_t expected = static_cast<std::size_t>((m - 1) * (m - 2) / 2);
            r.detail = "b1 = " + std::to_string(rep.betti[1]) + ", expected " + std::to_string(expected);
            if (rep.betti[1] != expected) r.verdict = Verdict::fail;
        }));
    }

    for (int s = 3; s <= config.top_max_legs; ++s) {
        for (Family fam : {Family::holocolored, Family::remembered}) {
            const auto spec = FamilySpec::make(fam, s);
            out.checks.push_back(guarded("c", "H" + std::to_string(s - 1) + "(" + space_label(spec) + ";Z) = Z^((s-1)!/2)",
                                         false, [&](CheckResult& r) {
                const BigInt expected = factorial(s - 1) / 2;
                const auto& rep = cache.get(spec);
                const auto complex = build_complex(spec, {config.homology.max_generators, config.homology.threads});
                const auto& top = complex.boundaries[s - 1];
                const auto snf = smith_normal_form(top, config.homology.snf);
                const std::size_t integral_rank = top.cols() - snf.rank;
                const auto oracle = circulant_top_check(s, config.homology.rank);
                r.detail = "b_top = " + std::to_string(rep.betti[s - 1]) + ", integral kernel rank " +
                           std::to_string(integral_rank) + ", circulant oracle " + oracle.nullity.get_str() +
                           ", expected " + expected.get_str();
                if (rep.betti[s - 1] != expected || integral_rank != expected || oracle.nullity != expected)
                    r.verdict = Verdict::fail;
            }));
        }
    }

    for (const auto& [s, m] : config.conjecture) {
        out.checks.push_back(guarded("d", "b_i(" + space_label(mc(s, m)) + ") = b_i(" + space_label(mc(s, 1)) + "), i < s-1",
                                     true, [&, s = s, m = m](CheckResult& r) {
            const auto& colored = cache.get(mc(s, m));
            const auto& plain = cache.get(mc(s, 1));
            r.detail = join(colored.betti) + " vs " + join(plain.betti);
            for (int i = 0; i < s - 1; ++i)
                if (colored.betti[i] != plain.betti[i]) r.verdict = Verdict::fail;
        }));
    }

    for (int s : config.interpolation_legs) {
        out.checks.push_back(guarded("e", "b_" + std::to_string(s - 1) + "(X_" + std::to_string(s) +
                                              "^m) polynomial in m of degree <= " + std::to_string(s),
                                     false, [&](CheckResult& r) {
            std::vector<mpq_class> xs, ys;
            for (int m = 1; m <= s + 1; ++m) {
                xs.emplace_back(m);
                ys.emplace_back(static_cast<unsigned long>(cache.get(mc(s, m)).betti[s - 1]));
            }
            const auto poly = interpolate(xs, ys);
            int degree = -1;
            for (std::size_t i = 0; i < poly.size(); ++i)
                if (poly[i] != 0) degree = static_cast<int>(i);
            const int held_out = s + 2;
            const auto predicted = evaluate(poly, held_out);
            const auto actual = cache.get(mc(s, held_out)).betti[s - 1];
            r.detail = "degree " + std::to_string(degree) + ", m=" + std::to_string(held_out) + " predicted " +
                       predicted.get_str() + ", computed " + std::to_string(actual);
            if (degree > s || predicted != mpq_class(static_cast<unsigned long>(actual))) r.verdict = Verdict::fail;
        }));
    }

    for (int s = 1; s <= config.chain_map_max_legs; ++s) {
        for (int m = 1; m <= config.chain_map_max_colors; ++m) {
            out.checks.push_back(guarded("f", "f, c chain maps and f.c = id on " + space_label(mc(s, m)), false,
                                         [&](CheckResult& r) {
                const BuildOptions bo{config.homology.max_generators, config.homology.threads};
                const auto colored = build_complex(mc(s, m), bo);
                const auto plain = build_complex(FamilySpec::make(Family::uncolored, s), bo);
                for (int d = 0; d < s; ++d) {
                    const auto f = forget_map(colored, plain, d);
                    const auto c = average_map(plain, colored, d);
                    if (!(f * c == RationalMatrix::identity(plain.tables.size(d)))) {
                        r.verdict = Verdict::fail;
                        r.detail += "f.c != id in degree " + std::to_string(d) + "; ";
                    }
                    if (d == 0) continue;
                    const auto bm = RationalMatrix::from_integer(colored.boundaries[d]);
                    const auto b1 = RationalMatrix::from_integer(plain.boundaries[d]);
                    if (!(b1 * f == forget_map(colored, plain, d - 1) * bm)) {
                        r.verdict = Verdict::fail;
                        r.detail += "f not a chain map in degree " + std::to_string(d) + "; ";
                    }
                    if (!(bm * c == average_map(plain, colored, d - 1) * b1)) {
                        r.verdict = Verdict::fail;
                        r.detail += "c not a chain map in degree " + std::to_string(d) + "; ";
                    }
                }
                if (r.detail.empty()) r.detail = "all degrees";
            }));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rendering

std::string space_label(const FamilySpec& spec) {
    const std::string s = std::to_string(spec.s);
    switch (spec.family) {
        case Family::uncolored: return "MG_" + s;
        case Family::mcolored: return "X_" + s + "^" + std::to_string(spec.m);
        case Family::holocolored: return "X~_" + s;
        case Family::remembered: return "X-_" + s;
    }
    return "?";
}

namespace {

nlohmann::ordered_json big_json(const std::optional<BigInt>& v) {
    if (!v) return nullptr;
    if (v->fits_slong_p()) return v->get_si();
    return v->get_str();
}

std::string join_big(const std::vector<BigInt>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += v[i].get_str();
    }
    return out;
}

std::string opt_str(const std::optional<BigInt>& v) { return v ? v->get_str() : std::string(); }

}  // namespace

std::string report_json(const HomologyReport& report, bool include_timing) {
    nlohmann::ordered_json j;
    j["family"] = std::string(family_name(report.spec.family));
    j["s"] = report.spec.s;
    j["m"] = report.spec.m;
    j["betti"] = report.betti;
    auto torsion = nlohmann::ordered_json::array();
    for (const auto& t : report.torsion) {
        auto row = nlohmann::ordered_json::array();
        for (const auto& v : t) row.push_back(big_json(v));
        torsion.push_back(row);
    }
    j["torsion"] = torsion;
    j["euler"] = {{"cells", big_json(report.euler.cells)},
                  {"betti", big_json(report.euler.betti)},
                  {"closed_form", big_json(report.euler.closed_form)}};
    j["cells"] = report.cells;
    j["primes"] = report.primes;
    j["exact"] = report.exact;
    j["wall_ms"] = include_timing ? static_cast<std::int64_t>(report.wall_ms) : 0;
    return j.dump();
}

std::string report_csv_header() {
    return "family,s,m,betti,torsion,euler_cells,euler_betti,euler_closed_form,cells,primes,exact";
}

std::string report_csv_row(const HomologyReport& report) {
    std::ostringstream out;
    out << family_name(report.spec.family) << ',' << report.spec.s << ',' << report.spec.m << ','
        << join(report.betti) << ',';
    for (std::size_t d = 0; d < report.torsion.size(); ++d) {
        if (d) out << ';';
        out << join_big(report.torsion[d]);
    }
    out << ',' << opt_str(report.euler.cells) << ',' << opt_str(report.euler.betti) << ','
        << opt_str(report.euler.closed_form) << ',' << join(report.cells) << ',';
    for (std::size_t i = 0; i < report.primes.size(); ++i) out << (i ? " " : "") << report.primes[i];
    out << ',' << (report.exact ? "true" : "false");
    return out.str();
}

std::string report_table(const HomologyReport& report) {
    return space_label(report.spec) + " | " + join(report.betti);
}

}  // namespace loopmod
