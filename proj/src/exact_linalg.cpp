#include "loopmod/exact_linalg.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "loopmod/errors.hpp"
#include "loopmod/parallel.hpp"
#include "sparse_elimination.hpp"

namespace {

int cmpabs(const mpz_class& a, const mpz_class& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }

}  // namespace

namespace loopmod {

using detail::merge_rows;
using detail::SparseEliminator;
using detail::SparseRow;

SparseIntMatrix SparseIntMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                               std::vector<MatrixEntry> entries) {
    for (const auto& e : entries)
        if (e.row >= rows || e.col >= cols) throw IndexError("matrix entry out of range");
    std::sort(entries.begin(), entries.end(), [](const MatrixEntry& a, const MatrixEntry& b) {
        return std::tie(a.col, a.row) < std::tie(b.col, b.row);
    });
    SparseIntMatrix m(rows, cols);
    for (auto& e : entries) {
        if (!m.entries_.empty() && m.entries_.back().row == e.row && m.entries_.back().col == e.col) {
            m.entries_.back().value += e.value;
            if (m.entries_.back().value == 0) m.entries_.pop_back();
        } else if (e.value != 0) {
            m.entries_.push_back(std::move(e));
        }
    }
    return m;
}

SparseIntMatrix SparseIntMatrix::identity(std::size_t n) {
    std::vector<MatrixEntry> e;
    for (std::size_t i = 0; i < n; ++i)
        e.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i), 1});
    return from_triplets(n, n, std::move(e));
}

BigInt SparseIntMatrix::at(std::size_t row, std::size_t col) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(col, row),
                               [](const MatrixEntry& e, const std::pair<std::size_t, std::size_t>& key) {
                                   return std::make_pair<std::size_t, std::size_t>(e.col, e.row) < key;
                               });
    if (it != entries_.end() && it->row == row && it->col == col) return it->value;
    return 0;
}

SparseIntMatrix SparseIntMatrix::transpose() const {
    std::vector<MatrixEntry> t;
    t.reserve(entries_.size());
    for (const auto& e : entries_) t.push_back({e.col, e.row, e.value});
    return from_triplets(cols_, rows_, std::move(t));
}

SparseIntMatrix operator*(const SparseIntMatrix& a, const SparseIntMatrix& b) {
    if (a.cols() != b.rows()) throw StructuralError("matrix product dimension mismatch");
    // Column k of a, as (row, value) pairs.
    std::vector<std::vector<const MatrixEntry*>> a_cols(a.cols());
    for (const auto& e : a.entries()) a_cols[e.col].push_back(&e);
    std::vector<MatrixEntry> out;
    std::map<std::uint32_t, BigInt> acc;
    std::size_t i = 0;
    const auto& be = b.entries();
    while (i < be.size()) {
        const std::uint32_t col = be[i].col;
        acc.clear();
        for (; i < be.size() && be[i].col == col; ++i)
            for (const MatrixEntry* ae : a_cols[be[i].row]) acc[ae->row] += ae->value * be[i].value;
        for (auto& [row, v] : acc)
            if (v != 0) out.push_back({row, col, std::move(v)});
    }
    return SparseIntMatrix::from_triplets(a.rows(), b.cols(), std::move(out));
}

void write_coordinate(std::ostream& out, const SparseIntMatrix& m) {
    out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
    for (const auto& e : m.entries()) out << e.row << ' ' << e.col << ' ' << e.value.get_str() << '\n';
}

SparseIntMatrix read_coordinate(std::istream& in) {
    std::size_t rows = 0, cols = 0, nnz = 0;
    if (!(in >> rows >> cols >> nnz)) throw StructuralError("malformed coordinate matrix header");
    std::vector<MatrixEntry> entries;
    entries.reserve(nnz);
    for (std::size_t i = 0; i < nnz; ++i) {
        std::size_t r = 0, c = 0;
        std::string v;
        if (!(in >> r >> c >> v)) throw StructuralError("truncated coordinate matrix");
        MatrixEntry e{static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c), 0};
        if (e.value.set_str(v, 10) != 0) throw StructuralError("malformed matrix value " + v);
        if (r >= rows || c >= cols) throw StructuralError("matrix entry out of range");
        entries.push_back(std::move(e));
    }
    return SparseIntMatrix::from_triplets(rows, cols, std::move(entries));
}

bool is_prime(std::uint64_t n) {
    mpz_class z(static_cast<unsigned long>(n));
    return mpz_probab_prime_p(z.get_mpz_t(), 40) > 0;
}

const std::vector<std::uint32_t>& default_primes() {
    static const std::vector<std::uint32_t> primes{2147483647u, 2147483629u, 2147483587u};
    return primes;
}

const std::vector<std::uint32_t>& extended_primes() {
    static const std::vector<std::uint32_t> primes{2147483647u, 2147483629u, 2147483587u, 2147483579u,
                                                   2147483563u, 2147483549u, 2147483543u};
    return primes;
}

namespace {

std::uint32_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint32_t p) {
    std::uint64_t r = 1;
    base %= p;
    while (exp) {
        if (exp & 1) r = r * base % p;
        base = base * base % p;
        exp >>= 1;
    }
    return static_cast<std::uint32_t>(r);
}

struct ModP {
    using Value = std::uint32_t;
    std::uint32_t p;

    bool eligible(Value v) const { return v != 0; }
    // Distance to zero in the symmetric representation.
    int magnitude_cmp(Value a, Value b) const {
        const Value ma = std::min(a, p - a), mb = std::min(b, p - b);
        return ma < mb ? -1 : (ma > mb ? 1 : 0);
    }
    Value inverse(Value v) const { return pow_mod(v, p - 2, p); }
    void combine(SparseRow<Value>& out, const SparseRow<Value>& target, const SparseRow<Value>& pivot_row,
                 Value pivot, Value factor) const {
        const std::uint64_t q = static_cast<std::uint64_t>(factor) * inverse(pivot) % p;
        merge_rows<Value>(
            out, target, pivot_row,
            [&](const Value* t, const Value* pr) -> Value {
                std::uint64_t v = t ? *t : 0;
                if (pr) v = (v + p - q * *pr % p) % p;
                return static_cast<Value>(v);
            },
            [](Value v) { return v == 0; });
    }
};

struct FractionFree {
    using Value = BigInt;

    bool eligible(const Value& v) const { return v != 0; }
    int magnitude_cmp(const Value& a, const Value& b) const { return cmpabs(a, b); }
    void combine(SparseRow<Value>& out, const SparseRow<Value>& target, const SparseRow<Value>& pivot_row,
                 const Value& pivot, const Value& factor) const {
        BigInt g = gcd(pivot, factor);
        const BigInt a = pivot / g, b = factor / g;
        merge_rows<Value>(
            out, target, pivot_row,
            [&](const Value* t, const Value* pr) -> Value {
                BigInt v = t ? BigInt(a * *t) : BigInt(0);
                if (pr) v -= b * *pr;
                return v;
            },
            [](const Value& v) { return v == 0; });
        // Divide out the row content to keep entries small.
        BigInt content = 0;
        for (const auto& [c, v] : out) {
            content = gcd(content, v);
            if (content == 1) return;
        }
        if (content > 1)
            for (auto& [c, v] : out) v /= content;
    }
};

// Unimodular elimination restricted to unit pivots.
struct UnitPivot {
    using Value = BigInt;

    bool eligible(const Value& v) const { return v == 1 || v == -1; }
    int magnitude_cmp(const Value&, const Value&) const { return 0; }
    void combine(SparseRow<Value>& out, const SparseRow<Value>& target, const SparseRow<Value>& pivot_row,
                 const Value& pivot, const Value& factor) const {
        const BigInt q = factor * pivot;
        merge_rows<Value>(
            out, target, pivot_row,
            [&](const Value* t, const Value* pr) -> Value {
                BigInt v = t ? *t : BigInt(0);
                if (pr) v -= q * *pr;
                return v;
            },
            [](const Value& v) { return v == 0; });
    }
};

std::vector<SparseRow<std::uint32_t>> rows_mod_p(const SparseIntMatrix& m, std::uint32_t p) {
    std::vector<SparseRow<std::uint32_t>> rows(m.rows());
    // Entries are sorted by column, so each row receives ascending columns.
    for (const auto& e : m.entries()) {
        const std::uint32_t v = static_cast<std::uint32_t>(mpz_fdiv_ui(e.value.get_mpz_t(), p));
        if (v) rows[e.row].emplace_back(e.col, v);
    }
    return rows;
}

std::vector<SparseRow<BigInt>> rows_integer(const SparseIntMatrix& m) {
    std::vector<SparseRow<BigInt>> rows(m.rows());
    for (const auto& e : m.entries()) rows[e.row].emplace_back(e.col, e.value);
    return rows;
}

void check_prime(std::uint32_t p) {
    if (p <= 2 || !is_prime(p)) throw StructuralError("modulus must be an odd prime: " + std::to_string(p));
}

}  // namespace

std::size_t rank_mod_p(const SparseIntMatrix& m, std::uint32_t p) {
    check_prime(p);
    SparseEliminator<ModP> elim(rows_mod_p(m, p), m.cols(), ModP{p});
    return elim.run();
}

std::size_t rank_exact(const SparseIntMatrix& m) {
    SparseEliminator<FractionFree> elim(rows_integer(m), m.cols(), FractionFree{});
    return elim.run();
}

RankReport rank_rational_report(const SparseIntMatrix& m, const RankOptions& options) {
    auto modular = [&](const std::vector<std::uint32_t>& primes) {
        std::vector<std::size_t> ranks(primes.size());
        parallel_for(primes.size(), options.threads, [&](std::size_t i) { ranks[i] = rank_mod_p(m, primes[i]); });
        return ranks;
    };
    RankReport report;
    report.primes = options.primes;
    auto ranks = modular(report.primes);
    const bool agree = std::adjacent_find(ranks.begin(), ranks.end(), std::not_equal_to<>()) == ranks.end();
    if (!agree) {
        for (std::uint32_t p : extended_primes())
            if (std::find(report.primes.begin(), report.primes.end(), p) == report.primes.end())
                report.primes.push_back(p);
        ranks = modular(report.primes);
    }
    report.rank = ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
    const bool still_disagree =
        std::adjacent_find(ranks.begin(), ranks.end(), std::not_equal_to<>()) != ranks.end();
    if (options.exact || still_disagree || ranks.empty()) {
        report.rank = rank_exact(m);
        report.exact = true;
    }
    return report;
}

std::size_t rank_rational(const SparseIntMatrix& m, const RankOptions& options) {
    return rank_rational_report(m, options).rank;
}

std::vector<BigInt> SnfResult::torsion() const {
    std::vector<BigInt> out;
    for (const auto& d : diagonal)
        if (d > 1) out.push_back(d);
    return out;
}

namespace {

using Dense = std::vector<std::vector<BigInt>>;

// Diagonal of the Smith form of a dense integer matrix (nonzero entries only).
std::vector<BigInt> dense_snf(Dense a) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    std::vector<BigInt> diag;
    for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
        // Smallest nonzero entry of the trailing block goes to (t, t).
        std::size_t pr = rows, pc = cols;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j)
                if (a[i][j] != 0 && (pr == rows || cmpabs(a[i][j], a[pr][pc]) < 0)) pr = i, pc = j;
        if (pr == rows) break;
        std::swap(a[t], a[pr]);
        for (auto& row : a) std::swap(row[t], row[pc]);

        for (;;) {
            bool clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (a[i][t] == 0) continue;
                BigInt q;
                mpz_tdiv_q(q.get_mpz_t(), a[i][t].get_mpz_t(), a[t][t].get_mpz_t());
                for (std::size_t j = t; j < cols; ++j) a[i][j] -= q * a[t][j];
                if (a[i][t] != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (a[t][j] == 0) continue;
                BigInt q;
                mpz_tdiv_q(q.get_mpz_t(), a[t][j].get_mpz_t(), a[t][t].get_mpz_t());
                for (std::size_t i = t; i < rows; ++i) a[i][j] -= q * a[i][t];
                if (a[t][j] != 0) clean = false;
            }
            if (clean) {
                // Pivot must divide the whole trailing block.
                std::size_t bad = rows;
                for (std::size_t i = t + 1; i < rows && bad == rows; ++i)
                    for (std::size_t j = t + 1; j < cols; ++j)
                        if (!mpz_divisible_p(a[i][j].get_mpz_t(), a[t][t].get_mpz_t())) {
                            bad = i;
                            break;
                        }
                if (bad == rows) break;
                for (std::size_t j = t; j < cols; ++j) a[t][j] += a[bad][j];
                continue;
            }
            // Move the smallest remaining entry of row/column t to the pivot.
            std::size_t br = t, bc = t;
            for (std::size_t i = t + 1; i < rows; ++i)
                if (a[i][t] != 0 && cmpabs(a[i][t], a[br][bc]) < 0) br = i, bc = t;
            for (std::size_t j = t + 1; j < cols; ++j)
                if (a[t][j] != 0 && cmpabs(a[t][j], a[br][bc]) < 0) br = t, bc = j;
            if (br != t) std::swap(a[t], a[br]);
            if (bc != t)
                for (auto& row : a) std::swap(row[t], row[bc]);
        }
        diag.push_back(abs(a[t][t]));
    }
    // Normalize to a divisibility chain.
    for (std::size_t i = 0; i < diag.size(); ++i)
        for (std::size_t j = i + 1; j < diag.size(); ++j) {
            const BigInt g = gcd(diag[i], diag[j]);
            const BigInt l = lcm(diag[i], diag[j]);
            diag[i] = g;
            diag[j] = l;
        }
    return diag;
}

}  // namespace

SnfResult smith_normal_form(const SparseIntMatrix& m, const SnfOptions& options) {
    if (std::max(m.rows(), m.cols()) > options.max_dimension)
        throw CapacityError("matrix of size " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                            " exceeds the Smith normal form cap; use rational-only mode");
    SparseEliminator<UnitPivot> elim(rows_integer(m), m.cols(), UnitPivot{});
    const std::size_t units = elim.run();

    // Remainder: active rows restricted to the columns they still touch.
    std::vector<std::size_t> live_rows;
    std::map<std::uint32_t, std::size_t> live_cols;
    for (std::size_t r = 0; r < elim.rows().size(); ++r) {
        if (!elim.active(r)) continue;
        live_rows.push_back(r);
        for (const auto& [c, v] : elim.rows()[r]) live_cols.emplace(c, 0);
    }
    if (live_rows.size() * live_cols.size() > options.max_dense_entries)
        throw CapacityError("non-unit remainder of size " + std::to_string(live_rows.size()) + "x" +
                            std::to_string(live_cols.size()) +
                            " exceeds the Smith normal form cap; use rational-only mode");
    std::size_t idx = 0;
    for (auto& [c, i] : live_cols) i = idx++;
    Dense dense(live_rows.size(), std::vector<BigInt>(live_cols.size()));
    for (std::size_t i = 0; i < live_rows.size(); ++i)
        for (const auto& [c, v] : elim.rows()[live_rows[i]]) dense[i][live_cols[c]] = v;

    SnfResult result;
    result.diagonal.assign(units, BigInt(1));
    for (auto& d : dense_snf(std::move(dense))) result.diagonal.push_back(std::move(d));
    result.rank = result.diagonal.size();
    return result;
}

std::vector<std::vector<std::uint32_t>> kernel_basis_mod_p(const SparseIntMatrix& m, std::uint32_t p) {
    check_prime(p);
    ModP field{p};
    SparseEliminator<ModP> elim(rows_mod_p(m, p), m.cols(), field);
    elim.run(true);
    const auto& pivots = elim.pivots();

    std::vector<bool> is_pivot(m.cols(), false);
    for (const auto& pv : pivots) is_pivot[pv.col] = true;

    // A pivot row holds no column pivoted before it, so back-substitution in
    // reverse pivot order sees only known values.
    std::vector<std::vector<std::uint32_t>> basis;
    for (std::uint32_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        std::vector<std::uint32_t> x(m.cols(), 0);
        x[f] = 1;
        for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
            std::uint64_t sum = 0;
            std::uint32_t lead = 0;
            for (const auto& [c, v] : it->entries) {
                if (c == it->col) lead = v;
                else sum = (sum + static_cast<std::uint64_t>(v) * x[c]) % p;
            }
            const std::uint64_t neg = (p - sum) % p;
            x[it->col] = static_cast<std::uint32_t>(neg * field.inverse(lead) % p);
        }
        basis.push_back(std::move(x));
    }
    return basis;
}

}  // namespace loopmod
