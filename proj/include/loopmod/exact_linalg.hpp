#pragma once

// Exact rank, Smith normal form and null spaces of sparse integer matrices.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace loopmod {

using BigInt = mpz_class;

struct MatrixEntry {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    BigInt value;

    bool operator==(const MatrixEntry&) const = default;
};

// Coordinate-format integer matrix. Entries are sorted by (col, row), carry no
// zeros and no duplicate coordinates.
class SparseIntMatrix {
public:
    SparseIntMatrix() = default;
    SparseIntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

    // Sums duplicate coordinates and drops zeros. Throws IndexError when a
    // coordinate is out of range.
    static SparseIntMatrix from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<MatrixEntry> entries);
    static SparseIntMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return entries_.size(); }
    const std::vector<MatrixEntry>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }

    BigInt at(std::size_t row, std::size_t col) const;
    SparseIntMatrix transpose() const;

    bool operator==(const SparseIntMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<MatrixEntry> entries_;
};

SparseIntMatrix operator*(const SparseIntMatrix& a, const SparseIntMatrix& b);

// Text format: header `rows cols nnz`, then `row col value` per line sorted by
// (col, row), zero-based indices.
void write_coordinate(std::ostream& out, const SparseIntMatrix& m);
SparseIntMatrix read_coordinate(std::istream& in);

bool is_prime(std::uint64_t n);

// Three largest primes below 2^31.
const std::vector<std::uint32_t>& default_primes();
// Seven largest primes below 2^31 (superset of the defaults).
const std::vector<std::uint32_t>& extended_primes();

// Rank over Z/p, p an odd prime below 2^32.
std::size_t rank_mod_p(const SparseIntMatrix& m, std::uint32_t p);

// Rank over Q by fraction-free integer elimination.
std::size_t rank_exact(const SparseIntMatrix& m);

struct RankOptions {
    std::vector<std::uint32_t> primes = default_primes();
    bool exact = false;
    int threads = 1;
};

struct RankReport {
    std::size_t rank = 0;
    std::vector<std::uint32_t> primes;  // primes actually used
    bool exact = false;                 // certified by integer elimination
};

// Maximum of the modular ranks; disagreement widens to the extended prime set
// and then falls back to exact elimination. With options.exact the result is
// always certified.
RankReport rank_rational_report(const SparseIntMatrix& m, const RankOptions& options = {});
std::size_t rank_rational(const SparseIntMatrix& m, const RankOptions& options = {});

struct SnfResult {
    std::vector<BigInt> diagonal;  // nonzero invariant factors, d1 | d2 | ...
    std::size_t rank = 0;

    std::vector<BigInt> torsion() const;  // the factors > 1
};

struct SnfOptions {
    std::size_t max_dimension = 50'000;       // cap on max(rows, cols)
    std::size_t max_dense_entries = 4'000'000;  // cap on the non-unit remainder
};

// Throws CapacityError when the matrix exceeds the configured caps.
SnfResult smith_normal_form(const SparseIntMatrix& m, const SnfOptions& options = {});

// Null-space basis over Z/p, one dense vector (entries in [0, p)) per free column.
std::vector<std::vector<std::uint32_t>> kernel_basis_mod_p(const SparseIntMatrix& m, std::uint32_t p);

}  // namespace loopmod
