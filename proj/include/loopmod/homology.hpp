#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "loopmod/complex.hpp"
#include "loopmod/exact_linalg.hpp"
#include "loopmod/families.hpp"

namespace loopmod {

struct HomologyOptions {
    RankOptions rank;
    std::size_t max_generators = 5'000'000;
    bool integral = false;  // Smith normal form refinement
    SnfOptions snf;
    int threads = 1;
};

struct EulerRecord {
    std::optional<BigInt> cells;
    std::optional<BigInt> betti;
    std::optional<BigInt> closed_form;
};

struct HomologyReport {
    FamilySpec spec;
    std::vector<std::size_t> betti;
    std::vector<std::size_t> boundary_ranks;  // rank of boundary d -> d-1, index d
    std::vector<std::vector<BigInt>> torsion;  // per dimension; filled when integral
    bool integral = false;
    EulerRecord euler;
    std::vector<std::size_t> cells;
    std::vector<std::uint32_t> primes;
    bool exact = false;
    double wall_ms = 0.0;
};

HomologyReport betti_numbers(const FamilySpec& spec, const HomologyOptions& options = {});
HomologyReport homology_of(const ChainComplex& complex, const HomologyOptions& options = {});

enum class EulerMethod { cells, betti, closed_form };
std::string_view euler_method_name(EulerMethod method);
bool parse_euler_method(std::string_view name, EulerMethod& out);

// Closed forms for all four families.
BigInt euler_closed_form(const FamilySpec& spec);
BigInt euler_characteristic(const FamilySpec& spec, EulerMethod method, const HomologyOptions& options = {});

// Rational matrices, column-major, for chain maps.
class RationalMatrix {
public:
    RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), columns_(cols) {}
    static RationalMatrix from_integer(const SparseIntMatrix& m);
    static RationalMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return columns_.size(); }
    void add(std::size_t row, std::size_t col, const mpq_class& value);
    const std::map<std::size_t, mpq_class>& column(std::size_t c) const { return columns_[c]; }
    mpq_class at(std::size_t row, std::size_t col) const;

    bool operator==(const RationalMatrix& other) const;

private:
    std::size_t rows_;
    std::vector<std::map<std::size_t, mpq_class>> columns_;
};

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);

struct ChainVector {
    int dimension = 0;
    std::map<std::size_t, mpq_class> coeffs;  // generator ordinal -> coefficient

    bool operator==(const ChainVector&) const = default;
};

ChainVector apply(const RationalMatrix& map, const ChainVector& x, int target_dimension);

// Forget the colouring: C_d(m-colored) -> C_d(uncolored).
RationalMatrix forget_map(const ChainComplex& colored, const ChainComplex& uncolored, int d);
// Average over all colourings: C_d(uncolored) -> C_d(m-colored).
RationalMatrix average_map(const ChainComplex& uncolored, const ChainComplex& colored, int d);

ChainVector chain_map_forget(const ChainComplex& colored, const ChainComplex& uncolored, const ChainVector& x);
ChainVector chain_map_average(const ChainComplex& uncolored, const ChainComplex& colored, const ChainVector& x);

struct CirculantCheck {
    std::size_t rank = 0;  // rank of one s x s block
    BigInt nullity;        // (s-1)!/2 blocks times (s - rank)
};

// The top boundary of the holocolored complex, rewritten as (s-1)!/2 copies
// of the cyclic difference block; independent oracle for b_{s-1}.
CirculantCheck circulant_top_check(int s, const RankOptions& options = {});
SparseIntMatrix circulant_block(int s);

enum class Verdict { pass, fail, skipped };

struct CheckResult {
    std::string id;      // "a", "b", ...
    std::string name;
    Verdict verdict = Verdict::pass;
    bool conjecture = false;  // report-only
    std::string detail;
};

struct VerifyConfig {
    std::vector<std::pair<int, int>> h1_vanishing;  // (s, m), s >= 3
    int s2_max_colors = 10;
    int top_max_legs = 5;
    std::vector<std::pair<int, int>> conjecture;  // (s, m)
    std::vector<int> interpolation_legs;          // s values for the polynomial check
    int chain_map_max_legs = 4;
    int chain_map_max_colors = 4;
    HomologyOptions homology;

    static VerifyConfig defaults();
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    // True iff no non-conjecture check failed or was skipped.
    bool ok() const;
};

VerifyReport verify_suite(const VerifyConfig& config);

// Report rendering.
std::string report_json(const HomologyReport& report, bool include_timing = true);
std::string report_csv_header();
std::string report_csv_row(const HomologyReport& report);
std::string report_table(const HomologyReport& report);
std::string space_label(const FamilySpec& spec);  // X_3^2, X~_4, X-_5

}  // namespace loopmod
