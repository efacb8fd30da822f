#pragma once

// Right-looking sparse Gaussian elimination with Markowitz pivoting,
// parameterized by an arithmetic policy:
//
//   Value                      entry type
//   bool eligible(v)           may v serve as a pivot
//   int magnitude_cmp(a, b)    tie-break order between pivot candidates
//   void combine(out, target, pivot_row, pivot, factor)
//                              out <- target with the pivot column cleared

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace loopmod::detail {

template <class Value>
using SparseRow = std::vector<std::pair<std::uint32_t, Value>>;

template <class Value>
struct PivotRecord {
    std::uint32_t row;
    std::uint32_t col;
    SparseRow<Value> entries;  // the row at the time it was chosen (if kept)
};

template <class Value>
const Value* find_in_row(const SparseRow<Value>& row, std::uint32_t col) {
    std::size_t lo = 0, hi = row.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (row[mid].first < col) lo = mid + 1;
        else hi = mid;
    }
    return lo < row.size() && row[lo].first == col ? &row[lo].second : nullptr;
}

template <class Policy>
class SparseEliminator {
public:
    using Value = typename Policy::Value;
    using Row = SparseRow<Value>;

    // Rows scanned per pivot search before settling for the best candidate.
    static constexpr std::size_t kSearchRows = 8;

    SparseEliminator(std::vector<Row> rows, std::size_t cols, Policy policy)
        : policy_(std::move(policy)),
          rows_(std::move(rows)),
          active_(rows_.size(), true),
          col_count_(cols, 0),
          col_rows_(cols) {
        for (std::uint32_t r = 0; r < rows_.size(); ++r) {
            if (rows_[r].empty()) {
                active_[r] = false;
                continue;
            }
            by_length_.emplace(rows_[r].size(), r);
            for (const auto& [c, v] : rows_[r]) {
                ++col_count_[c];
                col_rows_[c].push_back(r);
            }
        }
    }

    // Eliminates until no eligible pivot remains; returns the pivot count.
    std::size_t run(bool keep_pivot_rows = false) {
        while (auto piv = select_pivot()) eliminate(piv->first, piv->second, keep_pivot_rows);
        return pivots_.size();
    }

    const std::vector<PivotRecord<Value>>& pivots() const { return pivots_; }
    const std::vector<Row>& rows() const { return rows_; }
    bool active(std::size_t r) const { return active_[r]; }

private:
    std::optional<std::pair<std::uint32_t, std::uint32_t>> select_pivot() {
        std::optional<std::pair<std::uint32_t, std::uint32_t>> best;
        std::uint64_t best_cost = std::numeric_limits<std::uint64_t>::max();
        const Value* best_value = nullptr;
        std::size_t examined = 0;
        for (const auto& [len, r] : by_length_) {
            bool any = false;
            for (const auto& [c, v] : rows_[r]) {
                if (!policy_.eligible(v)) continue;
                any = true;
                const std::uint64_t cost =
                    static_cast<std::uint64_t>(len - 1) * static_cast<std::uint64_t>(col_count_[c] - 1);
                bool better = !best || cost < best_cost;
                if (!better && cost == best_cost) {
                    const int mc = policy_.magnitude_cmp(v, *best_value);
                    better = mc < 0 || (mc == 0 && std::make_pair(r, c) < *best);
                }
                if (better) {
                    best = std::make_pair(r, c);
                    best_cost = cost;
                    best_value = &v;
                }
            }
            if (any) ++examined;
            if (best && (best_cost == 0 || examined >= kSearchRows)) break;
        }
        return best;
    }

    void eliminate(std::uint32_t r, std::uint32_t c, bool keep) {
        const Row& pivot_row = rows_[r];
        const Value pivot = *find_in_row(pivot_row, c);
        Row updated;
        for (std::uint32_t i : col_rows_[c]) {
            if (i == r || !active_[i]) continue;
            const Value* factor = find_in_row(rows_[i], c);
            if (!factor) continue;
            updated.clear();
            policy_.combine(updated, rows_[i], pivot_row, pivot, *factor);
            replace_row(i, updated);
        }
        col_rows_[c].clear();

        by_length_.erase({pivot_row.size(), r});
        for (const auto& [cc, v] : pivot_row) --col_count_[cc];
        active_[r] = false;
        pivots_.push_back({r, c, keep ? pivot_row : Row{}});
    }

    void replace_row(std::uint32_t i, Row& updated) {
        Row& old = rows_[i];
        by_length_.erase({old.size(), i});
        std::size_t a = 0;
        for (const auto& [c, v] : updated) {
            while (a < old.size() && old[a].first < c) --col_count_[old[a++].first];
            if (a < old.size() && old[a].first == c) {
                ++a;
                continue;
            }
            ++col_count_[c];
            col_rows_[c].push_back(i);
        }
        while (a < old.size()) --col_count_[old[a++].first];
        old.swap(updated);
        if (old.empty()) active_[i] = false;
        else by_length_.emplace(old.size(), i);
    }

    Policy policy_;
    std::vector<Row> rows_;
    std::vector<bool> active_;
    std::vector<std::uint32_t> col_count_;
    std::vector<std::vector<std::uint32_t>> col_rows_;
    std::set<std::pair<std::size_t, std::uint32_t>> by_length_;
    std::vector<PivotRecord<Value>> pivots_;
};

// out <- a * target - b * pivot_row, dropping zeros; `mul_sub` computes the
// entry from (target value or null, pivot value or null).
template <class Value, class Fn>
void merge_rows(SparseRow<Value>& out, const SparseRow<Value>& target, const SparseRow<Value>& pivot_row,
                Fn&& entry, auto&& is_zero) {
    std::size_t a = 0, b = 0;
    out.reserve(target.size() + pivot_row.size());
    while (a < target.size() || b < pivot_row.size()) {
        std::uint32_t col;
        Value v;
        if (b == pivot_row.size() || (a < target.size() && target[a].first < pivot_row[b].first)) {
            col = target[a].first;
            v = entry(&target[a].second, nullptr);
            ++a;
        } else if (a == target.size() || pivot_row[b].first < target[a].first) {
            col = pivot_row[b].first;
            v = entry(nullptr, &pivot_row[b].second);
            ++b;
        } else {
            col = target[a].first;
            v = entry(&target[a].second, &pivot_row[b].second);
            ++a;
            ++b;
        }
        if (!is_zero(v)) out.emplace_back(col, std::move(v));
    }
}

}  // namespace loopmod::detail
