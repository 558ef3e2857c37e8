#ifndef RPS_LINALG_HPP
#define RPS_LINALG_HPP

#include <cstddef>
#include <vector>

#include "rps/field.hpp"

namespace rps {

/// Incremental exact row reduction. Rows are fed one at a time and the
/// accumulator keeps a reduced row echelon basis of their span, so arbitrarily
/// tall streamed systems use memory proportional to the rank only.
class RowReducer {
public:
    RowReducer(FieldSpec spec, std::size_t cols) : spec_(std::move(spec)), cols_(cols) {}

    std::size_t cols() const { return cols_; }
    std::size_t rank() const { return rows_.size(); }
    const std::vector<std::vector<FieldElement>>& rows() const { return rows_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }

    static bool is_zero_row(const std::vector<FieldElement>& row)
    {
        for (const auto& x : row)
            if (!x.is_zero())
                return false;
        return true;
    }

    /// Residue of `row` modulo the current span.
    std::vector<FieldElement> reduce(std::vector<FieldElement> row) const
    {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            const FieldElement& c = row[pivots_[r]];
            if (c.is_zero())
                continue;
            FieldElement f = c; // rows_[r] has pivot 1
            for (std::size_t j = 0; j < cols_; ++j)
                row[j] = row[j] - f * rows_[r][j];
        }
        return row;
    }

    bool contains(std::vector<FieldElement> row) const { return is_zero_row(reduce(std::move(row))); }

    /// Returns true iff the row enlarged the span.
    bool add_row(std::vector<FieldElement> row)
    {
        row = reduce(std::move(row));
        std::size_t lead = cols_;
        for (std::size_t j = 0; j < cols_; ++j) {
            if (!row[j].is_zero()) {
                lead = j;
                break;
            }
        }
        if (lead == cols_)
            return false;
        FieldElement inv = row[lead].inv();
        for (std::size_t j = 0; j < cols_; ++j)
            row[j] = row[j] * inv;
        // eliminate the new pivot column from the existing rows
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            const FieldElement& c = rows_[r][lead];
            if (c.is_zero())
                continue;
            FieldElement f = c;
            for (std::size_t j = 0; j < cols_; ++j)
                rows_[r][j] = rows_[r][j] - f * row[j];
        }
        std::size_t pos = 0;
        while (pos < pivots_.size() && pivots_[pos] < lead)
            ++pos;
        rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(row));
        pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(pos), lead);
        return true;
    }

    /// Basis of the right nullspace of the accumulated row span, one vector
    /// per free column, in free-column order.
    std::vector<std::vector<FieldElement>> nullspace() const
    {
        std::vector<bool> is_pivot(cols_, false);
        for (std::size_t p : pivots_)
            is_pivot[p] = true;
        std::vector<std::vector<FieldElement>> basis;
        for (std::size_t f = 0; f < cols_; ++f) {
            if (is_pivot[f])
                continue;
            std::vector<FieldElement> v;
            v.reserve(cols_);
            for (std::size_t j = 0; j < cols_; ++j)
                v.push_back(FieldElement::zero(spec_));
            v[f] = FieldElement::one(spec_);
            for (std::size_t r = 0; r < rows_.size(); ++r)
                v[pivots_[r]] = -rows_[r][f];
            basis.push_back(std::move(v));
        }
        return basis;
    }

private:
    FieldSpec spec_;
    std::size_t cols_;
    std::vector<std::vector<FieldElement>> rows_; // RREF, pivot columns increasing
    std::vector<std::size_t> pivots_;
};

inline std::size_t matrix_rank(const FieldSpec& spec,
                               const std::vector<std::vector<FieldElement>>& rows,
                               std::size_t cols)
{
    RowReducer red(spec, cols);
    for (const auto& r : rows)
        red.add_row(r);
    return red.rank();
}

} // namespace rps

#endif // RPS_LINALG_HPP
