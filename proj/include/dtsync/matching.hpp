#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

/// Exact minimum-weight assignment on dense cost matrices, Hungarian
/// algorithm in the potentials / shortest-augmenting-path form. Runs in
/// O(rows^2 * cols); square instances are the classic O(n^3).
namespace dtsync::matching {

/// Square matrix of finite nonnegative edge weights, row-major.
class CostMatrix {
public:
    CostMatrix(int n, std::vector<double> entries) : n_(n), w_(std::move(entries)) {
        if (n_ <= 0) {
            throw std::invalid_argument("CostMatrix: empty matrix");
        }
        if (w_.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_)) {
            throw std::invalid_argument("CostMatrix: entry count does not match n*n");
        }
        for (double x : w_) {
            if (!std::isfinite(x) || x < 0.0) {
                throw std::invalid_argument("CostMatrix: entries must be finite and nonnegative");
            }
        }
    }

    int size() const { return n_; }
    double at(int row, int col) const { return w_[static_cast<std::size_t>(row) * n_ + col]; }
    const std::vector<double>& entries() const { return w_; }

private:
    int n_;
    std::vector<double> w_;
};

struct MatchingResult {
    std::vector<int> row_to_col;  ///< bijection for square instances
    double total_cost = 0.0;      ///< sum of the selected entries
};

/// Minimum-cost injective map of `rows` rows into `cols` columns, rows <= cols.
/// `costs` is row-major, all entries finite and nonnegative.
inline MatchingResult solve_rectangular(int rows, int cols, const std::vector<double>& costs) {
    if (rows <= 0 || cols <= 0) {
        throw std::invalid_argument("solve_rectangular: empty instance");
    }
    if (rows > cols) {
        throw std::invalid_argument("solve_rectangular: requires rows <= cols");
    }
    if (costs.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
        throw std::invalid_argument("solve_rectangular: entry count does not match rows*cols");
    }
    for (double x : costs) {
        if (!std::isfinite(x) || x < 0.0) {
            throw std::invalid_argument("solve_rectangular: entries must be finite and nonnegative");
        }
    }

    const double kInf = std::numeric_limits<double>::infinity();
    // 1-based internally; column 0 is the virtual start of each augmenting path.
    std::vector<double> row_potential(rows + 1, 0.0);
    std::vector<double> col_potential(cols + 1, 0.0);
    std::vector<int> col_to_row(cols + 1, 0);  // 0 = unassigned
    std::vector<int> path_prev(cols + 1, 0);

    auto cost = [&](int row1, int col1) {
        return costs[static_cast<std::size_t>(row1 - 1) * cols + (col1 - 1)];
    };

    for (int row = 1; row <= rows; ++row) {
        col_to_row[0] = row;
        int j0 = 0;
        std::vector<double> min_reduced(cols + 1, kInf);
        std::vector<char> visited(cols + 1, 0);
        do {
            visited[j0] = 1;
            const int i0 = col_to_row[j0];
            double delta = kInf;
            int j1 = -1;
            for (int j = 1; j <= cols; ++j) {
                if (visited[j]) continue;
                const double reduced = cost(i0, j) - row_potential[i0] - col_potential[j];
                if (reduced < min_reduced[j]) {
                    min_reduced[j] = reduced;
                    path_prev[j] = j0;
                }
                if (min_reduced[j] < delta) {
                    delta = min_reduced[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= cols; ++j) {
                if (visited[j]) {
                    row_potential[col_to_row[j]] += delta;
                    col_potential[j] -= delta;
                } else {
                    min_reduced[j] -= delta;
                }
            }
            j0 = j1;
        } while (col_to_row[j0] != 0);
        // Augment along the found path.
        do {
            const int j1 = path_prev[j0];
            col_to_row[j0] = col_to_row[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    MatchingResult result;
    result.row_to_col.assign(rows, -1);
    for (int j = 1; j <= cols; ++j) {
        if (col_to_row[j] != 0) {
            result.row_to_col[col_to_row[j] - 1] = j - 1;
        }
    }
    for (int i = 0; i < rows; ++i) {
        result.total_cost += costs[static_cast<std::size_t>(i) * cols + result.row_to_col[i]];
    }
    return result;
}

/// Minimum-weight perfect matching of a square instance.
inline MatchingResult solve_assignment(const CostMatrix& costs) {
    return solve_rectangular(costs.size(), costs.size(), costs.entries());
}

/// Square matrix augmented with dummy rows/columns; dummies mark assignments
/// that downstream consumers discard.
struct PaddedMatrix {
    CostMatrix matrix;
    int real_rows;
    int real_cols;

    bool dummy_row(int row) const { return row >= real_rows; }
    bool dummy_col(int col) const { return col >= real_cols; }
};

/// A pad value that is finite yet dominates any assignment of real entries.
inline double recommended_pad_value(const std::vector<double>& entries) {
    double sum = 1.0;
    for (double x : entries) sum += x;
    return sum;
}

/// Embeds an r x c matrix into the smallest square, filling new cells with
/// pad_value. Square inputs come back unchanged.
inline PaddedMatrix pad_to_square(int rows, int cols, const std::vector<double>& entries,
                                  double pad_value) {
    if (rows <= 0 || cols <= 0 ||
        entries.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
        throw std::invalid_argument("pad_to_square: bad shape");
    }
    if (!(pad_value >= 0.0) || !std::isfinite(pad_value)) {
        throw std::invalid_argument("pad_to_square: pad value must be finite and nonnegative");
    }
    const int n = rows > cols ? rows : cols;
    std::vector<double> padded(static_cast<std::size_t>(n) * n, pad_value);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            padded[static_cast<std::size_t>(i) * n + j] = entries[static_cast<std::size_t>(i) * cols + j];
        }
    }
    return PaddedMatrix{CostMatrix(n, std::move(padded)), rows, cols};
}

}  // namespace dtsync::matching
