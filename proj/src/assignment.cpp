// Copyright 2026  The subfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "subfuse/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "subfuse/error.hpp"

namespace subfuse {

CostMatrix CostMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const size_t cols = rows.empty() ? 0 : rows.front().size();
  CostMatrix m(rows.size(), cols);
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) fail_validation("cost matrix is not rectangular");
    for (size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

namespace {

constexpr size_t kNone = std::numeric_limits<size_t>::max();

struct Potentials {
  std::vector<double> row;  // u
  std::vector<double> col;  // v
  std::vector<size_t> row_to_col;
};

// Shortest augmenting path Hungarian method on a square matrix. Produces an
// optimal matching together with a feasible dual (u, v) that is tight on the
// matched edges.
Potentials hungarian(const CostMatrix& a) {
  const size_t n = a.rows();
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based internally; index 0 is the virtual root column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<size_t> p(n + 1, 0), way(n + 1, 0);
  for (size_t i = 1; i <= n; ++i) {
    p[0] = i;
    size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const size_t i0 = p[j0];
      double delta = inf;
      size_t j1 = 0;
      for (size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Potentials out;
  out.row.assign(u.begin() + 1, u.end());
  out.col.assign(v.begin() + 1, v.end());
  out.row_to_col.assign(n, kNone);
  for (size_t j = 1; j <= n; ++j) out.row_to_col[p[j] - 1] = j - 1;
  return out;
}

// Every optimal matching uses only edges that are tight under an optimal
// dual, and every perfect matching of tight edges is optimal. The smallest
// one in lexicographic order is found row by row: row i takes the smallest
// tight column for which the remaining rows can still be perfectly matched,
// which is checked by an alternating-path search in the tight subgraph.
class TightGraph {
 public:
  TightGraph(const CostMatrix& a, const Potentials& pot, double eps)
      : n_(a.rows()), adj_(n_) {
    for (size_t i = 0; i < n_; ++i) {
      for (size_t j = 0; j < n_; ++j) {
        if (a(i, j) - pot.row[i] - pot.col[j] <= eps) adj_[i].push_back(j);
      }
    }
  }

  std::vector<size_t> lexicographic_min(std::vector<size_t> match) const {
    std::vector<size_t> col_owner(n_);
    for (size_t i = 0; i < n_; ++i) col_owner[match[i]] = i;
    std::vector<char> fixed_row(n_, 0), fixed_col(n_, 0);
    for (size_t i = 0; i < n_; ++i) {
      for (size_t c : adj_[i]) {
        if (fixed_col[c]) continue;
        if (c == match[i]) break;
        // Force (i, c): the previous owner of c must reach the column that
        // i releases through free (unfixed) rows and columns.
        const size_t owner = col_owner[c];
        const size_t released = match[i];
        if (reroute(owner, released, i, c, fixed_row, fixed_col, match,
                    col_owner)) {
          match[i] = c;
          col_owner[c] = i;
          break;
        }
      }
      fixed_row[i] = 1;
      fixed_col[match[i]] = 1;
    }
    return match;
  }

 private:
  // Finds an alternating path starting at row `start` that ends at column
  // `target`, avoiding fixed rows/cols, row `skip_row` and column
  // `skip_col`. On success the matching is rewired along the path.
  bool reroute(size_t start, size_t target, size_t skip_row, size_t skip_col,
               const std::vector<char>& fixed_row,
               const std::vector<char>& fixed_col, std::vector<size_t>& match,
               std::vector<size_t>& col_owner) const {
    std::vector<size_t> parent_col(n_, kNone);  // column -> row that reached it
    std::vector<char> seen_row(n_, 0);
    std::vector<size_t> queue{start};
    seen_row[start] = 1;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
      const size_t r = queue[qi];
      for (size_t c : adj_[r]) {
        if (fixed_col[c] || c == skip_col || parent_col[c] != kNone) continue;
        parent_col[c] = r;
        if (c == target) {
          // Walk back flipping matched edges.
          size_t col = c;
          while (true) {
            const size_t row = parent_col[col];
            const size_t prev_col = match[row];
            match[row] = col;
            col_owner[col] = row;
            if (row == start) break;
            col = prev_col;
          }
          return true;
        }
        const size_t next = col_owner[c];
        if (next == skip_row || fixed_row[next] || seen_row[next]) continue;
        seen_row[next] = 1;
        queue.push_back(next);
      }
    }
    return false;
  }

  size_t n_;
  std::vector<std::vector<size_t>> adj_;
};

}  // namespace

Assignment solve_assignment(const CostMatrix& cost) {
  const size_t rows = cost.rows();
  const size_t cols = cost.cols();
  double abs_sum = 0.0;
  double max_abs = 0.0;
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) {
      const double x = cost(r, c);
      if (!std::isfinite(x)) {
        fail_validation("cost matrix entry (" + std::to_string(r) + ", " +
                        std::to_string(c) + ") is not finite");
      }
      abs_sum += std::abs(x);
      max_abs = std::max(max_abs, std::abs(x));
    }
  }
  Assignment result;
  if (rows == 0 || cols == 0) return result;

  const size_t n = std::max(rows, cols);
  const double pad = abs_sum + 1.0;
  CostMatrix square(n, n, pad);
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) square(r, c) = cost(r, c);
  }

  const Potentials pot = hungarian(square);
  const double eps = 1e-9 * (1.0 + std::max(max_abs, pad));
  const std::vector<size_t> match =
      TightGraph(square, pot, eps).lexicographic_min(pot.row_to_col);

  for (size_t r = 0; r < rows; ++r) {
    const size_t c = match[r];
    if (c < cols) {
      result.pairs.emplace_back(r, c);
      result.total_cost += cost(r, c);
    }
  }
  return result;
}

}  // namespace subfuse
