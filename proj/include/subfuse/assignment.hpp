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

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace subfuse {

// Dense row-major matrix of finite costs.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(size_t rows, size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static CostMatrix from_rows(const std::vector<std::vector<double>>& rows);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

struct Assignment {
  // (row, col) pairs sorted by row.
  std::vector<std::pair<size_t, size_t>> pairs;
  double total_cost = 0.0;
};

// Exact minimum-cost assignment (Hungarian method, O(n^3)).
//
// Returns min(rows, cols) pairs. Among all optimal matchings the one whose
// row-sorted pair sequence is lexicographically smallest is returned, so
// the result does not depend on floating-point accident in the solver.
// Rectangular inputs are padded to square with a constant exceeding the sum
// of absolute entries; padded pairs never appear in the output.
//
// Throws Error(kValidation) if any entry is not finite.
Assignment solve_assignment(const CostMatrix& cost);

}  // namespace subfuse
