// Copyright 2026 The mdvrp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MDVRP_AUTODIFF_H_
#define MDVRP_AUTODIFF_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mdvrp/rng.h"

namespace mdvrp::ad {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}
  Matrix(int rows, int cols, std::vector<double> data);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const double& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  const double& operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<const double> row(int r) const {
    return std::span<const double>(data_).subspan(static_cast<std::size_t>(r) * cols_, cols_);
  }

  void Fill(double value);
  bool SameShape(const Matrix& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

enum class OpKind : std::uint8_t {
  kParameter,
  kConstant,
  kAdd,
  kSub,
  kMul,
  kScale,
  kAddScalar,
  kMatmul,
  kMatmulNT,
  kAddRow,
  kSubRow,
  kMulRow,
  kTanh,
  kRelu,
  kSigmoid,
  kLog,
  kRsqrt,
  kMaskedSoftmax,
  kMaskedLogSoftmax,
  kConcatCols,
  kConcatRows,
  kSliceCols,
  kGatherRows,
  kPick,
  kReduceMeanRows,
  kReduceVarRows,
  kSum,
  kPairwiseDiff,
};

std::string_view ToString(OpKind kind);

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Append-only reverse-mode tape over matrix-valued nodes. Nodes are
// recorded in evaluation order, so the node vector is already a topological
// order and backward is a single reverse sweep.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf bound to externally owned storage; `param_index` selects the slot in
  // AccumulateParameterGradients.
  Var Parameter(const Matrix* value, int param_index);
  Var Constant(Matrix value);

  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);  // elementwise
  Var Scale(Var a, double factor);
  Var AddScalar(Var a, double value);
  Var Matmul(Var a, Var b);    // a (r x k) * b (k x c)
  Var MatmulNT(Var a, Var b);  // a (r x k) * b^T, b is (c x k)
  Var AddRow(Var a, Var row);  // broadcast a 1 x c row over every row of a
  Var SubRow(Var a, Var row);
  Var MulRow(Var a, Var row);
  Var Tanh(Var a);
  Var Relu(Var a);
  Var Sigmoid(Var a);
  Var Log(Var a);
  Var Rsqrt(Var a);
  // Row-wise softmax restricted to mask entries that are nonzero; masked
  // outputs are exactly 0 (log-softmax: -inf) and receive no gradient.
  // Every row must keep at least one entry. An empty mask keeps everything.
  Var MaskedSoftmax(Var a, std::vector<std::uint8_t> mask);
  Var MaskedLogSoftmax(Var a, std::vector<std::uint8_t> mask);
  Var ConcatCols(const std::vector<Var>& parts);
  Var ConcatRows(Var top, Var bottom);
  Var SliceCols(Var a, int offset, int width);
  Var GatherRows(Var a, std::vector<int> rows);
  // out(r, 0) = a(r, cols[r]); rows with cols[r] < 0 yield 0.
  Var Pick(Var a, std::vector<int> cols);
  Var ReduceMeanRows(Var a);  // 1 x c column means
  Var ReduceVarRows(Var a);   // 1 x c population variances
  Var Sum(Var a);             // 1 x 1
  // For a column vector v (k x 1): out(i, j) = v_i - v_j.
  Var PairwiseDiff(Var a);

  const Matrix& value(Var v) const;
  OpKind kind(Var v) const { return nodes_.at(v.id).kind; }

  // Reverse sweep from a 1 x 1 output. Adjoints of nodes that are not
  // ancestors of the output stay empty (read as zero).
  void Backward(Var output);
  // Adjoint of a node after Backward, zeros when the node is not an ancestor.
  Matrix Adjoint(Var v) const;
  // Adds parameter adjoints into grads[param_index] (shapes must match).
  void AccumulateParameterGradients(std::span<Matrix> grads, double weight = 1.0) const;

  std::size_t size() const { return nodes_.size(); }
  void Clear();

 private:
  struct Node {
    explicit Node(OpKind k, int first = -1, int second = -1) : kind(k), a(first), b(second) {}
    OpKind kind;
    int a;
    int b;
    double scalar = 0.0;
    int param = -1;
    int offset = 0;
    const Matrix* external = nullptr;
    Matrix value;
    std::vector<int> indices;
    std::vector<std::uint8_t> mask;
  };

  Var Push(Node node);
  const Matrix& val(int id) const;
  Matrix& grad(int id);
  void BackwardNode(int id);

  std::vector<Node> nodes_;
  std::vector<Matrix> adjoints_;
  std::vector<int> parameter_nodes_;
};

// Central finite-difference audit of a scalar function of a flat parameter
// vector against a supplied analytic gradient.
struct FiniteDiffReport {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates_checked = 0;
  double tolerance = 0.0;
  bool passed = true;
};

// Checks `num_coords` coordinates chosen by `rng` (all when fewer exist).
// relative error = |g_ad - g_fd| / max(1, |g_ad|, |g_fd|); the report passes
// when the worst error is below `tolerance`. Throws std::runtime_error when
// the loss is non-finite at a perturbed point.
FiniteDiffReport FiniteDiffCheck(const std::function<double(std::span<const double>)>& loss,
                                 std::span<const double> point, std::span<const double> gradient,
                                 double step, double tolerance, std::size_t num_coords, Rng& rng);

}  // namespace mdvrp::ad

#endif  // MDVRP_AUTODIFF_H_
