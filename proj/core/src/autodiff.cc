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

#include "mdvrp/autodiff.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mdvrp::ad {

namespace {

void RequireSameShape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.SameShape(b)) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
  }
}

void RequireRow(const Matrix& a, const Matrix& row, const char* op) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw std::invalid_argument(std::string(op) + ": row operand must be 1x" + std::to_string(a.cols()));
  }
}

// out += a * b
void GemmAccumulate(const Matrix& a, const Matrix& b, Matrix& out) {
  const int r = a.rows();
  const int k = a.cols();
  const int c = b.cols();
  for (int i = 0; i < r; ++i) {
    double* out_row = &out(i, 0);
    for (int p = 0; p < k; ++p) {
      const double av = a(i, p);
      if (av == 0.0) continue;
      const double* b_row = &b(p, 0);
      for (int j = 0; j < c; ++j) out_row[j] += av * b_row[j];
    }
  }
}

// out += a * b^T
void GemmNTAccumulate(const Matrix& a, const Matrix& b, Matrix& out) {
  const int r = a.rows();
  const int k = a.cols();
  const int c = b.rows();
  for (int i = 0; i < r; ++i) {
    const double* a_row = &a(i, 0);
    for (int j = 0; j < c; ++j) {
      const double* b_row = &b(j, 0);
      double sum = 0.0;
      for (int p = 0; p < k; ++p) sum += a_row[p] * b_row[p];
      out(i, j) += sum;
    }
  }
}

// out += a^T * b
void GemmTNAccumulate(const Matrix& a, const Matrix& b, Matrix& out) {
  const int r = a.rows();
  const int k = a.cols();
  const int c = b.cols();
  for (int i = 0; i < r; ++i) {
    for (int p = 0; p < k; ++p) {
      const double av = a(i, p);
      if (av == 0.0) continue;
      double* out_row = &out(p, 0);
      const double* b_row = &b(i, 0);
      for (int j = 0; j < c; ++j) out_row[j] += av * b_row[j];
    }
  }
}

bool Kept(const std::vector<std::uint8_t>& mask, std::size_t i) { return mask.empty() || mask[i] != 0; }

}  // namespace

Matrix::Matrix(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != static_cast<std::size_t>(rows) * cols) {
    throw std::invalid_argument("Matrix: data size does not match shape");
  }
}

void Matrix::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

std::string_view ToString(OpKind kind) {
  switch (kind) {
    case OpKind::kParameter: return "parameter";
    case OpKind::kConstant: return "constant";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kScale: return "scale";
    case OpKind::kAddScalar: return "add_scalar";
    case OpKind::kMatmul: return "matmul";
    case OpKind::kMatmulNT: return "matmul_nt";
    case OpKind::kAddRow: return "add_row";
    case OpKind::kSubRow: return "sub_row";
    case OpKind::kMulRow: return "mul_row";
    case OpKind::kTanh: return "tanh";
    case OpKind::kRelu: return "relu";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kLog: return "log";
    case OpKind::kRsqrt: return "rsqrt";
    case OpKind::kMaskedSoftmax: return "masked_softmax";
    case OpKind::kMaskedLogSoftmax: return "masked_log_softmax";
    case OpKind::kConcatCols: return "concat_cols";
    case OpKind::kConcatRows: return "concat_rows";
    case OpKind::kSliceCols: return "slice_cols";
    case OpKind::kGatherRows: return "gather_rows";
    case OpKind::kPick: return "pick";
    case OpKind::kReduceMeanRows: return "reduce_mean";
    case OpKind::kReduceVarRows: return "reduce_var";
    case OpKind::kSum: return "sum";
    case OpKind::kPairwiseDiff: return "pairwise_diff";
  }
  return "unknown";
}

Var Tape::Push(Node node) {
  const int id = static_cast<int>(nodes_.size());
  if (node.a >= id || node.b >= id) throw std::logic_error("Tape: parent recorded after child");
  nodes_.push_back(std::move(node));
  return Var{id};
}

const Matrix& Tape::val(int id) const {
  const Node& node = nodes_[id];
  return node.external != nullptr ? *node.external : node.value;
}

const Matrix& Tape::value(Var v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size())) throw std::out_of_range("Tape: invalid Var");
  return val(v.id);
}

Matrix& Tape::grad(int id) {
  Matrix& g = adjoints_[id];
  if (g.empty()) {
    const Matrix& v = val(id);
    g = Matrix(v.rows(), v.cols());
  }
  return g;
}

void Tape::Clear() {
  nodes_.clear();
  adjoints_.clear();
  parameter_nodes_.clear();
}

Var Tape::Parameter(const Matrix* value, int param_index) {
  Node node{OpKind::kParameter};
  node.external = value;
  node.param = param_index;
  Var v = Push(std::move(node));
  parameter_nodes_.push_back(v.id);
  return v;
}

Var Tape::Constant(Matrix value) {
  Node node{OpKind::kConstant};
  node.value = std::move(value);
  return Push(std::move(node));
}

Var Tape::Add(Var a, Var b) {
  const Matrix& x = val(a.id);
  const Matrix& y = val(b.id);
  RequireSameShape(x, y, "Add");
  Matrix out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += y[i];
  Node node{OpKind::kAdd, a.id, b.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::Sub(Var a, Var b) {
  const Matrix& x = val(a.id);
  const Matrix& y = val(b.id);
  RequireSameShape(x, y, "Sub");
  Matrix out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= y[i];
  Node node{OpKind::kSub, a.id, b.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::Mul(Var a, Var b) {
  const Matrix& x = val(a.id);
  const Matrix& y = val(b.id);
  RequireSameShape(x, y, "Mul");
  Matrix out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= y[i];
  Node node{OpKind::kMul, a.id, b.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::Scale(Var a, double factor) {
  Matrix out = val(a.id);
  for (double& x : out.values()) x *= factor;
  Node node{OpKind::kScale, a.id};
  node.scalar = factor;
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::AddScalar(Var a, double value) {
  Matrix out = val(a.id);
  for (double& x : out.values()) x += value;
  Node node{OpKind::kAddScalar, a.id};
  node.scalar = value;
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::Matmul(Var a, Var b) {
  const Matrix& x = val(a.id);
  const Matrix& y = val(b.id);
  if (x.cols() != y.rows()) throw std::invalid_argument("Matmul: inner dimensions differ");
  Matrix out(x.rows(), y.cols());
  GemmAccumulate(x, y, out);
  Node node{OpKind::kMatmul, a.id, b.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::MatmulNT(Var a, Var b) {
  const Matrix& x = val(a.id);
  const Matrix& y = val(b.id);
  if (x.cols() != y.cols()) throw std::invalid_argument("MatmulNT: inner dimensions differ");
  Matrix out(x.rows(), y.rows());
  GemmNTAccumulate(x, y, out);
  Node node{OpKind::kMatmulNT, a.id, b.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::AddRow(Var a, Var row) {
  const Matrix& x = val(a.id);
  const Matrix& r = val(row.id);
  RequireRow(x, r, "AddRow");
  Matrix out = x;
  for (int i = 0; i < out.rows(); ++i) {
    for (int j = 0; j < out.cols(); ++j) out(i, j) += r[j];
  }
  Node node{OpKind::kAddRow, a.id, row.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::SubRow(Var a, Var row) {
  const Matrix& x = val(a.id);
  const Matrix& r = val(row.id);
  RequireRow(x, r, "SubRow");
  Matrix out = x;
  for (int i = 0; i < out.rows(); ++i) {
    for (int j = 0; j < out.cols(); ++j) out(i, j) -= r[j];
  }
  Node node{OpKind::kSubRow, a.id, row.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::MulRow(Var a, Var row) {
  const Matrix& x = val(a.id);
  const Matrix& r = val(row.id);
  RequireRow(x, r, "MulRow");
  Matrix out = x;
  for (int i = 0; i < out.rows(); ++i) {
    for (int j = 0; j < out.cols(); ++j) out(i, j) *= r[j];
  }
  Node node{OpKind::kMulRow, a.id, row.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::Tanh(Var a) {
  Matrix out = val(a.id);
  for (double& x : out.values()) x = std::tanh(x);
  Node node{OpKind::kTanh, a.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::Relu(Var a) {
  Matrix out = val(a.id);
  for (double& x : out.values()) x = x > 0.0 ? x : 0.0;
  Node node{OpKind::kRelu, a.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::Sigmoid(Var a) {
  Matrix out = val(a.id);
  for (double& x : out.values()) {
    x = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }
  Node node{OpKind::kSigmoid, a.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::Log(Var a) {
  Matrix out = val(a.id);
  for (double& x : out.values()) x = std::log(x);
  Node node{OpKind::kLog, a.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::Rsqrt(Var a) {
  Matrix out = val(a.id);
  for (double& x : out.values()) x = 1.0 / std::sqrt(x);
  Node node{OpKind::kRsqrt, a.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::MaskedSoftmax(Var a, std::vector<std::uint8_t> mask) {
  const Matrix& x = val(a.id);
  if (!mask.empty() && mask.size() != x.size()) throw std::invalid_argument("MaskedSoftmax: mask size");
  Matrix out(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    double peak = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < x.cols(); ++j) {
      if (Kept(mask, static_cast<std::size_t>(i) * x.cols() + j)) peak = std::max(peak, x(i, j));
    }
    if (peak == -std::numeric_limits<double>::infinity()) {
      throw std::logic_error("MaskedSoftmax: row " + std::to_string(i) + " is fully masked");
    }
    double total = 0.0;
    for (int j = 0; j < x.cols(); ++j) {
      if (Kept(mask, static_cast<std::size_t>(i) * x.cols() + j)) {
        out(i, j) = std::exp(x(i, j) - peak);
        total += out(i, j);
      }
    }
    for (int j = 0; j < x.cols(); ++j) out(i, j) /= total;
  }
  Node node{OpKind::kMaskedSoftmax, a.id};
  node.value = std::move(out);
  node.mask = std::move(mask);
  return Push(std::move(node));
}

Var Tape::MaskedLogSoftmax(Var a, std::vector<std::uint8_t> mask) {
  const Matrix& x = val(a.id);
  if (!mask.empty() && mask.size() != x.size()) throw std::invalid_argument("MaskedLogSoftmax: mask size");
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  Matrix out(x.rows(), x.cols(), kNegInf);
  for (int i = 0; i < x.rows(); ++i) {
    double peak = kNegInf;
    for (int j = 0; j < x.cols(); ++j) {
      if (Kept(mask, static_cast<std::size_t>(i) * x.cols() + j)) peak = std::max(peak, x(i, j));
    }
    if (peak == kNegInf) throw std::logic_error("MaskedLogSoftmax: row " + std::to_string(i) + " is fully masked");
    double total = 0.0;
    for (int j = 0; j < x.cols(); ++j) {
      if (Kept(mask, static_cast<std::size_t>(i) * x.cols() + j)) total += std::exp(x(i, j) - peak);
    }
    const double log_norm = peak + std::log(total);
    for (int j = 0; j < x.cols(); ++j) {
      if (Kept(mask, static_cast<std::size_t>(i) * x.cols() + j)) out(i, j) = x(i, j) - log_norm;
    }
  }
  Node node{OpKind::kMaskedLogSoftmax, a.id};
  node.value = std::move(out);
  node.mask = std::move(mask);
  return Push(std::move(node));
}

Var Tape::ConcatCols(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("ConcatCols: no inputs");
  const int rows = val(parts[0].id).rows();
  int cols = 0;
  for (Var p : parts) {
    if (val(p.id).rows() != rows) throw std::invalid_argument("ConcatCols: row counts differ");
    cols += val(p.id).cols();
  }
  Matrix out(rows, cols);
  int offset = 0;
  Node node{OpKind::kConcatCols};
  for (Var p : parts) {
    const Matrix& x = val(p.id);
    for (int i = 0; i < rows; ++i) {
      std::copy(x.row(i).begin(), x.row(i).end(), &out(i, offset));
    }
    offset += x.cols();
    node.indices.push_back(p.id);
  }
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::ConcatRows(Var top, Var bottom) {
  const Matrix& x = val(top.id);
  const Matrix& y = val(bottom.id);
  if (x.cols() != y.cols()) throw std::invalid_argument("ConcatRows: column counts differ");
  std::vector<double> data(x.values().begin(), x.values().end());
  data.insert(data.end(), y.values().begin(), y.values().end());
  Node node{OpKind::kConcatRows, top.id, bottom.id};
  node.value = Matrix(x.rows() + y.rows(), x.cols(), std::move(data));
  return Push(std::move(node));
}

Var Tape::SliceCols(Var a, int offset, int width) {
  const Matrix& x = val(a.id);
  if (offset < 0 || width < 0 || offset + width > x.cols()) throw std::invalid_argument("SliceCols: out of range");
  Matrix out(x.rows(), width);
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < width; ++j) out(i, j) = x(i, offset + j);
  }
  Node node{OpKind::kSliceCols, a.id};
  node.offset = offset;
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::GatherRows(Var a, std::vector<int> rows) {
  const Matrix& x = val(a.id);
  Matrix out(static_cast<int>(rows.size()), x.cols());
  for (int i = 0; i < out.rows(); ++i) {
    if (rows[i] < 0 || rows[i] >= x.rows()) throw std::out_of_range("GatherRows: row index");
    std::copy(x.row(rows[i]).begin(), x.row(rows[i]).end(), &out(i, 0));
  }
  Node node{OpKind::kGatherRows, a.id};
  node.indices = std::move(rows);
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::Pick(Var a, std::vector<int> cols) {
  const Matrix& x = val(a.id);
  if (static_cast<int>(cols.size()) != x.rows()) throw std::invalid_argument("Pick: one column per row");
  Matrix out(x.rows(), 1);
  for (int i = 0; i < x.rows(); ++i) {
    if (cols[i] >= x.cols()) throw std::out_of_range("Pick: column index");
    out(i, 0) = cols[i] < 0 ? 0.0 : x(i, cols[i]);
  }
  Node node{OpKind::kPick, a.id};
  node.indices = std::move(cols);
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::ReduceMeanRows(Var a) {
  const Matrix& x = val(a.id);
  Matrix out(1, x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) out[j] += x(i, j);
  }
  for (double& v : out.values()) v /= x.rows();
  Node node{OpKind::kReduceMeanRows, a.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::ReduceVarRows(Var a) {
  const Matrix& x = val(a.id);
  Matrix mean(1, x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) mean[j] += x(i, j);
  }
  for (double& v : mean.values()) v /= x.rows();
  Matrix out(1, x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      const double centered = x(i, j) - mean[j];
      out[j] += centered * centered;
    }
  }
  for (double& v : out.values()) v /= x.rows();
  Node node{OpKind::kReduceVarRows, a.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

Var Tape::Sum(Var a) {
  const Matrix& x = val(a.id);
  double total = 0.0;
  for (double v : x.values()) total += v;
  Node node{OpKind::kSum, a.id};
  node.value = Matrix(1, 1, total);
  return Push(std::move(node));
}

Var Tape::PairwiseDiff(Var a) {
  const Matrix& x = val(a.id);
  if (x.cols() != 1) throw std::invalid_argument("PairwiseDiff: expects a column vector");
  const int k = x.rows();
  Matrix out(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) out(i, j) = x[i] - x[j];
  }
  Node node{OpKind::kPairwiseDiff, a.id};
  node.value = std::move(out);
  return Push(std::move(node));
}

void Tape::Backward(Var output) {
  const Matrix& out = value(output);
  if (out.rows() != 1 || out.cols() != 1) throw std::invalid_argument("Backward: output must be 1x1");
  adjoints_.assign(nodes_.size(), Matrix());
  grad(output.id)[0] = 1.0;
  for (int id = output.id; id >= 0; --id) {
    if (adjoints_[id].empty()) continue;
    BackwardNode(id);
  }
}

void Tape::BackwardNode(int id) {
  const Node& node = nodes_[id];
  // Copy: grad() may reallocate other adjoints but never this one, still keep
  // a stable reference by moving it out for the duration of this node.
  const Matrix g = adjoints_[id];
  const Matrix& y = node.value;
  switch (node.kind) {
    case OpKind::kParameter:
    case OpKind::kConstant:
      return;
    case OpKind::kAdd: {
      Matrix& ga = grad(node.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      Matrix& gb = grad(node.b);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
      return;
    }
    case OpKind::kSub: {
      Matrix& ga = grad(node.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      Matrix& gb = grad(node.b);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
      return;
    }
    case OpKind::kMul: {
      const Matrix& a = val(node.a);
      const Matrix& b = val(node.b);
      Matrix& ga = grad(node.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b[i];
      Matrix& gb = grad(node.b);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a[i];
      return;
    }
    case OpKind::kScale: {
      Matrix& ga = grad(node.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * node.scalar;
      return;
    }
    case OpKind::kAddScalar: {
      Matrix& ga = grad(node.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      return;
    }
    case OpKind::kMatmul: {
      GemmNTAccumulate(g, val(node.b), grad(node.a));
      GemmTNAccumulate(val(node.a), g, grad(node.b));
      return;
    }
    case OpKind::kMatmulNT: {
      GemmAccumulate(g, val(node.b), grad(node.a));
      GemmTNAccumulate(g, val(node.a), grad(node.b));
      return;
    }
    case OpKind::kAddRow:
    case OpKind::kSubRow: {
      const double sign = node.kind == OpKind::kAddRow ? 1.0 : -1.0;
      Matrix& ga = grad(node.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      Matrix& gr = grad(node.b);
      for (int i = 0; i < g.rows(); ++i) {
        for (int j = 0; j < g.cols(); ++j) gr[j] += sign * g(i, j);
      }
      return;
    }
    case OpKind::kMulRow: {
      const Matrix& a = val(node.a);
      const Matrix& r = val(node.b);
      Matrix& ga = grad(node.a);
      for (int i = 0; i < g.rows(); ++i) {
        for (int j = 0; j < g.cols(); ++j) ga(i, j) += g(i, j) * r[j];
      }
      Matrix& gr = grad(node.b);
      for (int i = 0; i < g.rows(); ++i) {
        for (int j = 0; j < g.cols(); ++j) gr[j] += g(i, j) * a(i, j);
      }
      return;
    }
    case OpKind::kTanh: {
      Matrix& ga = grad(node.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
      return;
    }
    case OpKind::kRelu: {
      const Matrix& a = val(node.a);
      Matrix& ga = grad(node.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += a[i] > 0.0 ? g[i] : 0.0;
      return;
    }
    case OpKind::kSigmoid: {
      Matrix& ga = grad(node.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
      return;
    }
    case OpKind::kLog: {
      const Matrix& a = val(node.a);
      Matrix& ga = grad(node.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / a[i];
      return;
    }
    case OpKind::kRsqrt: {
      Matrix& ga = grad(node.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (-0.5 * y[i] * y[i] * y[i]);
      return;
    }
    case OpKind::kMaskedSoftmax: {
      Matrix& ga = grad(node.a);
      for (int i = 0; i < g.rows(); ++i) {
        double dot = 0.0;
        for (int j = 0; j < g.cols(); ++j) {
          if (Kept(node.mask, static_cast<std::size_t>(i) * g.cols() + j)) dot += g(i, j) * y(i, j);
        }
        for (int j = 0; j < g.cols(); ++j) {
          if (Kept(node.mask, static_cast<std::size_t>(i) * g.cols() + j)) {
            ga(i, j) += y(i, j) * (g(i, j) - dot);
          }
        }
      }
      return;
    }
    case OpKind::kMaskedLogSoftmax: {
      Matrix& ga = grad(node.a);
      for (int i = 0; i < g.rows(); ++i) {
        double total = 0.0;
        for (int j = 0; j < g.cols(); ++j) {
          if (Kept(node.mask, static_cast<std::size_t>(i) * g.cols() + j)) total += g(i, j);
        }
        if (total == 0.0) {
          bool all_zero = true;
          for (int j = 0; j < g.cols() && all_zero; ++j) all_zero = g(i, j) == 0.0;
          if (all_zero) continue;
        }
        for (int j = 0; j < g.cols(); ++j) {
          if (Kept(node.mask, static_cast<std::size_t>(i) * g.cols() + j)) {
            ga(i, j) += g(i, j) - std::exp(y(i, j)) * total;
          }
        }
      }
      return;
    }
    case OpKind::kConcatCols: {
      int offset = 0;
      for (int parent : node.indices) {
        Matrix& gp = grad(parent);
        for (int i = 0; i < gp.rows(); ++i) {
          for (int j = 0; j < gp.cols(); ++j) gp(i, j) += g(i, offset + j);
        }
        offset += gp.cols();
      }
      return;
    }
    case OpKind::kConcatRows: {
      Matrix& gt = grad(node.a);
      for (std::size_t i = 0; i < gt.size(); ++i) gt[i] += g[i];
      Matrix& gb = grad(node.b);
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[gt.size() + i];
      return;
    }
    case OpKind::kSliceCols: {
      Matrix& ga = grad(node.a);
      for (int i = 0; i < g.rows(); ++i) {
        for (int j = 0; j < g.cols(); ++j) ga(i, node.offset + j) += g(i, j);
      }
      return;
    }
    case OpKind::kGatherRows: {
      Matrix& ga = grad(node.a);
      for (int i = 0; i < g.rows(); ++i) {
        for (int j = 0; j < g.cols(); ++j) ga(node.indices[i], j) += g(i, j);
      }
      return;
    }
    case OpKind::kPick: {
      Matrix& ga = grad(node.a);
      for (int i = 0; i < g.rows(); ++i) {
        if (node.indices[i] >= 0) ga(i, node.indices[i]) += g(i, 0);
      }
      return;
    }
    case OpKind::kReduceMeanRows: {
      Matrix& ga = grad(node.a);
      const double inv = 1.0 / ga.rows();
      for (int i = 0; i < ga.rows(); ++i) {
        for (int j = 0; j < ga.cols(); ++j) ga(i, j) += g[j] * inv;
      }
      return;
    }
    case OpKind::kReduceVarRows: {
      const Matrix& a = val(node.a);
      Matrix& ga = grad(node.a);
      const int rows = a.rows();
      std::vector<double> mean(a.cols(), 0.0);
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < a.cols(); ++j) mean[j] += a(i, j);
      }
      for (double& v : mean) v /= rows;
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < a.cols(); ++j) ga(i, j) += g[j] * 2.0 * (a(i, j) - mean[j]) / rows;
      }
      return;
    }
    case OpKind::kSum: {
      Matrix& ga = grad(node.a);
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[0];
      return;
    }
    case OpKind::kPairwiseDiff: {
      Matrix& ga = grad(node.a);
      const int k = g.rows();
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          ga[i] += g(i, j);
          ga[j] -= g(i, j);
        }
      }
      return;
    }
  }
}

Matrix Tape::Adjoint(Var v) const {
  const Matrix& x = value(v);
  if (static_cast<std::size_t>(v.id) < adjoints_.size() && !adjoints_[v.id].empty()) return adjoints_[v.id];
  return Matrix(x.rows(), x.cols());
}

void Tape::AccumulateParameterGradients(std::span<Matrix> grads, double weight) const {
  for (int id : parameter_nodes_) {
    if (static_cast<std::size_t>(id) >= adjoints_.size() || adjoints_[id].empty()) continue;
    const int slot = nodes_[id].param;
    if (slot < 0 || slot >= static_cast<int>(grads.size())) throw std::out_of_range("parameter slot");
    Matrix& target = grads[slot];
    const Matrix& g = adjoints_[id];
    if (!target.SameShape(g)) throw std::invalid_argument("AccumulateParameterGradients: shape mismatch");
    for (std::size_t i = 0; i < g.size(); ++i) target[i] += weight * g[i];
  }
}

FiniteDiffReport FiniteDiffCheck(const std::function<double(std::span<const double>)>& loss,
                                 std::span<const double> point, std::span<const double> gradient,
                                 double step, double tolerance, std::size_t num_coords, Rng& rng) {
  if (point.size() != gradient.size()) throw std::invalid_argument("FiniteDiffCheck: size mismatch");
  std::vector<std::size_t> coords(point.size());
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (num_coords < coords.size()) {
    for (std::size_t i = 0; i < num_coords; ++i) {
      const std::size_t j = i + rng.Below(coords.size() - i);
      std::swap(coords[i], coords[j]);
    }
    coords.resize(num_coords);
    std::sort(coords.begin(), coords.end());
  }
  FiniteDiffReport report;
  report.tolerance = tolerance;
  std::vector<double> probe(point.begin(), point.end());
  for (std::size_t idx : coords) {
    const double original = probe[idx];
    probe[idx] = original + step;
    const double up = loss(probe);
    probe[idx] = original - step;
    const double down = loss(probe);
    probe[idx] = original;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw std::runtime_error("FiniteDiffCheck: non-finite loss at coordinate " + std::to_string(idx));
    }
    const double numeric = (up - down) / (2.0 * step);
    const double analytic = gradient[idx];
    const double error =
        std::abs(analytic - numeric) / std::max({1.0, std::abs(analytic), std::abs(numeric)});
    if (error > report.max_relative_error || report.coordinates_checked == 0) {
      report.max_relative_error = error;
      report.worst_index = idx;
      report.analytic = analytic;
      report.numeric = numeric;
    }
    ++report.coordinates_checked;
  }
  report.passed = report.max_relative_error < tolerance;
  return report;
}

}  // namespace mdvrp::ad
