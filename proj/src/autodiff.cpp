// autodiff.cpp

// Copyright 2026  LMLC Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "lmlc/autodiff.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <unordered_set>

#include "lmlc/kernels.h"

namespace lmlc {
namespace ag {

namespace {

std::atomic<uint64_t> g_next_id{1};

Var MakeNode(Tensor value, std::vector<Var> inputs,
             std::function<void(Node&)> backward) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->inputs = std::move(inputs);
  n->backward_fn = std::move(backward);
  n->id = g_next_id.fetch_add(1);
  for (const auto& in : n->inputs) {
    if (in->needs_grad) {
      n->needs_grad = true;
      break;
    }
  }
  return n;
}

// Accumulation guard: inputs outside the differentiable cone keep no grad.
Tensor* GradTarget(const Var& in) {
  if (!in->needs_grad) return nullptr;
  return &in->EnsureGrad();
}

void CheckSameShape(const Var& a, const Var& b, const char* op) {
  Check(a->value.same_shape(b->value), ErrorKind::kShape, op,
        ": shape mismatch ", ShapeStr(a->value.shape()), " vs ",
        ShapeStr(b->value.shape()));
}

}  // namespace

Tensor& Node::EnsureGrad() {
  if (grad.numel() != value.numel()) grad = Tensor(value.shape());
  return grad;
}

void Node::ZeroGrad() {
  if (grad.numel() > 0) grad.Fill(0.0);
}

Var Constant(Tensor value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->id = g_next_id.fetch_add(1);
  return n;
}

Var Leaf(Tensor value, bool requires_grad) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = requires_grad;
  n->needs_grad = requires_grad;
  n->id = g_next_id.fetch_add(1);
  return n;
}

Var ConstantScalar(double v) { return Constant(Tensor::Scalar(v)); }

void Backward(const Var& root) {
  Check(root->value.numel() == 1, ErrorKind::kShape,
        "Backward: root must be scalar, got ", ShapeStr(root->value.shape()));
  if (!root->needs_grad) return;

  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<Node*> stack = {root.get()};
  seen.insert(root.get());
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    order.push_back(n);
    for (const auto& in : n->inputs) {
      if (in->needs_grad && seen.insert(in.get()).second)
        stack.push_back(in.get());
    }
  }
  std::sort(order.begin(), order.end(),
            [](const Node* a, const Node* b) { return a->id > b->id; });

  root->EnsureGrad().at(0) += 1.0;
  for (Node* n : order) {
    if (n->backward_fn && n->grad.numel() > 0) n->backward_fn(*n);
  }
}

// ---------------------------------------------------------------------------
// Elementwise arithmetic

Var Add(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Add");
  Tensor out(a->value.shape());
  kern::ops().vadd(a->value.data(), b->value.data(), out.data(), out.numel());
  return MakeNode(std::move(out), {a, b}, [](Node& self) {
    for (int i = 0; i < 2; ++i) {
      if (Tensor* g = GradTarget(self.inputs[i])) {
        kern::ops().axpy(1.0, self.grad.data(), g->data(), g->numel());
      }
    }
  });
}

Var Sub(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Sub");
  Tensor out(a->value.shape());
  kern::ops().vsub(a->value.data(), b->value.data(), out.data(), out.numel());
  return MakeNode(std::move(out), {a, b}, [](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0]))
      kern::ops().axpy(1.0, self.grad.data(), g->data(), g->numel());
    if (Tensor* g = GradTarget(self.inputs[1]))
      kern::ops().axpy(-1.0, self.grad.data(), g->data(), g->numel());
  });
}

Var Mul(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Mul");
  Tensor out(a->value.shape());
  kern::ops().vmul(a->value.data(), b->value.data(), out.data(), out.numel());
  return MakeNode(std::move(out), {a, b}, [](Node& self) {
    int64_t n = self.grad.numel();
    const double* g = self.grad.data();
    const double* av = self.inputs[0]->value.data();
    const double* bv = self.inputs[1]->value.data();
    if (Tensor* ga = GradTarget(self.inputs[0])) {
      double* d = ga->data();
      for (int64_t i = 0; i < n; ++i) d[i] += g[i] * bv[i];
    }
    if (Tensor* gb = GradTarget(self.inputs[1])) {
      double* d = gb->data();
      for (int64_t i = 0; i < n; ++i) d[i] += g[i] * av[i];
    }
  });
}

Var Div(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Div");
  Tensor out(a->value.shape());
  for (int64_t i = 0; i < out.numel(); ++i)
    out.at(i) = a->value.at(i) / b->value.at(i);
  return MakeNode(std::move(out), {a, b}, [](Node& self) {
    int64_t n = self.grad.numel();
    const double* g = self.grad.data();
    const double* av = self.inputs[0]->value.data();
    const double* bv = self.inputs[1]->value.data();
    if (Tensor* ga = GradTarget(self.inputs[0])) {
      double* d = ga->data();
      for (int64_t i = 0; i < n; ++i) d[i] += g[i] / bv[i];
    }
    if (Tensor* gb = GradTarget(self.inputs[1])) {
      double* d = gb->data();
      for (int64_t i = 0; i < n; ++i)
        d[i] -= g[i] * av[i] / (bv[i] * bv[i]);
    }
  });
}

Var AddScalar(const Var& a, double s) {
  Tensor out = a->value;
  for (int64_t i = 0; i < out.numel(); ++i) out.at(i) += s;
  return MakeNode(std::move(out), {a}, [](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0]))
      kern::ops().axpy(1.0, self.grad.data(), g->data(), g->numel());
  });
}

Var MulScalar(const Var& a, double s) {
  Tensor out = a->value;
  kern::ops().scale(s, out.data(), out.numel());
  return MakeNode(std::move(out), {a}, [s](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0]))
      kern::ops().axpy(s, self.grad.data(), g->data(), g->numel());
  });
}

Var Neg(const Var& a) { return MulScalar(a, -1.0); }

// ---------------------------------------------------------------------------
// Linear algebra

Var Matmul(const Var& a, const Var& b) {
  int64_t m = a->value.rows(), k = a->value.cols();
  Check(b->value.rows() == k, ErrorKind::kShape, "Matmul: inner dims ", k,
        " vs ", b->value.rows());
  int64_t n = b->value.cols();
  Tensor out({m, n});
  kern::ops().gemm_nn(m, k, n, a->value.data(), b->value.data(), out.data(),
                      false);
  return MakeNode(std::move(out), {a, b}, [m, k, n](Node& self) {
    const double* g = self.grad.data();
    if (Tensor* ga = GradTarget(self.inputs[0])) {
      // dA += G * B^T
      kern::ops().gemm_nt(m, n, k, g, self.inputs[1]->value.data(), ga->data(),
                          true);
    }
    if (Tensor* gb = GradTarget(self.inputs[1])) {
      // dB += A^T * G
      kern::ops().gemm_tn(k, m, n, self.inputs[0]->value.data(), g, gb->data(),
                          true);
    }
  });
}

Var Transpose(const Var& a) {
  int64_t m = a->value.rows(), n = a->value.cols();
  Tensor out({n, m});
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) out.at(j, i) = a->value.at(i, j);
  return MakeNode(std::move(out), {a}, [m, n](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) g->at(i, j) += self.grad.at(j, i);
    }
  });
}

Var AddRowvec(const Var& x, const Var& b) {
  int64_t m = x->value.rows(), n = x->value.cols();
  Check(b->value.numel() == n, ErrorKind::kShape, "AddRowvec: bias size ",
        b->value.numel(), " vs cols ", n);
  Tensor out({m, n});
  for (int64_t i = 0; i < m; ++i)
    kern::ops().vadd(x->value.row(i), b->value.data(), out.row(i), n);
  return MakeNode(std::move(out), {x, b}, [m, n](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0]))
      kern::ops().axpy(1.0, self.grad.data(), g->data(), g->numel());
    if (Tensor* g = GradTarget(self.inputs[1])) {
      for (int64_t i = 0; i < m; ++i)
        kern::ops().axpy(1.0, self.grad.row(i), g->data(), n);
    }
  });
}

// ---------------------------------------------------------------------------
// Nonlinearities

Var LeakyRelu(const Var& a, double slope) {
  Tensor out(a->value.shape());
  for (int64_t i = 0; i < out.numel(); ++i) {
    double v = a->value.at(i);
    out.at(i) = v > 0.0 ? v : slope * v;
  }
  return MakeNode(std::move(out), {a}, [slope](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      const double* x = self.inputs[0]->value.data();
      for (int64_t i = 0; i < g->numel(); ++i)
        g->at(i) += self.grad.at(i) * (x[i] > 0.0 ? 1.0 : slope);
    }
  });
}

Var Tanh(const Var& a) {
  Tensor out(a->value.shape());
  for (int64_t i = 0; i < out.numel(); ++i) out.at(i) = std::tanh(a->value.at(i));
  return MakeNode(std::move(out), {a}, [](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      const double* y = self.value.data();
      for (int64_t i = 0; i < g->numel(); ++i)
        g->at(i) += self.grad.at(i) * (1.0 - y[i] * y[i]);
    }
  });
}

Var Gelu(const Var& a) {
  // tanh approximation; smooth everywhere, which keeps finite-difference
  // checks well conditioned.
  constexpr double kC = 0.7978845608028654;  // sqrt(2/pi)
  constexpr double kA = 0.044715;
  Tensor out(a->value.shape());
  for (int64_t i = 0; i < out.numel(); ++i) {
    double x = a->value.at(i);
    out.at(i) = 0.5 * x * (1.0 + std::tanh(kC * (x + kA * x * x * x)));
  }
  return MakeNode(std::move(out), {a}, [](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      const double* xv = self.inputs[0]->value.data();
      for (int64_t i = 0; i < g->numel(); ++i) {
        double x = xv[i];
        double u = kC * (x + kA * x * x * x);
        double t = std::tanh(u);
        double du = kC * (1.0 + 3.0 * kA * x * x);
        double d = 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
        g->at(i) += self.grad.at(i) * d;
      }
    }
  });
}

Var Exp(const Var& a) {
  Tensor out(a->value.shape());
  for (int64_t i = 0; i < out.numel(); ++i) out.at(i) = std::exp(a->value.at(i));
  return MakeNode(std::move(out), {a}, [](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      const double* y = self.value.data();
      for (int64_t i = 0; i < g->numel(); ++i)
        g->at(i) += self.grad.at(i) * y[i];
    }
  });
}

Var Log(const Var& a) {
  Tensor out(a->value.shape());
  for (int64_t i = 0; i < out.numel(); ++i) out.at(i) = std::log(a->value.at(i));
  return MakeNode(std::move(out), {a}, [](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      const double* x = self.inputs[0]->value.data();
      for (int64_t i = 0; i < g->numel(); ++i)
        g->at(i) += self.grad.at(i) / x[i];
    }
  });
}

Var Sqrt(const Var& a) {
  Tensor out(a->value.shape());
  for (int64_t i = 0; i < out.numel(); ++i)
    out.at(i) = std::sqrt(a->value.at(i));
  return MakeNode(std::move(out), {a}, [](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      const double* y = self.value.data();
      for (int64_t i = 0; i < g->numel(); ++i)
        g->at(i) += self.grad.at(i) * 0.5 / y[i];
    }
  });
}

// ---------------------------------------------------------------------------
// Reductions

Var SumAll(const Var& a) {
  Tensor out = Tensor::Scalar(kern::ops().sum(a->value.data(), a->value.numel()));
  return MakeNode(std::move(out), {a}, [](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      double s = self.grad.at(0);
      for (int64_t i = 0; i < g->numel(); ++i) g->at(i) += s;
    }
  });
}

Var MeanAll(const Var& a) {
  Check(a->value.numel() > 0, ErrorKind::kShape, "MeanAll on empty tensor");
  return MulScalar(SumAll(a), 1.0 / static_cast<double>(a->value.numel()));
}

Var SumRows(const Var& a) {
  int64_t m = a->value.rows(), n = a->value.cols();
  Tensor out({m});
  for (int64_t i = 0; i < m; ++i)
    out.at(i) = kern::ops().sum(a->value.row(i), n);
  return MakeNode(std::move(out), {a}, [m, n](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      for (int64_t i = 0; i < m; ++i) {
        double s = self.grad.at(i);
        double* row = g->data() + i * n;
        for (int64_t j = 0; j < n; ++j) row[j] += s;
      }
    }
  });
}

Var SumCols(const Var& a) {
  int64_t m = a->value.rows(), n = a->value.cols();
  Tensor out({n});
  for (int64_t i = 0; i < m; ++i)
    kern::ops().axpy(1.0, a->value.row(i), out.data(), n);
  return MakeNode(std::move(out), {a}, [m, n](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      for (int64_t i = 0; i < m; ++i)
        kern::ops().axpy(1.0, self.grad.data(), g->data() + i * n, n);
    }
  });
}

// ---------------------------------------------------------------------------
// Softmax family

Var SoftmaxRows(const Var& a) {
  int64_t m = a->value.rows(), n = a->value.cols();
  Tensor out({m, n});
  for (int64_t i = 0; i < m; ++i) {
    const double* x = a->value.row(i);
    double mx = x[0];
    for (int64_t j = 1; j < n; ++j) mx = std::max(mx, x[j]);
    double z = 0.0;
    double* y = out.row(i);
    for (int64_t j = 0; j < n; ++j) {
      y[j] = std::exp(x[j] - mx);
      z += y[j];
    }
    for (int64_t j = 0; j < n; ++j) y[j] /= z;
  }
  return MakeNode(std::move(out), {a}, [m, n](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      for (int64_t i = 0; i < m; ++i) {
        const double* y = self.value.row(i);
        const double* gy = self.grad.row(i);
        double dot = kern::ops().dot(y, gy, n);
        double* gx = g->data() + i * n;
        for (int64_t j = 0; j < n; ++j) gx[j] += y[j] * (gy[j] - dot);
      }
    }
  });
}

Var LogSoftmaxRows(const Var& a) {
  int64_t m = a->value.rows(), n = a->value.cols();
  Tensor out({m, n});
  for (int64_t i = 0; i < m; ++i) {
    const double* x = a->value.row(i);
    double mx = x[0];
    for (int64_t j = 1; j < n; ++j) mx = std::max(mx, x[j]);
    double z = 0.0;
    for (int64_t j = 0; j < n; ++j) z += std::exp(x[j] - mx);
    double lse = mx + std::log(z);
    double* y = out.row(i);
    for (int64_t j = 0; j < n; ++j) y[j] = x[j] - lse;
  }
  return MakeNode(std::move(out), {a}, [m, n](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      for (int64_t i = 0; i < m; ++i) {
        const double* y = self.value.row(i);
        const double* gy = self.grad.row(i);
        double gsum = kern::ops().sum(gy, n);
        double* gx = g->data() + i * n;
        for (int64_t j = 0; j < n; ++j)
          gx[j] += gy[j] - std::exp(y[j]) * gsum;
      }
    }
  });
}

Var PickPerRow(const Var& a, std::vector<int64_t> idx) {
  int64_t m = a->value.rows(), n = a->value.cols();
  Check(static_cast<int64_t>(idx.size()) == m, ErrorKind::kShape,
        "PickPerRow: ", idx.size(), " indices for ", m, " rows");
  Tensor out({m});
  for (int64_t i = 0; i < m; ++i) {
    Check(idx[i] >= 0 && idx[i] < n, ErrorKind::kDomain,
          "PickPerRow: index ", idx[i], " out of [0,", n, ")");
    out.at(i) = a->value.at(i, idx[i]);
  }
  return MakeNode(std::move(out), {a}, [idx = std::move(idx), n](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      for (size_t i = 0; i < idx.size(); ++i)
        g->data()[static_cast<int64_t>(i) * n + idx[i]] += self.grad.at(i);
    }
  });
}

// ---------------------------------------------------------------------------
// Shape surgery

Var SliceRows(const Var& a, int64_t r0, int64_t r1) {
  int64_t m = a->value.rows(), n = a->value.cols();
  Check(0 <= r0 && r0 <= r1 && r1 <= m, ErrorKind::kShape, "SliceRows [", r0,
        ",", r1, ") of ", m);
  std::vector<int64_t> shape = a->value.shape();
  shape[0] = r1 - r0;
  Tensor out(shape);
  std::copy(a->value.data() + r0 * n, a->value.data() + r1 * n, out.data());
  return MakeNode(std::move(out), {a}, [r0, n](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      kern::ops().axpy(1.0, self.grad.data(), g->data() + r0 * n,
                       self.grad.numel());
    }
  });
}

Var SliceCols(const Var& a, int64_t c0, int64_t c1) {
  int64_t m = a->value.rows(), n = a->value.cols();
  Check(0 <= c0 && c0 <= c1 && c1 <= n, ErrorKind::kShape, "SliceCols [", c0,
        ",", c1, ") of ", n);
  int64_t w = c1 - c0;
  Tensor out({m, w});
  for (int64_t i = 0; i < m; ++i)
    std::copy(a->value.row(i) + c0, a->value.row(i) + c1, out.row(i));
  return MakeNode(std::move(out), {a}, [m, n, c0, w](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      for (int64_t i = 0; i < m; ++i)
        kern::ops().axpy(1.0, self.grad.row(i), g->data() + i * n + c0, w);
    }
  });
}

Var ConcatRows(const std::vector<Var>& parts) {
  Check(!parts.empty(), ErrorKind::kShape, "ConcatRows: empty list");
  int64_t n = parts[0]->value.cols();
  int64_t m = 0;
  for (const auto& p : parts) {
    Check(p->value.cols() == n, ErrorKind::kShape, "ConcatRows: col mismatch");
    m += p->value.rows();
  }
  std::vector<int64_t> shape = parts[0]->value.shape();
  shape[0] = m;
  Tensor out(shape);
  int64_t r = 0;
  for (const auto& p : parts) {
    std::copy(p->value.data(), p->value.data() + p->value.numel(),
              out.data() + r * n);
    r += p->value.rows();
  }
  return MakeNode(std::move(out), parts, [n](Node& self) {
    int64_t r = 0;
    for (auto& in : self.inputs) {
      int64_t cnt = in->value.numel();
      if (Tensor* g = GradTarget(in))
        kern::ops().axpy(1.0, self.grad.data() + r * n, g->data(), cnt);
      r += in->value.rows();
    }
  });
}

Var ConcatCols(const std::vector<Var>& parts) {
  Check(!parts.empty(), ErrorKind::kShape, "ConcatCols: empty list");
  int64_t m = parts[0]->value.rows();
  int64_t n = 0;
  for (const auto& p : parts) {
    Check(p->value.rows() == m, ErrorKind::kShape, "ConcatCols: row mismatch");
    n += p->value.cols();
  }
  Tensor out({m, n});
  int64_t c = 0;
  for (const auto& p : parts) {
    int64_t w = p->value.cols();
    for (int64_t i = 0; i < m; ++i)
      std::copy(p->value.row(i), p->value.row(i) + w, out.row(i) + c);
    c += w;
  }
  return MakeNode(std::move(out), parts, [m, n](Node& self) {
    int64_t c = 0;
    for (auto& in : self.inputs) {
      int64_t w = in->value.cols();
      if (Tensor* g = GradTarget(in)) {
        for (int64_t i = 0; i < m; ++i)
          kern::ops().axpy(1.0, self.grad.data() + i * n + c, g->data() + i * w,
                           w);
      }
      c += w;
    }
  });
}

Var Reshape(const Var& a, std::vector<int64_t> shape) {
  Tensor out(std::move(shape), std::vector<double>(
                                   a->value.data(),
                                   a->value.data() + a->value.numel()));
  return MakeNode(std::move(out), {a}, [](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0]))
      kern::ops().axpy(1.0, self.grad.data(), g->data(), g->numel());
  });
}

Var RepeatRows(const Var& a, int64_t factor) {
  Check(factor >= 1, ErrorKind::kShape, "RepeatRows: factor ", factor);
  int64_t m = a->value.rows(), n = a->value.cols();
  std::vector<int64_t> shape = a->value.shape();
  shape[0] = m * factor;
  Tensor out(shape);
  for (int64_t i = 0; i < m; ++i)
    for (int64_t r = 0; r < factor; ++r)
      std::copy(a->value.row(i), a->value.row(i) + n,
                out.data() + (i * factor + r) * n);
  return MakeNode(std::move(out), {a}, [m, n, factor](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      for (int64_t i = 0; i < m; ++i)
        for (int64_t r = 0; r < factor; ++r)
          kern::ops().axpy(1.0, self.grad.data() + (i * factor + r) * n,
                           g->data() + i * n, n);
    }
  });
}

Var AvgPoolRows(const Var& a, int64_t factor) {
  Check(factor >= 1, ErrorKind::kShape, "AvgPoolRows: factor ", factor);
  int64_t m = a->value.rows() / factor, n = a->value.cols();
  Check(m >= 1, ErrorKind::kShape, "AvgPoolRows: too few rows");
  std::vector<int64_t> shape = a->value.shape();
  shape[0] = m;
  Tensor out(shape);
  double inv = 1.0 / static_cast<double>(factor);
  for (int64_t i = 0; i < m; ++i) {
    double* dst = out.data() + i * n;
    for (int64_t r = 0; r < factor; ++r)
      kern::ops().axpy(inv, a->value.data() + (i * factor + r) * n, dst, n);
  }
  return MakeNode(std::move(out), {a}, [m, n, factor, inv](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      for (int64_t i = 0; i < m; ++i)
        for (int64_t r = 0; r < factor; ++r)
          kern::ops().axpy(inv, self.grad.data() + i * n,
                           g->data() + (i * factor + r) * n, n);
    }
  });
}

Var DownsampleRows(const Var& a, int64_t stride, int64_t offset) {
  int64_t m = a->value.rows(), n = a->value.cols();
  Check(stride >= 1 && offset >= 0 && offset < stride, ErrorKind::kShape,
        "DownsampleRows: stride ", stride, " offset ", offset);
  int64_t mo = (m - offset + stride - 1) / stride;
  std::vector<int64_t> shape = a->value.shape();
  shape[0] = mo;
  Tensor out(shape);
  for (int64_t i = 0; i < mo; ++i)
    std::copy(a->value.row(offset + i * stride),
              a->value.row(offset + i * stride) + n, out.data() + i * n);
  return MakeNode(std::move(out), {a}, [mo, n, stride, offset](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      for (int64_t i = 0; i < mo; ++i)
        kern::ops().axpy(1.0, self.grad.data() + i * n,
                         g->data() + (offset + i * stride) * n, n);
    }
  });
}

Var Detach(const Var& a) { return Constant(a->value); }

// ---------------------------------------------------------------------------
// Sequence ops

Var Embedding(const Var& table, std::vector<int64_t> ids) {
  int64_t v = table->value.rows(), d = table->value.cols();
  int64_t m = static_cast<int64_t>(ids.size());
  Tensor out({m, d});
  for (int64_t i = 0; i < m; ++i) {
    Check(ids[i] >= 0 && ids[i] < v, ErrorKind::kDomain, "Embedding: id ",
          ids[i], " out of [0,", v, ")");
    std::copy(table->value.row(ids[i]), table->value.row(ids[i]) + d,
              out.row(i));
  }
  return MakeNode(std::move(out), {table}, [ids = std::move(ids), d](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      for (size_t i = 0; i < ids.size(); ++i)
        kern::ops().axpy(1.0, self.grad.row(static_cast<int64_t>(i)),
                         g->data() + ids[i] * d, d);
    }
  });
}

Var LayerNorm(const Var& x, const Var& gamma, const Var& beta, double eps) {
  int64_t m = x->value.rows(), n = x->value.cols();
  Check(gamma->value.numel() == n && beta->value.numel() == n,
        ErrorKind::kShape, "LayerNorm: affine size mismatch");
  Tensor out({m, n});
  Tensor xhat({m, n});
  Tensor inv_sigma({m});
  for (int64_t i = 0; i < m; ++i) {
    const double* xi = x->value.row(i);
    double mu = kern::ops().sum(xi, n) / n;
    double var = 0.0;
    for (int64_t j = 0; j < n; ++j) {
      double d = xi[j] - mu;
      var += d * d;
    }
    var /= n;
    double is = 1.0 / std::sqrt(var + eps);
    inv_sigma.at(i) = is;
    double* xh = xhat.row(i);
    double* y = out.row(i);
    const double* g = gamma->value.data();
    const double* b = beta->value.data();
    for (int64_t j = 0; j < n; ++j) {
      xh[j] = (xi[j] - mu) * is;
      y[j] = g[j] * xh[j] + b[j];
    }
  }
  return MakeNode(
      std::move(out), {x, gamma, beta},
      [m, n, xhat = std::move(xhat), inv_sigma = std::move(inv_sigma)](
          Node& self) {
        const Tensor& gv = self.inputs[1]->value;
        if (Tensor* gg = GradTarget(self.inputs[1])) {
          for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < n; ++j)
              gg->at(j) += self.grad.at(i, j) * xhat.at(i, j);
        }
        if (Tensor* gb = GradTarget(self.inputs[2])) {
          for (int64_t i = 0; i < m; ++i)
            kern::ops().axpy(1.0, self.grad.row(i), gb->data(), n);
        }
        if (Tensor* gx = GradTarget(self.inputs[0])) {
          std::vector<double> dxhat(n);
          for (int64_t i = 0; i < m; ++i) {
            const double* gy = self.grad.row(i);
            const double* xh = xhat.row(i);
            double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
            for (int64_t j = 0; j < n; ++j) {
              dxhat[j] = gy[j] * gv.at(j);
              mean_dxhat += dxhat[j];
              mean_dxhat_xhat += dxhat[j] * xh[j];
            }
            mean_dxhat /= n;
            mean_dxhat_xhat /= n;
            double is = inv_sigma.at(i);
            double* gxi = gx->data() + i * n;
            for (int64_t j = 0; j < n; ++j)
              gxi[j] += is * (dxhat[j] - mean_dxhat - xh[j] * mean_dxhat_xhat);
          }
        }
      });
}

// ---------------------------------------------------------------------------
// Scalar losses

Var Mse(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Mse");
  int64_t n = a->value.numel();
  Check(n > 0, ErrorKind::kShape, "Mse on empty tensors");
  double acc = kern::ops().sqdist(a->value.data(), b->value.data(), n);
  return MakeNode(Tensor::Scalar(acc / n), {a, b}, [n](Node& self) {
    double s = self.grad.at(0) * 2.0 / n;
    const double* av = self.inputs[0]->value.data();
    const double* bv = self.inputs[1]->value.data();
    if (Tensor* g = GradTarget(self.inputs[0])) {
      for (int64_t i = 0; i < n; ++i) g->at(i) += s * (av[i] - bv[i]);
    }
    if (Tensor* g = GradTarget(self.inputs[1])) {
      for (int64_t i = 0; i < n; ++i) g->at(i) -= s * (av[i] - bv[i]);
    }
  });
}

Var L1(const Var& a, const Var& b) {
  CheckSameShape(a, b, "L1");
  int64_t n = a->value.numel();
  Check(n > 0, ErrorKind::kShape, "L1 on empty tensors");
  double acc = 0.0;
  for (int64_t i = 0; i < n; ++i)
    acc += std::abs(a->value.at(i) - b->value.at(i));
  return MakeNode(Tensor::Scalar(acc / n), {a, b}, [n](Node& self) {
    double s = self.grad.at(0) / n;
    const double* av = self.inputs[0]->value.data();
    const double* bv = self.inputs[1]->value.data();
    if (Tensor* g = GradTarget(self.inputs[0])) {
      for (int64_t i = 0; i < n; ++i) {
        double d = av[i] - bv[i];
        g->at(i) += s * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0));
      }
    }
    if (Tensor* g = GradTarget(self.inputs[1])) {
      for (int64_t i = 0; i < n; ++i) {
        double d = av[i] - bv[i];
        g->at(i) -= s * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0));
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Audio framing

Var ReflectPad(const Var& x, int64_t left, int64_t right) {
  int64_t n = x->value.numel();
  Check(x->value.shape().size() == 1, ErrorKind::kShape,
        "ReflectPad expects rank-1 signal");
  Check(left < n && right < n, ErrorKind::kShape,
        "ReflectPad: pad exceeds signal length");
  Tensor out({n + left + right});
  std::vector<int64_t> src(n + left + right);
  for (int64_t i = 0; i < left; ++i) src[i] = left - i;
  for (int64_t i = 0; i < n; ++i) src[left + i] = i;
  for (int64_t i = 0; i < right; ++i) src[left + n + i] = n - 2 - i;
  for (int64_t i = 0; i < out.numel(); ++i) out.at(i) = x->value.at(src[i]);
  return MakeNode(std::move(out), {x}, [src = std::move(src)](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      for (size_t i = 0; i < src.size(); ++i)
        g->at(src[i]) += self.grad.at(static_cast<int64_t>(i));
    }
  });
}

Var FrameRows(const Var& x, int64_t window, int64_t hop) {
  Check(x->value.shape().size() == 1, ErrorKind::kShape,
        "FrameRows expects rank-1 signal");
  int64_t n = x->value.numel();
  Check(n >= window, ErrorKind::kShape, "FrameRows: signal ", n,
        " shorter than window ", window);
  int64_t frames = (n - window) / hop + 1;
  Tensor out({frames, window});
  for (int64_t f = 0; f < frames; ++f)
    std::copy(x->value.data() + f * hop, x->value.data() + f * hop + window,
              out.row(f));
  return MakeNode(std::move(out), {x}, [frames, window, hop](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0])) {
      for (int64_t f = 0; f < frames; ++f)
        kern::ops().axpy(1.0, self.grad.row(f), g->data() + f * hop, window);
    }
  });
}

// ---------------------------------------------------------------------------
// Convolutions

namespace {
// Gather [To, Cin*K] patch matrix for conv1d over a [T, Cin] input.
Tensor Im2Col(const Tensor& x, int64_t kernel, int64_t stride, int64_t pad,
              int64_t dilation, int64_t to) {
  int64_t t_in = x.rows(), cin = x.cols();
  Tensor m({to, cin * kernel});
  for (int64_t t = 0; t < to; ++t) {
    double* row = m.row(t);
    for (int64_t k = 0; k < kernel; ++k) {
      int64_t src = t * stride + k * dilation - pad;
      if (src < 0 || src >= t_in) continue;
      const double* xr = x.row(src);
      for (int64_t c = 0; c < cin; ++c) row[c * kernel + k] = xr[c];
    }
  }
  return m;
}
}  // namespace

Var Conv1d(const Var& x, const Var& w, const Var& b, int64_t kernel,
           int64_t stride, int64_t pad, int64_t dilation) {
  int64_t t_in = x->value.rows(), cin = x->value.cols();
  int64_t cout = w->value.rows();
  Check(w->value.cols() == cin * kernel, ErrorKind::kShape,
        "Conv1d: weight [", cout, ",", w->value.cols(), "] vs cin*k ",
        cin * kernel);
  Check(b->value.numel() == cout, ErrorKind::kShape, "Conv1d: bias size");
  int64_t span = dilation * (kernel - 1) + 1;
  int64_t to = (t_in + 2 * pad - span) / stride + 1;
  Check(to >= 1, ErrorKind::kShape, "Conv1d: input of ", t_in,
        " frames too short for kernel span ", span);

  Tensor patches = Im2Col(x->value, kernel, stride, pad, dilation, to);
  Tensor out({to, cout});
  kern::ops().gemm_nt(to, cin * kernel, cout, patches.data(), w->value.data(),
                      out.data(), false);
  for (int64_t t = 0; t < to; ++t)
    kern::ops().vadd(out.row(t), b->value.data(), out.row(t), cout);

  return MakeNode(
      std::move(out), {x, w, b},
      [patches = std::move(patches), kernel, stride, pad, dilation, to, t_in,
       cin, cout](Node& self) {
        const double* g = self.grad.data();
        if (Tensor* gw = GradTarget(self.inputs[1])) {
          // dW += G^T * patches : [cout, to] x [to, cin*k]
          kern::ops().gemm_tn(cout, to, cin * kernel, g, patches.data(),
                              gw->data(), true);
        }
        if (Tensor* gb = GradTarget(self.inputs[2])) {
          for (int64_t t = 0; t < to; ++t)
            kern::ops().axpy(1.0, g + t * cout, gb->data(), cout);
        }
        if (Tensor* gx = GradTarget(self.inputs[0])) {
          Tensor dpatch({to, cin * kernel});
          kern::ops().gemm_nn(to, cout, cin * kernel, g,
                              self.inputs[1]->value.data(), dpatch.data(),
                              false);
          for (int64_t t = 0; t < to; ++t) {
            const double* row = dpatch.row(t);
            for (int64_t k = 0; k < kernel; ++k) {
              int64_t src = t * stride + k * dilation - pad;
              if (src < 0 || src >= t_in) continue;
              double* xr = gx->data() + src * cin;
              for (int64_t c = 0; c < cin; ++c) xr[c] += row[c * kernel + k];
            }
          }
        }
      });
}

Var ConvTranspose1d(const Var& x, const Var& w, const Var& b, int64_t kernel,
                    int64_t stride, int64_t pad) {
  int64_t t_in = x->value.rows(), cin = x->value.cols();
  Check(w->value.rows() == cin, ErrorKind::kShape,
        "ConvTranspose1d: weight rows ", w->value.rows(), " vs cin ", cin);
  int64_t cout = w->value.cols() / kernel;
  Check(cout * kernel == w->value.cols(), ErrorKind::kShape,
        "ConvTranspose1d: weight cols not divisible by kernel");
  Check(b->value.numel() == cout, ErrorKind::kShape, "ConvTranspose1d: bias");
  int64_t to = (t_in - 1) * stride + kernel - 2 * pad;
  Check(to >= 1, ErrorKind::kShape, "ConvTranspose1d: degenerate output");

  // P[t, co*K + k] = sum_ci x[t,ci] w[ci, co*K+k]
  Tensor p({t_in, cout * kernel});
  kern::ops().gemm_nn(t_in, cin, cout * kernel, x->value.data(),
                      w->value.data(), p.data(), false);
  Tensor out({to, cout});
  for (int64_t t = 0; t < t_in; ++t) {
    const double* prow = p.row(t);
    for (int64_t k = 0; k < kernel; ++k) {
      int64_t dst = t * stride + k - pad;
      if (dst < 0 || dst >= to) continue;
      double* orow = out.row(dst);
      for (int64_t co = 0; co < cout; ++co) orow[co] += prow[co * kernel + k];
    }
  }
  for (int64_t t = 0; t < to; ++t)
    kern::ops().vadd(out.row(t), b->value.data(), out.row(t), cout);

  return MakeNode(
      std::move(out), {x, w, b},
      [kernel, stride, pad, to, t_in, cin, cout](Node& self) {
        const Tensor& gy = self.grad;
        // dP[t, co*K+k] = gy[t*stride + k - pad, co]
        Tensor dp({t_in, cout * kernel});
        for (int64_t t = 0; t < t_in; ++t) {
          double* dprow = dp.row(t);
          for (int64_t k = 0; k < kernel; ++k) {
            int64_t dst = t * stride + k - pad;
            if (dst < 0 || dst >= to) continue;
            const double* grow = gy.row(dst);
            for (int64_t co = 0; co < cout; ++co)
              dprow[co * kernel + k] = grow[co];
          }
        }
        if (Tensor* gx = GradTarget(self.inputs[0])) {
          // dX += dP * W^T : [t_in, cout*k] x [cin, cout*k]^T
          kern::ops().gemm_nt(t_in, cout * kernel, cin, dp.data(),
                              self.inputs[1]->value.data(), gx->data(), true);
        }
        if (Tensor* gw = GradTarget(self.inputs[1])) {
          // dW += X^T * dP : [cin, t_in] x [t_in, cout*k]
          kern::ops().gemm_tn(cin, t_in, cout * kernel,
                              self.inputs[0]->value.data(), dp.data(),
                              gw->data(), true);
        }
        if (Tensor* gb = GradTarget(self.inputs[2])) {
          for (int64_t t = 0; t < to; ++t)
            kern::ops().axpy(1.0, gy.row(t), gb->data(), cout);
        }
      });
}

Var StraightThroughLookup(const Var& latents, const Tensor& entries,
                          const std::vector<int>& indices) {
  int64_t t = latents->value.rows(), d = latents->value.cols();
  Check(entries.cols() == d, ErrorKind::kShape,
        "StraightThroughLookup: dim mismatch");
  Check(static_cast<int64_t>(indices.size()) == t, ErrorKind::kShape,
        "StraightThroughLookup: index count");
  Tensor out({t, d});
  for (int64_t i = 0; i < t; ++i) {
    Check(indices[i] >= 0 && indices[i] < entries.rows(), ErrorKind::kDomain,
          "StraightThroughLookup: index out of codebook");
    std::copy(entries.row(indices[i]), entries.row(indices[i]) + d,
              out.row(i));
  }
  return MakeNode(std::move(out), {latents}, [](Node& self) {
    if (Tensor* g = GradTarget(self.inputs[0]))
      kern::ops().axpy(1.0, self.grad.data(), g->data(), g->numel());
  });
}

}  // namespace ag
}  // namespace lmlc
