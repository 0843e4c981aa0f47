// optim.cpp

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

#include "lmlc/optim.h"

#include <cmath>

#include "lmlc/kernels.h"

namespace lmlc {
namespace optim {

Adam::Adam(nn::ParamMap params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& [name, p] : params_.items()) {
    m_.emplace_back(Tensor(p->value.shape()));
    v_.emplace_back(Tensor(p->value.shape()));
  }
}

void Adam::Step(double lr_override) {
  double lr = lr_override >= 0.0 ? lr_override : cfg_.lr;
  ++step_;
  double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  size_t i = 0;
  for (const auto& [name, p] : params_.items()) {
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    ++i;
    if (p->grad.numel() == 0) continue;
    double* pv = p->value.data();
    const double* g = p->grad.data();
    for (int64_t j = 0; j < p->value.numel(); ++j) {
      m.at(j) = cfg_.beta1 * m.at(j) + (1.0 - cfg_.beta1) * g[j];
      v.at(j) = cfg_.beta2 * v.at(j) + (1.0 - cfg_.beta2) * g[j] * g[j];
      double mhat = m.at(j) / bc1;
      double vhat = v.at(j) / bc2;
      pv[j] -= lr * (mhat / (std::sqrt(vhat) + cfg_.eps) +
                     cfg_.weight_decay * pv[j]);
    }
  }
}

double Adam::ClipGradNorm(double max_norm) {
  double sq = 0.0;
  for (const auto& [name, p] : params_.items()) {
    if (p->grad.numel() == 0) continue;
    sq += kern::ops().dot(p->grad.data(), p->grad.data(), p->grad.numel());
  }
  double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    double s = max_norm / norm;
    for (const auto& [name, p] : params_.items()) {
      if (p->grad.numel() == 0) continue;
      kern::ops().scale(s, p->grad.data(), p->grad.numel());
    }
  }
  return norm;
}

std::map<std::string, Tensor> Adam::ExportState() const {
  std::map<std::string, Tensor> out;
  size_t i = 0;
  for (const auto& [name, p] : params_.items()) {
    out["m." + name] = m_[i];
    out["v." + name] = v_[i];
    ++i;
  }
  Tensor step({1});
  step.at(0) = static_cast<double>(step_);
  out["step"] = step;
  return out;
}

void Adam::ImportState(const std::map<std::string, Tensor>& state) {
  size_t i = 0;
  for (const auto& [name, p] : params_.items()) {
    auto mi = state.find("m." + name);
    auto vi = state.find("v." + name);
    Check(mi != state.end() && vi != state.end(), ErrorKind::kState,
          "optimizer state missing moments for ", name);
    Check(mi->second.numel() == p->value.numel(), ErrorKind::kShape,
          "optimizer state size mismatch for ", name);
    m_[i] = mi->second;
    v_[i] = vi->second;
    ++i;
  }
  auto si = state.find("step");
  Check(si != state.end(), ErrorKind::kState, "optimizer state missing step");
  step_ = static_cast<int64_t>(si->second.at(0));
}

}  // namespace optim
}  // namespace lmlc
