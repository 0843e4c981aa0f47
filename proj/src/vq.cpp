// vq.cpp

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

#include "lmlc/vq.h"

#include <algorithm>
#include <cmath>

#include "lmlc/kernels.h"

namespace lmlc {
namespace vq {

Codebook InitCodebook(int64_t k, int64_t d, Rng& rng) {
  Check(k >= 2, ErrorKind::kDomain, "codebook needs at least 2 entries");
  Check(d >= 1, ErrorKind::kDomain, "bad codeword dim");
  Codebook cb;
  cb.entries = Tensor({k, d});
  for (int64_t i = 0; i < cb.entries.numel(); ++i)
    cb.entries.at(i) = rng.Gaussian();
  cb.ema_sum = cb.entries;
  cb.ema_cluster = Tensor::Full({k}, 1.0);
  cb.usage.assign(k, 0);
  return cb;
}

std::vector<int> NearestIndices(const Codebook& cb, const Tensor& latents) {
  Check(latents.shape().size() == 2 && latents.cols() == cb.dim(), ErrorKind::kShape,
        "latent dim ", latents.cols(), " vs codebook dim ", cb.dim());
  const kern::Ops& ops = kern::ops();
  int64_t t = latents.rows();
  int64_t k = cb.k();
  std::vector<int> out(t);
  for (int64_t i = 0; i < t; ++i) {
    const double* x = latents.row(i);
    int best = 0;
    double best_d = ops.sqdist(x, cb.entries.row(0), cb.dim());
    for (int64_t j = 1; j < k; ++j) {
      double dist = ops.sqdist(x, cb.entries.row(j), cb.dim());
      if (dist < best_d) {
        best_d = dist;
        best = static_cast<int>(j);
      }
    }
    out[i] = best;
  }
  return out;
}

Tensor Lookup(const Codebook& cb, const std::vector<int>& indices) {
  Tensor out({static_cast<int64_t>(indices.size()), cb.dim()});
  for (size_t i = 0; i < indices.size(); ++i) {
    Check(indices[i] >= 0 && indices[i] < cb.k(), ErrorKind::kDomain,
          "index ", indices[i], " out of range for codebook of ", cb.k());
    std::copy(cb.entries.row(indices[i]), cb.entries.row(indices[i]) + cb.dim(),
              out.row(static_cast<int64_t>(i)));
  }
  return out;
}

QuantizeResult Quantize(const Codebook& cb, const ag::Var& latents) {
  QuantizeResult r;
  r.indices = NearestIndices(cb, latents->value);
  Tensor codewords = Lookup(cb, r.indices);
  r.commitment = ag::Mse(latents, ag::Constant(codewords));
  r.quantized = ag::StraightThroughLookup(latents, cb.entries, r.indices);
  return r;
}

std::vector<int64_t> CountUsage(const std::vector<int>& indices, int64_t k) {
  std::vector<int64_t> usage(k, 0);
  for (int idx : indices) {
    Check(idx >= 0 && idx < k, ErrorKind::kDomain, "index out of range");
    ++usage[idx];
  }
  return usage;
}

void EmaUpdate(Codebook& cb, const Tensor& latents,
               const std::vector<int>& indices, double gamma) {
  Check(gamma >= 0.0 && gamma <= 1.0, ErrorKind::kDomain, "decay not in [0,1]");
  Check(latents.shape().size() == 2 && latents.cols() == cb.dim(), ErrorKind::kShape,
        "latent dim mismatch");
  Check(static_cast<int64_t>(indices.size()) == latents.rows(),
        ErrorKind::kShape, "one index per latent row required");
  int64_t k = cb.k();
  int64_t d = cb.dim();

  std::vector<double> count(k, 0.0);
  Tensor sum = Tensor::Zeros({k, d});
  for (size_t i = 0; i < indices.size(); ++i) {
    int idx = indices[i];
    Check(idx >= 0 && idx < k, ErrorKind::kDomain, "index out of range");
    count[idx] += 1.0;
    const double* x = latents.row(static_cast<int64_t>(i));
    double* s = sum.row(idx);
    for (int64_t j = 0; j < d; ++j) s[j] += x[j];
  }

  for (int64_t c = 0; c < k; ++c) {
    cb.ema_cluster.at(c) = gamma * cb.ema_cluster.at(c) + (1.0 - gamma) * count[c];
    double* es = cb.ema_sum.row(c);
    const double* bs = sum.row(c);
    for (int64_t j = 0; j < d; ++j)
      es[j] = gamma * es[j] + (1.0 - gamma) * bs[j];
    double denom = std::max(cb.ema_cluster.at(c), cb.eps);
    double* e = cb.entries.row(c);
    for (int64_t j = 0; j < d; ++j) {
      e[j] = es[j] / denom;
      Check(std::isfinite(e[j]), ErrorKind::kDomain, "entry went non-finite");
    }
  }
}

void ReinitDeadCodes(Codebook& cb, const std::vector<int64_t>& usage,
                     const Tensor& latents, Rng& rng, double noise) {
  Check(static_cast<int64_t>(usage.size()) == cb.k(), ErrorKind::kShape,
        "usage count length mismatch");
  Check(latents.rows() >= 1 && latents.cols() == cb.dim(), ErrorKind::kShape,
        "need at least one latent of matching dim");
  int64_t d = cb.dim();
  for (int64_t c = 0; c < cb.k(); ++c) {
    if (usage[c] > 0) continue;
    const double* src = latents.row(rng.UniformInt(latents.rows()));
    double* e = cb.entries.row(c);
    double* s = cb.ema_sum.row(c);
    for (int64_t j = 0; j < d; ++j) {
      e[j] = src[j] + noise * rng.Gaussian();
      s[j] = e[j];
    }
    cb.ema_cluster.at(c) = 1.0;
  }
}

void PutCodebook(Checkpoint& c, const std::string& prefix, const Codebook& cb) {
  c.tensors[prefix + ".entries"] = cb.entries;
  c.tensors[prefix + ".ema_cluster"] = cb.ema_cluster;
  c.tensors[prefix + ".ema_sum"] = cb.ema_sum;
}

void GetCodebook(const Checkpoint& c, const std::string& prefix, Codebook& cb) {
  auto fetch = [&](const std::string& name) -> const Tensor& {
    auto it = c.tensors.find(prefix + "." + name);
    Check(it != c.tensors.end(), ErrorKind::kFormat,
          "checkpoint missing tensor: ", prefix, ".", name);
    return it->second;
  };
  cb.entries = fetch("entries");
  cb.ema_cluster = fetch("ema_cluster");
  cb.ema_sum = fetch("ema_sum");
  Check(cb.entries.shape().size() == 2 && cb.ema_sum.same_shape(cb.entries) &&
            cb.ema_cluster.numel() == cb.entries.rows(),
        ErrorKind::kShape, "inconsistent codebook tensors under ", prefix);
  cb.usage.assign(cb.k(), 0);
}

uint64_t HashCodebook(const Codebook& cb) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix(HashTensor(cb.entries));
  mix(HashTensor(cb.ema_cluster));
  mix(HashTensor(cb.ema_sum));
  return h;
}

}  // namespace vq
}  // namespace lmlc
