// optim.h

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

#ifndef LMLC_OPTIM_H_
#define LMLC_OPTIM_H_

#include <map>
#include <string>

#include "lmlc/nn.h"

namespace lmlc {
namespace optim {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled; 0 gives plain Adam
};

// Adam with decoupled weight decay.  Moments are tracked per parameter name
// so the state survives checkpointing and parameter re-collection.
class Adam {
 public:
  Adam(nn::ParamMap params, AdamConfig cfg);

  // Applies one update from the accumulated grads, then leaves grads intact
  // (call ZeroGrads separately so loss code can inspect them).
  void Step(double lr_override = -1.0);
  void ZeroGrads() { params_.ZeroGrads(); }

  // Rescales all grads so their global l2 norm is at most max_norm.
  // Returns the pre-clip norm.
  double ClipGradNorm(double max_norm);

  const nn::ParamMap& params() const { return params_; }
  const AdamConfig& config() const { return cfg_; }
  int64_t step_count() const { return step_; }

  // Checkpoint glue: moment tensors plus step counter keyed by name.
  std::map<std::string, Tensor> ExportState() const;
  void ImportState(const std::map<std::string, Tensor>& state);

 private:
  nn::ParamMap params_;
  AdamConfig cfg_;
  int64_t step_ = 0;
  std::vector<Tensor> m_, v_;
};

}  // namespace optim
}  // namespace lmlc

#endif  // LMLC_OPTIM_H_
