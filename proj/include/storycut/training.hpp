#pragma once

#include <cstdint>
#include <vector>

#include "storycut/ban.hpp"
#include "storycut/dataset.hpp"
#include "storycut/param_store.hpp"
#include "storycut/proposal_head.hpp"
#include "storycut/sampling.hpp"
#include "storycut/supervision.hpp"

namespace storycut {

struct TrainConfig {
  double learning_rate = 0.001;
  double momentum = 0.9;
  double weight_decay = 0.0005;
  index_t epochs = 70;
  index_t batch_size = 256;
  double lambda = 5.0;  // regression weight in the multi-task loss
  std::uint64_t seed = 0;

  static TrainConfig ban_defaults();   // wd 0.0005, 70 epochs
  static TrainConfig head_defaults();  // wd 0.0008, 40 epochs
  void validate() const;
  OptimConfig optim() const { return OptimConfig{learning_rate, momentum, weight_decay}; }
};

struct EpochLoss {
  index_t epoch = 0;
  double loss = 0.0;
  double cls_loss = 0.0;
  double reg_loss = 0.0;
};

// CSV with header "epoch,loss,cls_loss,reg_loss", one row per epoch.
std::string loss_log_csv(const std::vector<EpochLoss>& log);

// Trains the frame scorer with balanced 4-category sampling and 4-way
// cross-entropy on minibatch-mean gradients. Deterministic under cfg.seed.
BanModel train_ban(const std::vector<FrameFeatureSequence>& features,
                   const std::vector<VideoAnnotation>& annotations, const BanConfig& model_cfg,
                   const TrainConfig& cfg, const SamplingPlan& plan,
                   std::vector<EpochLoss>* log = nullptr);

// Trains the proposal head on pre-labeled proposals (1:3 positive:negative
// sampling) with the classification + lambda * regression loss.
HeadModel train_proposal_head(const std::vector<FrameFeatureSequence>& features,
                              const std::vector<std::vector<LabeledProposal>>& labeled,
                              const HeadConfig& model_cfg, const TrainConfig& cfg,
                              const SamplingPlan& plan, std::vector<EpochLoss>* log = nullptr);

}  // namespace storycut
