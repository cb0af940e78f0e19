#pragma once

#include <string>

#include <json.hpp>

#include "storycut/ban.hpp"
#include "storycut/eval.hpp"
#include "storycut/pipeline.hpp"
#include "storycut/proposal_head.hpp"
#include "storycut/sampling.hpp"
#include "storycut/synth.hpp"
#include "storycut/training.hpp"

namespace storycut {

// Everything a run needs, serializable as one JSON document. model configs
// leave feature_dim at 0 ("take it from the data").
struct RunConfig {
  std::uint64_t seed = 0;  // master seed, fanned out to the stage seeds
  SynthConfig synth;
  BanConfig ban{0, 64};
  HeadConfig head{0, 32, 5, true};
  TrainConfig train_ban;
  TrainConfig train_head;
  SamplingPlan sampling;
  PipelineConfig pipeline;
  EvalConfig eval;
  // Proposal labeling band: max IoU > hi -> Positive, < lo -> Negative.
  double label_iou_hi = 0.7;
  double label_iou_lo = 0.3;
  // Head training pool: pad the model proposals, and optionally mix in a few
  // sliding-window candidates per video so both classes are populated.
  bool head_train_augment = true;
  bool head_train_sw_mix = true;
  index_t head_train_sw_per_video = 16;

  static RunConfig desk_easy();
  static RunConfig desk_hard();

  void set_master_seed(std::uint64_t s);
  void validate() const;
};

nlohmann::json run_config_to_json(const RunConfig& cfg);
// Starts from desk_easy (or the named "preset") and overrides present keys;
// unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j);

}  // namespace storycut
