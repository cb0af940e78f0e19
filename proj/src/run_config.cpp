#include "storycut/run_config.hpp"

#include <set>

#include "storycut/errors.hpp"

namespace storycut {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw config_error("config: " + where + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) throw config_error("config: unknown key \"" + key + "\" in " + where);
}

template <typename T>
void maybe(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw config_error("config: bad value for " + where + "." + key + ": " + e.what());
  }
}

void load_synth(const json& j, SynthConfig& c) {
  check_keys(j, "synth",
             {"num_videos", "frames_mean", "stories_per_video_mean", "story_len_mean",
              "feature_dim", "signal_strength", "boundary_spike", "audio_channels", "seed"});
  maybe(j, "num_videos", c.num_videos, "synth");
  maybe(j, "frames_mean", c.frames_mean, "synth");
  maybe(j, "stories_per_video_mean", c.stories_per_video_mean, "synth");
  maybe(j, "story_len_mean", c.story_len_mean, "synth");
  maybe(j, "feature_dim", c.feature_dim, "synth");
  maybe(j, "signal_strength", c.signal_strength, "synth");
  maybe(j, "boundary_spike", c.boundary_spike, "synth");
  maybe(j, "audio_channels", c.audio_channels, "synth");
  maybe(j, "seed", c.seed, "synth");
}

void load_train(const json& j, TrainConfig& c, const std::string& where) {
  check_keys(j, where,
             {"learning_rate", "momentum", "weight_decay", "epochs", "batch_size", "lambda",
              "seed"});
  maybe(j, "learning_rate", c.learning_rate, where);
  maybe(j, "momentum", c.momentum, where);
  maybe(j, "weight_decay", c.weight_decay, where);
  maybe(j, "epochs", c.epochs, where);
  maybe(j, "batch_size", c.batch_size, where);
  maybe(j, "lambda", c.lambda, where);
  maybe(j, "seed", c.seed, where);
}

json train_to_json(const TrainConfig& c) {
  return json{{"learning_rate", c.learning_rate}, {"momentum", c.momentum},
              {"weight_decay", c.weight_decay},   {"epochs", c.epochs},
              {"batch_size", c.batch_size},       {"lambda", c.lambda},
              {"seed", c.seed}};
}

}  // namespace

RunConfig RunConfig::desk_easy() {
  RunConfig cfg;
  cfg.synth.num_videos = 50;
  cfg.synth.frames_mean = 600;
  cfg.synth.stories_per_video_mean = 5.0;
  cfg.synth.story_len_mean = 60;
  cfg.synth.feature_dim = 32;
  cfg.synth.signal_strength = 3.0;
  cfg.synth.boundary_spike = 4.0;
  cfg.synth.audio_channels = 8;
  cfg.train_ban = TrainConfig::ban_defaults();
  cfg.train_ban.epochs = 8;  // desk scale; full-scale training runs 70
  cfg.train_head = TrainConfig::head_defaults();
  // Desk-scale head schedule: the pool holds only a few hundred usable
  // proposals, so an epoch is a handful of SGD steps; a higher rate and more
  // epochs substitute for the full-scale 40-epoch run over a large corpus.
  cfg.train_head.epochs = 60;
  cfg.train_head.learning_rate = 0.01;
  cfg.head.num_layers = 3;
  // A rho-widened exact proposal has IoU 1/(1+2*rho) against its story; keep
  // the widening and the positive-label band compatible so typical good
  // proposals actually train the classifier and regressor.
  cfg.pipeline.augment_rho = 0.1;
  cfg.label_iou_hi = 0.6;
  return cfg;
}

RunConfig RunConfig::desk_hard() {
  RunConfig cfg = desk_easy();
  cfg.synth.signal_strength = 0.5;
  cfg.synth.boundary_spike = 2.0;
  // Head schedule re-calibrated for the hard setting the same way the easy
  // preset's was (held-out mAP of the default head configuration; equal means
  // resolve to the gentlest rate): the easy preset's hotter rate buys nothing
  // here and trains less stably.
  cfg.train_head.learning_rate = 0.003;
  return cfg;
}

void RunConfig::set_master_seed(std::uint64_t s) {
  seed = s;
  synth.seed = s;
  train_ban.seed = s;
  train_head.seed = s;
}

void RunConfig::validate() const {
  synth.validate();
  if (ban.hidden < 1) throw config_error("config: ban.hidden must be positive");
  if (head.hidden < 1 || head.num_layers < 1)
    throw config_error("config: head.hidden and head.num_layers must be positive");
  train_ban.validate();
  train_head.validate();
  sampling.validate();
  pipeline.validate();
  eval.validate();
  if (!(label_iou_lo >= 0.0 && label_iou_lo <= label_iou_hi && label_iou_hi <= 1.0))
    throw config_error("config: labeling band needs 0 <= iou_lo <= iou_hi <= 1");
  if (head_train_sw_per_video < 0)
    throw config_error("config: head_train.sw_per_video must be nonnegative");
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["synth"] = json{{"num_videos", cfg.synth.num_videos},
                    {"frames_mean", cfg.synth.frames_mean},
                    {"stories_per_video_mean", cfg.synth.stories_per_video_mean},
                    {"story_len_mean", cfg.synth.story_len_mean},
                    {"feature_dim", cfg.synth.feature_dim},
                    {"signal_strength", cfg.synth.signal_strength},
                    {"boundary_spike", cfg.synth.boundary_spike},
                    {"audio_channels", cfg.synth.audio_channels},
                    {"seed", cfg.synth.seed}};
  j["ban"] = json{{"hidden", cfg.ban.hidden}};
  j["head"] = json{{"hidden", cfg.head.hidden},
                   {"num_layers", cfg.head.num_layers},
                   {"fast_forward", cfg.head.fast_forward}};
  j["train_ban"] = train_to_json(cfg.train_ban);
  j["train_head"] = train_to_json(cfg.train_head);
  j["sampling"] = json{{"ban_ratio", cfg.sampling.ban_ratio},
                       {"head_pos_neg", cfg.sampling.head_pos_neg}};
  j["pipeline"] = json{{"merge_max_gap", cfg.pipeline.merge_max_gap},
                       {"proposal_nms_iou", cfg.pipeline.proposal_nms_iou},
                       {"detection_nms_iou", cfg.pipeline.detection_nms_iou},
                       {"augment_rho", cfg.pipeline.augment_rho},
                       {"boundary_gating", cfg.pipeline.boundary_gating},
                       {"sw_scales", cfg.pipeline.sw_scales},
                       {"sw_stride_fraction", cfg.pipeline.sw_stride_fraction}};
  j["eval"] = json{{"map_thresholds", cfg.eval.map_thresholds},
                   {"avg_map_grid", cfg.eval.avg_map_grid},
                   {"an_grid", cfg.eval.an_grid}};
  j["labeling"] = json{{"iou_hi", cfg.label_iou_hi}, {"iou_lo", cfg.label_iou_lo}};
  j["head_train"] = json{{"augment", cfg.head_train_augment},
                         {"sw_mix", cfg.head_train_sw_mix},
                         {"sw_per_video", cfg.head_train_sw_per_video}};
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  check_keys(j, "top level",
             {"preset", "seed", "synth", "ban", "head", "train_ban", "train_head", "sampling",
              "pipeline", "eval", "labeling", "head_train"});

  std::string preset = "desk_easy";
  maybe(j, "preset", preset, "top level");
  RunConfig cfg;
  if (preset == "desk_easy") {
    cfg = RunConfig::desk_easy();
  } else if (preset == "desk_hard") {
    cfg = RunConfig::desk_hard();
  } else {
    throw config_error("config: unknown preset \"" + preset + "\"");
  }

  if (j.contains("seed")) {
    std::uint64_t s = cfg.seed;
    maybe(j, "seed", s, "top level");
    cfg.set_master_seed(s);
  }
  if (j.contains("synth")) load_synth(j.at("synth"), cfg.synth);
  if (j.contains("ban")) {
    check_keys(j.at("ban"), "ban", {"hidden"});
    maybe(j.at("ban"), "hidden", cfg.ban.hidden, "ban");
  }
  if (j.contains("head")) {
    check_keys(j.at("head"), "head", {"hidden", "num_layers", "fast_forward"});
    maybe(j.at("head"), "hidden", cfg.head.hidden, "head");
    maybe(j.at("head"), "num_layers", cfg.head.num_layers, "head");
    maybe(j.at("head"), "fast_forward", cfg.head.fast_forward, "head");
  }
  if (j.contains("train_ban")) load_train(j.at("train_ban"), cfg.train_ban, "train_ban");
  if (j.contains("train_head")) load_train(j.at("train_head"), cfg.train_head, "train_head");
  if (j.contains("sampling")) {
    const json& js = j.at("sampling");
    check_keys(js, "sampling", {"ban_ratio", "head_pos_neg"});
    maybe(js, "ban_ratio", cfg.sampling.ban_ratio, "sampling");
    maybe(js, "head_pos_neg", cfg.sampling.head_pos_neg, "sampling");
  }
  if (j.contains("pipeline")) {
    const json& jp = j.at("pipeline");
    check_keys(jp, "pipeline",
               {"merge_max_gap", "proposal_nms_iou", "detection_nms_iou", "augment_rho",
                "boundary_gating", "sw_scales", "sw_stride_fraction"});
    maybe(jp, "merge_max_gap", cfg.pipeline.merge_max_gap, "pipeline");
    maybe(jp, "proposal_nms_iou", cfg.pipeline.proposal_nms_iou, "pipeline");
    maybe(jp, "detection_nms_iou", cfg.pipeline.detection_nms_iou, "pipeline");
    maybe(jp, "augment_rho", cfg.pipeline.augment_rho, "pipeline");
    maybe(jp, "boundary_gating", cfg.pipeline.boundary_gating, "pipeline");
    maybe(jp, "sw_scales", cfg.pipeline.sw_scales, "pipeline");
    maybe(jp, "sw_stride_fraction", cfg.pipeline.sw_stride_fraction, "pipeline");
  }
  if (j.contains("eval")) {
    const json& je = j.at("eval");
    check_keys(je, "eval", {"map_thresholds", "avg_map_grid", "an_grid"});
    maybe(je, "map_thresholds", cfg.eval.map_thresholds, "eval");
    maybe(je, "avg_map_grid", cfg.eval.avg_map_grid, "eval");
    maybe(je, "an_grid", cfg.eval.an_grid, "eval");
  }
  if (j.contains("labeling")) {
    const json& jl = j.at("labeling");
    check_keys(jl, "labeling", {"iou_hi", "iou_lo"});
    maybe(jl, "iou_hi", cfg.label_iou_hi, "labeling");
    maybe(jl, "iou_lo", cfg.label_iou_lo, "labeling");
  }
  if (j.contains("head_train")) {
    const json& jh = j.at("head_train");
    check_keys(jh, "head_train", {"augment", "sw_mix", "sw_per_video"});
    maybe(jh, "augment", cfg.head_train_augment, "head_train");
    maybe(jh, "sw_mix", cfg.head_train_sw_mix, "head_train");
    maybe(jh, "sw_per_video", cfg.head_train_sw_per_video, "head_train");
  }
  cfg.validate();
  return cfg;
}

}  // namespace storycut
