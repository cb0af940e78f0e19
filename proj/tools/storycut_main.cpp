// storycut: story-preserving truncation of long videos.
//
// Subcommands: gen-data, train-ban, train-head, propose, infer, eval.
// Exit codes: 0 success, 2 config/validation, 3 I/O, 4 training divergence.

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "storycut/errors.hpp"
#include "storycut/eval.hpp"
#include "storycut/model_io.hpp"
#include "storycut/pipeline.hpp"
#include "storycut/run_config.hpp"
#include "storycut/serialization.hpp"
#include "storycut/supervision.hpp"
#include "storycut/synth.hpp"
#include "storycut/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace storycut;

namespace {

RunConfig load_run_config(const std::string& path) {
  if (path.empty()) return RunConfig::desk_easy();
  const std::string bytes = read_file(path);
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw config_error(path + ": config JSON parse error: " + e.what());
  }
  return run_config_from_json(j);
}

void write_resolved_config(const std::string& path, const RunConfig& cfg) {
  write_file_atomic(path, run_config_to_json(cfg).dump(2) + "\n");
}

struct Dataset {
  std::vector<FrameFeatureSequence> features;
  std::vector<VideoAnnotation> annotations;

  index_t dim() const { return features.empty() ? 0 : features.front().dim(); }
};

Dataset load_dataset(const std::string& data_dir) {
  const fs::path dir(data_dir);
  const std::string manifest_path = (dir / "manifest.json").string();
  const std::string bytes = read_file(manifest_path);
  json manifest;
  try {
    manifest = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw io_error(manifest_path + ": JSON parse error: " + e.what());
  }

  Dataset data;
  try {
    const auto annotations =
        read_annotations((dir / manifest.at("annotations").get<std::string>()).string());
    std::map<std::string, const VideoAnnotation*> by_id;
    for (const VideoAnnotation& a : annotations) by_id[a.video_id] = &a;

    for (const auto& jv : manifest.at("videos")) {
      auto seq = read_features((dir / jv.at("features").get<std::string>()).string());
      const auto it = by_id.find(seq.video_id);
      if (it == by_id.end())
        throw config_error(data_dir + ": video " + seq.video_id + " has no annotation entry");
      if (it->second->num_frames != seq.num_frames())
        throw config_error(data_dir + ": frame count mismatch for " + seq.video_id);
      data.annotations.push_back(*it->second);
      data.features.push_back(std::move(seq));
    }
  } catch (const json::exception& e) {
    throw io_error(manifest_path + ": malformed manifest: " + e.what());
  }
  if (data.features.empty()) throw config_error(data_dir + ": dataset has no videos");
  return data;
}

int cmd_gen_data(const std::string& config_path, const std::string& out_dir, std::uint64_t seed,
                 bool seed_set) {
  RunConfig cfg = load_run_config(config_path);
  if (seed_set) cfg.set_master_seed(seed);
  cfg.validate();

  const auto videos = synth_generate(cfg.synth);

  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "features", ec);
  if (ec) throw io_error("cannot create " + out_dir + "/features: " + ec.message());

  json manifest;
  manifest["annotations"] = "gt.json";
  manifest["videos"] = json::array();
  std::vector<VideoAnnotation> annotations;
  for (const auto& [seq, ann] : videos) {
    const std::string rel = "features/" + seq.video_id + ".trnf";
    write_features((fs::path(out_dir) / rel).string(), seq);
    manifest["videos"].push_back(
        {{"video_id", seq.video_id}, {"features", rel}, {"num_frames", ann.num_frames}});
    annotations.push_back(ann);
  }
  manifest["config"] = run_config_to_json(cfg);

  write_annotations((fs::path(out_dir) / "gt.json").string(), annotations);
  write_file_atomic((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  write_resolved_config((fs::path(out_dir) / "resolved_config.json").string(), cfg);
  std::cout << "wrote " << videos.size() << " videos to " << out_dir << "\n";
  return 0;
}

int cmd_train_ban(const std::string& data_dir, const std::string& config_path,
                  const std::string& out_path, std::uint64_t seed, bool seed_set,
                  index_t epochs, bool epochs_set) {
  RunConfig cfg = load_run_config(config_path);
  if (seed_set) cfg.train_ban.seed = seed;
  if (epochs_set) cfg.train_ban.epochs = epochs;
  cfg.validate();

  const Dataset data = load_dataset(data_dir);
  BanConfig model_cfg{data.dim(), cfg.ban.hidden};

  std::vector<EpochLoss> log;
  const BanModel model =
      train_ban(data.features, data.annotations, model_cfg, cfg.train_ban, cfg.sampling, &log);

  save_ban_checkpoint(out_path, model);
  write_file_atomic(out_path + ".loss.csv", loss_log_csv(log));
  write_resolved_config(out_path + ".config.json", cfg);
  std::cout << "trained ban for " << cfg.train_ban.epochs << " epochs -> " << out_path << "\n";
  return 0;
}

// The head trains on the model proposals (optionally widened) plus, by
// default, a few sliding-window candidates per video so that both labels
// are represented regardless of proposal quality.
std::vector<std::vector<LabeledProposal>> build_head_pool(const Dataset& data,
                                                          const std::vector<ScoredVideoProposals>&
                                                              proposals,
                                                          const RunConfig& cfg) {
  std::map<std::string, const ScoredVideoProposals*> by_id;
  for (const auto& p : proposals) by_id[p.video_id] = &p;

  std::vector<std::vector<LabeledProposal>> labeled;
  labeled.reserve(data.features.size());
  for (std::size_t v = 0; v < data.features.size(); ++v) {
    const index_t T = data.features[v].num_frames();
    std::vector<Interval> pool;

    if (const auto it = by_id.find(data.features[v].video_id); it != by_id.end()) {
      std::vector<ScoredInterval> items = it->second->items;
      if (cfg.head_train_augment)
        items = augment_proposals(items, cfg.pipeline.augment_rho, T);
      for (const ScoredInterval& si : items) pool.push_back(si.interval);
    }

    if (cfg.head_train_sw_mix && cfg.head_train_sw_per_video > 0) {
      auto sw = sliding_window_proposals(T, cfg.pipeline.sw_scales, cfg.pipeline.sw_stride_fraction);
      Rng rng(mix_seed(cfg.train_head.seed, 0xF00Dull + v));
      // partial Fisher-Yates: keep a uniform subset in deterministic order
      const auto keep = std::min<std::size_t>(sw.size(),
                                              static_cast<std::size_t>(cfg.head_train_sw_per_video));
      for (std::size_t i = 0; i < keep; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(sw.size() - i));
        std::swap(sw[i], sw[j]);
        pool.push_back(sw[i].interval);
      }
    }

    labeled.push_back(assign_proposal_labels(pool, data.annotations[v].stories, cfg.label_iou_hi,
                                             cfg.label_iou_lo));
  }
  return labeled;
}

int cmd_train_head(const std::string& data_dir, const std::string& proposals_path,
                   const std::string& config_path, const std::string& out_path,
                   std::uint64_t seed, bool seed_set, index_t epochs, bool epochs_set,
                   bool no_augment, index_t layers, bool layers_set,
                   const std::string& wiring) {
  RunConfig cfg = load_run_config(config_path);
  if (seed_set) cfg.train_head.seed = seed;
  if (epochs_set) cfg.train_head.epochs = epochs;
  if (no_augment) cfg.head_train_augment = false;
  if (layers_set) cfg.head.num_layers = layers;
  if (wiring == "stacked") cfg.head.fast_forward = false;
  if (wiring == "ff") cfg.head.fast_forward = true;
  cfg.validate();

  const Dataset data = load_dataset(data_dir);
  const auto proposals = read_scored(proposals_path);
  const auto labeled = build_head_pool(data, proposals, cfg);

  HeadConfig model_cfg{data.dim(), cfg.head.hidden, cfg.head.num_layers, cfg.head.fast_forward};
  std::vector<EpochLoss> log;
  const HeadModel model =
      train_proposal_head(data.features, labeled, model_cfg, cfg.train_head, cfg.sampling, &log);

  save_head_checkpoint(out_path, model);
  write_file_atomic(out_path + ".loss.csv", loss_log_csv(log));
  write_resolved_config(out_path + ".config.json", cfg);
  std::cout << "trained head for " << cfg.train_head.epochs << " epochs -> " << out_path << "\n";
  return 0;
}

int cmd_propose(const std::string& data_dir, const std::string& ban_path,
                const std::string& out_path, const std::string& config_path,
                const std::string& baseline) {
  RunConfig cfg = load_run_config(config_path);
  cfg.validate();
  const Dataset data = load_dataset(data_dir);

  std::vector<ScoredVideoProposals> out;
  if (baseline == "sw") {
    for (std::size_t v = 0; v < data.features.size(); ++v) {
      const index_t T = data.features[v].num_frames();
      out.push_back(ScoredVideoProposals{
          data.features[v].video_id, T,
          sliding_window_proposals(T, cfg.pipeline.sw_scales, cfg.pipeline.sw_stride_fraction)});
    }
  } else {
    if (ban_path.empty())
      throw config_error("propose: --ban-checkpoint is required unless --baseline sw");
    const BanModel ban = load_ban_checkpoint(ban_path);
    for (std::size_t v = 0; v < data.features.size(); ++v) {
      const auto scores = score_frames(ban, data.features[v].values);
      out.push_back(ScoredVideoProposals{data.features[v].video_id,
                                         data.features[v].num_frames(),
                                         generate_proposals(scores, cfg.pipeline)});
    }
  }
  write_scored(out_path, out);
  write_resolved_config(out_path + ".config.json", cfg);
  std::cout << "wrote proposals for " << out.size() << " videos -> " << out_path << "\n";
  return 0;
}

int cmd_infer(const std::string& data_dir, const std::string& ban_path,
              const std::string& head_path, const std::string& out_path,
              const std::string& config_path) {
  RunConfig cfg = load_run_config(config_path);
  cfg.validate();
  const Dataset data = load_dataset(data_dir);
  const BanModel ban = load_ban_checkpoint(ban_path);
  const HeadModel head = load_head_checkpoint(head_path);

  std::vector<ScoredVideoProposals> out;
  for (std::size_t v = 0; v < data.features.size(); ++v)
    out.push_back(ScoredVideoProposals{
        data.features[v].video_id, data.features[v].num_frames(),
        truncate_video(ban, head, data.features[v].values, cfg.pipeline)});

  write_scored(out_path, out);
  write_resolved_config(out_path + ".config.json", cfg);
  std::cout << "wrote detections for " << out.size() << " videos -> " << out_path << "\n";
  return 0;
}

int cmd_eval(const std::string& detections_path, const std::string& gt_path,
             const std::string& report_path, const std::string& config_path) {
  RunConfig cfg = load_run_config(config_path);
  cfg.validate();
  const auto detections = read_scored(detections_path);
  const auto gt = read_annotations(gt_path);

  const EvalReport report = full_report(detections, gt, cfg.eval);
  if (report.zero_gt_warning)
    std::cerr << "warning: ground truth has zero stories; AP defined as 0\n";
  report_csv(report, report_path);
  write_resolved_config(report_path + ".config.json", cfg);
  std::cout << "average_map " << report.average_map << " -> " << report_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"story-preserving truncation of long videos"};
  app.require_subcommand(1);

  int rc = 0;

  // gen-data
  std::string gd_config, gd_out;
  std::uint64_t gd_seed = 0;
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
  gen->add_option("--config", gd_config, "run config JSON");
  gen->add_option("--out-dir", gd_out, "output directory")->required();
  auto* gd_seed_opt = gen->add_option("--seed", gd_seed, "master seed override");
  gen->callback([&] { rc = cmd_gen_data(gd_config, gd_out, gd_seed, !gd_seed_opt->empty()); });

  // train-ban
  std::string tb_data, tb_config, tb_out;
  std::uint64_t tb_seed = 0;
  index_t tb_epochs = 0;
  auto* tban = app.add_subcommand("train-ban", "train the frame scorer");
  tban->add_option("--data", tb_data, "dataset directory (from gen-data)")->required();
  tban->add_option("--config", tb_config, "run config JSON");
  tban->add_option("--out-checkpoint", tb_out, "checkpoint output path")->required();
  auto* tb_seed_opt = tban->add_option("--seed", tb_seed, "training seed override");
  auto* tb_epochs_opt = tban->add_option("--epochs", tb_epochs, "epoch count override");
  tban->callback([&] {
    rc = cmd_train_ban(tb_data, tb_config, tb_out, tb_seed, !tb_seed_opt->empty(), tb_epochs,
                       !tb_epochs_opt->empty());
  });

  // train-head
  std::string th_data, th_props, th_config, th_out, th_wiring;
  std::uint64_t th_seed = 0;
  index_t th_epochs = 0, th_layers = 0;
  bool th_no_augment = false;
  auto* thead = app.add_subcommand("train-head", "train the proposal scorer/refiner");
  thead->add_option("--data", th_data, "dataset directory")->required();
  thead->add_option("--proposals", th_props, "proposals JSON (from propose)")->required();
  thead->add_option("--config", th_config, "run config JSON");
  thead->add_option("--out-checkpoint", th_out, "checkpoint output path")->required();
  auto* th_seed_opt = thead->add_option("--seed", th_seed, "training seed override");
  auto* th_epochs_opt = thead->add_option("--epochs", th_epochs, "epoch count override");
  thead->add_flag("--no-augment", th_no_augment, "train on raw proposals, without widening");
  auto* th_layers_opt = thead->add_option("--layers", th_layers, "stack depth override");
  thead->add_option("--wiring", th_wiring, "recurrent wiring override")
      ->check(CLI::IsMember({"ff", "stacked"}));
  thead->callback([&] {
    rc = cmd_train_head(th_data, th_props, th_config, th_out, th_seed, !th_seed_opt->empty(),
                        th_epochs, !th_epochs_opt->empty(), th_no_augment, th_layers,
                        !th_layers_opt->empty(), th_wiring);
  });

  // propose
  std::string pr_data, pr_ban, pr_out, pr_config, pr_baseline;
  auto* prop = app.add_subcommand("propose", "generate story proposals");
  prop->add_option("--data", pr_data, "dataset directory")->required();
  prop->add_option("--ban-checkpoint", pr_ban, "frame-scorer checkpoint");
  prop->add_option("--out", pr_out, "proposals JSON output")->required();
  prop->add_option("--config", pr_config, "run config JSON");
  prop->add_option("--baseline", pr_baseline, "bypass the model (sw = sliding windows)")
      ->check(CLI::IsMember({"sw"}));
  prop->callback([&] { rc = cmd_propose(pr_data, pr_ban, pr_out, pr_config, pr_baseline); });

  // infer
  std::string in_data, in_ban, in_head, in_out, in_config;
  auto* infer = app.add_subcommand("infer", "run the full detection pipeline");
  infer->add_option("--data", in_data, "dataset directory")->required();
  infer->add_option("--ban", in_ban, "frame-scorer checkpoint")->required();
  infer->add_option("--head", in_head, "proposal-head checkpoint")->required();
  infer->add_option("--out", in_out, "detections JSON output")->required();
  infer->add_option("--config", in_config, "run config JSON");
  infer->callback([&] { rc = cmd_infer(in_data, in_ban, in_head, in_out, in_config); });

  // eval
  std::string ev_dets, ev_gt, ev_report, ev_config;
  auto* ev = app.add_subcommand("eval", "score detections against ground truth");
  ev->add_option("--detections", ev_dets, "detections JSON")->required();
  ev->add_option("--gt", ev_gt, "ground-truth annotations JSON")->required();
  ev->add_option("--report", ev_report, "report CSV output")->required();
  ev->add_option("--config", ev_config, "run config JSON");
  ev->callback([&] { rc = cmd_eval(ev_dets, ev_gt, ev_report, ev_config); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const divergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
