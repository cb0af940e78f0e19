#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "storycut/errors.hpp"
#include "storycut/model_io.hpp"
#include "storycut/rng.hpp"
#include "storycut/run_config.hpp"
#include "storycut/serialization.hpp"
#include "storycut/synth.hpp"

using namespace storycut;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("storycut_test_" + std::to_string(std::uintptr_t(this)) + "_" +
            std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

FrameFeatureSequence random_sequence(Rng& rng, const std::string& id, index_t T, index_t D) {
  FrameFeatureSequence seq;
  seq.video_id = id;
  seq.values = Tensor2(T, D);
  // float32 storage: keep values exactly representable so round-trips are bitwise
  for (double& v : seq.values.data) v = double(float(rng.normal()));
  return seq;
}

std::vector<VideoAnnotation> sample_annotations() {
  VideoAnnotation a;
  a.video_id = "vid_a";
  a.num_frames = 100;
  a.stories = {{5, 25}, {40, 80}};
  VideoAnnotation b;
  b.video_id = "vid_b";
  b.num_frames = 50;
  b.stories = {};
  return {a, b};
}

}  // namespace

TEST_CASE("feature file round-trip and size formula") {
  TempDir dir;
  Rng rng(1);
  const auto seq = random_sequence(rng, "video_0001", 17, 5);
  const std::string path = dir.file("f.trnf");
  write_features(path, seq);

  // header: magic + version + id length + id + T + D, then float32 payload
  CHECK(fs::file_size(path) == 28 + seq.video_id.size() + 4 * 17 * 5);

  const auto back = read_features(path);
  CHECK(back.video_id == seq.video_id);
  REQUIRE(back.values.same_shape(seq.values));
  CHECK(back.values.data == seq.values.data);
}

TEST_CASE("feature file reader rejects malformed input") {
  TempDir dir;
  Rng rng(2);
  const auto seq = random_sequence(rng, "vid", 8, 3);
  const std::string path = dir.file("f.trnf");
  write_features(path, seq);
  const std::string bytes = read_file(path);

  // truncation at several depths: inside header, id, shape, payload
  for (const std::size_t keep : {std::size_t(2), std::size_t(9), std::size_t(13),
                                 std::size_t(20), bytes.size() - 1}) {
    const std::string cut = dir.file("cut.trnf");
    write_file_atomic(cut, bytes.substr(0, keep));
    CHECK_THROWS_AS(read_features(cut), io_error);
  }

  // trailing garbage is an error, not silently ignored
  write_file_atomic(dir.file("pad.trnf"), bytes + "xx");
  CHECK_THROWS_AS(read_features(dir.file("pad.trnf")), io_error);

  // wrong magic
  std::string wrong = bytes;
  wrong[0] = 'X';
  write_file_atomic(dir.file("bad.trnf"), wrong);
  CHECK_THROWS_AS(read_features(dir.file("bad.trnf")), io_error);

  CHECK_THROWS_AS(read_features(dir.file("missing.trnf")), io_error);
}

TEST_CASE("annotation json round-trip") {
  TempDir dir;
  const auto videos = sample_annotations();
  const std::string path = dir.file("gt.json");
  write_annotations(path, videos);

  const auto back = read_annotations(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].video_id == "vid_a");
  CHECK(back[0].num_frames == 100);
  REQUIRE(back[0].stories.size() == 2);
  CHECK(back[0].stories[0] == Interval{5, 25});
  CHECK(back[0].stories[1] == Interval{40, 80});
  CHECK(back[1].stories.empty());

  // determinism: writing the same content twice produces identical bytes
  const std::string again = dir.file("gt2.json");
  write_annotations(again, videos);
  CHECK(read_file(path) == read_file(again));
}

TEST_CASE("annotation reader validates structure and content") {
  TempDir dir;
  const std::string path = dir.file("gt.json");

  write_file_atomic(path, "{ not json");
  CHECK_THROWS_AS(read_annotations(path), io_error);

  write_file_atomic(path, R"({"videos":[{"video_id":"v","num_frames":50,
    "stories":[{"start":0,"end":20},{"start":10,"end":30}]}]})");
  CHECK_THROWS_WITH_AS(read_annotations(path), doctest::Contains("v"), config_error);

  write_file_atomic(path, R"({"videos":[{"video_id":"v","num_frames":50,
    "stories":[{"start":30,"end":20}]}]})");
  CHECK_THROWS_AS(read_annotations(path), config_error);

  write_file_atomic(path, R"({"videos":[{"video_id":"v","num_frames":50,
    "stories":[{"start":30,"end":60}]}]})");
  CHECK_THROWS_AS(read_annotations(path), config_error);  // beyond num_frames

  write_file_atomic(path, R"({"videos":[{"video_id":"v","num_frames":50,
    "stories":[{"start":20,"end":30},{"start":0,"end":10}]}]})");
  CHECK_THROWS_AS(read_annotations(path), config_error);  // unsorted
}

TEST_CASE("scored proposal json round-trip preserves scores exactly") {
  TempDir dir;
  ScoredVideoProposals v;
  v.video_id = "vid";
  v.num_frames = 200;
  v.items = {{{10, 60}, 0.12345678901234567}, {{50, 90}, 1.0 / 3.0}, {{0, 200}, 1e-12}};
  const std::string path = dir.file("props.json");
  write_scored(path, {v});

  const auto back = read_scored(path);
  REQUIRE(back.size() == 1);
  REQUIRE(back[0].items.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[0].items[i].interval == v.items[i].interval);
    CHECK(back[0].items[i].score == v.items[i].score);  // bit-exact doubles
  }

  // overlapping intervals are fine for proposals, but bounds still apply:
  // both the writer and the reader reject out-of-range entries
  ScoredVideoProposals bad = v;
  bad.items[0].interval = {150, 250};
  CHECK_THROWS_AS(write_scored(path, {bad}), config_error);
  write_file_atomic(path, R"({"videos":[{"video_id":"vid","num_frames":200,
    "stories":[{"start":150,"end":250,"score":0.5}]}]})");
  CHECK_THROWS_AS(read_scored(path), config_error);
  write_file_atomic(path, R"({"videos":[{"video_id":"vid","num_frames":200,
    "stories":[{"start":10,"end":20,"score":"nan"}]}]})");
  CHECK_THROWS(read_scored(path));

  ScoredVideoProposals nan_score = v;
  nan_score.items[0].score = std::nan("");
  CHECK_THROWS(write_scored(path, {nan_score}));
}

TEST_CASE("checkpoint round-trip is byte-identical") {
  TempDir dir;
  Rng rng(3);
  BanModel model(BanConfig{4, 6});
  model.init_params(rng);

  const std::string first = dir.file("m1.trnm");
  const std::string second = dir.file("m2.trnm");
  save_ban_checkpoint(first, model);

  const BanModel loaded = load_ban_checkpoint(first);
  CHECK(loaded.config().feature_dim == 4);
  CHECK(loaded.config().hidden == 6);
  save_ban_checkpoint(second, loaded);
  CHECK(read_file(first) == read_file(second));

  // inference equivalence on a random window
  Tensor2 window(kBanWindow, 4);
  for (double& v : window.data) v = rng.normal();
  const auto p = model.window_probs(window);
  const auto q = loaded.window_probs(window);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == q[i]);
}

TEST_CASE("head checkpoint keeps architecture and parameters") {
  TempDir dir;
  Rng rng(4);
  HeadModel model(HeadConfig{5, 4, 3, false});
  model.init_params(rng);
  const std::string path = dir.file("h.trnm");
  save_head_checkpoint(path, model);

  const HeadModel loaded = load_head_checkpoint(path);
  CHECK(loaded.config().feature_dim == 5);
  CHECK(loaded.config().hidden == 4);
  CHECK(loaded.config().num_layers == 3);
  CHECK(loaded.config().fast_forward == false);

  Tensor2 features(9, 5);
  for (double& v : features.data) v = rng.normal();
  const auto a = model.forward(features);
  const auto b = loaded.forward(features);
  CHECK(a.story_logit == b.story_logit);
  CHECK(a.offsets == b.offsets);
}

TEST_CASE("checkpoint kind and shape mismatches are rejected") {
  TempDir dir;
  Rng rng(5);
  BanModel ban(BanConfig{4, 6});
  ban.init_params(rng);
  const std::string path = dir.file("b.trnm");
  save_ban_checkpoint(path, ban);

  CHECK_THROWS_WITH_AS(load_head_checkpoint(path), doctest::Contains("head"), config_error);

  // a parameter with the wrong shape cannot be loaded back
  const CheckpointData data = read_checkpoint(path);
  BanModel wrong(BanConfig{4, 8});
  CHECK_THROWS_AS(load_params(data, wrong.params()), config_error);

  CHECK_THROWS_AS(read_checkpoint(dir.file("missing.trnm")), io_error);
  write_file_atomic(dir.file("junk.trnm"), "not a checkpoint");
  CHECK_THROWS_AS(read_checkpoint(dir.file("junk.trnm")), io_error);
}

TEST_CASE("synthetic generator is deterministic and shaped correctly") {
  SynthConfig cfg;
  cfg.num_videos = 4;
  cfg.frames_mean = 150;
  cfg.stories_per_video_mean = 2.0;
  cfg.story_len_mean = 25;
  cfg.feature_dim = 8;
  cfg.audio_channels = 3;
  cfg.seed = 77;

  const auto a = synth_generate(cfg);
  const auto b = synth_generate(cfg);
  REQUIRE(a.size() == 4);
  REQUIRE(b.size() == 4);
  for (std::size_t v = 0; v < a.size(); ++v) {
    CHECK(a[v].first.video_id == b[v].first.video_id);
    CHECK(a[v].first.values.data == b[v].first.values.data);  // bit-identical
    CHECK(a[v].second.stories == b[v].second.stories);

    const auto& ann = a[v].second;
    CHECK_NOTHROW(ann.validate());
    CHECK(ann.video_id == a[v].first.video_id);
    CHECK(ann.num_frames == a[v].first.num_frames());
    CHECK(a[v].first.dim() == 8);
    REQUIRE(!ann.stories.empty());

    // generator guarantees: margins at the edges, gaps between stories
    CHECK(ann.stories.front().start >= 3);
    CHECK(ann.stories.back().end <= ann.num_frames - 3);
    for (std::size_t s = 1; s < ann.stories.size(); ++s)
      CHECK(ann.stories[s].start - ann.stories[s - 1].end >= 6);
    for (const auto& st : ann.stories) CHECK(st.length() >= 8);
  }

  SynthConfig other = cfg;
  other.seed = 78;
  const auto c = synth_generate(other);
  CHECK(c[0].first.values.data != a[0].first.values.data);

  CHECK(a[0].first.video_id == "video_0000");
  CHECK(a[3].first.video_id == "video_0003");
}

TEST_CASE("synthetic geometry that cannot fit is rejected") {
  SynthConfig cfg;
  cfg.num_videos = 1;
  cfg.frames_mean = 30;  // far too short for 5 stories of ~60 frames
  cfg.stories_per_video_mean = 5.0;
  cfg.story_len_mean = 60;
  CHECK_THROWS_AS(synth_generate(cfg), config_error);

  SynthConfig zero;
  zero.num_videos = 0;
  zero.feature_dim = 4;
  zero.audio_channels = 2;
  CHECK(synth_generate(zero).empty());
}

TEST_CASE("easy-setting features are linearly separable by a mean probe") {
  SynthConfig cfg;
  cfg.num_videos = 12;
  cfg.frames_mean = 300;
  cfg.stories_per_video_mean = 3.0;
  cfg.story_len_mean = 40;
  cfg.feature_dim = 16;
  cfg.signal_strength = 3.0;
  cfg.boundary_spike = 4.0;
  cfg.audio_channels = 4;
  cfg.seed = 1234;
  const auto data = synth_generate(cfg);

  // fit per-dimension means of in-story vs background frames on train videos
  const std::size_t split = 8;
  std::vector<double> mean_in(16, 0.0), mean_out(16, 0.0);
  index_t n_in = 0, n_out = 0;
  auto in_story = [](const VideoAnnotation& ann, index_t t) {
    for (const auto& s : ann.stories)
      if (t >= s.start && t < s.end) return true;
    return false;
  };
  for (std::size_t v = 0; v < split; ++v) {
    const auto& [seq, ann] = data[v];
    for (index_t t = 0; t < seq.num_frames(); ++t) {
      auto& mean = in_story(ann, t) ? mean_in : mean_out;
      (in_story(ann, t) ? n_in : n_out) += 1;
      for (index_t d = 0; d < 16; ++d) mean[std::size_t(d)] += seq.values.at(t, d);
    }
  }
  for (index_t d = 0; d < 16; ++d) {
    mean_in[std::size_t(d)] /= double(n_in);
    mean_out[std::size_t(d)] /= double(n_out);
  }

  // classify held-out frames by the mean-difference direction and midpoint
  double threshold = 0.0;
  for (index_t d = 0; d < 16; ++d)
    threshold += (mean_in[std::size_t(d)] - mean_out[std::size_t(d)]) *
                 (mean_in[std::size_t(d)] + mean_out[std::size_t(d)]) * 0.5;
  index_t correct = 0, total = 0;
  for (std::size_t v = split; v < data.size(); ++v) {
    const auto& [seq, ann] = data[v];
    for (index_t t = 0; t < seq.num_frames(); ++t) {
      double score = 0.0;
      for (index_t d = 0; d < 16; ++d)
        score += (mean_in[std::size_t(d)] - mean_out[std::size_t(d)]) * seq.values.at(t, d);
      const bool predicted = score > threshold;
      correct += predicted == in_story(ann, t) ? 1 : 0;
      ++total;
    }
  }
  CHECK(double(correct) / double(total) >= 0.95);
}

TEST_CASE("run config presets, master seed fan-out, and json round-trip") {
  RunConfig easy = RunConfig::desk_easy();
  CHECK_NOTHROW(easy.validate());
  CHECK(easy.synth.signal_strength >= 2.0);
  RunConfig hard = RunConfig::desk_hard();
  CHECK_NOTHROW(hard.validate());
  CHECK(hard.synth.signal_strength <= 0.5);

  easy.set_master_seed(99);
  CHECK(easy.seed == 99);
  CHECK(easy.synth.seed == 99);
  CHECK(easy.train_ban.seed == 99);
  CHECK(easy.train_head.seed == 99);

  const nlohmann::json j = run_config_to_json(easy);
  const RunConfig back = run_config_from_json(j);
  CHECK(back.seed == easy.seed);
  CHECK(back.synth.num_videos == easy.synth.num_videos);
  CHECK(back.train_ban.epochs == easy.train_ban.epochs);
  CHECK(back.pipeline.merge_max_gap == easy.pipeline.merge_max_gap);
  CHECK(back.label_iou_hi == easy.label_iou_hi);
  CHECK(run_config_to_json(back) == j);

  // overrides apply on top of the preset; unknown keys are rejected
  const auto overridden = run_config_from_json(
      nlohmann::json{{"preset", "desk_hard"}, {"train_ban", {{"epochs", 2}}}});
  CHECK(overridden.train_ban.epochs == 2);
  CHECK(overridden.synth.signal_strength == RunConfig::desk_hard().synth.signal_strength);

  CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"bogus", 1}}), config_error);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"synth", {{"bogus", 1}}}}),
                  config_error);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"preset", "unknown"}}), config_error);
}

TEST_CASE("atomic write replaces files without partial states") {
  TempDir dir;
  const std::string path = dir.file("out.txt");
  write_file_atomic(path, "first");
  CHECK(read_file(path) == "first");
  write_file_atomic(path, "second longer content");
  CHECK(read_file(path) == "second longer content");
  CHECK_THROWS_AS(write_file_atomic(dir.file("no/such/dir/out.txt"), "x"), io_error);
  CHECK_THROWS_AS(read_file(dir.file("missing.txt")), io_error);
}
