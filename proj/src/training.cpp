#include "storycut/training.hpp"

#include <cmath>
#include <sstream>

#include "storycut/errors.hpp"
#include "storycut/losses.hpp"

namespace storycut {

TrainConfig TrainConfig::ban_defaults() { return TrainConfig{}; }

TrainConfig TrainConfig::head_defaults() {
  TrainConfig c;
  c.weight_decay = 0.0008;
  c.epochs = 40;
  return c;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw config_error("train: learning_rate must be nonnegative");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw config_error("train: momentum must be in [0,1)");
  if (!(weight_decay >= 0.0)) throw config_error("train: weight_decay must be nonnegative");
  if (epochs < 0) throw config_error("train: epochs must be nonnegative");
  if (batch_size < 1) throw config_error("train: batch_size must be positive");
  if (!(lambda >= 0.0)) throw config_error("train: lambda must be nonnegative");
}

std::string loss_log_csv(const std::vector<EpochLoss>& log) {
  std::ostringstream os;
  os << "epoch,loss,cls_loss,reg_loss\n";
  os.setf(std::ios::fixed);
  os.precision(9);
  for (const EpochLoss& e : log)
    os << e.epoch << ',' << e.loss << ',' << e.cls_loss << ',' << e.reg_loss << '\n';
  return os.str();
}

namespace {

// Seed streams: one for parameter init, one for minibatch sampling.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kSampleStream = 2;

[[noreturn]] void diverged(const char* what, index_t epoch, double last_finite) {
  std::ostringstream os;
  os << what << ": non-finite loss at epoch " << epoch << "; last finite loss " << last_finite;
  throw divergence_error(os.str());
}

index_t ceil_div(index_t a, index_t b) { return (a + b - 1) / b; }

}  // namespace

BanModel train_ban(const std::vector<FrameFeatureSequence>& features,
                   const std::vector<VideoAnnotation>& annotations, const BanConfig& model_cfg,
                   const TrainConfig& cfg, const SamplingPlan& plan,
                   std::vector<EpochLoss>* log) {
  cfg.validate();
  plan.validate();
  if (features.empty()) throw config_error("train_ban: empty dataset");
  if (features.size() != annotations.size())
    throw config_error("train_ban: features/annotations count mismatch");

  index_t total_frames = 0;
  std::vector<std::vector<FrameLabel>> targets;
  targets.reserve(features.size());
  for (std::size_t v = 0; v < features.size(); ++v) {
    const auto& f = features[v];
    const auto& a = annotations[v];
    if (f.video_id != a.video_id)
      throw config_error("train_ban: video id mismatch: " + f.video_id + " vs " + a.video_id);
    if (f.num_frames() != a.num_frames)
      throw config_error("train_ban: frame count mismatch for " + f.video_id);
    if (f.dim() != model_cfg.feature_dim)
      throw config_error("train_ban: feature dim mismatch for " + f.video_id);
    a.validate();
    targets.push_back(frame_targets(a.num_frames, a.stories));
    total_frames += f.num_frames();
  }

  BanModel model(model_cfg);
  Rng init_rng(mix_seed(cfg.seed, kInitStream));
  model.init_params(init_rng);

  Rng sample_rng(mix_seed(cfg.seed, kSampleStream));
  const index_t batches = ceil_div(total_frames, cfg.batch_size);
  const OptimConfig optim = cfg.optim();

  double last_finite = 0.0;
  BanCache cache;
  for (index_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (index_t mb = 0; mb < batches; ++mb) {
      const auto batch = sample_ban_minibatch(targets, plan, cfg.batch_size, sample_rng);
      double batch_loss = 0.0;
      const double inv = 1.0 / double(batch.size());
      for (const FrameRef& item : batch) {
        const auto vu = static_cast<std::size_t>(item.video);
        const Tensor2 window = ban_window(features[vu].values, item.frame);
        const auto logits = model.window_logits(window, &cache);
        const auto label = static_cast<index_t>(targets[vu][static_cast<std::size_t>(item.frame)]);
        std::array<double, kNumFrameCategories> dlogits{};
        batch_loss += cross_entropy_from_logits(logits, label, dlogits.data());
        for (double& d : dlogits) d *= inv;
        model.window_backward(cache, dlogits);
      }
      batch_loss *= inv;
      if (!std::isfinite(batch_loss)) diverged("train_ban", epoch, last_finite);
      last_finite = batch_loss;
      sgd_momentum_step(model.params(), optim);
      epoch_loss += batch_loss;
    }
    if (log) log->push_back(EpochLoss{epoch, epoch_loss / double(batches), epoch_loss / double(batches), 0.0});
  }
  return model;
}

HeadModel train_proposal_head(const std::vector<FrameFeatureSequence>& features,
                              const std::vector<std::vector<LabeledProposal>>& labeled,
                              const HeadConfig& model_cfg, const TrainConfig& cfg,
                              const SamplingPlan& plan, std::vector<EpochLoss>* log) {
  cfg.validate();
  plan.validate();
  if (features.size() != labeled.size())
    throw config_error("train_proposal_head: features/proposals count mismatch");

  index_t usable = 0;
  for (std::size_t v = 0; v < labeled.size(); ++v) {
    for (const LabeledProposal& lp : labeled[v]) {
      if (lp.label == ProposalLabel::Ignore) continue;
      const Interval& p = lp.proposal;
      if (!p.valid() || p.start < 0 || p.end > features[v].num_frames())
        throw config_error("train_proposal_head: proposal out of bounds in " +
                           features[v].video_id);
      ++usable;
    }
  }
  if (usable == 0) throw config_error("train_proposal_head: no usable proposals");

  HeadModel model(model_cfg);
  Rng init_rng(mix_seed(cfg.seed, kInitStream));
  model.init_params(init_rng);

  Rng sample_rng(mix_seed(cfg.seed, kSampleStream));
  const index_t batches = ceil_div(usable, cfg.batch_size);
  const OptimConfig optim = cfg.optim();

  double last_finite = 0.0;
  HeadCache cache;
  for (index_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0, epoch_cls = 0.0, epoch_reg = 0.0;
    for (index_t mb = 0; mb < batches; ++mb) {
      const auto batch = sample_head_minibatch(labeled, plan, cfg.batch_size, sample_rng);
      double batch_loss = 0.0, batch_cls = 0.0, batch_reg = 0.0;
      const double inv = 1.0 / double(batch.size());
      for (const ProposalRef& item : batch) {
        const auto vu = static_cast<std::size_t>(item.video);
        const LabeledProposal& lp = labeled[vu][static_cast<std::size_t>(item.proposal)];
        const Tensor2 segment =
            features[vu].values.slice_rows(lp.proposal.start, lp.proposal.end);
        const HeadOutput out = model.forward(segment, &cache);
        double dlogit = 0.0;
        BoundaryOffsets doffsets;
        const MultitaskParts parts =
            multitask_loss_from_logit(out.story_logit, out.offsets, lp, cfg.lambda, &dlogit,
                                      &doffsets);
        batch_loss += parts.total;
        batch_cls += parts.cls;
        batch_reg += parts.reg;
        doffsets.start *= inv;
        doffsets.end *= inv;
        model.backward(cache, dlogit * inv, doffsets);
      }
      batch_loss *= inv;
      if (!std::isfinite(batch_loss)) diverged("train_proposal_head", epoch, last_finite);
      last_finite = batch_loss;
      sgd_momentum_step(model.params(), optim);
      epoch_loss += batch_loss;
      epoch_cls += batch_cls * inv;
      epoch_reg += batch_reg * inv;
    }
    if (log)
      log->push_back(EpochLoss{epoch, epoch_loss / double(batches), epoch_cls / double(batches),
                               epoch_reg / double(batches)});
  }
  return model;
}

}  // namespace storycut
