#include "storycut/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace storycut {

double smooth_l1(double x) {
  const double a = std::abs(x);
  return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

double smooth_l1_grad(double x) {
  if (std::abs(x) < 1.0) return x;
  return x > 0.0 ? 1.0 : -1.0;
}

double cross_entropy(std::span<const double> probs, index_t label) {
  if (label < 0 || std::cmp_greater_equal(label, probs.size()))
    throw std::invalid_argument("cross_entropy: label out of range");
  return -std::log(probs[static_cast<std::size_t>(label)]);
}

double cross_entropy_from_logits(std::span<const double> logits, index_t label, double* dlogits) {
  if (label < 0 || std::cmp_greater_equal(label, logits.size()))
    throw std::invalid_argument("cross_entropy: label out of range");
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - m);
  const double log_z = m + std::log(sum);
  const double loss = log_z - logits[static_cast<std::size_t>(label)];
  if (dlogits) {
    for (std::size_t i = 0; i < logits.size(); ++i) dlogits[i] = std::exp(logits[i] - log_z);
    dlogits[static_cast<std::size_t>(label)] -= 1.0;
  }
  return loss;
}

double binary_cross_entropy_from_logit(double logit, bool positive, double* dlogit) {
  // softplus(logit) - target*logit, evaluated without overflow
  const double softplus = std::max(logit, 0.0) + std::log1p(std::exp(-std::abs(logit)));
  const double target = positive ? 1.0 : 0.0;
  if (dlogit) *dlogit = sigmoid(logit) - target;
  return softplus - target * logit;
}

double regression_loss(const BoundaryOffsets& pred, const BoundaryOffsets& target,
                       BoundaryOffsets* grad) {
  const double rs = pred.start - target.start;
  const double re = pred.end - target.end;
  if (grad) {
    grad->start = smooth_l1_grad(rs);
    grad->end = smooth_l1_grad(re);
  }
  return smooth_l1(rs) + smooth_l1(re);
}

namespace {

const BoundaryOffsets& positive_targets(const LabeledProposal& labeled) {
  if (!labeled.targets)
    throw std::invalid_argument("multitask_loss: positive proposal lacks regression targets");
  return *labeled.targets;
}

}  // namespace

double multitask_loss(double p_story, const BoundaryOffsets& pred_offsets,
                      const LabeledProposal& labeled, double lambda) {
  if (labeled.label == ProposalLabel::Ignore)
    throw std::invalid_argument("multitask_loss: Ignore-labeled proposal");
  const bool pos = labeled.label == ProposalLabel::Positive;
  double loss = pos ? -std::log(p_story) : -std::log(1.0 - p_story);
  if (pos) loss += lambda * regression_loss(pred_offsets, positive_targets(labeled));
  return loss;
}

MultitaskParts multitask_loss_from_logit(double story_logit, const BoundaryOffsets& pred_offsets,
                                         const LabeledProposal& labeled, double lambda,
                                         double* dlogit, BoundaryOffsets* doffsets) {
  if (labeled.label == ProposalLabel::Ignore)
    throw std::invalid_argument("multitask_loss: Ignore-labeled proposal");
  const bool pos = labeled.label == ProposalLabel::Positive;

  MultitaskParts parts;
  parts.cls = binary_cross_entropy_from_logit(story_logit, pos, dlogit);
  if (doffsets) *doffsets = BoundaryOffsets{0.0, 0.0};
  if (pos) {
    BoundaryOffsets g;
    parts.reg = regression_loss(pred_offsets, positive_targets(labeled), &g);
    if (doffsets) {
      doffsets->start = lambda * g.start;
      doffsets->end = lambda * g.end;
    }
  }
  parts.total = parts.cls + lambda * parts.reg;
  return parts;
}

}  // namespace storycut
