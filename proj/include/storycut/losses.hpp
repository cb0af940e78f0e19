#pragma once

#include <span>

#include "storycut/supervision.hpp"
#include "storycut/tensor.hpp"

namespace storycut {

// 0.5 x^2 inside |x| < 1, |x| - 0.5 outside; both branches meet at |x| = 1.
double smooth_l1(double x);
double smooth_l1_grad(double x);

// -log probs[label]. probs must be a valid distribution.
double cross_entropy(std::span<const double> probs, index_t label);

// Stable softmax cross-entropy straight from logits; if dlogits is non-null
// it receives softmax(logits) - onehot(label).
double cross_entropy_from_logits(std::span<const double> logits, index_t label,
                                 double* dlogits = nullptr);

// Binary cross-entropy on a single logit (positive => target 1). dlogit (if
// requested) receives sigmoid(logit) - target.
double binary_cross_entropy_from_logit(double logit, bool positive, double* dlogit = nullptr);

// smooth_l1(ds - ts) + smooth_l1(de - te); grad (if requested) is w.r.t. the
// predicted offsets.
double regression_loss(const BoundaryOffsets& pred, const BoundaryOffsets& target,
                       BoundaryOffsets* grad = nullptr);

// Classification term always; plus lambda * regression_loss when the
// proposal is Positive. Ignore-labeled input is a caller bug.
double multitask_loss(double p_story, const BoundaryOffsets& pred_offsets,
                      const LabeledProposal& labeled, double lambda);

struct MultitaskParts {
  double total = 0.0;
  double cls = 0.0;
  double reg = 0.0;  // before the lambda weight
};

// Same loss from the raw logit (numerically stable), with gradients on the
// logit and predicted offsets for training.
MultitaskParts multitask_loss_from_logit(double story_logit, const BoundaryOffsets& pred_offsets,
                                         const LabeledProposal& labeled, double lambda,
                                         double* dlogit = nullptr,
                                         BoundaryOffsets* doffsets = nullptr);

}  // namespace storycut
