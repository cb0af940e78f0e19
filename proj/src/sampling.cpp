#include "storycut/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "storycut/errors.hpp"

namespace storycut {

void SamplingPlan::validate() const {
  for (index_t r : ban_ratio)
    if (r < 1) throw config_error("sampling plan: ban ratio entries must be >= 1");
  for (index_t r : head_pos_neg)
    if (r < 1) throw config_error("sampling plan: head ratio entries must be >= 1");
}

std::vector<index_t> largest_remainder_counts(std::span<const index_t> ratio, index_t total) {
  if (ratio.empty()) throw std::invalid_argument("largest_remainder_counts: empty ratio");
  if (total < 0) throw std::invalid_argument("largest_remainder_counts: negative total");
  index_t denom = 0;
  for (index_t r : ratio) {
    if (r < 0) throw std::invalid_argument("largest_remainder_counts: negative ratio entry");
    denom += r;
  }
  if (denom <= 0) throw std::invalid_argument("largest_remainder_counts: zero ratio sum");

  const std::size_t n = ratio.size();
  std::vector<index_t> counts(n);
  std::vector<double> remainder(n);
  index_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double quota = double(total) * double(ratio[i]) / double(denom);
    counts[i] = static_cast<index_t>(std::floor(quota));
    remainder[i] = quota - double(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (index_t left = total - assigned; left > 0; --left)
    ++counts[order[static_cast<std::size_t>(total - assigned - left)]];
  return counts;
}

namespace {

const char* category_name(std::size_t c) {
  switch (c) {
    case 0: return "WithinStory";
    case 1: return "Background";
    case 2: return "BeginBoundary";
    default: return "EndBoundary";
  }
}

}  // namespace

std::vector<FrameRef> sample_ban_minibatch(const std::vector<std::vector<FrameLabel>>& targets,
                                           const SamplingPlan& plan, index_t batch_size,
                                           Rng& rng) {
  plan.validate();
  if (batch_size < 1) throw std::invalid_argument("sample_ban_minibatch: batch_size must be >= 1");

  std::array<std::vector<FrameRef>, kNumFrameCategories> pools;
  for (std::size_t v = 0; v < targets.size(); ++v)
    for (std::size_t f = 0; f < targets[v].size(); ++f)
      pools[static_cast<std::size_t>(targets[v][f])].push_back(
          FrameRef{static_cast<index_t>(v), static_cast<index_t>(f)});
  for (std::size_t c = 0; c < pools.size(); ++c)
    if (pools[c].empty())
      throw config_error(std::string("sample_ban_minibatch: no frames of category ") +
                         category_name(c));

  const auto counts = largest_remainder_counts(plan.ban_ratio, batch_size);
  std::vector<FrameRef> out;
  out.reserve(static_cast<std::size_t>(batch_size));
  for (std::size_t c = 0; c < pools.size(); ++c)
    for (index_t i = 0; i < counts[c]; ++i)
      out.push_back(pools[c][static_cast<std::size_t>(rng.uniform_index(pools[c].size()))]);
  return out;
}

std::vector<ProposalRef> sample_head_minibatch(
    const std::vector<std::vector<LabeledProposal>>& labeled, const SamplingPlan& plan,
    index_t batch_size, Rng& rng) {
  plan.validate();
  if (batch_size < 1)
    throw std::invalid_argument("sample_head_minibatch: batch_size must be >= 1");

  std::array<std::vector<ProposalRef>, 2> pools;  // positives, negatives
  for (std::size_t v = 0; v < labeled.size(); ++v) {
    for (std::size_t p = 0; p < labeled[v].size(); ++p) {
      switch (labeled[v][p].label) {
        case ProposalLabel::Positive:
          pools[0].push_back(ProposalRef{static_cast<index_t>(v), static_cast<index_t>(p)});
          break;
        case ProposalLabel::Negative:
          pools[1].push_back(ProposalRef{static_cast<index_t>(v), static_cast<index_t>(p)});
          break;
        case ProposalLabel::Ignore:
          break;
      }
    }
  }
  if (pools[0].empty()) throw config_error("sample_head_minibatch: no Positive proposals");
  if (pools[1].empty()) throw config_error("sample_head_minibatch: no Negative proposals");

  const auto counts = largest_remainder_counts(plan.head_pos_neg, batch_size);
  std::vector<ProposalRef> out;
  out.reserve(static_cast<std::size_t>(batch_size));
  for (std::size_t c = 0; c < 2; ++c)
    for (index_t i = 0; i < counts[c]; ++i)
      out.push_back(pools[c][static_cast<std::size_t>(rng.uniform_index(pools[c].size()))]);
  return out;
}

}  // namespace storycut
