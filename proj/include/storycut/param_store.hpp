#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "storycut/tensor.hpp"

namespace storycut {

struct OptimConfig {
  double learning_rate = 0.001;
  double momentum = 0.9;
  double weight_decay = 0.0;

  void validate() const;
};

struct ParamEntry {
  std::string name;
  Tensor2 value;
  Tensor2 grad;
  Tensor2 velocity;
};

// Named parameter tensors with gradient and momentum buffers. Entries keep
// insertion order; that order defines initialization, update, and checkpoint
// layout.
class ParamStore {
 public:
  Tensor2& create(const std::string& name, index_t rows, index_t cols);

  bool has(const std::string& name) const { return index_.count(name) != 0; }

  ParamEntry& entry(const std::string& name);
  const ParamEntry& entry(const std::string& name) const;

  Tensor2& value(const std::string& name) { return entry(name).value; }
  const Tensor2& value(const std::string& name) const { return entry(name).value; }
  Tensor2& grad(const std::string& name) { return entry(name).grad; }

  std::vector<ParamEntry>& entries() { return entries_; }
  const std::vector<ParamEntry>& entries() const { return entries_; }

  void zero_grads();

  index_t scalar_count() const;

 private:
  std::vector<ParamEntry> entries_;
  std::map<std::string, std::size_t> index_;
};

// v <- momentum * v - lr * (g + weight_decay * w); w <- w + v; grads zeroed.
void sgd_momentum_step(ParamStore& store, const OptimConfig& cfg);

}  // namespace storycut
