#include "storycut/param_store.hpp"

#include "storycut/errors.hpp"

namespace storycut {

void OptimConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw config_error("learning_rate must be nonnegative");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw config_error("momentum must be in [0,1)");
  if (!(weight_decay >= 0.0)) throw config_error("weight_decay must be nonnegative");
}

Tensor2& ParamStore::create(const std::string& name, index_t rows, index_t cols) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("parameter " + name + " has empty shape");
  index_[name] = entries_.size();
  entries_.push_back(ParamEntry{name, Tensor2(rows, cols), Tensor2(rows, cols), Tensor2(rows, cols)});
  return entries_.back().value;
}

ParamEntry& ParamStore::entry(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::invalid_argument("unknown parameter name: " + name);
  return entries_[it->second];
}

const ParamEntry& ParamStore::entry(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::invalid_argument("unknown parameter name: " + name);
  return entries_[it->second];
}

void ParamStore::zero_grads() {
  for (auto& e : entries_) e.grad.zero();
}

index_t ParamStore::scalar_count() const {
  index_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

void sgd_momentum_step(ParamStore& store, const OptimConfig& cfg) {
  cfg.validate();
  for (auto& e : store.entries()) {
    if (!e.value.same_shape(e.grad) || !e.value.same_shape(e.velocity))
      throw std::invalid_argument("shape mismatch in parameter " + e.name);
    double* w = e.value.data.data();
    double* g = e.grad.data.data();
    double* v = e.velocity.data.data();
    const std::size_t n = e.value.data.size();
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = cfg.momentum * v[i] - cfg.learning_rate * (g[i] + cfg.weight_decay * w[i]);
      w[i] += v[i];
      g[i] = 0.0;
    }
  }
}

}  // namespace storycut
