#include "storycut/model_io.hpp"

#include "storycut/errors.hpp"

namespace storycut {

void save_ban_checkpoint(const std::string& path, const BanModel& model) {
  nlohmann::json cfg{{"feature_dim", model.config().feature_dim},
                     {"hidden", model.config().hidden}};
  write_checkpoint(path, ModelKind::Ban, cfg, model.params());
}

void save_head_checkpoint(const std::string& path, const HeadModel& model) {
  nlohmann::json cfg{{"feature_dim", model.config().feature_dim},
                     {"hidden", model.config().hidden},
                     {"num_layers", model.config().num_layers},
                     {"fast_forward", model.config().fast_forward}};
  write_checkpoint(path, ModelKind::Head, cfg, model.params());
}

namespace {

template <typename T>
T cfg_field(const nlohmann::json& cfg, const char* key, const std::string& path) {
  auto it = cfg.find(key);
  if (it == cfg.end())
    throw config_error(path + ": checkpoint config lacks \"" + std::string(key) + "\"");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(path + ": bad checkpoint config field \"" + std::string(key) +
                       "\": " + e.what());
  }
}

}  // namespace

BanModel load_ban_checkpoint(const std::string& path) {
  const CheckpointData data = read_checkpoint(path);
  if (data.kind != ModelKind::Ban)
    throw config_error(path + ": expected a ban checkpoint, found model kind " +
                       std::to_string(int(data.kind)));
  BanConfig cfg;
  cfg.feature_dim = cfg_field<index_t>(data.config, "feature_dim", path);
  cfg.hidden = cfg_field<index_t>(data.config, "hidden", path);
  BanModel model(cfg);
  load_params(data, model.params());
  return model;
}

HeadModel load_head_checkpoint(const std::string& path) {
  const CheckpointData data = read_checkpoint(path);
  if (data.kind != ModelKind::Head)
    throw config_error(path + ": expected a head checkpoint, found model kind " +
                       std::to_string(int(data.kind)));
  HeadConfig cfg;
  cfg.feature_dim = cfg_field<index_t>(data.config, "feature_dim", path);
  cfg.hidden = cfg_field<index_t>(data.config, "hidden", path);
  cfg.num_layers = cfg_field<index_t>(data.config, "num_layers", path);
  cfg.fast_forward = cfg_field<bool>(data.config, "fast_forward", path);
  HeadModel model(cfg);
  load_params(data, model.params());
  return model;
}

}  // namespace storycut
