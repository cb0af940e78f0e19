#pragma once

#include <string>

#include "storycut/ban.hpp"
#include "storycut/proposal_head.hpp"
#include "storycut/serialization.hpp"

namespace storycut {

void save_ban_checkpoint(const std::string& path, const BanModel& model);
void save_head_checkpoint(const std::string& path, const HeadModel& model);

// Both enforce the model kind recorded in the file.
BanModel load_ban_checkpoint(const std::string& path);
HeadModel load_head_checkpoint(const std::string& path);

}  // namespace storycut
