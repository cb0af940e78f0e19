#pragma once

#include <stdexcept>
#include <string>

namespace storycut {

// Invalid configuration or malformed/ill-formed input data. CLI exit code 2.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem / serialization failure. CLI exit code 3.
struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite loss during training. CLI exit code 4.
struct divergence_error : std::runtime_error {
  explicit divergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace storycut
