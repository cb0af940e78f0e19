#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "storycut/dataset.hpp"
#include "storycut/param_store.hpp"

namespace storycut {

// Whole-file helpers; both throw io_error on failure. Writes go through a
// temp file + rename so readers never observe partial output.
std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& bytes);

inline constexpr std::uint32_t kFeatureFormatVersion = 1;
inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

// Features: "TRNF", version u32, id_len u32 + id, T u64, D u64, then T*D
// little-endian float32 row-major.
void write_features(const std::string& path, const FrameFeatureSequence& seq);
FrameFeatureSequence read_features(const std::string& path);

// One JSON document: {"videos":[{"video_id","num_frames","stories":
// [{"start","end"},...]},...]}. The reader enforces sorted/disjoint/in-bounds.
void write_annotations(const std::string& path, const std::vector<VideoAnnotation>& videos);
std::vector<VideoAnnotation> read_annotations(const std::string& path);

// Same shape with a "score" per story entry; proposals may overlap, so only
// structural validity is enforced.
void write_scored(const std::string& path, const std::vector<ScoredVideoProposals>& videos);
std::vector<ScoredVideoProposals> read_scored(const std::string& path);

enum class ModelKind : std::uint8_t { Ban = 1, Head = 2 };

struct CheckpointData {
  ModelKind kind = ModelKind::Ban;
  nlohmann::json config;
  std::vector<std::pair<std::string, Tensor2>> tensors;  // file order
};

// Checkpoint: "TRNM", version u32, kind u8, u32-length-prefixed config JSON,
// then repeated (u32 name_len + name, rows u64, cols u64, float64 data).
// Round-trips bit-exactly.
void write_checkpoint(const std::string& path, ModelKind kind, const nlohmann::json& config,
                      const ParamStore& params);
CheckpointData read_checkpoint(const std::string& path);

// Copies checkpoint tensors into a model's parameter store; every parameter
// must be present with matching shape.
void load_params(const CheckpointData& data, ParamStore& params);

}  // namespace storycut
