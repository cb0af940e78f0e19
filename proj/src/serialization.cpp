#include "storycut/serialization.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "storycut/errors.hpp"

namespace storycut {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path + " for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw io_error("read failure on " + path);
  return bytes;
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open " + tmp + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error("write failure on " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw io_error("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

namespace {

void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& s, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& s, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(s, bits);
}

void put_f64(std::string& s, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(s, bits);
}

struct Cursor {
  const std::string& bytes;
  const std::string& path;
  std::size_t off = 0;

  const char* take(std::size_t n, const char* what) {
    if (off + n > bytes.size())
      throw io_error(path + ": truncated reading " + what + " at offset " +
                     std::to_string(off) + ": need " + std::to_string(n) + " bytes, have " +
                     std::to_string(bytes.size() - off));
    const char* p = bytes.data() + off;
    off += n;
    return p;
  }

  std::uint32_t u32(const char* what) {
    const char* p = take(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
  }

  std::uint64_t u64(const char* what) {
    const char* p = take(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
  }

  float f32(const char* what) {
    const std::uint32_t bits = u32(what);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  double f64(const char* what) {
    const std::uint64_t bits = u64(what);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  void expect_magic(const char* magic) {
    const char* p = take(4, "magic");
    if (std::memcmp(p, magic, 4) != 0)
      throw io_error(path + ": bad magic at offset 0 (expected " + std::string(magic) + ")");
  }

  bool done() const { return off == bytes.size(); }
};

}  // namespace

void write_features(const std::string& path, const FrameFeatureSequence& seq) {
  if (seq.num_frames() < 1 || seq.dim() < 1)
    throw std::invalid_argument("write_features: need T >= 1 and D >= 1");
  std::string s;
  s.reserve(28 + seq.video_id.size() + static_cast<std::size_t>(4 * seq.values.size()));
  s += "TRNF";
  put_u32(s, kFeatureFormatVersion);
  put_u32(s, static_cast<std::uint32_t>(seq.video_id.size()));
  s += seq.video_id;
  put_u64(s, static_cast<std::uint64_t>(seq.num_frames()));
  put_u64(s, static_cast<std::uint64_t>(seq.dim()));
  for (double v : seq.values.data) put_f32(s, static_cast<float>(v));
  write_file_atomic(path, s);
}

FrameFeatureSequence read_features(const std::string& path) {
  const std::string bytes = read_file(path);
  Cursor c{bytes, path};
  c.expect_magic("TRNF");
  const std::uint32_t version = c.u32("version");
  if (version != kFeatureFormatVersion)
    throw io_error(path + ": feature format version " + std::to_string(version) +
                   " unsupported (this build reads version " +
                   std::to_string(kFeatureFormatVersion) + ")");
  const std::uint32_t id_len = c.u32("id length");
  FrameFeatureSequence seq;
  seq.video_id.assign(c.take(id_len, "video id"), id_len);
  const std::uint64_t T = c.u64("frame count");
  const std::uint64_t D = c.u64("feature dim");
  if (T < 1 || D < 1 || T > (1ull << 40) || D > (1ull << 20) ||
      T * D > std::uint64_t(std::numeric_limits<index_t>::max()) / 8)
    throw io_error(path + ": implausible dimensions T=" + std::to_string(T) +
                   " D=" + std::to_string(D) + " at offset " + std::to_string(c.off - 16));
  // fixed header: magic(4) + version(4) + id_len(4) + T(8) + D(8) = 28 bytes
  const std::uint64_t expected = 28 + id_len + 4 * T * D;
  if (bytes.size() != expected)
    throw io_error(path + ": payload size mismatch: expected " + std::to_string(expected) +
                   " bytes for T=" + std::to_string(T) + " D=" + std::to_string(D) + ", file has " +
                   std::to_string(bytes.size()));
  seq.values = Tensor2(static_cast<index_t>(T), static_cast<index_t>(D));
  for (double& v : seq.values.data) v = double(c.f32("feature value"));
  return seq;
}

namespace {

nlohmann::json parse_json_file(const std::string& path) {
  const std::string bytes = read_file(path);
  try {
    return nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw io_error(path + ": JSON parse error: " + e.what());
  }
}

const nlohmann::json& field(const nlohmann::json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw io_error(path + ": missing field \"" + key + "\"");
  return *it;
}

}  // namespace

void write_annotations(const std::string& path, const std::vector<VideoAnnotation>& videos) {
  nlohmann::json doc;
  doc["videos"] = nlohmann::json::array();
  for (const VideoAnnotation& v : videos) {
    v.validate();
    nlohmann::json jv;
    jv["video_id"] = v.video_id;
    jv["num_frames"] = v.num_frames;
    jv["stories"] = nlohmann::json::array();
    for (const Interval& s : v.stories)
      jv["stories"].push_back({{"start", s.start}, {"end", s.end}});
    doc["videos"].push_back(std::move(jv));
  }
  write_file_atomic(path, doc.dump(2) + "\n");
}

std::vector<VideoAnnotation> read_annotations(const std::string& path) {
  const nlohmann::json doc = parse_json_file(path);
  std::vector<VideoAnnotation> out;
  try {
    for (const auto& jv : field(doc, "videos", path)) {
      VideoAnnotation v;
      v.video_id = field(jv, "video_id", path).get<std::string>();
      v.num_frames = field(jv, "num_frames", path).get<index_t>();
      for (const auto& js : field(jv, "stories", path))
        v.stories.push_back(Interval{field(js, "start", path).get<index_t>(),
                                     field(js, "end", path).get<index_t>()});
      v.validate();
      out.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw io_error(path + ": malformed annotation document: " + e.what());
  }
  return out;
}

void write_scored(const std::string& path, const std::vector<ScoredVideoProposals>& videos) {
  nlohmann::json doc;
  doc["videos"] = nlohmann::json::array();
  for (const ScoredVideoProposals& v : videos) {
    nlohmann::json jv;
    jv["video_id"] = v.video_id;
    jv["num_frames"] = v.num_frames;
    jv["stories"] = nlohmann::json::array();
    for (const ScoredInterval& s : v.items) {
      if (!s.interval.valid() || s.interval.end > v.num_frames)
        throw config_error("write_scored: interval out of bounds in " + v.video_id);
      if (!std::isfinite(s.score))
        throw config_error("write_scored: non-finite score in " + v.video_id);
      jv["stories"].push_back(
          {{"start", s.interval.start}, {"end", s.interval.end}, {"score", s.score}});
    }
    doc["videos"].push_back(std::move(jv));
  }
  write_file_atomic(path, doc.dump(2) + "\n");
}

std::vector<ScoredVideoProposals> read_scored(const std::string& path) {
  const nlohmann::json doc = parse_json_file(path);
  std::vector<ScoredVideoProposals> out;
  try {
    for (const auto& jv : field(doc, "videos", path)) {
      ScoredVideoProposals v;
      v.video_id = field(jv, "video_id", path).get<std::string>();
      v.num_frames = field(jv, "num_frames", path).get<index_t>();
      for (const auto& js : field(jv, "stories", path)) {
        ScoredInterval s;
        s.interval = Interval{field(js, "start", path).get<index_t>(),
                              field(js, "end", path).get<index_t>()};
        s.score = field(js, "score", path).get<double>();
        if (!s.interval.valid() || s.interval.end > v.num_frames)
          throw config_error(path + ": video " + v.video_id + ": interval [" +
                             std::to_string(s.interval.start) + "," +
                             std::to_string(s.interval.end) + ") out of bounds");
        if (!std::isfinite(s.score))
          throw config_error(path + ": video " + v.video_id + ": non-finite score");
        v.items.push_back(s);
      }
      out.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw io_error(path + ": malformed scored document: " + e.what());
  }
  return out;
}

void write_checkpoint(const std::string& path, ModelKind kind, const nlohmann::json& config,
                      const ParamStore& params) {
  std::string s;
  s += "TRNM";
  put_u32(s, kCheckpointFormatVersion);
  s.push_back(static_cast<char>(kind));
  const std::string cfg = config.dump();
  put_u32(s, static_cast<std::uint32_t>(cfg.size()));
  s += cfg;
  for (const ParamEntry& e : params.entries()) {
    put_u32(s, static_cast<std::uint32_t>(e.name.size()));
    s += e.name;
    put_u64(s, static_cast<std::uint64_t>(e.value.rows));
    put_u64(s, static_cast<std::uint64_t>(e.value.cols));
    for (double v : e.value.data) put_f64(s, v);
  }
  write_file_atomic(path, s);
}

CheckpointData read_checkpoint(const std::string& path) {
  const std::string bytes = read_file(path);
  Cursor c{bytes, path};
  c.expect_magic("TRNM");
  const std::uint32_t version = c.u32("version");
  if (version != kCheckpointFormatVersion)
    throw io_error(path + ": checkpoint format version " + std::to_string(version) +
                   " unsupported (this build reads version " +
                   std::to_string(kCheckpointFormatVersion) + ")");
  CheckpointData data;
  const auto kind = static_cast<std::uint8_t>(*c.take(1, "model kind"));
  if (kind != static_cast<std::uint8_t>(ModelKind::Ban) &&
      kind != static_cast<std::uint8_t>(ModelKind::Head))
    throw io_error(path + ": unknown model_kind byte " + std::to_string(int(kind)));
  data.kind = static_cast<ModelKind>(kind);
  const std::uint32_t cfg_len = c.u32("config length");
  const std::string cfg(c.take(cfg_len, "config"), cfg_len);
  try {
    data.config = nlohmann::json::parse(cfg);
  } catch (const nlohmann::json::parse_error& e) {
    throw io_error(path + ": embedded config JSON parse error: " + e.what());
  }
  while (!c.done()) {
    const std::uint32_t name_len = c.u32("tensor name length");
    std::string name(c.take(name_len, "tensor name"), name_len);
    const std::uint64_t rows = c.u64("rows");
    const std::uint64_t cols = c.u64("cols");
    if (rows < 1 || cols < 1 ||
        rows * cols > std::uint64_t(std::numeric_limits<index_t>::max()) / 16)
      throw io_error(path + ": implausible tensor shape " + std::to_string(rows) + "x" +
                     std::to_string(cols) + " for " + name);
    Tensor2 t(static_cast<index_t>(rows), static_cast<index_t>(cols));
    for (double& v : t.data) v = c.f64("tensor value");
    data.tensors.emplace_back(std::move(name), std::move(t));
  }
  return data;
}

void load_params(const CheckpointData& data, ParamStore& params) {
  std::size_t loaded = 0;
  for (const auto& [name, tensor] : data.tensors) {
    if (!params.has(name))
      throw config_error("checkpoint tensor " + name + " has no matching model parameter");
    Tensor2& dst = params.value(name);
    if (!dst.same_shape(tensor))
      throw config_error("checkpoint tensor " + name + " has shape " +
                         std::to_string(tensor.rows) + "x" + std::to_string(tensor.cols) +
                         ", model expects " + std::to_string(dst.rows) + "x" +
                         std::to_string(dst.cols));
    dst = tensor;
    ++loaded;
  }
  if (loaded != params.entries().size())
    throw config_error("checkpoint is missing " +
                       std::to_string(params.entries().size() - loaded) +
                       " model parameter tensor(s)");
  }

}  // namespace storycut
