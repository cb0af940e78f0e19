#include "storycut/dataset.hpp"

#include "storycut/errors.hpp"

namespace storycut {

void VideoAnnotation::validate() const {
  if (num_frames < 0) throw config_error("video " + video_id + ": negative num_frames");
  const Interval* prev = nullptr;
  for (const Interval& s : stories) {
    if (!s.valid())
      throw config_error("video " + video_id + ": invalid story interval [" +
                         std::to_string(s.start) + "," + std::to_string(s.end) + ")");
    if (s.end > num_frames)
      throw config_error("video " + video_id + ": story out of bounds [" +
                         std::to_string(s.start) + "," + std::to_string(s.end) + ") with " +
                         std::to_string(num_frames) + " frames");
    if (prev && s.start < prev->end)
      throw config_error("video " + video_id + ": stories overlap or are unsorted at [" +
                         std::to_string(s.start) + "," + std::to_string(s.end) + ")");
    prev = &s;
  }
}

}  // namespace storycut
