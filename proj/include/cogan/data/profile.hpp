#pragma once

#include <string>
#include <string_view>

namespace cogan::data {

/// Working resolution of a run. `padded_side` is the zero-padded canvas used
/// by training-time crop augmentation.
struct ScaleProfile {
  std::string name;
  int side = 0;
  int padded_side = 0;

  static ScaleProfile paper() { return {"paper", 256, 272}; }
  static ScaleProfile desk() { return {"desk", 64, 68}; }
  /// Accepts `paper` or `desk`.
  static ScaleProfile by_name(std::string_view name);

  int pad() const { return padded_side - side; }
  bool operator==(const ScaleProfile&) const = default;
};

}  // namespace cogan::data
