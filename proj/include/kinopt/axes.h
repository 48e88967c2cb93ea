#ifndef KINOPT_AXES_H_
#define KINOPT_AXES_H_

#include <array>
#include <string>

namespace kinopt {

/// Six-element axis mask in variation order [rot_x rot_y rot_z trans_x
/// trans_y trans_z].
using AxisMask = std::array<bool, 6>;

inline constexpr AxisMask kAllAxes{true, true, true, true, true, true};
inline constexpr AxisMask kRotationAxes{true, true, true, false, false, false};
inline constexpr AxisMask kTranslationAxes{false, false, false,
                                           true,  true,  true};

inline constexpr std::array<const char *, 6> kAxisNames{
    "rot_x", "rot_y", "rot_z", "trans_x", "trans_y", "trans_z"};

inline int CountAxes(const AxisMask &mask) {
  int n = 0;
  for (bool axis : mask) n += axis ? 1 : 0;
  return n;
}

inline AxisMask InvertAxes(const AxisMask &mask) {
  AxisMask inverted;
  for (int i = 0; i < 6; ++i) inverted[i] = !mask[i];
  return inverted;
}

}  // namespace kinopt

#endif  // KINOPT_AXES_H_
