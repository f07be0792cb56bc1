#pragma once

namespace collapse {

inline constexpr const char* kToolName = "collapse_sim";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace collapse
