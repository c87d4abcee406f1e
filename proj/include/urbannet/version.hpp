#pragma once

namespace urbannet {

inline constexpr const char* kToolName = "urbannet";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace urbannet
