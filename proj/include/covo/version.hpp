#pragma once

namespace covo {

inline constexpr const char* kToolName = "covo";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace covo
