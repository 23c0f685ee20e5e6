#pragma once

namespace abm {

inline constexpr const char* kToolName = "abm-evi";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace abm
