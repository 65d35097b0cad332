#pragma once

namespace revlab {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace revlab
