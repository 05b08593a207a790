#pragma once

namespace fiberamp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fiberamp
