#pragma once

namespace tropot {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tropot
