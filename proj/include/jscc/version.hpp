#pragma once

namespace jscc {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace jscc
