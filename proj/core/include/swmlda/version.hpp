#pragma once

namespace swmlda {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace swmlda
