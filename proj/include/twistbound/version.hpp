#pragma once

namespace twistbound {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace twistbound
