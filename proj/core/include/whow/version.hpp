#pragma once

namespace whow {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace whow
