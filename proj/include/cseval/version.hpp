#pragma once

namespace cseval {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace cseval
