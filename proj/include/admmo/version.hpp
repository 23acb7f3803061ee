#pragma once

namespace admmo {

inline constexpr const char* version = "0.1.0";

}  // namespace admmo
