#pragma once

namespace photorecon {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace photorecon
