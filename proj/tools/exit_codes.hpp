#pragma once

namespace geosocial::tools {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

}  // namespace geosocial::tools
