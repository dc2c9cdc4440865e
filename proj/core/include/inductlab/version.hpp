#pragma once

namespace inductlab {

inline constexpr const char* kVersion = "0.1.0";

} // namespace inductlab
