#pragma once

namespace floqsh {

inline constexpr const char* kVersion = "0.1.0";

} // namespace floqsh
