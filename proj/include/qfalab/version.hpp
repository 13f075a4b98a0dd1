#pragma once

namespace qfalab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qfalab
