#pragma once

namespace curlforge {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace curlforge
