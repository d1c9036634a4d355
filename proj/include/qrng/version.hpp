#pragma once

namespace qrng {

inline constexpr const char* kToolName = "qrngcert";
inline constexpr const char* kToolVersion = "0.2.0";

}  // namespace qrng
