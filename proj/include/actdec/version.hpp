#pragma once

namespace actdec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace actdec
