#pragma once

namespace riskgov {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace riskgov
