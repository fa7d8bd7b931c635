#pragma once

namespace lqm {

inline constexpr const char* kVersion = "0.1.0";

} // namespace lqm
