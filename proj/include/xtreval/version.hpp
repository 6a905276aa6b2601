#pragma once

namespace xtreval {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace xtreval
