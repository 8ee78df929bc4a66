#pragma once

namespace dowave {

inline constexpr const char* version = "0.1.0";

}  // namespace dowave
