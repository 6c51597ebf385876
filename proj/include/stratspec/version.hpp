#pragma once

namespace stratspec {
inline constexpr const char* version = "0.1.0";
}
