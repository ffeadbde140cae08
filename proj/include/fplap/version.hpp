#pragma once

namespace fplap {

inline constexpr const char* kVersion = "0.1.0";

}
