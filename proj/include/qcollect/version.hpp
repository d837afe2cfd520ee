#pragma once

namespace qcollect {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace qcollect
