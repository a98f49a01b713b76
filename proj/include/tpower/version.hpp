#pragma once

namespace tpower {

inline constexpr const char* kLibraryVersion = "0.1.0";

}  // namespace tpower
