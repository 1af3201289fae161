#pragma once

namespace rendezvous {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rendezvous
