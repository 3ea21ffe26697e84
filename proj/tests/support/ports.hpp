#pragma once

#include <unistd.h>

#include <cstdint>

namespace casc::testing {

/// A port pair unlikely to collide with concurrent test processes.
inline std::uint16_t test_port_base(std::uint16_t offset) {
  return static_cast<std::uint16_t>(20000 + (::getpid() % 2000) * 20 + offset);
}

}  // namespace casc::testing
