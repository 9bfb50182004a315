#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace twistbound::io {

/// Locale-independent decimal rendering with 17 significant digits
/// (round-trip exact for doubles).
std::string format_real(double value);

std::uint64_t fnv1a64(std::string_view bytes);

std::string hex64(std::uint64_t value);

}  // namespace twistbound::io
