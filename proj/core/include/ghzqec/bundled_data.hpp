#pragma once

#include <string_view>

// Data files compiled into the library so lookups never depend on the
// working directory.
namespace ghzqec::bundled {

std::string_view hardware_sets_json();
std::string_view w_to_ghz_patterns_json();

}  // namespace ghzqec::bundled
