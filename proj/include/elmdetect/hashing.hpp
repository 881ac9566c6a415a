#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace elmdetect {

// 64-bit FNV-1a. Used for config fingerprints and output manifests, not for
// anything security related.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a_file(const std::filesystem::path& path);
std::string to_hex(std::uint64_t value);

}  // namespace elmdetect
