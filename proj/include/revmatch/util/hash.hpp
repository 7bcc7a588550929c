#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace revmatch {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

std::uint64_t fnv1a64(std::string_view data);

/// SplitMix64 finalizer; used to turn structured keys into seeds.
std::uint64_t mix64(std::uint64_t x);

/// Per-item seed derived from a global seed and a stable item key. Stable under
/// any scheduling of the items.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view key);

}  // namespace revmatch
