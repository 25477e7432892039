#pragma once

#include <string>

#include "hhdl/learning.hpp"

namespace hhdl {

// Binary dictionary files. Reflector products use magic "HHDL": version,
// n, m, flags (bit0 = orthogonal set), then m*n little-endian doubles with
// the first-applied reflector first. Dense orthonormal matrices use magic
// "QDLA": version, n, then n*n little-endian doubles in row-major order.
// Neither format stores training provenance; a loaded dictionary carries
// s = 0 (unknown) and callers must pass sparsity explicitly.
void write_dictionary(const std::string& path, const LearnedDictionary& d);
LearnedDictionary read_dictionary(const std::string& path);

inline constexpr std::uint32_t kDictionaryFormatVersion = 1;

} // namespace hhdl
