#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hhdl {

inline constexpr const char* kLibraryVersion = "1.0.0";

// 64-bit FNV-1a over a file's bytes, rendered as 16 hex digits.
std::string fingerprint_file(const std::string& path);

struct ManifestEntry {
    std::string key;
    std::string value;
};

// Reproducibility sidecar written next to a command's primary output.
// Contains only inputs of the computation (flags, seeds, input file
// fingerprints), never wall-clock data, so reruns are byte-identical.
struct RunManifest {
    std::string command;                     // subcommand name
    std::vector<ManifestEntry> config;       // flag name -> value, insertion order
    std::vector<ManifestEntry> input_hashes; // input path -> fingerprint
    std::vector<std::string> outputs;
    std::string version = kLibraryVersion;
};

std::string manifest_to_json(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::string& path);

} // namespace hhdl
