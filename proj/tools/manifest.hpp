#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stagedtrees::cli {

std::string sha256_hex(std::string_view bytes);

struct InputDigest {
  std::string name;
  std::string sha256;
};

/// Provenance record of a learn or evaluate run.
struct RunManifest {
  std::vector<std::string> argv;
  std::vector<InputDigest> inputs;
  std::uint64_t seed = 0;
  double seconds = 0.0;

  std::string to_json() const;
};

}  // namespace stagedtrees::cli
