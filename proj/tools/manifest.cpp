#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>
#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif
#include <stdexcept>

#include "stagedtrees/version.hpp"

namespace stagedtrees::cli {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json doc;
  doc["command"] = argv;
  auto& inputs_json = doc["inputs"] = nlohmann::ordered_json::array();
  for (const auto& in : inputs) inputs_json.push_back({{"name", in.name}, {"sha256", in.sha256}});
  doc["seed"] = seed;
  doc["version"] = kVersion;
  doc["seconds"] = seconds;
  return doc.dump(2) + "\n";
}

}  // namespace stagedtrees::cli
