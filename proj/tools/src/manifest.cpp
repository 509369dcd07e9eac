#include "manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

#include "ccge/errors.hpp"
#include "format.hpp"

namespace ccge::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw IoError("SHA-256 unavailable");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    char b[3];
    std::snprintf(b, sizeof b, "%02x", digest[i]);
    hex += b;
  }
  return hex;
}

Manifest::Manifest(std::string command) : command_(std::move(command)) {}

void Manifest::add_input(const std::filesystem::path& file) {
  if (std::find(inputs_.begin(), inputs_.end(), file) == inputs_.end()) inputs_.push_back(file);
}

void Manifest::add_output(const std::filesystem::path& file) {
  if (std::find(outputs_.begin(), outputs_.end(), file) == outputs_.end()) outputs_.push_back(file);
}

void Manifest::write(const std::filesystem::path& dir, bool complete, const std::string& failed_stage,
                     const std::string& error) const {
  using nlohmann::json;
  json doc;
  doc["tool"] = "ccge";
  doc["version"] = CCGE_VERSION;
  doc["command"] = command_;
  doc["complete"] = complete;
  if (!failed_stage.empty()) doc["failed_stage"] = failed_stage;
  if (!error.empty()) doc["error"] = error;
  doc["config"] = config_;

  json inputs = json::array();
  for (const auto& p : inputs_) inputs.push_back({{"path", p.generic_string()}, {"sha256", sha256_file(p)}});
  doc["inputs"] = inputs;

  auto sorted = outputs_;
  std::sort(sorted.begin(), sorted.end());
  json outputs = json::array();
  for (const auto& p : sorted) {
    if (!std::filesystem::exists(p)) continue;
    outputs.push_back({{"path", std::filesystem::relative(p, dir).generic_string()}, {"sha256", sha256_file(p)}});
  }
  doc["outputs"] = outputs;
  doc["warnings"] = warnings_;
  write_text(dir / "manifest.json", doc.dump(2) + "\n");
}

}  // namespace ccge::cli
