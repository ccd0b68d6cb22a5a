#include "kgav/cache.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "kgav/error.hpp"

namespace kgav {

namespace {
constexpr std::string_view kMagic = "kgav-cache-v1 ";
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

ResponseCache::ResponseCache(std::filesystem::path directory)
    : directory_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) throw IoError("cannot create cache directory " + directory_.string() + ": " + ec.message());
}

std::filesystem::path ResponseCache::entry_path(std::string_view request) const {
  std::string key = sha256_hex(request);
  // Two-level fan-out keeps directories small for large runs.
  return directory_ / key.substr(0, 2) / key;
}

std::optional<std::string> ResponseCache::get(std::string_view request) const {
  auto path = entry_path(request);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ++misses_;
    return std::nullopt;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string content = buffer.str();
  try {
    auto newline = content.find('\n');
    if (newline == std::string::npos || !content.starts_with(kMagic)) {
      throw CacheCorrupt(path.string() + ": bad header");
    }
    std::string expected = content.substr(kMagic.size(), newline - kMagic.size());
    std::string payload = content.substr(newline + 1);
    if (sha256_hex(payload) != expected) throw CacheCorrupt(path.string() + ": hash mismatch");
    ++hits_;
    return payload;
  } catch (const CacheCorrupt& e) {
    ++corrupt_;
    ++misses_;
    std::cerr << "warning: " << e.what() << "; refetching\n";
    return std::nullopt;
  }
}

void ResponseCache::put(std::string_view request, std::string_view payload) const {
  auto path = entry_path(request);
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ostringstream tmp_name;
  tmp_name << path.filename().string() << ".tmp." << std::this_thread::get_id() << "."
           << sequence_++;
  auto tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write cache entry " + tmp.string());
    out << kMagic << sha256_hex(payload) << '\n';
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot commit cache entry " + path.string() + ": " + ec.message());
  }
}

void ResponseCache::clear() const {
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(directory_, ec)) {
    std::filesystem::remove_all(entry.path(), ec);
  }
}

}  // namespace kgav
