#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace kgav {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Content-addressed response store: one file per request key under a
/// directory. Each entry carries the hash of its payload; an entry whose
/// payload no longer matches is reported once and treated as a miss.
///
/// Safe for concurrent use. Writers go through a temporary file and an
/// atomic rename, so racing writers of one key leave one complete entry.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path directory);

  std::optional<std::string> get(std::string_view request) const;
  void put(std::string_view request, std::string_view payload) const;
  void clear() const;

  std::filesystem::path entry_path(std::string_view request) const;
  const std::filesystem::path& directory() const noexcept { return directory_; }

  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }
  std::size_t corrupt_entries() const noexcept { return corrupt_; }

 private:
  std::filesystem::path directory_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
  mutable std::atomic<std::size_t> corrupt_{0};
  mutable std::atomic<std::size_t> sequence_{0};
};

}  // namespace kgav
