#include <doctest.h>

#include <fstream>
#include <thread>
#include <vector>

#include "kgav/cache.hpp"
#include "support.hpp"

using namespace kgav;

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("put then get") {
  fixtures::TempDir dir("cache");
  ResponseCache cache(dir.path);
  CHECK_FALSE(cache.get("k").has_value());
  cache.put("k", "payload\nwith newline");
  CHECK(cache.get("k") == std::optional<std::string>("payload\nwith newline"));
  cache.put("empty", "");
  CHECK(cache.get("empty") == std::optional<std::string>(""));
  CHECK(cache.hits() == 2);
  CHECK(cache.misses() == 1);
  ResponseCache reopened(dir.path);
  CHECK(reopened.get("k").has_value());
}

TEST_CASE("corrupt entries are misses") {
  fixtures::TempDir dir("cache");
  ResponseCache cache(dir.path);
  cache.put("a", "hello");
  cache.put("b", "world");
  std::ofstream(cache.entry_path("a"), std::ios::trunc) << "garbage";
  {
    std::ofstream out(cache.entry_path("b"), std::ios::app);
    out << "!";
  }
  CHECK_FALSE(cache.get("a").has_value());
  CHECK_FALSE(cache.get("b").has_value());
  CHECK(cache.corrupt_entries() == 2);
  cache.put("a", "hello");
  CHECK(cache.get("a") == std::optional<std::string>("hello"));
}

TEST_CASE("clear removes entries") {
  fixtures::TempDir dir("cache");
  ResponseCache cache(dir.path);
  cache.put("a", "1");
  cache.clear();
  CHECK_FALSE(cache.get("a").has_value());
}

TEST_CASE("racing writers leave one complete entry") {
  fixtures::TempDir dir("cache");
  ResponseCache cache(dir.path);
  std::vector<std::jthread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&cache, t] {
      for (int i = 0; i < 50; ++i) cache.put("shared", std::string(1000, static_cast<char>('a' + t)));
    });
  }
  threads.clear();
  auto got = cache.get("shared");
  REQUIRE(got.has_value());
  CHECK(got->size() == 1000);
  CHECK(cache.corrupt_entries() == 0);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir.path)) files += e.is_regular_file();
  CHECK(files == 1);
}
