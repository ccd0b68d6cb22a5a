#pragma once

// Invented knowledge graph with VANiLLa-shaped records over it, and a
// deterministic KGQA stand-in that proposes ranked candidates against it.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgav/dataset.hpp"
#include "kgav/kg_client.hpp"
#include "kgav/qa_client.hpp"
#include "kgav/sparql.hpp"

namespace kgav::synthetic {

inline constexpr const char* kEntityNs = "http://example.org/entity/";
inline constexpr const char* kPropertyNs = "http://example.org/prop/";

/// Mixes a run seed with a string key; the basis of every per-question
/// random stream.
std::uint64_t keyed_seed(std::uint64_t seed, std::string_view key);

struct WorldConfig {
  std::size_t persons = 800;
  std::uint64_t seed = 7;
  void validate() const;
};

struct Fact {
  std::string subject;
  std::string predicate;
  std::string object;
};

struct World {
  std::shared_ptr<kg::MockGraph> graph;
  /// One record per (person, relation); facts[i] is the triple behind records[i].
  std::vector<dataset::VanillaRecord> records;
  std::vector<Fact> facts;
  std::vector<std::string> persons;
  std::vector<std::string> relations;  ///< predicates that have records
  std::vector<std::string> predicates;  ///< every predicate in the graph
  std::unordered_map<std::string, std::size_t> by_question;

  /// `ex:` and `exp:` predeclared.
  sparql::ParseOptions parse_options() const;
};

World build_world(const WorldConfig& config = {});

struct MockKgqaConfig {
  std::size_t candidates = 60;
  /// The correct candidate's rank is uniform over 1..max_correct_rank.
  int max_correct_rank = 10;
  double absent_probability = 0.2;
  std::uint64_t seed = 0;
  /// Throws ConfigError.
  void validate() const;
};

struct Draw {
  bool absent = false;
  int correct_rank = 0;  ///< 0 when absent
};

/// Answers with a JSON array of {query, rank, confidence}. The response is a
/// pure function of (question, seed). Unknown questions get only wrong
/// candidates.
class MockKgqa final : public qa::KgqaBackend {
 public:
  MockKgqa(std::shared_ptr<const World> world, MockKgqaConfig config);

  std::string fetch(const std::string& question) const override;
  std::string describe() const override;
  const qa::ResponseMapping& mapping() const override { return mapping_; }
  const sparql::ParseOptions& parse_options() const override { return options_; }

  Draw draw(const std::string& question) const;
  const MockKgqaConfig& config() const noexcept { return config_; }
  std::size_t calls() const noexcept { return calls_; }

 private:
  std::shared_ptr<const World> world_;
  MockKgqaConfig config_;
  qa::ResponseMapping mapping_;
  sparql::ParseOptions options_;
  mutable std::atomic<std::size_t> calls_{0};
};

}  // namespace kgav::synthetic
