#pragma once

// Ranked query-candidate lists from a KGQA system, asked once per distinct
// question.

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "kgav/cache.hpp"
#include "kgav/sparql.hpp"

namespace kgav::qa {

struct CandidateList {
  std::string question;
  /// Ranks 1..N, ascending, no gaps.
  std::vector<sparql::QueryCandidate> candidates;
  /// One per dropped (unparseable) candidate.
  std::vector<std::string> warnings;
};

/// Where the candidate array and its fields live in a backend response.
/// QAnswer-style APIs differ in naming, so this is configuration.
struct ResponseMapping {
  std::string list_pointer;  ///< JSON pointer to the array; "" = document root
  std::string sparql_field = "query";
  std::string rank_field = "rank";
  std::string confidence_field = "confidence";

  /// JSON object with any of the four keys above.
  static ResponseMapping from_json_file(const std::filesystem::path& path);
};

class KgqaBackend {
 public:
  virtual ~KgqaBackend() = default;
  /// Raw response body for one question.
  virtual std::string fetch(const std::string& question) const = 0;
  virtual std::string describe() const = 0;
  virtual const ResponseMapping& mapping() const = 0;
  virtual const sparql::ParseOptions& parse_options() const = 0;
};

struct RemoteKgqaConfig {
  std::string url;
  std::string knowledge_base = "wikidata";
  std::string language = "en";
  double timeout_seconds = 60.0;
  std::string bearer_token;
  ResponseMapping mapping;
  sparql::ParseOptions parse_options;
};

/// POSTs the form fields question, kb and lang.
class RemoteKgqa final : public KgqaBackend {
 public:
  explicit RemoteKgqa(RemoteKgqaConfig config);
  std::string fetch(const std::string& question) const override;
  std::string describe() const override { return "remote:" + config_.url + "#" + config_.knowledge_base; }
  const ResponseMapping& mapping() const override { return config_.mapping; }
  const sparql::ParseOptions& parse_options() const override { return config_.parse_options; }

 private:
  RemoteKgqaConfig config_;
};

/// Stable per-question id prefix used to name candidates.
std::string question_key(const std::string& question);

/// Orders by rank (or by descending confidence, or array order), drops
/// candidates that fail to parse and renumbers ranks 1..N. Throws
/// MalformedResponse if the response holds no candidate array.
CandidateList parse_candidates(const std::string& question, const std::string& body,
                               const ResponseMapping& mapping,
                               const sparql::ParseOptions& options = {});

CandidateList ask(const std::string& question, const KgqaBackend& backend);

/// Raw responses per question: an in-process map, optionally backed by a
/// ResponseCache on disk.
class QuestionCache {
 public:
  QuestionCache() = default;
  explicit QuestionCache(std::shared_ptr<const ResponseCache> disk) : disk_(std::move(disk)) {}

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& body);
  void clear();

 private:
  std::shared_ptr<const ResponseCache> disk_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> memory_;
};

/// Backend request on first sight of a question, replay afterwards.
CandidateList ask_once(const std::string& question, const KgqaBackend& backend,
                       QuestionCache& cache);

/// One CandidateList per input question (input order). Each distinct
/// question reaches the backend at most once; distinct questions are
/// dispatched on up to `concurrency` threads.
std::vector<CandidateList> ask_batch(const std::vector<std::string>& questions,
                                     const KgqaBackend& backend, QuestionCache& cache,
                                     int concurrency = 1);

}  // namespace kgav::qa
