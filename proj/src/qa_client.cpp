#include "kgav/qa_client.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <numeric>
#include <thread>

#include "kgav/error.hpp"
#include "kgav/http.hpp"

namespace kgav::qa {

using nlohmann::json;

ResponseMapping ResponseMapping::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read response mapping " + path.string());
  try {
    auto j = json::parse(in);
    if (!j.is_object()) throw ConfigError("response mapping " + path.string() + " must be an object");
    for (const auto& [key, value] : j.items()) {
      if (key != "list_pointer" && key != "sparql_field" && key != "rank_field" && key != "confidence_field") {
        throw ConfigError("unknown response mapping key " + key);
      }
    }
    ResponseMapping m;
    m.list_pointer = j.value("list_pointer", m.list_pointer);
    m.sparql_field = j.value("sparql_field", m.sparql_field);
    m.rank_field = j.value("rank_field", m.rank_field);
    m.confidence_field = j.value("confidence_field", m.confidence_field);
    return m;
  } catch (const json::exception& e) {
    throw ConfigError("bad response mapping " + path.string() + ": " + e.what());
  }
}

RemoteKgqa::RemoteKgqa(RemoteKgqaConfig config) : config_(std::move(config)) {
  http::split_url(config_.url);
}

std::string RemoteKgqa::fetch(const std::string& question) const {
  http::Request request;
  request.method = "POST";
  request.url = config_.url;
  request.timeout_seconds = config_.timeout_seconds;
  request.headers = {{"Accept", "application/json"}};
  if (!config_.bearer_token.empty()) {
    request.headers.emplace_back("Authorization", "Bearer " + config_.bearer_token);
  }
  request.params = {{"question", question},
                    {"kb", config_.knowledge_base},
                    {"lang", config_.language}};
  auto response = http::send(request);
  if (response.status >= 400) throw EndpointError(response.status, response.body.substr(0, 200));
  return response.body;
}

std::string question_key(const std::string& question) {
  return "q" + sha256_hex(question).substr(0, 12);
}

CandidateList parse_candidates(const std::string& question, const std::string& body,
                               const ResponseMapping& mapping,
                               const sparql::ParseOptions& options) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("KGQA response is not JSON: ") + e.what());
  }
  const json* list = &doc;
  if (!mapping.list_pointer.empty()) {
    try {
      list = &doc.at(json::json_pointer(mapping.list_pointer));
    } catch (const json::exception& e) {
      throw MalformedResponse("no candidate list at " + mapping.list_pointer + ": " + e.what());
    }
  }
  if (!list->is_array()) throw MalformedResponse("candidate list is not an array");

  struct Raw {
    std::size_t position;
    std::optional<double> rank;
    std::optional<double> confidence;
    const json* item;
  };
  std::vector<Raw> raw;
  bool all_ranked = true, all_confident = true;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const json& item = (*list)[i];
    Raw r{i, std::nullopt, std::nullopt, &item};
    if (item.is_object()) {
      auto rank = item.find(mapping.rank_field);
      if (rank != item.end() && rank->is_number()) r.rank = rank->get<double>();
      auto conf = item.find(mapping.confidence_field);
      if (conf != item.end() && conf->is_number()) r.confidence = conf->get<double>();
    }
    all_ranked = all_ranked && r.rank.has_value();
    all_confident = all_confident && r.confidence.has_value();
    raw.push_back(r);
  }
  if (all_ranked) {
    std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) { return *a.rank < *b.rank; });
  } else if (all_confident) {
    std::stable_sort(raw.begin(), raw.end(),
                     [](const Raw& a, const Raw& b) { return *a.confidence > *b.confidence; });
  }

  CandidateList out;
  out.question = question;
  const std::string key = question_key(question);
  for (const auto& r : raw) {
    std::string where = "candidate " + std::to_string(r.position + 1);
    const json& item = *r.item;
    std::string text;
    if (item.is_string()) {
      text = item.get<std::string>();
    } else if (item.is_object() && item.contains(mapping.sparql_field) &&
               item[mapping.sparql_field].is_string()) {
      text = item[mapping.sparql_field].get<std::string>();
    } else {
      out.warnings.push_back(where + ": no SPARQL string");
      continue;
    }
    try {
      auto q = sparql::parse_query(text, options);
      q.rank = static_cast<int>(out.candidates.size()) + 1;
      q.id = key + "#" + std::to_string(q.rank);
      out.candidates.push_back(std::move(q));
    } catch (const ParseError& e) {
      out.warnings.push_back(where + ": " + e.what());
    }
  }
  return out;
}

CandidateList ask(const std::string& question, const KgqaBackend& backend) {
  return parse_candidates(question, backend.fetch(question), backend.mapping(),
                          backend.parse_options());
}

std::optional<std::string> QuestionCache::get(const std::string& key) const {
  {
    std::lock_guard lock(mutex_);
    auto it = memory_.find(key);
    if (it != memory_.end()) return it->second;
  }
  if (disk_) return disk_->get(key);
  return std::nullopt;
}

void QuestionCache::put(const std::string& key, const std::string& body) {
  {
    std::lock_guard lock(mutex_);
    memory_[key] = body;
  }
  if (disk_) disk_->put(key, body);
}

void QuestionCache::clear() {
  std::lock_guard lock(mutex_);
  memory_.clear();
  if (disk_) disk_->clear();
}

namespace {
std::string cache_key(const std::string& question, const KgqaBackend& backend) {
  return "ask\n" + backend.describe() + "\n" + question;
}
}  // namespace

CandidateList ask_once(const std::string& question, const KgqaBackend& backend,
                       QuestionCache& cache) {
  const auto key = cache_key(question, backend);
  auto body = cache.get(key);
  if (!body) {
    body = backend.fetch(question);
    cache.put(key, *body);
  }
  return parse_candidates(question, *body, backend.mapping(), backend.parse_options());
}

std::vector<CandidateList> ask_batch(const std::vector<std::string>& questions,
                                     const KgqaBackend& backend, QuestionCache& cache,
                                     int concurrency) {
  std::vector<std::string> distinct = questions;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<std::optional<CandidateList>> answers(distinct.size());
  std::vector<std::exception_ptr> errors(distinct.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < distinct.size(); i = next++) {
      try {
        answers[i] = ask_once(distinct[i], backend, cache);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  int threads = std::clamp(concurrency, 1, std::max(1, static_cast<int>(distinct.size())));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<CandidateList> out;
  out.reserve(questions.size());
  for (const auto& q : questions) {
    auto it = std::lower_bound(distinct.begin(), distinct.end(), q);
    out.push_back(*answers[static_cast<std::size_t>(it - distinct.begin())]);
  }
  return out;
}

}  // namespace kgav::qa
