#include "kgav/classifier.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "kgav/error.hpp"
#include "kgav/http.hpp"

namespace kgav::classifier {

using nlohmann::json;

PairScore apply_threshold(double score, double threshold) {
  return PairScore{score, score >= threshold ? Label::correct : Label::incorrect};
}

double Scorer::score(std::string_view question, std::string_view answer) const {
  QAInput input{std::string(question), std::string(answer)};
  return score_batch(std::span<const QAInput>(&input, 1)).at(0);
}

// ---- features ----------------------------------------------------------

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

std::string normalized(std::string_view text) {
  std::string out;
  bool space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

void side_features(std::string_view tag, std::string_view text,
                   const std::vector<std::string>& words, std::vector<std::string>& out) {
  std::string t(tag);
  for (const auto& w : words) out.push_back(t + ":" + w);
  for (std::size_t i = 1; i < words.size(); ++i) {
    out.push_back(t + "2:" + words[i - 1] + "_" + words[i]);
  }
  std::string padded = "^" + normalized(text) + "$";
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    out.push_back(t + "c:" + padded.substr(i, 3));
  }
}

std::vector<std::string> unique_sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (unsigned char c : text) {
    if (c >= 0x80 || std::isalnum(c)) {
      current += static_cast<char>(c >= 0x80 ? c : std::tolower(c));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::vector<std::string> feature_strings(std::string_view question, std::string_view answer) {
  auto qw = tokenize(question);
  auto aw = tokenize(answer);
  std::vector<std::string> out;
  out.reserve(8 * (qw.size() + aw.size()) + question.size() + answer.size());
  side_features("q", question, qw, out);
  side_features("a", answer, aw, out);
  auto qu = unique_sorted(qw);
  auto au = unique_sorted(aw);
  for (const auto& q : qu) {
    for (const auto& a : au) out.push_back("qa:" + q + "|" + a);
  }
  std::vector<std::string> shared;
  std::set_intersection(qu.begin(), qu.end(), au.begin(), au.end(), std::back_inserter(shared));
  for (const auto& w : shared) {
    out.push_back("qa=:" + w);
    out.push_back("qa=*");
  }
  if (shared.empty()) out.push_back("qa=none");
  return out;
}

SparseVector featurize(std::string_view question, std::string_view answer,
                       std::uint32_t dimension) {
  if (dimension == 0 || !std::has_single_bit(dimension)) {
    throw ConfigError("feature dimension must be a power of two");
  }
  std::vector<std::pair<std::uint32_t, double>> raw;
  for (const auto& f : feature_strings(question, answer)) {
    std::uint64_t h = fnv1a(f);
    auto index = static_cast<std::uint32_t>(h & (dimension - 1));
    double sign = (h >> 63) ? -1.0 : 1.0;
    raw.emplace_back(index, sign);
  }
  std::sort(raw.begin(), raw.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVector x;
  for (const auto& [index, value] : raw) {
    if (!x.entries.empty() && x.entries.back().first == index) {
      x.entries.back().second += value;
    } else {
      x.entries.emplace_back(index, value);
    }
  }
  std::erase_if(x.entries, [](const auto& e) { return e.second == 0.0; });
  double norm = 0.0;
  for (const auto& e : x.entries) norm += e.second * e.second;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& e : x.entries) e.second /= norm;
  }
  return x;
}

// ---- baseline model ----------------------------------------------------

BaselineModel::BaselineModel(std::uint32_t dimension)
    : dimension_(dimension), weights_(dimension, 0.0) {
  if (dimension == 0 || !std::has_single_bit(dimension)) {
    throw ConfigError("feature dimension must be a power of two");
  }
}

double BaselineModel::score_features(const SparseVector& x) const {
  double z = bias_;
  for (const auto& [index, value] : x.entries) z += weights_[index] * value;
  return sigmoid(z);
}

double BaselineModel::predict_score(std::string_view question, std::string_view answer) const {
  return score_features(featurize(question, answer, dimension_));
}

std::vector<double> BaselineModel::score_batch(std::span<const QAInput> inputs) const {
  std::vector<double> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) out.push_back(predict_score(in.question, in.answer));
  return out;
}

namespace {
constexpr char kMagic[8] = {'K', 'G', 'A', 'V', 'M', 'D', 'L', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    int c = in.get();
    if (c == EOF) throw FormatError("truncated model file");
    v |= static_cast<std::uint32_t>(c) << (8 * i);
  }
  return v;
}
}  // namespace

void BaselineModel::save(const std::filesystem::path& path) const {
  json header = {{"format", "kgav-baseline"},
                 {"dimension", dimension_},
                 {"threshold", threshold_},
                 {"bias", bias_},
                 {"features", "word-1-2gram+char-3gram+cross+shared/fnv1a-signed/l2"},
                 {"weights_encoding", "f64le"},
                 {"training_meta",
                  {{"seed", meta_.seed},
                   {"epochs", meta_.epochs},
                   {"learning_rate", meta_.learning_rate},
                   {"l2", meta_.l2},
                   {"examples", meta_.examples},
                   {"epoch_loss", meta_.epoch_loss}}}};
  if (!meta_.run_config.empty()) header["run_config"] = json::parse(meta_.run_config);
  std::string text = header.dump();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model " + path.string());
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (double w : weights_) {
    auto bits = std::bit_cast<std::uint64_t>(w);
    for (int i = 0; i < 8; ++i) out.put(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
  if (!out) throw IoError("short write to " + path.string());
}

BaselineModel BaselineModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read model " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + 8, kMagic)) {
    throw FormatError(path.string() + " is not a kgav model");
  }
  if (auto version = get_u32(in); version != kFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version));
  }
  std::uint32_t header_size = get_u32(in);
  std::string text(header_size, '\0');
  if (!in.read(text.data(), header_size)) throw FormatError("truncated model header");
  json header;
  try {
    header = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad model header: ") + e.what());
  }
  try {
    BaselineModel model(header.at("dimension").get<std::uint32_t>());
    model.threshold_ = header.at("threshold").get<double>();
    model.bias_ = header.at("bias").get<double>();
    const auto& m = header.at("training_meta");
    model.meta_.seed = m.at("seed").get<std::uint64_t>();
    model.meta_.epochs = m.at("epochs").get<int>();
    model.meta_.learning_rate = m.at("learning_rate").get<double>();
    model.meta_.l2 = m.at("l2").get<double>();
    model.meta_.examples = m.value("examples", std::size_t{0});
    model.meta_.epoch_loss = m.value("epoch_loss", std::vector<double>{});
    if (header.contains("run_config")) model.meta_.run_config = header["run_config"].dump();
    for (auto& w : model.weights_) {
      std::uint64_t bits = 0;
      for (int i = 0; i < 8; ++i) {
        int c = in.get();
        if (c == EOF) throw FormatError("truncated model weights");
        bits |= static_cast<std::uint64_t>(c) << (8 * i);
      }
      w = std::bit_cast<double>(bits);
      if (!std::isfinite(w)) throw FormatError("non-finite weight in model");
    }
    return model;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad model header: ") + e.what());
  }
}

BaselineModel train(const std::vector<LabeledQAPair>& pairs, const Hyperparams& hp,
                    std::uint64_t seed) {
  std::size_t positives = 0;
  for (const auto& p : pairs) positives += p.label == Label::correct;
  if (positives == 0 || positives == pairs.size()) {
    throw DegenerateData("training data must contain both correct and incorrect pairs");
  }
  if (hp.epochs < 1) throw ConfigError("epochs must be >= 1");

  std::vector<SparseVector> features;
  features.reserve(pairs.size());
  for (const auto& p : pairs) features.push_back(featurize(p.question, p.answer_text, hp.dimension));

  BaselineModel model(hp.dimension);
  auto& w = model.weights();
  double& b = model.bias();
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double rate = hp.learning_rate / (1.0 + epoch);
    double loss = 0.0;
    for (std::size_t i : order) {
      const auto& x = features[i];
      double y = pairs[i].label == Label::correct ? 1.0 : 0.0;
      double p = model.score_features(x);
      loss -= y > 0 ? std::log(std::max(p, 1e-15)) : std::log(std::max(1.0 - p, 1e-15));
      double g = p - y;
      for (const auto& [index, value] : x.entries) {
        w[index] -= rate * (g * value + hp.l2 * w[index]);
      }
      b -= rate * g;
    }
    model.meta().epoch_loss.push_back(loss / static_cast<double>(pairs.size()));
  }
  model.meta().seed = seed;
  model.meta().epochs = hp.epochs;
  model.meta().learning_rate = hp.learning_rate;
  model.meta().l2 = hp.l2;
  model.meta().examples = pairs.size();
  return model;
}

PairScore predict(const Scorer& scorer, std::string_view question, std::string_view answer,
                  double threshold) {
  return apply_threshold(scorer.score(question, answer), threshold);
}

// ---- remote scorer -----------------------------------------------------

std::string encode_classify_request(std::span<const QAInput> inputs, const std::string& model_id) {
  json pairs = json::array();
  for (const auto& in : inputs) pairs.push_back({{"question", in.question}, {"answer", in.answer}});
  json body = {{"pairs", std::move(pairs)}};
  if (!model_id.empty()) body["model_id"] = model_id;
  return body.dump();
}

std::vector<double> decode_classify_response(const std::string& body, std::size_t expected) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw RemoteProtocolError(std::string("response is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("scores") || !doc["scores"].is_array()) {
    throw RemoteProtocolError("response lacks a scores array");
  }
  const auto& scores = doc["scores"];
  if (scores.size() != expected) {
    throw RemoteProtocolError("expected " + std::to_string(expected) + " scores, got " +
                              std::to_string(scores.size()));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& s : scores) {
    if (!s.is_number()) throw RemoteProtocolError("non-numeric score " + s.dump());
    double v = s.get<double>();
    if (!(v >= 0.0 && v <= 1.0)) {
      throw RemoteProtocolError("score " + s.dump() + " outside [0,1]");
    }
    out.push_back(v);
  }
  if (doc.contains("model_id") && !doc["model_id"].is_string()) {
    throw RemoteProtocolError("model_id is not a string");
  }
  return out;
}

RemoteScorer::RemoteScorer(RemoteConfig config) : config_(std::move(config)) {
  if (config_.batch_size < 1 || config_.batch_size > 256) {
    throw ConfigError("remote batch size must be in [1, 256]");
  }
  while (!config_.url.empty() && config_.url.back() == '/') config_.url.pop_back();
  http::split_url(config_.url);
}

std::vector<double> RemoteScorer::score_batch(std::span<const QAInput> inputs) const {
  std::vector<double> out;
  out.reserve(inputs.size());
  for (std::size_t start = 0; start < inputs.size(); start += config_.batch_size) {
    auto chunk = inputs.subspan(start, std::min(config_.batch_size, inputs.size() - start));
    http::Request request;
    request.method = "POST";
    request.url = config_.url + "/classify";
    request.timeout_seconds = config_.timeout_seconds;
    request.headers = {{"Accept", "application/json"}};
    request.body = encode_classify_request(chunk, config_.model_id);
    request.content_type = "application/json";
    http::Response response;
    try {
      response = http::send(request);
    } catch (const TransportError& e) {
      throw RemoteUnavailable(e.what());
    }
    if (response.status == 503 || response.status >= 500) {
      throw RemoteUnavailable("classifier service returned HTTP " +
                              std::to_string(response.status));
    }
    if (response.status != 200) {
      throw RemoteProtocolError("classifier service returned HTTP " +
                                std::to_string(response.status) + ": " +
                                response.body.substr(0, 200));
    }
    auto scores = decode_classify_response(response.body, chunk.size());
    out.insert(out.end(), scores.begin(), scores.end());
  }
  return out;
}

std::string RemoteScorer::health() const {
  http::Request request;
  request.url = config_.url + "/health";
  request.timeout_seconds = config_.timeout_seconds;
  http::Response response;
  try {
    response = http::send(request);
  } catch (const TransportError& e) {
    throw RemoteUnavailable(e.what());
  }
  if (response.status != 200) {
    throw RemoteUnavailable("health check returned HTTP " + std::to_string(response.status));
  }
  try {
    return json::parse(response.body).at("model_id").get<std::string>();
  } catch (const json::exception& e) {
    throw RemoteProtocolError(std::string("bad health response: ") + e.what());
  }
}

// ---- metrics -----------------------------------------------------------

Metrics metrics_from(const Confusion& c) {
  Metrics m;
  if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (m.precision + m.recall > 0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

Confusion confusion(std::span<const double> scores, std::span<const Label> labels,
                    double threshold) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores/labels length mismatch");
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    bool predicted = scores[i] >= threshold;
    bool actual = labels[i] == Label::correct;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Metrics evaluate_scores(std::span<const double> scores, std::span<const Label> labels,
                        double threshold) {
  return metrics_from(confusion(scores, labels, threshold));
}

Metrics evaluate(const Scorer& scorer, const std::vector<LabeledQAPair>& pairs, double threshold) {
  std::vector<QAInput> inputs;
  std::vector<Label> labels;
  inputs.reserve(pairs.size());
  labels.reserve(pairs.size());
  for (const auto& p : pairs) {
    inputs.push_back({p.question, p.answer_text});
    labels.push_back(p.label);
  }
  auto scores = scorer.score_batch(inputs);
  return evaluate_scores(scores, labels, threshold);
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  // Offsetting by the first value keeps a constant series exactly constant.
  const double origin = values.front();
  double offset_sum = 0.0;
  for (double v : values) offset_sum += v - origin;
  double offset_mean = offset_sum / static_cast<double>(values.size());
  s.mean = origin + offset_mean;
  double var = 0.0;
  for (double v : values) {
    double d = (v - origin) - offset_mean;
    var += d * d;
  }
  s.std = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

ClassificationReport aggregate(const std::vector<Metrics>& runs) {
  ClassificationReport r;
  r.runs = runs;
  std::vector<double> p, rc, f;
  for (const auto& m : runs) {
    p.push_back(m.precision);
    rc.push_back(m.recall);
    f.push_back(m.f1);
  }
  r.precision = summarize(p);
  r.recall = summarize(rc);
  r.f1 = summarize(f);
  return r;
}

ClassificationReport repeated_eval(const std::function<Metrics(std::uint64_t)>& run_once,
                                   std::uint64_t seed, int n_runs, int workers) {
  if (n_runs < 2) throw ConfigError("repeated evaluation needs at least 2 runs");
  std::vector<Metrics> runs(static_cast<std::size_t>(n_runs));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < n_runs; i = next++) {
      runs[static_cast<std::size_t>(i)] = run_once(seed + static_cast<std::uint64_t>(i));
    }
  };
  workers = std::clamp(workers, 1, n_runs);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  return aggregate(runs);
}

Metrics run_experiment_once(const std::vector<dataset::VanillaRecord>& records,
                            dataset::SamplingConfig sampling, const Hyperparams& hp,
                            std::uint64_t seed, double threshold) {
  sampling.seed = seed;
  auto pairs = dataset::negative_sample(records, sampling);
  auto parts = dataset::split(pairs, sampling);
  auto model = train(parts.train, hp, seed);
  return evaluate(model, parts.test, threshold);
}

std::vector<SweepRow> threshold_sweep(std::span<const double> scores,
                                      std::span<const Label> labels,
                                      std::span<const double> thresholds) {
  std::vector<SweepRow> rows;
  for (double t : thresholds) rows.push_back({t, evaluate_scores(scores, labels, t)});
  return rows;
}

std::string format_mean_std(const Summary& s, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f ± %.*f", digits, s.mean, digits, s.std);
  return buffer;
}

}  // namespace kgav::classifier
