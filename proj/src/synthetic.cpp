#include "kgav/synthetic.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <random>
#include <set>

#include "kgav/error.hpp"

namespace kgav::synthetic {

using nlohmann::json;

namespace {

constexpr std::array kGivenNames = {
    "Aldric",  "Brisa",   "Castor",  "Delphine", "Eamon",   "Fenna",   "Gideon",  "Halvard",
    "Ilse",    "Jorund",  "Kesia",   "Lisandro", "Maelis",  "Nikolai", "Orla",    "Perrin",
    "Quillan", "Rosalind", "Soren",  "Tamsin",   "Ulric",   "Vesna",   "Wendel",  "Xanthe",
    "Yorick",  "Zelda",   "Anselm",  "Bettina",  "Corvin",  "Dagny",   "Emrys",   "Florian",
    "Greta",   "Hesper",  "Ivo",     "Jolanda",  "Kasimir", "Linnea",  "Matthias", "Noor"};

constexpr std::array kFamilyNames = {
    "Abernathy", "Brandvold", "Castellane", "Drummore",  "Eskildsen", "Farquhar",
    "Galloway",  "Hargreave", "Isenbrand",  "Jessup",    "Kettering", "Lindqvist",
    "Marchetti", "Northam",   "Oyelaran",   "Pellegrin", "Quennell",  "Rautenberg",
    "Stroud",    "Thorvald",  "Underhill",  "Valcourt",  "Winterbottom", "Yardley",
    "Zelenko",   "Ashgrove",  "Blackmere",  "Coldwater", "Dunmore",   "Everly"};

constexpr std::array kPlaces = {
    "Velmora",   "Port Aldren", "Kessingham", "Brightwater", "Orlov Falls", "Saint Ives Cross",
    "Maranello Vale", "Duskhaven", "Eastmarch", "Fennick",  "Gorse Hill",  "Halloway",
    "Iverness",  "Jadeport",  "Kilcarra",   "Lowmoor",     "Mirefield",   "Newbridge on Tay",
    "Oakhurst",  "Pellmont",  "Queensreach", "Ravenholt",  "Silverdene",  "Tarnwick",
    "Umberfield", "Vossberg", "Westerly",   "Yarrowby",    "Zennor Bay",  "Ashcombe"};

constexpr std::array kOccupations = {
    "cartographer", "glassblower", "astronomer",  "archivist",  "luthier",    "botanist",
    "stonemason",   "lexicographer", "shipwright", "perfumer",  "bookbinder", "apiarist",
    "surveyor",     "composer",    "clockmaker",  "translator", "cooper",     "engraver",
    "Street_musician", "Lamp_lighter"};

constexpr std::array kCountries = {
    "Republic of Varnia", "Ostmark",     "Kingdom of Sael", "Lunaria",  "Free State of Corrin",
    "Tesselia",           "Aubergia",    "Norvenland",      "Quelland", "Marisca",
    "Drevania",           "Isle of Pell"};

constexpr std::array kUniversities = {
    "University of Velmora",  "Kessingham College",    "Duskhaven Institute of Technology",
    "Royal Academy of Lowmoor", "Tarnwick Polytechnic", "Eastmarch University",
    "Halloway School of Arts", "Mirefield Conservatory", "Silverdene University",
    "Ravenholt Seminary",      "Oakhurst College",       "Pellmont Academy"};

constexpr std::array kEmployers = {
    "Northwind Shipping",  "Aurora Instruments", "Bellweather Press",   "Copperline Railways",
    "Driftwood Foundry",   "Evergreen Mills",    "Foxglove Pharmacy",   "Granite Trust Bank",
    "Harbourlight Observatory", "Ironbark Timber", "Juniper Textiles",  "Kestrel Aeronautics",
    "Lanternfish Studios", "Meridian Telegraph", "Nightjar Theatre",    "Old Quay Brewery"};

// Places whose only label is German, to exercise the any-language fallback.
constexpr std::array kGermanOnlyPlaces = {"Kilcarra", "Zennor Bay"};

std::string entity(std::string_view local) { return std::string(kEntityNs) + std::string(local); }
std::string property(std::string_view local) { return std::string(kPropertyNs) + std::string(local); }

std::string slug(std::string_view label) {
  std::string out;
  for (char c : label) out += (c == ' ') ? '_' : c;
  return out;
}

struct Relation {
  const char* id;
  const char* label;
};

constexpr std::array kRelations = {
    Relation{"P19", "place of birth"},        Relation{"P20", "place of death"},
    Relation{"P106", "occupation"},           Relation{"P27", "country of citizenship"},
    Relation{"P69", "educated at"},           Relation{"P108", "employer"},
    Relation{"P735", "given name"},           Relation{"P21", "sex or gender"}};

constexpr Relation kDateOfBirth{"P569", "date of birth"};

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string question_text(std::string_view relation, std::string_view person, int style) {
  switch (style) {
    case 0: return "What is the " + std::string(relation) + " of " + std::string(person) + "?";
    case 1: return "Which " + std::string(relation) + " does " + std::string(person) + " have?";
    default: return "Tell me the " + std::string(relation) + " of " + std::string(person) + ".";
  }
}

template <class Pool>
std::string pick(const Pool& pool, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
  return pool[d(rng)];
}

}  // namespace

std::uint64_t keyed_seed(std::uint64_t seed, std::string_view key) {
  std::uint64_t z = seed ^ fnv1a(key);
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void WorldConfig::validate() const {
  const std::size_t max = kGivenNames.size() * kFamilyNames.size();
  if (persons < 2 || persons > max) {
    throw ConfigError("synthetic persons must be in [2, " + std::to_string(max) + "]");
  }
}

sparql::ParseOptions World::parse_options() const {
  sparql::ParseOptions o;
  o.predeclared = {{"ex", kEntityNs}, {"exp", kPropertyNs}};
  return o;
}

World build_world(const WorldConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  World w;
  w.graph = std::make_shared<kg::MockGraph>();
  auto& g = *w.graph;

  for (const auto& r : kRelations) {
    w.relations.push_back(property(r.id));
    w.predicates.push_back(property(r.id));
    g.add_label(property(r.id), "en", r.label);
  }
  w.predicates.push_back(property(kDateOfBirth.id));
  g.add_label(property(kDateOfBirth.id), "en", kDateOfBirth.label);

  auto labelled = [&](std::string_view label) {
    std::string iri = entity(slug(label));
    bool german = std::find(kGermanOnlyPlaces.begin(), kGermanOnlyPlaces.end(), label) !=
                  kGermanOnlyPlaces.end();
    if (label.find('_') != std::string_view::npos) return iri;  // URI-segment label only
    g.add_label(iri, german ? "de" : "en", std::string(label));
    return iri;
  };
  std::vector<std::string> places, occupations, countries, universities, employers;
  for (auto p : kPlaces) places.push_back(labelled(p));
  for (auto p : kOccupations) occupations.push_back(labelled(p));
  for (auto p : kCountries) countries.push_back(labelled(p));
  for (auto p : kUniversities) universities.push_back(labelled(p));
  for (auto p : kEmployers) employers.push_back(labelled(p));
  const std::string male = entity("Q6581097"), female = entity("Q6581072");
  g.add_label(male, "en", "male");
  g.add_label(female, "en", "female");
  g.add_label(female, "fr", "femme");

  std::vector<std::pair<std::size_t, std::size_t>> names;
  for (std::size_t i = 0; i < kGivenNames.size(); ++i) {
    for (std::size_t j = 0; j < kFamilyNames.size(); ++j) names.emplace_back(i, j);
  }
  std::shuffle(names.begin(), names.end(), rng);
  names.resize(config.persons);

  std::uniform_int_distribution<int> year(1650, 1950), month(1, 12), day(1, 28), style(0, 2);
  for (std::size_t n = 0; n < names.size(); ++n) {
    const auto [gi, fi] = names[n];
    const std::string given = kGivenNames[gi];
    const std::string label = given + " " + kFamilyNames[fi];
    char id[32];
    std::snprintf(id, sizeof id, "Q9%05zu", n);
    const std::string person = entity(id);
    w.persons.push_back(person);
    g.add_label(person, "en", label);

    const std::string given_iri = entity("GN_" + given);
    g.add_label(given_iri, "en", given);
    const std::array<std::string, kRelations.size()> objects = {
        pick(places, rng),       pick(places, rng),    pick(occupations, rng),
        pick(countries, rng),    pick(universities, rng), pick(employers, rng),
        given_iri,               (rng() & 1) ? male : female};
    for (std::size_t r = 0; r < kRelations.size(); ++r) {
      g.add(person, property(kRelations[r].id), sparql::Term::iri(objects[r]));
    }
    char date[32];
    std::snprintf(date, sizeof date, "%04d-%02d-%02d", year(rng), month(rng), day(rng));
    g.add(person, property(kDateOfBirth.id),
          sparql::Term::literal(date, std::nullopt, std::string(sparql::vocab::xsd) + "date"));

    for (std::size_t r = 0; r < kRelations.size(); ++r) {
      dataset::VanillaRecord rec;
      char qid[32];
      std::snprintf(qid, sizeof qid, "syn-%05zu-%s", n, kRelations[r].id);
      rec.question_id = qid;
      rec.question_entity_label = label;
      rec.question_relation = kRelations[r].label;
      rec.answer = kg::resolve_label(objects[r], "en", g).label;
      rec.question = question_text(rec.question_relation, label, style(rng));
      rec.answer_sentence =
          "The " + rec.question_relation + " of " + label + " is " + rec.answer + ".";
      w.by_question.emplace(rec.question, w.records.size());
      w.records.push_back(std::move(rec));
      w.facts.push_back({person, property(kRelations[r].id), objects[r]});
    }
  }
  return w;
}

void MockKgqaConfig::validate() const {
  if (candidates < 1) throw ConfigError("mock candidates per question must be >= 1");
  if (max_correct_rank < 1) throw ConfigError("mock max correct rank must be >= 1");
  if (!(absent_probability >= 0.0 && absent_probability <= 1.0)) {
    throw ConfigError("mock absent probability must be in [0, 1]");
  }
}

MockKgqa::MockKgqa(std::shared_ptr<const World> world, MockKgqaConfig config)
    : world_(std::move(world)), config_(config), options_(world_->parse_options()) {
  config_.validate();
}

std::string MockKgqa::describe() const {
  return "mock-kgqa:seed=" + std::to_string(config_.seed) +
         ",candidates=" + std::to_string(config_.candidates) +
         ",max-rank=" + std::to_string(config_.max_correct_rank) +
         ",absent=" + std::to_string(config_.absent_probability);
}

Draw MockKgqa::draw(const std::string& question) const {
  std::mt19937_64 rng(keyed_seed(config_.seed, question));
  std::bernoulli_distribution absent(config_.absent_probability);
  int max_rank = std::min<int>(config_.max_correct_rank, static_cast<int>(config_.candidates));
  std::uniform_int_distribution<int> rank(1, max_rank);
  Draw d;
  d.absent = absent(rng);
  int r = rank(rng);
  if (!world_->by_question.contains(question)) d.absent = true;
  d.correct_rank = d.absent ? 0 : r;
  return d;
}

namespace {

std::string compact(const std::string& iri) {
  const std::string_view e = kEntityNs, p = kPropertyNs;
  if (iri.starts_with(e)) return "ex:" + iri.substr(e.size());
  if (iri.starts_with(p)) return "exp:" + iri.substr(p.size());
  return "<" + iri + ">";
}

std::string one_hop(const std::string& s, const std::string& p, const std::string& var = "answer") {
  return "SELECT DISTINCT ?" + var + " WHERE { " + compact(s) + " " + compact(p) + " ?" + var +
         " . }";
}

}  // namespace

std::string MockKgqa::fetch(const std::string& question) const {
  ++calls_;
  const World& w = *world_;
  const Draw d = draw(question);
  // A separate stream so candidate texts do not shift the draw.
  std::mt19937_64 rng(keyed_seed(config_.seed ^ 0x5bd1e995ull, question));
  auto uniform = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  std::string person, relation, answer_label;
  if (auto it = w.by_question.find(question); it != w.by_question.end()) {
    person = w.facts[it->second].subject;
    relation = w.facts[it->second].predicate;
    answer_label = w.records[it->second].answer;
  } else {
    person = w.persons[uniform(w.persons.size())];
    relation = w.relations[uniform(w.relations.size())];
  }
  auto other = [&](const std::vector<std::string>& pool, const std::string& not_this) {
    std::string x;
    do x = pool[uniform(pool.size())];
    while (x == not_this);
    return x;
  };
  auto object_label = [&](const std::string& s, const std::string& p) {
    const auto* idx = w.graph->with_subject(s);
    if (idx) {
      for (auto i : *idx) {
        const auto& t = w.graph->triples()[i];
        if (t.predicate == p) return kg::resolve_label(t.object.value, "en", *w.graph).label;
      }
    }
    return std::string();
  };
  auto decorate = [&](std::string text) {
    if (coin(0.08)) return text + " LIMIT " + std::to_string(1 + uniform(10));
    if (coin(0.05)) return text + " ORDER BY ?answer";
    return text;
  };

  std::set<std::string> seen;
  std::vector<std::string> wrong;
  const std::size_t needed = config_.candidates - (d.absent ? 0 : 1);
  for (std::size_t attempt = 0; wrong.size() < needed && attempt < needed * 50; ++attempt) {
    std::string text;
    const std::size_t kind = uniform(100);
    if (kind < 30) {
      text = decorate(one_hop(person, other(w.predicates, relation)));
    } else if (kind < 55) {
      std::string q = other(w.persons, person);
      if (!answer_label.empty() && object_label(q, relation) == answer_label) continue;
      text = decorate(one_hop(q, relation));
    } else if (kind < 75) {
      text = decorate(one_hop(other(w.persons, person), other(w.predicates, relation)));
    } else if (kind < 88) {
      std::string s = coin(0.5) ? person : other(w.persons, person);
      std::string p1 = other(w.predicates, relation), p2 = other(w.predicates, relation);
      if (p1 == p2) continue;
      text = "SELECT ?o1 ?o2 WHERE { " + compact(s) + " " + compact(p1) + " ?o1 . " + compact(s) +
             " " + compact(p2) + " ?o2 . }";
    } else if (kind < 94) {
      std::string p = other(w.predicates, relation);
      text = "SELECT (COUNT(?answer) AS ?c) WHERE { " + compact(person) + " " + compact(p) +
             " ?answer . }";
    } else {
      // Persons are never objects: executes to no rows.
      text = "SELECT ?x WHERE { ?x " + compact(coin(0.5) ? relation : other(w.predicates, relation)) +
             " " + compact(person) + " . }";
    }
    if (seen.insert(text).second) wrong.push_back(std::move(text));
  }

  std::vector<std::string> texts;
  std::size_t next_wrong = 0;
  const std::size_t total = wrong.size() + (d.absent ? 0 : 1);
  for (std::size_t rank = 1; rank <= total; ++rank) {
    if (!d.absent && static_cast<int>(rank) == d.correct_rank) {
      std::string correct = one_hop(person, relation);
      if (coin(0.1)) correct += " LIMIT 1000";
      texts.push_back(correct);
    } else {
      texts.push_back(wrong[next_wrong++]);
    }
  }
  json out = json::array();
  for (std::size_t i = 0; i < texts.size(); ++i) {
    double confidence = 1.0 / (1.0 + static_cast<double>(i));
    out.push_back({{"query", texts[i]}, {"rank", i + 1}, {"confidence", confidence}});
  }
  return out.dump();
}

}  // namespace kgav::synthetic
