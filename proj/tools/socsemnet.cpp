// Pipeline driver.  Every subcommand reads one JSON config, picks up the
// artifacts earlier stages left in the output directory and writes its own
// next to them, each stamped with the config hash and the seed.

#include <fcntl.h>
#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssn/corpus.hpp"
#include "ssn/effects.hpp"
#include "ssn/inference.hpp"
#include "ssn/reports.hpp"
#include "ssn/semantic.hpp"
#include "ssn/similarity.hpp"
#include "ssn/socsem.hpp"

using json = nlohmann::json;
using namespace ssn;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- plumbing

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + p.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + p.string() + "'");
}

// one process per output directory; the lock lives for the whole subcommand
struct OutputLock {
  fs::path path;
  int fd = -1;

  explicit OutputLock(const fs::path& dir) : path(dir / ".lock") {
    fd = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
      throw ValidationError("output directory '" + dir.string() +
                            "' is in use ('" + path.string() + "' exists)");
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] const auto rc = ::write(fd, pid.data(), pid.size());
  }
  ~OutputLock() {
    if (fd >= 0) {
      ::close(fd);
      ::unlink(path.c_str());
    }
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;
};

// --------------------------------------------------------------- config

struct ModelEntry {
  std::string name;
  std::vector<EffectSpec> effects;
  std::vector<std::optional<double>> theta;  // per effect, from the config
  std::set<std::string> relations;           // empty = every configured relation

  bool applies_to(const std::string& relation) const {
    return relations.empty() || relations.count(relation) != 0;
  }
};

struct RelationSource {
  std::string survey;  // exactly one of the two is set
  std::string edges;
};

struct Pipeline {
  fs::path base;  // config file directory; relative paths resolve against it
  std::string config_hash;
  std::uint64_t seed = 1;
  bool quiet = false;

  fs::path corpus_root, manifest, stopwords, stem_table, output_dir;
  PreprocessConfig pre;
  long long stability_threshold = 2;
  bool prune_isolates = false;

  std::map<std::string, RelationSource> relations;
  std::vector<ModelEntry> models;
  ChainConfig chain;
  EstimationConfig estimation;
  std::vector<EffectSpec> gof_auxiliary;

  std::string sim_relation, sim_model;
  bool sim_keep_networks = false;

  fs::path resolve(const std::string& p) const {
    const fs::path q(p);
    return q.is_absolute() ? q : base / q;
  }
  json provenance() const {
    return json{{"config", config_hash}, {"seed", seed}};
  }
  std::string provenance_line() const {
    return "# config " + config_hash + " seed " + std::to_string(seed) + "\n";
  }
  void say(const std::string& line) const {
    if (!quiet) std::cout << line << "\n";
  }
};

const json& need(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError("config: missing key '" + where + "'");
  return *it;
}

std::string need_string(const json& j, const char* key, const std::string& where) {
  const auto& v = need(j, key, where);
  if (!v.is_string()) throw ValidationError("config: '" + where + "' must be a string");
  return v.get<std::string>();
}

template <class T>
T opt_number(const json& j, const char* key, const std::string& where, T fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ValidationError("config: '" + where + "' must be a number");
  return it->get<T>();
}

bool opt_bool(const json& j, const char* key, const std::string& where, bool fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) throw ValidationError("config: '" + where + "' must be a boolean");
  return it->get<bool>();
}

std::u32string decode_utf8(const std::string& s, const std::string& where) {
  std::u32string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = s[i];
    int extra = 0;
    char32_t cp = c;
    if (c >= 0xF0)
      extra = 3, cp = c & 0x07;
    else if (c >= 0xE0)
      extra = 2, cp = c & 0x0F;
    else if (c >= 0xC0)
      extra = 1, cp = c & 0x1F;
    if (i + extra >= s.size())
      throw ValidationError("config: '" + where + "' is not valid UTF-8");
    for (int k = 1; k <= extra; ++k) cp = cp << 6 | (s[i + k] & 0x3F);
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

EffectSpec effect_from_json(const json& v, const std::string& where) {
  if (v.is_string()) return EffectSpec::from_name(v.get<std::string>());
  if (!v.is_object())
    throw ValidationError("config: '" + where + "' must be a name or an object");
  const auto name = need_string(v, "name", where + ".name");
  const double lambda = opt_number<double>(v, "lambda", where + ".lambda", 2.0);
  return EffectSpec::from_name(name, lambda);
}

Pipeline load_config(const std::string& path, const std::uint64_t* seed_override,
                     const std::string& out_override, bool quiet) {
  Pipeline p;
  p.quiet = quiet;
  const fs::path cfg_path(path);
  p.base = cfg_path.has_parent_path() ? cfg_path.parent_path() : fs::path(".");
  const std::string raw = read_file(cfg_path);
  p.config_hash = hex16(fnv1a(raw));

  json j;
  try {
    j = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ValidationError("config: " + std::string(e.what()));
  }

  p.seed = opt_number<std::uint64_t>(j, "seed", "seed", 1);
  if (seed_override) p.seed = *seed_override;

  const auto& paths = need(j, "paths", "paths");
  p.output_dir = p.resolve(need_string(paths, "output_dir", "paths.output_dir"));
  if (!out_override.empty()) p.output_dir = fs::path(out_override);
  if (paths.contains("corpus_root"))
    p.corpus_root = p.resolve(need_string(paths, "corpus_root", "paths.corpus_root"));
  if (paths.contains("manifest"))
    p.manifest = p.resolve(need_string(paths, "manifest", "paths.manifest"));
  if (paths.contains("stopwords"))
    p.stopwords = p.resolve(need_string(paths, "stopwords", "paths.stopwords"));
  if (paths.contains("stem_table"))
    p.stem_table = p.resolve(need_string(paths, "stem_table", "paths.stem_table"));

  if (j.contains("preprocessing")) {
    const auto& pre = j["preprocessing"];
    if (pre.contains("stemmer")) {
      const auto s = need_string(pre, "stemmer", "preprocessing.stemmer");
      if (s == "porter_english")
        p.pre.stemmer = StemmerKind::porter_english;
      else if (s == "none")
        p.pre.stemmer = StemmerKind::none;
      else if (s == "external_table")
        p.pre.stemmer = StemmerKind::external_table;
      else
        throw ValidationError("config: 'preprocessing.stemmer' must be porter_english, "
                              "none or external_table");
    }
    if (pre.contains("sentence_delimiters"))
      p.pre.sentence_delimiters = decode_utf8(
          need_string(pre, "sentence_delimiters", "preprocessing.sentence_delimiters"),
          "preprocessing.sentence_delimiters");
    p.pre.case_fold = opt_bool(pre, "case_fold", "preprocessing.case_fold", true);
    p.pre.strip_punctuation =
        opt_bool(pre, "strip_punctuation", "preprocessing.strip_punctuation", true);
  }

  if (j.contains("extraction")) {
    const auto& ex = j["extraction"];
    p.stability_threshold = opt_number<long long>(ex, "stability_threshold",
                                                  "extraction.stability_threshold", 2);
    p.prune_isolates = opt_bool(ex, "prune_isolates", "extraction.prune_isolates", false);
  }

  if (j.contains("relations")) {
    const auto& rels = j["relations"];
    if (!rels.is_object()) throw ValidationError("config: 'relations' must be an object");
    for (const auto& [name, src] : rels.items()) {
      relation_from_string(name);  // friendship or collaboration
      RelationSource rs;
      const bool has_survey = src.contains("survey");
      const bool has_edges = src.contains("edges");
      if (has_survey == has_edges)
        throw ValidationError("config: 'relations." + name +
                              "' needs exactly one of 'survey' or 'edges'");
      if (has_survey)
        rs.survey = need_string(src, "survey", "relations." + name + ".survey");
      else
        rs.edges = need_string(src, "edges", "relations." + name + ".edges");
      p.relations.emplace(name, std::move(rs));
    }
  }

  if (j.contains("models")) {
    const auto& models = j["models"];
    if (!models.is_array()) throw ValidationError("config: 'models' must be an array");
    std::set<std::string> seen;
    for (std::size_t k = 0; k < models.size(); ++k) {
      const std::string where = "models[" + std::to_string(k) + "]";
      const auto& mj = models[k];
      ModelEntry entry;
      entry.name = need_string(mj, "name", where + ".name");
      if (!seen.insert(entry.name).second)
        throw ValidationError("config: duplicate model '" + entry.name + "'");
      const auto& effects = need(mj, "effects", where + ".effects");
      if (!effects.is_array() || effects.empty())
        throw ValidationError("config: '" + where + ".effects' must be a non-empty array");
      for (std::size_t e = 0; e < effects.size(); ++e) {
        const std::string ew = where + ".effects[" + std::to_string(e) + "]";
        entry.effects.push_back(effect_from_json(effects[e], ew));
        std::optional<double> th;
        if (effects[e].is_object() && effects[e].contains("theta"))
          th = opt_number<double>(effects[e], "theta", ew + ".theta", 0.0);
        entry.theta.push_back(th);
      }
      if (mj.contains("relations")) {
        for (const auto& r : mj["relations"]) {
          const auto rn = r.get<std::string>();
          relation_from_string(rn);
          entry.relations.insert(rn);
        }
      }
      p.models.push_back(std::move(entry));
    }
  }

  if (j.contains("chain")) {
    const auto& c = j["chain"];
    p.chain.burn_in = opt_number<long long>(c, "burn_in", "chain.burn_in", p.chain.burn_in);
    p.chain.thin = opt_number<long long>(c, "thin", "chain.thin", p.chain.thin);
    p.chain.sample_size =
        opt_number<long long>(c, "sample_size", "chain.sample_size", p.chain.sample_size);
    p.chain.validate();
  }
  p.estimation.chain = p.chain;
  if (j.contains("estimation")) {
    const auto& e = j["estimation"];
    auto& est = p.estimation;
    est.phase1_samples_per_effect =
        opt_number<int>(e, "phase1_samples_per_effect", "estimation.phase1_samples_per_effect",
                        est.phase1_samples_per_effect);
    est.subphases = opt_number<int>(e, "subphases", "estimation.subphases", est.subphases);
    est.subphase_iterations = opt_number<int>(e, "subphase_iterations",
                                              "estimation.subphase_iterations",
                                              est.subphase_iterations);
    est.steps_per_update = opt_number<long long>(e, "steps_per_update",
                                                 "estimation.steps_per_update",
                                                 est.steps_per_update);
    est.initial_gain =
        opt_number<double>(e, "initial_gain", "estimation.initial_gain", est.initial_gain);
    est.max_step = opt_number<double>(e, "max_step", "estimation.max_step", est.max_step);
    est.max_rounds = opt_number<int>(e, "max_rounds", "estimation.max_rounds", est.max_rounds);
    est.t_threshold =
        opt_number<double>(e, "t_threshold", "estimation.t_threshold", est.t_threshold);
    est.validate();
  }

  if (j.contains("gof_auxiliary")) {
    const auto& aux = j["gof_auxiliary"];
    if (!aux.is_array()) throw ValidationError("config: 'gof_auxiliary' must be an array");
    for (std::size_t k = 0; k < aux.size(); ++k)
      p.gof_auxiliary.push_back(
          effect_from_json(aux[k], "gof_auxiliary[" + std::to_string(k) + "]"));
  }

  if (j.contains("simulation")) {
    const auto& s = j["simulation"];
    p.sim_relation = need_string(s, "relation", "simulation.relation");
    p.sim_model = need_string(s, "model", "simulation.model");
    p.sim_keep_networks = opt_bool(s, "keep_networks", "simulation.keep_networks", false);
  }

  p.pre.validate();
  if (p.stability_threshold < 1)
    throw ValidationError("config: 'extraction.stability_threshold' must be >= 1");
  return p;
}

void require_file(const fs::path& p, const std::string& what) {
  if (p.empty()) throw ValidationError("config: missing key 'paths." + what + "'");
  if (!fs::exists(p))
    throw ValidationError("config: " + what + " '" + p.string() + "' does not exist");
}

// ------------------------------------------------- stage artifact formats

json semantic_net_to_json(const SemanticNetwork& net) {
  json cj = json::array();
  for (const auto& [name, freq] : net.concept_freq) {
    json row = json::array({name, freq});
    if (!net.concept_sources.empty()) row.push_back(net.concept_sources.at(name));
    cj.push_back(std::move(row));
  }
  json aj = json::array();
  for (const auto& [pair, w] : net.assoc_weight) {
    json row = json::array({pair.first, pair.second, w});
    if (!net.assoc_sources.empty()) row.push_back(net.assoc_sources.at(pair));
    aj.push_back(std::move(row));
  }
  return json{{"concepts", std::move(cj)}, {"associations", std::move(aj)}};
}

SemanticNetwork semantic_net_from_json(const json& j, const std::string& owner,
                                       const std::string& where) {
  SemanticNetwork net;
  net.owner = owner;
  net.stable_only = true;
  try {
    for (const auto& row : j.at("concepts")) {
      const auto name = row.at(0).get<std::string>();
      net.concept_freq[name] = row.at(1).get<long long>();
      if (row.size() > 2)
        for (const auto& [member, f] : row.at(2).items())
          net.concept_sources[name][member] = f.get<long long>();
    }
    for (const auto& row : j.at("associations")) {
      const auto pair = make_pair_sorted(row.at(0).get<std::string>(),
                                         row.at(1).get<std::string>());
      net.assoc_weight[pair] = row.at(2).get<long long>();
      if (row.size() > 3)
        for (const auto& [member, w] : row.at(3).items())
          net.assoc_sources[pair][member] = w.get<long long>();
    }
  } catch (const json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
  return net;
}

json load_stage_json(const fs::path& file, const std::string& format,
                     const std::string& producer) {
  if (!fs::exists(file))
    throw ValidationError("'" + file.string() + "' is missing; run '" + producer + "' first");
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  if (j.value("format", "") != format)
    throw ParseError(file.string() + ": not a " + format + " file");
  return j;
}

struct ExtractionArtifacts {
  std::vector<ActorAttributes> actors;                 // manifest order
  std::map<MemberId, SemanticNetwork> member_nets;     // stable
  std::vector<std::string> group_order;                // first-appearance order
  std::map<std::string, SemanticNetwork> group_nets;   // stable unions with provenance
};

ExtractionArtifacts load_extraction(const Pipeline& p) {
  require_file(p.manifest, "manifest");
  ExtractionArtifacts art;
  art.actors = load_manifest(p.manifest);

  const fs::path members_file = p.output_dir / "extraction" / "members.json";
  const json members = load_stage_json(members_file, "extraction-members", "extract");
  for (const auto& mj : members.at("members")) {
    const auto id = mj.at("member_id").get<std::string>();
    art.member_nets.emplace(
        id, semantic_net_from_json(mj, id, members_file.string() + " member " + id));
  }

  const fs::path groups_file = p.output_dir / "extraction" / "groups.json";
  const json groups = load_stage_json(groups_file, "extraction-groups", "extract");
  for (const auto& gj : groups.at("groups")) {
    const auto gid = gj.at("group_id").get<std::string>();
    art.group_order.push_back(gid);
    art.group_nets.emplace(
        gid, semantic_net_from_json(gj, gid, groups_file.string() + " group " + gid));
  }

  for (const auto& a : art.actors)
    if (!art.member_nets.count(a.member_id))
      throw ValidationError("extraction artifacts lack member '" + a.member_id +
                            "'; rerun 'extract' after manifest changes");
  return art;
}

fs::path network_file(const Pipeline& p, const std::string& relation) {
  return p.output_dir / ("network_" + relation + ".json");
}

SocioSemanticNetwork load_network(const Pipeline& p, const std::string& relation) {
  const fs::path file = network_file(p, relation);
  if (!fs::exists(file))
    throw ValidationError("'" + file.string() + "' is missing; run 'assemble' first");
  try {
    return deserialize(read_file(file));
  } catch (const ParseError& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
}

std::vector<std::string> configured_relations(const Pipeline& p) {
  if (p.relations.empty())
    throw ValidationError("config: 'relations' must configure at least one relation");
  std::vector<std::string> out;
  for (const auto& [name, src] : p.relations) out.push_back(name);
  return out;
}

// per-model chain seeds, decorrelated across subcommands by name
std::uint64_t stage_seed(const Pipeline& p, const std::string& stage,
                         const std::string& relation, const std::string& model) {
  std::mt19937_64 seeder(p.seed ^ fnv1a(stage + "/" + relation + "/" + model));
  return seeder();
}

// ---------------------------------------------------------------- extract

int cmd_extract(const Pipeline& p) {
  require_file(p.stopwords, "stopwords");
  require_file(p.manifest, "manifest");
  require_file(p.corpus_root, "corpus_root");
  PreprocessConfig pre = p.pre;
  pre.stopwords = load_stopwords(p.stopwords);
  if (pre.stemmer == StemmerKind::external_table) {
    require_file(p.stem_table, "stem_table");
    pre.stem_table = load_stem_table(p.stem_table);
  }

  const auto actors = load_manifest(p.manifest);
  const auto docs = load_corpus(p.corpus_root, actors);
  const auto corpora = preprocess_corpus(docs, actors, pre);

  fs::create_directories(p.output_dir / "extraction");
  OutputLock lock(p.output_dir);

  json members = json::array();
  std::ostringstream report;
  report << p.provenance_line()
         << "member_id,group_id,words,concepts_raw,associations_raw,concepts_stable,"
            "associations_stable\n";

  std::vector<std::string> group_order;
  std::map<std::string, std::vector<SemanticNetwork>> group_members;
  for (std::size_t k = 0; k < corpora.size(); ++k) {
    const auto& mc = corpora[k];
    const auto& actor = actors[k];
    const auto raw = build_individual_network(mc.member_id, mc.sentences);
    const auto stable = filter_stable(raw, p.stability_threshold, p.prune_isolates);

    json mj = semantic_net_to_json(stable);
    mj["member_id"] = mc.member_id;
    mj["group_id"] = actor.group_id;
    mj["word_count"] = mc.total_word_count;
    mj["raw_concepts"] = raw.concept_freq.size();
    mj["raw_associations"] = raw.assoc_weight.size();
    members.push_back(std::move(mj));

    report << mc.member_id << ',' << actor.group_id << ',' << mc.total_word_count << ','
           << raw.concept_freq.size() << ',' << raw.assoc_weight.size() << ','
           << stable.concept_freq.size() << ',' << stable.assoc_weight.size() << '\n';

    if (!group_members.count(actor.group_id)) group_order.push_back(actor.group_id);
    group_members[actor.group_id].push_back(stable);
  }

  json groups = json::array();
  for (const auto& gid : group_order) {
    const auto net = union_group_network(gid, group_members[gid]);
    json gj = semantic_net_to_json(net);
    gj["group_id"] = gid;
    groups.push_back(std::move(gj));
  }

  const json members_doc{{"format", "extraction-members"},
                         {"version", 1},
                         {"provenance", p.provenance()},
                         {"stability_threshold", p.stability_threshold},
                         {"prune_isolates", p.prune_isolates},
                         {"members", std::move(members)}};
  const json groups_doc{{"format", "extraction-groups"},
                        {"version", 1},
                        {"provenance", p.provenance()},
                        {"groups", std::move(groups)}};
  write_file(p.output_dir / "extraction" / "members.json", members_doc.dump(2) + "\n");
  write_file(p.output_dir / "extraction" / "groups.json", groups_doc.dump(2) + "\n");
  write_file(p.output_dir / "extraction" / "report.csv", report.str());
  p.say("extract: " + std::to_string(corpora.size()) + " members, " +
        std::to_string(group_order.size()) + " groups -> " +
        (p.output_dir / "extraction").string());
  return 0;
}

// ------------------------------------------------------------- similarity

void write_similarity(const Pipeline& p, const SimilarityMatrix& sim, const Embedding2D& mds,
                      const std::string& stem) {
  std::ostringstream mat;
  mat << p.provenance_line() << "member";
  for (const auto& m : sim.members) mat << ',' << m;
  mat << '\n';
  for (std::size_t i = 0; i < sim.members.size(); ++i) {
    mat << sim.members[i];
    for (std::size_t k = 0; k < sim.members.size(); ++k)
      mat << ',' << fmt_num(sim.values(static_cast<int>(i), static_cast<int>(k)));
    mat << '\n';
  }
  write_file(p.output_dir / "similarity" / (stem + "_similarity.csv"), mat.str());

  std::ostringstream coords;
  coords << p.provenance_line() << "member,x,y\n";
  for (std::size_t i = 0; i < mds.members.size(); ++i)
    coords << mds.members[i] << ',' << fmt_num(mds.coordinates[i][0]) << ','
           << fmt_num(mds.coordinates[i][1]) << '\n';
  write_file(p.output_dir / "similarity" / (stem + "_mds.csv"), coords.str());
}

json similarity_summary(const SimilarityMatrix& sim, const Embedding2D& mds) {
  json degenerate = json::array();
  for (const auto& [i, k] : sim.degenerate_pairs)
    degenerate.push_back(json::array({sim.members[i], sim.members[k]}));
  return json{{"stress", mds.stress},
              {"eigenvalues", json::array({mds.eigenvalues[0], mds.eigenvalues[1]})},
              {"degenerate_pairs", std::move(degenerate)}};
}

int cmd_similarity(const Pipeline& p) {
  const auto art = load_extraction(p);
  std::vector<SemanticNetwork> nets;
  for (const auto& a : art.actors) nets.push_back(art.member_nets.at(a.member_id));

  fs::create_directories(p.output_dir / "similarity");
  OutputLock lock(p.output_dir);

  const auto by_concepts = similarity_matrix(nets, SimilarityBasis::concepts);
  const auto by_assocs = similarity_matrix(nets, SimilarityBasis::associations);
  const auto mds_concepts = classical_mds(by_concepts);
  const auto mds_assocs = classical_mds(by_assocs);

  write_similarity(p, by_concepts, mds_concepts, "concept");
  write_similarity(p, by_assocs, mds_assocs, "association");
  const json summary{{"format", "similarity-summary"},
                     {"version", 1},
                     {"provenance", p.provenance()},
                     {"concepts", similarity_summary(by_concepts, mds_concepts)},
                     {"associations", similarity_summary(by_assocs, mds_assocs)}};
  write_file(p.output_dir / "similarity" / "summary.json", summary.dump(2) + "\n");
  p.say("similarity: " + std::to_string(nets.size()) + " members -> " +
        (p.output_dir / "similarity").string());
  return 0;
}

// --------------------------------------------------------------- assemble

SocialLayer social_from_survey(const std::string& relation, const fs::path& file) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  try {
    if (j.value("relation", "") != relation)
      throw ValidationError("survey file '" + file.string() + "' declares relation '" +
                            j.value("relation", "") + "', expected '" + relation + "'");
    std::vector<MemberId> core;
    for (const auto& m : j.at("core_members")) core.push_back(m.get<std::string>());
    std::vector<SurveyResponse> responses;
    for (const auto& rj : j.at("responses")) {
      SurveyResponse r;
      r.reporter = rj.at("reporter").get<std::string>();
      r.relation = relation_from_string(relation);
      for (const auto& m : rj.value("nominated", json::array()))
        r.nominated.insert(m.get<std::string>());
      for (const auto& pair : rj.value("confirmed", json::array()))
        r.confirmed.insert({pair.at(0).get<std::string>(), pair.at(1).get<std::string>()});
      responses.push_back(std::move(r));
    }
    return reconcile_survey_ties(responses, core, relation_from_string(relation));
  } catch (const json::exception& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
}

SocialLayer social_from_edges(const std::string& relation, const fs::path& file) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  try {
    if (j.value("relation", "") != relation)
      throw ValidationError("edge file '" + file.string() + "' declares relation '" +
                            j.value("relation", "") + "', expected '" + relation + "'");
    SocialLayer social;
    social.relation = relation_from_string(relation);
    for (const auto& m : j.at("members")) social.members.push_back(m.get<std::string>());
    const int n = social.n();
    social.adj.assign(static_cast<std::size_t>(n) * n, 0);
    for (const auto& edge : j.at("edges")) {
      const auto a = edge.at(0).get<std::string>();
      const auto b = edge.at(1).get<std::string>();
      const int i = social.index_of(a);
      const int k = social.index_of(b);
      if (i < 0 || k < 0)
        throw ValidationError("edge file '" + file.string() + "': unknown member '" +
                              (i < 0 ? a : b) + "'");
      social.set_edge(i, k, true);
    }
    social.validate();
    return social;
  } catch (const json::exception& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
}

int cmd_assemble(const Pipeline& p) {
  const auto relations = configured_relations(p);
  const auto art = load_extraction(p);

  std::vector<GroupExtraction> groups;
  for (const auto& gid : art.group_order) {
    GroupExtraction g;
    g.group_id = gid;
    g.group_net = art.group_nets.at(gid);
    for (const auto& a : art.actors)
      if (a.group_id == gid) g.individual_nets.emplace(a.member_id, art.member_nets.at(a.member_id));
    groups.push_back(std::move(g));
  }

  fs::create_directories(p.output_dir);
  OutputLock lock(p.output_dir);

  for (const auto& relation : relations) {
    const auto& src = p.relations.at(relation);
    const fs::path file = p.resolve(src.survey.empty() ? src.edges : src.survey);
    require_file(file, "relations." + relation);
    const SocialLayer social = src.survey.empty()
                                   ? social_from_edges(relation, file)
                                   : social_from_survey(relation, file);
    const auto net = assemble(groups, social, art.actors);

    json out = json::parse(serialize(net));
    out["provenance"] = p.provenance();
    write_file(network_file(p, relation), out.dump(2) + "\n");

    std::ostringstream gml;
    write_graphml(net, gml);
    std::string text = gml.str();
    const auto eol = text.find('\n');
    text.insert(eol == std::string::npos ? text.size() : eol + 1,
                "<!-- config " + p.config_hash + " seed " + std::to_string(p.seed) + " -->\n");
    write_file(p.output_dir / ("network_" + relation + ".graphml"), text);

    p.say("assemble: " + relation + " with " + std::to_string(net.social.edge_count()) +
          " ties, " + std::to_string(net.n_actors()) + " actors, " +
          std::to_string(net.n_concepts()) + " concepts");
  }
  return 0;
}

// ------------------------------------------------------------------ stats

int cmd_stats(const Pipeline& p) {
  if (p.models.empty()) throw ValidationError("config: 'models' must list at least one model");
  fs::create_directories(p.output_dir);
  OutputLock lock(p.output_dir);
  for (const auto& relation : configured_relations(p)) {
    const auto net = load_network(p, relation);
    const EffectWorkspace ws(net);
    std::ostringstream csv;
    csv << p.provenance_line() << "model,effect,value\n";
    for (const auto& model : p.models) {
      if (!model.applies_to(relation)) continue;
      const auto values = count_vector(ws, net.social.adj, model.effects);
      for (std::size_t e = 0; e < model.effects.size(); ++e)
        csv << model.name << ',' << model.effects[e].name() << ',' << fmt_num(values[e])
            << '\n';
    }
    write_file(p.output_dir / ("stats_" + relation + ".csv"), csv.str());
    p.say("stats: " + relation + " -> " +
          (p.output_dir / ("stats_" + relation + ".csv")).string());
  }
  return 0;
}

// --------------------------------------------------------------- simulate

int cmd_simulate(const Pipeline& p) {
  if (p.sim_relation.empty())
    throw ValidationError("config: missing key 'simulation.relation'");
  const auto model_it =
      std::find_if(p.models.begin(), p.models.end(),
                   [&](const ModelEntry& m) { return m.name == p.sim_model; });
  if (model_it == p.models.end())
    throw ValidationError("config: 'simulation.model' names unknown model '" + p.sim_model +
                          "'");
  ModelSpec model;
  model.effects = model_it->effects;
  for (std::size_t e = 0; e < model_it->effects.size(); ++e) {
    if (!model_it->theta[e])
      throw ValidationError("config: effect '" + model_it->effects[e].name() + "' of model '" +
                            model_it->name + "' needs a theta to simulate");
    model.theta.push_back(*model_it->theta[e]);
  }

  const auto net = load_network(p, p.sim_relation);
  ChainConfig chain = p.chain;
  chain.seed = stage_seed(p, "simulate", p.sim_relation, p.sim_model);

  fs::create_directories(p.output_dir);
  OutputLock lock(p.output_dir);
  const auto result = simulate(net, model, chain, p.sim_keep_networks);

  const std::string stem = "simulate_" + p.sim_relation + "_" + p.sim_model;
  std::ostringstream csv;
  csv << p.provenance_line() << "draw";
  for (const auto& name : result.statistic_names) csv << ',' << name;
  csv << '\n';
  for (std::size_t s = 0; s < result.samples.size(); ++s) {
    csv << s;
    for (const double v : result.samples[s]) csv << ',' << fmt_num(v);
    csv << '\n';
  }
  write_file(p.output_dir / (stem + ".csv"), csv.str());

  if (p.sim_keep_networks) {
    json draws = json::array();
    const int n = net.n_actors();
    for (const auto& adj : result.networks) {
      json edges = json::array();
      for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k)
          if (adj[static_cast<std::size_t>(i) * n + k])
            edges.push_back(json::array(
                {net.actors[i].member_id, net.actors[k].member_id}));
      draws.push_back(std::move(edges));
    }
    const json doc{{"format", "simulated-networks"},
                   {"version", 1},
                   {"provenance", p.provenance()},
                   {"relation", p.sim_relation},
                   {"model", p.sim_model},
                   {"draws", std::move(draws)}};
    write_file(p.output_dir / (stem + "_networks.json"), doc.dump(2) + "\n");
  }
  p.say("simulate: " + std::to_string(result.samples.size()) + " draws -> " +
        (p.output_dir / (stem + ".csv")).string());
  return 0;
}

// -------------------------------------------------------------------- fit

constexpr double kZCritical = 1.959963984540054;  // two-tailed 5%

std::string effect_label(const EffectSpec& spec) {
  const bool alternating = spec.kind == EffectKind::alt_star ||
                           spec.kind == EffectKind::alt_triangle ||
                           spec.kind == EffectKind::alt_twopath;
  if (!alternating) return spec.name();
  std::ostringstream os;
  os << spec.name() << " (lambda=" << spec.lambda << ")";
  return os.str();
}

struct FitOutcome {
  const ModelEntry* model = nullptr;
  FitResult fit;
  std::string error;  // non-empty when estimation threw
};

json fit_to_json(const Pipeline& p, const std::string& relation, const FitOutcome& out) {
  json doc{{"format", "fit"},
           {"version", 1},
           {"provenance", p.provenance()},
           {"relation", relation},
           {"model", out.model->name}};
  if (!out.error.empty()) {
    doc["error"] = out.error;
    return doc;
  }
  const auto& fit = out.fit;
  doc["converged"] = fit.converged;
  doc["rounds"] = fit.rounds;
  json effects = json::array();
  for (std::size_t e = 0; e < fit.effects.size(); ++e) {
    const bool significant =
        fit.standard_error[e] > 0.0 &&
        std::abs(fit.theta[e] / fit.standard_error[e]) > kZCritical;
    effects.push_back(json{{"name", fit.effects[e].name()},
                           {"lambda", fit.effects[e].lambda},
                           {"theta", fit.theta[e]},
                           {"standard_error", fit.standard_error[e]},
                           {"convergence_t", fit.convergence_t[e]},
                           {"observed", fit.observed[e]},
                           {"significant", significant}});
  }
  doc["effects"] = std::move(effects);
  json cov = json::array();
  for (int a = 0; a < fit.covariance.rows(); ++a) {
    json row = json::array();
    for (int b = 0; b < fit.covariance.cols(); ++b) row.push_back(fit.covariance(a, b));
    cov.push_back(std::move(row));
  }
  doc["covariance"] = std::move(cov);
  doc["log"] = fit.log;
  return doc;
}

std::string fit_report(const Pipeline& p, const std::string& relation,
                       const std::vector<FitOutcome>& outcomes) {
  // row per effect (first-seen order), column per model, "estimate (se)*" cells
  std::vector<EffectSpec> rows;
  for (const auto& out : outcomes)
    for (const auto& spec : out.model->effects)
      if (std::find(rows.begin(), rows.end(), spec) == rows.end()) rows.push_back(spec);

  constexpr int kLabelWidth = 34;
  constexpr int kCellWidth = 20;
  std::ostringstream os;
  os << p.provenance_line();
  os << "relation: " << relation << "\n\n";
  os << std::left << std::setw(kLabelWidth) << "effect";
  for (const auto& out : outcomes) os << std::setw(kCellWidth) << out.model->name;
  os << '\n';
  for (const auto& spec : rows) {
    os << std::setw(kLabelWidth) << effect_label(spec);
    for (const auto& out : outcomes) {
      std::string cell = "--";
      if (out.error.empty()) {
        const auto& fit = out.fit;
        const auto it = std::find(fit.effects.begin(), fit.effects.end(), spec);
        if (it != fit.effects.end()) {
          const auto e = static_cast<std::size_t>(it - fit.effects.begin());
          const bool significant =
              fit.standard_error[e] > 0.0 &&
              std::abs(fit.theta[e] / fit.standard_error[e]) > kZCritical;
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.3f (%.3f)%s", fit.theta[e],
                        fit.standard_error[e], significant ? "*" : "");
          cell = buf;
        }
      }
      os << std::setw(kCellWidth) << cell;
    }
    os << '\n';
  }
  os << std::setw(kLabelWidth) << "converged";
  for (const auto& out : outcomes)
    os << std::setw(kCellWidth)
       << (!out.error.empty() ? "error" : out.fit.converged ? "yes" : "no");
  os << '\n';
  for (const auto& out : outcomes)
    if (!out.error.empty()) os << "note: " << out.model->name << ": " << out.error << '\n';
  os << "* p < .05 (two-tailed)\n";
  return os.str();
}

int cmd_fit(const Pipeline& p) {
  if (p.models.empty()) throw ValidationError("config: 'models' must list at least one model");
  fs::create_directories(p.output_dir);
  OutputLock lock(p.output_dir);
  bool all_good = true;
  for (const auto& relation : configured_relations(p)) {
    const auto net = load_network(p, relation);
    std::vector<FitOutcome> outcomes;
    for (const auto& model : p.models) {
      if (!model.applies_to(relation)) continue;
      FitOutcome out;
      out.model = &model;
      EstimationConfig cfg = p.estimation;
      cfg.chain.seed = stage_seed(p, "fit", relation, model.name);
      cfg.initial_theta.clear();
      if (std::any_of(model.theta.begin(), model.theta.end(),
                      [](const std::optional<double>& t) { return t.has_value(); }))
        for (const auto& t : model.theta) cfg.initial_theta.push_back(t.value_or(0.0));
      try {
        out.fit = estimate(net, model.effects, cfg);
        if (!out.fit.converged) all_good = false;
      } catch (const std::exception& e) {
        out.error = e.what();
        all_good = false;
      }
      write_file(p.output_dir / ("fit_" + relation + "_" + model.name + ".json"),
                 fit_to_json(p, relation, out).dump(2) + "\n");
      if (!out.error.empty())
        std::cerr << "fit: " << relation << '/' << model.name << ": " << out.error << "\n";
      else
        p.say("fit: " + relation + "/" + model.name +
              (out.fit.converged ? " converged in " + std::to_string(out.fit.rounds) + " round(s)"
                                 : " did not converge"));
      outcomes.push_back(std::move(out));
    }
    write_file(p.output_dir / ("fit_" + relation + "_report.txt"),
               fit_report(p, relation, outcomes));
  }
  return all_good ? 0 : 2;
}

// -------------------------------------------------------------------- gof

int cmd_gof(const Pipeline& p) {
  if (p.models.empty()) throw ValidationError("config: 'models' must list at least one model");
  fs::create_directories(p.output_dir);
  OutputLock lock(p.output_dir);
  bool all_good = true;
  for (const auto& relation : configured_relations(p)) {
    const auto net = load_network(p, relation);
    for (const auto& model : p.models) {
      if (!model.applies_to(relation)) continue;
      const fs::path fit_file = p.output_dir / ("fit_" + relation + "_" + model.name + ".json");
      const json fj = load_stage_json(fit_file, "fit", "fit");
      if (fj.contains("error")) {
        std::cerr << "gof: " << relation << '/' << model.name
                  << " skipped: fit failed: " << fj["error"].get<std::string>() << "\n";
        all_good = false;
        continue;
      }
      FitResult fit;
      fit.converged = fj.at("converged").get<bool>();
      if (!fit.converged) {
        std::cerr << "gof: " << relation << '/' << model.name
                  << " skipped: fit did not converge\n";
        all_good = false;
        continue;
      }
      for (const auto& ej : fj.at("effects")) {
        fit.effects.push_back(EffectSpec::from_name(ej.at("name").get<std::string>(),
                                                    ej.value("lambda", 2.0)));
        fit.theta.push_back(ej.at("theta").get<double>());
      }

      ChainConfig chain = p.chain;
      chain.seed = stage_seed(p, "gof", relation, model.name);
      const auto report = gof(net, fit, p.gof_auxiliary, chain);

      std::ostringstream csv;
      csv << p.provenance_line() << "statistic,observed,mean,stddev,t_ratio,in_model\n";
      for (const auto& row : report.rows)
        csv << row.statistic << ',' << fmt_num(row.observed) << ',' << fmt_num(row.mean) << ','
            << fmt_num(row.sd) << ',' << (row.zero_variance ? "zero-variance" : fmt_num(row.t))
            << ',' << (row.in_model ? "yes" : "no") << '\n';
      write_file(p.output_dir / ("gof_" + relation + "_" + model.name + ".csv"), csv.str());
      p.say("gof: " + relation + "/" + model.name + " -> " +
            (p.output_dir / ("gof_" + relation + "_" + model.name + ".csv")).string());
    }
  }
  return all_good ? 0 : 2;
}

// ----------------------------------------------------------------- report

int cmd_report(const Pipeline& p) {
  const auto art = load_extraction(p);
  fs::create_directories(p.output_dir);
  OutputLock lock(p.output_dir);
  for (const auto& relation : configured_relations(p)) {
    const auto net = load_network(p, relation);
    for (const auto& gid : art.group_order) {
      const auto& group = art.group_nets.at(gid);
      for (const DyadMode mode : {DyadMode::within_position, DyadMode::cross_position,
                                  DyadMode::one_position_only}) {
        const std::string stem =
            "report_" + relation + "_" + gid + "_" + to_string(mode);
        std::ostringstream ccsv;
        ccsv << p.provenance_line() << "concept,artist_freq,manager_freq,total\n";
        for (const auto& row : report_shared_concepts(group, net.social, art.actors, mode))
          ccsv << row.concept_id << ',' << row.artist_freq << ',' << row.manager_freq << ','
               << row.total << '\n';
        write_file(p.output_dir / (stem + "_concepts.csv"), ccsv.str());

        std::ostringstream acsv;
        acsv << p.provenance_line() << "association,times_used,in_all_dyads\n";
        for (const auto& row :
             report_shared_associations(group, net.social, art.actors, mode))
          acsv << row.association.first << '|' << row.association.second << ','
               << row.times_used << ',' << (row.in_all_dyads ? "yes" : "no") << '\n';
        write_file(p.output_dir / (stem + "_associations.csv"), acsv.str());
      }
    }
    p.say("report: " + relation + " tables -> " + p.output_dir.string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"socio-semantic network pipeline"};
  app.fallthrough();
  std::string config_path, out_override;
  std::uint64_t seed_override = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "pipeline configuration (json)")->required();
  auto* seed_opt = app.add_option("--seed", seed_override, "override the configured seed");
  app.add_option("--out", out_override, "override the configured output directory");
  app.add_flag("--quiet", quiet, "suppress progress lines");
  app.require_subcommand(1);

  auto* sc_extract =
      app.add_subcommand("extract", "corpus -> per-member and group semantic networks");
  auto* sc_similarity =
      app.add_subcommand("similarity", "stable networks -> jaccard matrices and mds maps");
  auto* sc_assemble =
      app.add_subcommand("assemble", "extraction + ties -> two-layer network files");
  auto* sc_stats = app.add_subcommand("stats", "observed statistics for every model");
  auto* sc_simulate = app.add_subcommand("simulate", "draw networks at fixed parameters");
  auto* sc_fit = app.add_subcommand("fit", "MCMC maximum-likelihood estimation per model");
  auto* sc_gof = app.add_subcommand("gof", "goodness-of-fit tables for fitted models");
  auto* sc_report =
      app.add_subcommand("report", "shared-concept and shared-association tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const Pipeline p = load_config(config_path, seed_opt->count() ? &seed_override : nullptr,
                                   out_override, quiet);
    if (sc_extract->parsed()) return cmd_extract(p);
    if (sc_similarity->parsed()) return cmd_similarity(p);
    if (sc_assemble->parsed()) return cmd_assemble(p);
    if (sc_stats->parsed()) return cmd_stats(p);
    if (sc_simulate->parsed()) return cmd_simulate(p);
    if (sc_fit->parsed()) return cmd_fit(p);
    if (sc_gof->parsed()) return cmd_gof(p);
    if (sc_report->parsed()) return cmd_report(p);
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "socsemnet: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "socsemnet: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "socsemnet: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "socsemnet: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "socsemnet: unexpected error: " << e.what() << "\n";
    return 2;
  }
}
