#include "ssn/socsem.hpp"

#include <algorithm>
#include <ostream>

#include <json.hpp>

using nlohmann::json;

namespace ssn {

void SocialLayer::set_edge(int i, int j, bool v) {
  if (i == j) throw std::invalid_argument("social layer has no self-ties");
  adj[static_cast<std::size_t>(i) * members.size() + j] = v ? 1 : 0;
  adj[static_cast<std::size_t>(j) * members.size() + i] = v ? 1 : 0;
}

long long SocialLayer::edge_count() const {
  long long m = 0;
  for (int i = 0; i < n(); ++i)
    for (int j = i + 1; j < n(); ++j)
      if (edge(i, j)) ++m;
  return m;
}

int SocialLayer::index_of(const MemberId& m) const {
  for (int i = 0; i < n(); ++i)
    if (members[i] == m) return i;
  return -1;
}

void SocialLayer::validate() const {
  const std::size_t nn = members.size();
  if (adj.size() != nn * nn)
    throw ValidationError("social layer: adjacency size does not match member count");
  std::set<MemberId> ids(members.begin(), members.end());
  if (ids.size() != nn) throw ValidationError("social layer: duplicate member id");
  for (std::size_t i = 0; i < nn; ++i) {
    if (adj[i * nn + i] != 0) throw ValidationError("social layer: nonzero diagonal");
    for (std::size_t j = 0; j < nn; ++j) {
      if (adj[i * nn + j] > 1) throw ValidationError("social layer: entries must be 0/1");
      if (adj[i * nn + j] != adj[j * nn + i])
        throw ValidationError("social layer: adjacency not symmetric at (" + members[i] + "," +
                              members[j] + ")");
    }
  }
}

void UsageLayer::set_link(int i, int w, bool v) {
  x[static_cast<std::size_t>(i) * n_concepts + w] = v ? 1 : 0;
}

long long UsageLayer::link_count() const {
  long long m = 0;
  for (const auto b : x) m += b;
  return m;
}

bool SocioSemanticNetwork::masked(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(zero_mask.begin(), zero_mask.end(), std::make_pair(i, j));
}

std::vector<std::pair<int, int>> SocioSemanticNetwork::free_dyads() const {
  std::vector<std::pair<int, int>> out;
  const int n = n_actors();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!masked(i, j)) out.emplace_back(i, j);
  return out;
}

void SocioSemanticNetwork::validate() const {
  const int n = n_actors();
  const int m = n_concepts();
  if (social.n() != n) throw ValidationError("network: social layer size mismatch");
  for (int i = 0; i < n; ++i)
    if (social.members[i] != actors[i].member_id)
      throw ValidationError("network: social member order does not match actor table");
  social.validate();
  {
    std::set<std::string> ids;
    for (const auto& a : actors)
      if (!ids.insert(a.member_id).second)
        throw ValidationError("network: duplicate actor '" + a.member_id + "'");
    std::set<std::string> cs(concepts.begin(), concepts.end());
    if (static_cast<int>(cs.size()) != m) throw ValidationError("network: duplicate concept id");
  }
  if (usage.n_actors != n || usage.n_concepts != m ||
      usage.x.size() != static_cast<std::size_t>(n) * m)
    throw ValidationError("network: usage layer dimensions mismatch");
  if (semantic.size() != static_cast<std::size_t>(m) * m)
    throw ValidationError("network: semantic layer dimensions mismatch");
  for (int w = 0; w < m; ++w) {
    if (semantic[static_cast<std::size_t>(w) * m + w] != 0)
      throw ValidationError("network: semantic layer has a self-loop");
    for (int v = 0; v < m; ++v)
      if (semantic_edge(w, v) != semantic_edge(v, w))
        throw ValidationError("network: semantic layer not symmetric");
  }
  for (std::size_t k = 0; k < zero_mask.size(); ++k) {
    const auto [i, j] = zero_mask[k];
    if (i < 0 || j <= i || j >= n) throw ValidationError("network: bad mask dyad");
    if (k > 0 && !(zero_mask[k - 1] < zero_mask[k]))
      throw ValidationError("network: mask dyads must be sorted and unique");
    if (social.edge(i, j))
      throw ValidationError("network: tie on structurally zero dyad (" + actors[i].member_id +
                            "," + actors[j].member_id + ")");
  }
}

SocialLayer reconcile_survey_ties(const std::vector<SurveyResponse>& responses,
                                  const std::vector<MemberId>& core_members, Relation relation) {
  const int n = static_cast<int>(core_members.size());
  if (n < 2) throw ValidationError("survey reconciliation needs at least two core members");
  std::map<MemberId, int> index;
  for (int i = 0; i < n; ++i)
    if (!index.emplace(core_members[i], i).second)
      throw ValidationError("duplicate core member '" + core_members[i] + "'");

  std::set<MemberId> reporters;
  for (const auto& r : responses) {
    if (r.relation != relation)
      throw ValidationError("survey response of '" + r.reporter + "' is for relation " +
                            to_string(r.relation) + ", expected " + to_string(relation));
    if (!index.count(r.reporter))
      throw ValidationError("survey reporter '" + r.reporter + "' is not a core member");
    if (!reporters.insert(r.reporter).second)
      throw ValidationError("duplicate survey response from '" + r.reporter + "'");
  }
  for (const auto& m : core_members)
    if (!reporters.count(m)) throw ValidationError("no survey response from core member '" + m + "'");

  // nomination matrix and third-party confirmation counts
  std::vector<std::uint8_t> nominated(static_cast<std::size_t>(n) * n, 0);
  std::map<std::pair<int, int>, int> votes;
  for (const auto& r : responses) {
    const int ri = index.at(r.reporter);
    for (const auto& m : r.nominated) {
      const auto it = index.find(m);
      if (it == index.end())
        throw ValidationError("'" + r.reporter + "' nominated non-roster member '" + m + "'");
      if (it->second == ri)
        throw ValidationError("'" + r.reporter + "' nominated themselves");
      nominated[static_cast<std::size_t>(ri) * n + it->second] = 1;
    }
    for (const auto& [a, b] : r.confirmed) {
      const auto ia = index.find(a);
      const auto ib = index.find(b);
      if (ia == index.end() || ib == index.end())
        throw ValidationError("'" + r.reporter + "' confirmed a dyad with non-roster member");
      if (ia->second == ib->second)
        throw ValidationError("'" + r.reporter + "' confirmed a degenerate dyad");
      if (ia->second == ri || ib->second == ri)
        throw ValidationError("'" + r.reporter + "' confirmed a dyad involving themselves");
      auto key = std::minmax(ia->second, ib->second);
      ++votes[{key.first, key.second}];
    }
  }

  SocialLayer layer;
  layer.relation = relation;
  layer.members = core_members;
  layer.adj.assign(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool ij = nominated[static_cast<std::size_t>(i) * n + j] != 0;
      const bool ji = nominated[static_cast<std::size_t>(j) * n + i] != 0;
      bool tie = false;
      if (ij && ji) {
        tie = true;
      } else if (ij || ji) {
        // confirmed by a strict majority of the other n-2 core members
        const auto it = votes.find({i, j});
        const int v = it == votes.end() ? 0 : it->second;
        tie = 2 * v > n - 2;
      }
      if (tie) layer.set_edge(i, j, true);
    }
  }
  return layer;
}

SocioSemanticNetwork assemble(const std::vector<GroupExtraction>& groups,
                              const SocialLayer& social,
                              const std::vector<ActorAttributes>& actors) {
  const int n = static_cast<int>(actors.size());
  if (n == 0) throw ValidationError("assemble: empty actor table");

  std::map<std::string, const GroupExtraction*> by_group;
  for (const auto& g : groups)
    if (!by_group.emplace(g.group_id, &g).second)
      throw ValidationError("assemble: duplicate group '" + g.group_id + "'");

  // group order: first appearance in the actor table
  std::vector<std::string> group_order;
  for (const auto& a : actors) {
    if (!by_group.count(a.group_id))
      throw ValidationError("assemble: actor '" + a.member_id + "' references unknown group '" +
                            a.group_id + "'");
    if (std::find(group_order.begin(), group_order.end(), a.group_id) == group_order.end())
      group_order.push_back(a.group_id);
  }
  if (group_order.size() != by_group.size())
    throw ValidationError("assemble: a group has no actors in the attribute table");

  SocioSemanticNetwork net;
  net.actors = actors;

  // social layer reordered to actor-table order
  if (social.n() != n)
    throw ValidationError("assemble: social layer covers " + std::to_string(social.n()) +
                          " members, attribute table has " + std::to_string(n));
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) {
    const int k = social.index_of(actors[i].member_id);
    if (k < 0)
      throw ValidationError("assemble: actor '" + actors[i].member_id + "' missing from social layer");
    perm[i] = k;
  }
  net.social.relation = social.relation;
  net.social.members.reserve(n);
  for (const auto& a : actors) net.social.members.push_back(a.member_id);
  net.social.adj.assign(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      net.social.adj[static_cast<std::size_t>(i) * n + j] =
          social.adj[static_cast<std::size_t>(perm[i]) * n + perm[j]];

  // concept blocks, one per group; names qualified when several groups exist
  const bool qualify = group_order.size() > 1;
  std::map<std::string, int> concept_base;
  std::map<std::string, std::vector<std::string>> group_concepts;
  for (const auto& gid : group_order) {
    const auto& gnet = by_group.at(gid)->group_net;
    std::vector<std::string> stems;
    for (const auto& [c, f] : gnet.concept_freq) stems.push_back(c);
    concept_base[gid] = static_cast<int>(net.concepts.size());
    for (const auto& s : stems) net.concepts.push_back(qualify ? gid + "/" + s : s);
    group_concepts[gid] = std::move(stems);
  }
  const int m = static_cast<int>(net.concepts.size());

  // semantic layer: binarized group associations, block diagonal
  net.semantic.assign(static_cast<std::size_t>(m) * m, 0);
  for (const auto& gid : group_order) {
    const auto& gnet = by_group.at(gid)->group_net;
    const auto& stems = group_concepts.at(gid);
    const int base = concept_base.at(gid);
    std::map<std::string, int> local;
    for (int w = 0; w < static_cast<int>(stems.size()); ++w) local[stems[w]] = base + w;
    for (const auto& [pair, w] : gnet.assoc_weight) {
      const auto a = local.find(pair.first);
      const auto b = local.find(pair.second);
      if (a == local.end() || b == local.end())
        throw ValidationError("assemble: association in group '" + gid +
                              "' references a concept missing from its concept set");
      net.semantic[static_cast<std::size_t>(a->second) * m + b->second] = 1;
      net.semantic[static_cast<std::size_t>(b->second) * m + a->second] = 1;
    }
  }

  // usage layer from stable individual networks
  net.usage.n_actors = n;
  net.usage.n_concepts = m;
  net.usage.x.assign(static_cast<std::size_t>(n) * m, 0);
  for (int i = 0; i < n; ++i) {
    const auto& g = *by_group.at(actors[i].group_id);
    const auto it = g.individual_nets.find(actors[i].member_id);
    if (it == g.individual_nets.end())
      throw ValidationError("assemble: no individual semantic network for member '" +
                            actors[i].member_id + "'");
    const auto& stems = group_concepts.at(actors[i].group_id);
    const int base = concept_base.at(actors[i].group_id);
    std::map<std::string, int> local;
    for (int w = 0; w < static_cast<int>(stems.size()); ++w) local[stems[w]] = base + w;
    for (const auto& [c, f] : it->second.concept_freq) {
      const auto lw = local.find(c);
      if (lw == local.end())
        throw ValidationError("assemble: member '" + actors[i].member_id + "' uses concept '" + c +
                              "' absent from the semantic layer of group '" + actors[i].group_id +
                              "'");
      net.usage.set_link(i, lw->second, true);
    }
  }

  // structural zeros on all cross-group dyads
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (actors[i].group_id != actors[j].group_id) net.zero_mask.emplace_back(i, j);

  net.validate();  // also rejects ties on masked dyads
  return net;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string serialize(const SocioSemanticNetwork& net) {
  json j;
  j["format"] = "socsem-network";
  j["version"] = 1;
  json actors = json::array();
  for (const auto& a : net.actors) {
    actors.push_back({{"member_id", a.member_id},
                      {"group_id", a.group_id},
                      {"position", to_string(a.position)},
                      {"gender", a.gender},
                      {"artistic_education", a.artistic_education},
                      {"genre", a.genre}});
  }
  j["actors"] = std::move(actors);
  j["concepts"] = net.concepts;
  json edges = json::array();
  for (int i = 0; i < net.n_actors(); ++i)
    for (int k = i + 1; k < net.n_actors(); ++k)
      if (net.social.edge(i, k))
        edges.push_back({net.actors[i].member_id, net.actors[k].member_id});
  j["social"] = {{"relation", to_string(net.social.relation)}, {"edges", std::move(edges)}};
  json links = json::array();
  for (int i = 0; i < net.n_actors(); ++i)
    for (int w = 0; w < net.n_concepts(); ++w)
      if (net.usage.link(i, w)) links.push_back({net.actors[i].member_id, net.concepts[w]});
  j["usage"] = {{"links", std::move(links)}};
  json sem = json::array();
  for (int w = 0; w < net.n_concepts(); ++w)
    for (int v = w + 1; v < net.n_concepts(); ++v)
      if (net.semantic_edge(w, v)) sem.push_back({net.concepts[w], net.concepts[v]});
  j["semantic"] = {{"edges", std::move(sem)}};
  json mask = json::array();
  for (const auto& [i, k] : net.zero_mask)
    mask.push_back({net.actors[i].member_id, net.actors[k].member_id});
  j["mask"] = {{"dyads", std::move(mask)}};
  return j.dump(2) + "\n";
}

SocioSemanticNetwork deserialize(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("network json: ") + e.what());
  }
  try {
    if (j.value("format", "") != "socsem-network")
      throw ParseError("network json: missing or wrong \"format\" marker");
    SocioSemanticNetwork net;
    std::map<std::string, int> actor_index;
    for (const auto& a : j.at("actors")) {
      ActorAttributes attr;
      attr.member_id = a.at("member_id").get<std::string>();
      attr.group_id = a.at("group_id").get<std::string>();
      attr.position = position_from_string(a.at("position").get<std::string>());
      attr.gender = a.value("gender", "");
      attr.artistic_education = a.value("artistic_education", "");
      attr.genre = a.value("genre", "");
      if (!actor_index.emplace(attr.member_id, net.actors.size()).second)
        throw ParseError("network json: duplicate actor '" + attr.member_id + "'");
      net.actors.push_back(std::move(attr));
    }
    const int n = net.n_actors();
    std::map<std::string, int> concept_index;
    for (const auto& c : j.at("concepts")) {
      const auto name = c.get<std::string>();
      if (!concept_index.emplace(name, net.concepts.size()).second)
        throw ParseError("network json: duplicate concept '" + name + "'");
      net.concepts.push_back(name);
    }
    const int m = net.n_concepts();

    const auto actor_at = [&](const json& v) {
      const auto id = v.get<std::string>();
      const auto it = actor_index.find(id);
      if (it == actor_index.end()) throw ParseError("network json: unknown actor '" + id + "'");
      return it->second;
    };
    const auto concept_at = [&](const json& v) {
      const auto id = v.get<std::string>();
      const auto it = concept_index.find(id);
      if (it == concept_index.end()) throw ParseError("network json: unknown concept '" + id + "'");
      return it->second;
    };

    const auto& social = j.at("social");
    net.social.relation = relation_from_string(social.at("relation").get<std::string>());
    net.social.members.clear();
    for (const auto& a : net.actors) net.social.members.push_back(a.member_id);
    net.social.adj.assign(static_cast<std::size_t>(n) * n, 0);
    if (social.contains("matrix")) {
      const auto& rows = social.at("matrix");
      if (static_cast<int>(rows.size()) != n)
        throw ParseError("network json: social matrix must have one row per actor");
      for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
          throw ParseError("network json: social matrix row " + std::to_string(i) +
                           " has wrong length");
        for (int k = 0; k < n; ++k) {
          const int v = rows[i][k].get<int>();
          if (v != 0 && v != 1)
            throw ParseError("network json: social matrix entries must be 0 or 1");
          net.social.adj[static_cast<std::size_t>(i) * n + k] = static_cast<std::uint8_t>(v);
        }
      }
      for (int i = 0; i < n; ++i) {
        if (net.social.adj[static_cast<std::size_t>(i) * n + i] != 0)
          throw ParseError("network json: social matrix has a self-tie at row " +
                           std::to_string(i));
        for (int k = 0; k < n; ++k)
          if (net.social.adj[static_cast<std::size_t>(i) * n + k] !=
              net.social.adj[static_cast<std::size_t>(k) * n + i])
            throw ParseError("network json: social matrix is asymmetric at (" +
                             net.actors[i].member_id + "," + net.actors[k].member_id + ")");
      }
    } else {
      for (const auto& e : social.at("edges")) {
        if (e.size() != 2) throw ParseError("network json: social edge must name two actors");
        const int a = actor_at(e[0]);
        const int b = actor_at(e[1]);
        if (a == b) throw ParseError("network json: social self-tie on '" +
                                     net.actors[a].member_id + "'");
        net.social.set_edge(a, b, true);
      }
    }

    net.usage.n_actors = n;
    net.usage.n_concepts = m;
    net.usage.x.assign(static_cast<std::size_t>(n) * m, 0);
    for (const auto& l : j.at("usage").at("links")) {
      if (l.size() != 2) throw ParseError("network json: usage link must be [actor, concept]");
      net.usage.set_link(actor_at(l[0]), concept_at(l[1]), true);
    }

    net.semantic.assign(static_cast<std::size_t>(m) * m, 0);
    for (const auto& e : j.at("semantic").at("edges")) {
      if (e.size() != 2) throw ParseError("network json: semantic edge must name two concepts");
      const int w = concept_at(e[0]);
      const int v = concept_at(e[1]);
      if (w == v)
        throw ParseError("network json: semantic self-loop on '" + net.concepts[w] + "'");
      net.semantic[static_cast<std::size_t>(w) * m + v] = 1;
      net.semantic[static_cast<std::size_t>(v) * m + w] = 1;
    }

    for (const auto& d : j.at("mask").at("dyads")) {
      if (d.size() != 2) throw ParseError("network json: mask dyad must name two actors");
      int a = actor_at(d[0]);
      int b = actor_at(d[1]);
      if (a == b) throw ParseError("network json: mask dyad is degenerate");
      if (a > b) std::swap(a, b);
      net.zero_mask.emplace_back(a, b);
    }
    std::sort(net.zero_mask.begin(), net.zero_mask.end());
    net.zero_mask.erase(std::unique(net.zero_mask.begin(), net.zero_mask.end()),
                        net.zero_mask.end());

    try {
      net.validate();
    } catch (const ValidationError& e) {
      throw ParseError(std::string("network json: ") + e.what());
    }
    return net;
  } catch (const json::exception& e) {
    throw ParseError(std::string("network json: ") + e.what());
  }
}

void write_graphml(const SocioSemanticNetwork& net, std::ostream& out) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"kind\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n"
      << "  <key id=\"position\" for=\"node\" attr.name=\"position\" attr.type=\"string\"/>\n"
      << "  <key id=\"group\" for=\"node\" attr.name=\"group\" attr.type=\"string\"/>\n"
      << "  <key id=\"genre\" for=\"node\" attr.name=\"genre\" attr.type=\"string\"/>\n"
      << "  <key id=\"ekind\" for=\"edge\" attr.name=\"kind\" attr.type=\"string\"/>\n"
      << "  <key id=\"relation\" for=\"graph\" attr.name=\"relation\" attr.type=\"string\"/>\n"
      << "  <graph id=\"socsem\" edgedefault=\"undirected\">\n"
      << "    <data key=\"relation\">" << to_string(net.social.relation) << "</data>\n";
  for (const auto& a : net.actors) {
    out << "    <node id=\"a:" << xml_escape(a.member_id) << "\"><data key=\"kind\">actor</data>"
        << "<data key=\"position\">" << to_string(a.position) << "</data>"
        << "<data key=\"group\">" << xml_escape(a.group_id) << "</data>"
        << "<data key=\"genre\">" << xml_escape(a.genre) << "</data></node>\n";
  }
  for (const auto& c : net.concepts)
    out << "    <node id=\"c:" << xml_escape(c) << "\"><data key=\"kind\">concept</data></node>\n";
  for (int i = 0; i < net.n_actors(); ++i)
    for (int j = i + 1; j < net.n_actors(); ++j)
      if (net.social.edge(i, j))
        out << "    <edge source=\"a:" << xml_escape(net.actors[i].member_id) << "\" target=\"a:"
            << xml_escape(net.actors[j].member_id)
            << "\"><data key=\"ekind\">social</data></edge>\n";
  for (int i = 0; i < net.n_actors(); ++i)
    for (int w = 0; w < net.n_concepts(); ++w)
      if (net.usage.link(i, w))
        out << "    <edge source=\"a:" << xml_escape(net.actors[i].member_id) << "\" target=\"c:"
            << xml_escape(net.concepts[w]) << "\"><data key=\"ekind\">usage</data></edge>\n";
  for (int w = 0; w < net.n_concepts(); ++w)
    for (int v = w + 1; v < net.n_concepts(); ++v)
      if (net.semantic_edge(w, v))
        out << "    <edge source=\"c:" << xml_escape(net.concepts[w]) << "\" target=\"c:"
            << xml_escape(net.concepts[v]) << "\"><data key=\"ekind\">semantic</data></edge>\n";
  out << "  </graph>\n</graphml>\n";
}

}  // namespace ssn
