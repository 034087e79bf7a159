#include <doctest.h>

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ssn/semantic.hpp"
#include "ssn/socsem.hpp"

using namespace ssn;

namespace {

Sentence sentence(std::vector<std::string> tokens) { return Sentence{std::move(tokens)}; }

ActorAttributes actor(const char* id, const char* group, Position pos, const char* genre = "") {
  ActorAttributes a;
  a.member_id = id;
  a.group_id = group;
  a.position = pos;
  a.gender = "x";
  a.artistic_education = "yes";
  a.genre = genre;
  return a;
}

SurveyResponse response(const char* reporter, std::set<MemberId> nominated,
                        std::set<std::pair<MemberId, MemberId>> confirmed,
                        Relation rel = Relation::friendship) {
  SurveyResponse r;
  r.reporter = reporter;
  r.relation = rel;
  r.nominated = std::move(nominated);
  r.confirmed = std::move(confirmed);
  return r;
}

SemanticNetwork stable_net(const MemberId& owner,
                           const std::vector<std::vector<std::string>>& sentences) {
  std::vector<Sentence> ss;
  for (auto& s : sentences) ss.push_back(sentence(s));
  return filter_stable(build_individual_network(owner, ss));
}

// two-group fixture used by the assembly and serialization tests
struct TwoGroups {
  std::vector<GroupExtraction> groups;
  std::vector<ActorAttributes> actors;
  SocialLayer social;
};

TwoGroups two_group_fixture() {
  TwoGroups f;
  GroupExtraction g1;
  g1.group_id = "G1";
  g1.individual_nets["A1"] = stable_net("A1", {{"x", "y"}, {"x", "y"}});
  g1.individual_nets["A2"] = stable_net("A2", {{"y", "z"}, {"y", "z"}, {"x"}});
  g1.group_net = union_group_network("G1", {g1.individual_nets["A1"], g1.individual_nets["A2"]});
  GroupExtraction g2;
  g2.group_id = "G2";
  g2.individual_nets["B1"] = stable_net("B1", {{"p", "q"}, {"p", "q"}, {"p", "q"}});
  g2.individual_nets["B2"] = stable_net("B2", {{"q", "r"}, {"q", "r"}});
  g2.group_net = union_group_network("G2", {g2.individual_nets["B1"], g2.individual_nets["B2"]});
  f.groups = {g1, g2};
  f.actors = {actor("A1", "G1", Position::artist, "painting"),
              actor("A2", "G1", Position::manager, "management"),
              actor("B1", "G2", Position::artist, "graphics"),
              actor("B2", "G2", Position::manager, "ink & \"wash\" <art>")};
  // deliberately scrambled member order; assemble must permute it
  f.social.relation = Relation::collaboration;
  f.social.members = {"B2", "A1", "B1", "A2"};
  f.social.adj.assign(16, 0);
  f.social.set_edge(1, 3, true);  // A1-A2
  f.social.set_edge(0, 2, true);  // B2-B1
  return f;
}

}  // namespace

TEST_CASE("social layer basics") {
  SocialLayer s;
  s.members = {"a", "b", "c"};
  s.adj.assign(9, 0);
  s.set_edge(0, 2, true);
  CHECK(s.edge(0, 2));
  CHECK(s.edge(2, 0));
  CHECK_FALSE(s.edge(0, 1));
  CHECK(s.edge_count() == 1);
  CHECK(s.index_of("c") == 2);
  CHECK(s.index_of("zz") == -1);
  CHECK_THROWS_AS(s.set_edge(1, 1, true), std::invalid_argument);
  CHECK_NOTHROW(s.validate());
  s.set_edge(0, 2, false);
  CHECK(s.edge_count() == 0);

  SUBCASE("validate catches inconsistencies") {
    SocialLayer bad = s;
    bad.adj[1] = 1;  // (0,1) set one-way
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("not symmetric"), ValidationError);
    bad = s;
    bad.adj[0] = 1;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("diagonal"), ValidationError);
    bad = s;
    bad.adj[1] = bad.adj[3] = 2;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("0/1"), ValidationError);
    bad = s;
    bad.members = {"a", "b"};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = s;
    bad.members = {"a", "b", "a"};
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("duplicate"), ValidationError);
  }
}

TEST_CASE("survey reconciliation on the bundled fixture") {
  const std::vector<MemberId> core = {"BA", "BB", "BC", "BD", "BE", "BF"};
  const std::vector<SurveyResponse> responses = {
      response("BA", {"BB"}, {{"BB", "BC"}, {"BC", "BF"}}),
      response("BB", {"BA", "BC", "BD"}, {{"BE", "BF"}}),
      response("BC", {"BF"}, {{"BE", "BF"}}),
      response("BD", {"BB", "BE"}, {{"BB", "BC"}, {"BE", "BF"}, {"BC", "BF"}}),
      response("BE", {"BD", "BF"}, {{"BB", "BC"}}),
      response("BF", {}, {})};
  const auto layer = reconcile_survey_ties(responses, core, Relation::friendship);
  CHECK(layer.relation == Relation::friendship);
  CHECK(layer.members == core);
  CHECK(layer.edge_count() == 5);
  const auto tied = [&](const char* a, const char* b) {
    return layer.edge(layer.index_of(a), layer.index_of(b));
  };
  CHECK(tied("BA", "BB"));  // mutual
  CHECK(tied("BB", "BD"));  // mutual
  CHECK(tied("BD", "BE"));  // mutual
  CHECK(tied("BB", "BC"));  // one-sided, confirmed by BA, BD, BE (3 of 4)
  CHECK(tied("BE", "BF"));  // one-sided, confirmed by BB, BC, BD (3 of 4)
  CHECK_FALSE(tied("BC", "BF"));  // one-sided, only BA and BD confirm (2 of 4)
  CHECK_FALSE(tied("BA", "BC"));
}

TEST_CASE("survey majority threshold at small rosters") {
  SUBCASE("three members: the single third party decides") {
    const std::vector<MemberId> core = {"a", "b", "c"};
    auto rs = std::vector<SurveyResponse>{response("a", {"b"}, {}), response("b", {}, {}),
                                          response("c", {}, {{"a", "b"}})};
    CHECK(reconcile_survey_ties(rs, core, Relation::friendship).edge_count() == 1);
    rs[2].confirmed.clear();  // no confirmation: 2*0 > 1 fails
    CHECK(reconcile_survey_ties(rs, core, Relation::friendship).edge_count() == 0);
  }
  SUBCASE("four members: both third parties must confirm") {
    const std::vector<MemberId> core = {"a", "b", "c", "d"};
    auto rs = std::vector<SurveyResponse>{response("a", {"b"}, {}), response("b", {}, {}),
                                          response("c", {}, {{"a", "b"}}),
                                          response("d", {}, {{"a", "b"}})};
    CHECK(reconcile_survey_ties(rs, core, Relation::friendship).edge_count() == 1);
    rs[3].confirmed.clear();  // 2*1 > 2 fails
    CHECK(reconcile_survey_ties(rs, core, Relation::friendship).edge_count() == 0);
  }
  SUBCASE("two members: only mutual nomination can tie") {
    const std::vector<MemberId> core = {"a", "b"};
    auto rs = std::vector<SurveyResponse>{response("a", {"b"}, {}), response("b", {}, {})};
    CHECK(reconcile_survey_ties(rs, core, Relation::friendship).edge_count() == 0);
    rs[1].nominated = {"a"};
    CHECK(reconcile_survey_ties(rs, core, Relation::friendship).edge_count() == 1);
  }
}

TEST_CASE("survey reconciliation validation") {
  const std::vector<MemberId> core = {"a", "b", "c"};
  const auto ok = std::vector<SurveyResponse>{response("a", {}, {}), response("b", {}, {}),
                                              response("c", {}, {})};
  CHECK_NOTHROW(reconcile_survey_ties(ok, core, Relation::friendship));

  auto rs = ok;
  rs[0].relation = Relation::collaboration;
  CHECK_THROWS_WITH_AS(reconcile_survey_ties(rs, core, Relation::friendship),
                       doctest::Contains("relation"), ValidationError);
  rs = ok;
  rs[0].reporter = "zz";
  CHECK_THROWS_WITH_AS(reconcile_survey_ties(rs, core, Relation::friendship),
                       doctest::Contains("not a core member"), ValidationError);
  rs = ok;
  rs[2].reporter = "a";
  CHECK_THROWS_WITH_AS(reconcile_survey_ties(rs, core, Relation::friendship),
                       doctest::Contains("duplicate survey response"), ValidationError);
  rs = {ok[0], ok[1]};
  CHECK_THROWS_WITH_AS(reconcile_survey_ties(rs, core, Relation::friendship),
                       doctest::Contains("no survey response"), ValidationError);
  rs = ok;
  rs[0].nominated = {"zz"};
  CHECK_THROWS_WITH_AS(reconcile_survey_ties(rs, core, Relation::friendship),
                       doctest::Contains("non-roster"), ValidationError);
  rs = ok;
  rs[0].nominated = {"a"};
  CHECK_THROWS_WITH_AS(reconcile_survey_ties(rs, core, Relation::friendship),
                       doctest::Contains("themselves"), ValidationError);
  rs = ok;
  rs[0].confirmed = {{"b", "b"}};
  CHECK_THROWS_WITH_AS(reconcile_survey_ties(rs, core, Relation::friendship),
                       doctest::Contains("degenerate"), ValidationError);
  rs = ok;
  rs[0].confirmed = {{"a", "b"}};
  CHECK_THROWS_WITH_AS(reconcile_survey_ties(rs, core, Relation::friendship),
                       doctest::Contains("involving themselves"), ValidationError);
  rs = ok;
  rs[0].confirmed = {{"b", "zz"}};
  CHECK_THROWS_WITH_AS(reconcile_survey_ties(rs, core, Relation::friendship),
                       doctest::Contains("non-roster"), ValidationError);
  CHECK_THROWS_AS(reconcile_survey_ties({ok[0]}, {"a"}, Relation::friendship), ValidationError);
  CHECK_THROWS_WITH_AS(reconcile_survey_ties(ok, {"a", "b", "a"}, Relation::friendship),
                       doctest::Contains("duplicate core member"), ValidationError);
}

TEST_CASE("assemble joins layers for a single group") {
  auto f = two_group_fixture();
  // restrict to G1 only
  std::vector<ActorAttributes> actors = {f.actors[0], f.actors[1]};
  SocialLayer social;
  social.relation = Relation::collaboration;
  social.members = {"A1", "A2"};
  social.adj.assign(4, 0);
  social.set_edge(0, 1, true);
  const auto net = assemble({f.groups[0]}, social, actors);

  CHECK(net.n_actors() == 2);
  // single group: concept names stay unqualified
  CHECK(net.concepts == std::vector<std::string>{"x", "y", "z"});
  CHECK(net.zero_mask.empty());
  CHECK(net.free_dyads() == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(net.social.edge(0, 1));
  CHECK(net.semantic_edge(0, 1));   // x-y
  CHECK(net.semantic_edge(1, 2));   // y-z
  CHECK_FALSE(net.semantic_edge(0, 2));
  // A1 uses x,y; A2 uses x,y,z (freq kept isolate x)
  CHECK(net.usage.link(0, 0));
  CHECK(net.usage.link(0, 1));
  CHECK_FALSE(net.usage.link(0, 2));
  CHECK(net.usage.link(1, 0));
  CHECK(net.usage.link(1, 1));
  CHECK(net.usage.link(1, 2));
}

TEST_CASE("assemble with two groups masks cross-group dyads and qualifies concepts") {
  const auto f = two_group_fixture();
  const auto net = assemble(f.groups, f.social, f.actors);

  CHECK(net.concepts ==
        std::vector<std::string>{"G1/x", "G1/y", "G1/z", "G2/p", "G2/q", "G2/r"});
  CHECK(net.zero_mask ==
        std::vector<std::pair<int, int>>{{0, 2}, {0, 3}, {1, 2}, {1, 3}});
  CHECK(net.free_dyads() == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
  CHECK(net.masked(0, 2));
  CHECK(net.masked(2, 0));  // order-insensitive
  CHECK_FALSE(net.masked(0, 1));
  // social got permuted into actor order: A1-A2 and B1-B2 tied
  CHECK(net.social.members == std::vector<MemberId>{"A1", "A2", "B1", "B2"});
  CHECK(net.social.edge(0, 1));
  CHECK(net.social.edge(2, 3));
  CHECK(net.social.edge_count() == 2);
  // semantic blocks stay within their group
  CHECK(net.semantic_edge(0, 1));
  CHECK(net.semantic_edge(1, 2));
  CHECK(net.semantic_edge(3, 4));
  CHECK(net.semantic_edge(4, 5));
  for (int w = 0; w < 3; ++w)
    for (int v = 3; v < 6; ++v) CHECK_FALSE(net.semantic_edge(w, v));
  // usage respects group blocks
  CHECK(net.usage.link(2, 3));
  CHECK(net.usage.link(2, 4));
  CHECK_FALSE(net.usage.link(2, 0));
  CHECK(net.usage.link(3, 4));
  CHECK(net.usage.link(3, 5));
  CHECK_NOTHROW(net.validate());
}

TEST_CASE("assemble validation errors") {
  const auto f = two_group_fixture();

  SUBCASE("tie across groups is rejected") {
    auto social = f.social;
    social.set_edge(1, 0, true);  // A1-B2 in scrambled order
    CHECK_THROWS_WITH_AS(assemble(f.groups, social, f.actors),
                         doctest::Contains("structurally zero"), ValidationError);
  }
  SUBCASE("unknown group") {
    auto actors = f.actors;
    actors[0].group_id = "G9";
    CHECK_THROWS_WITH_AS(assemble(f.groups, f.social, actors), doctest::Contains("G9"),
                         ValidationError);
  }
  SUBCASE("group without actors") {
    std::vector<ActorAttributes> actors = {f.actors[0], f.actors[1]};
    SocialLayer social;
    social.members = {"A1", "A2"};
    social.adj.assign(4, 0);
    CHECK_THROWS_WITH_AS(assemble(f.groups, social, actors),
                         doctest::Contains("no actors"), ValidationError);
  }
  SUBCASE("duplicate group") {
    CHECK_THROWS_WITH_AS(assemble({f.groups[0], f.groups[0]}, f.social, f.actors),
                         doctest::Contains("duplicate group"), ValidationError);
  }
  SUBCASE("actor missing from social layer") {
    auto social = f.social;
    social.members[1] = "A9";
    CHECK_THROWS_WITH_AS(assemble(f.groups, social, f.actors),
                         doctest::Contains("missing from social layer"), ValidationError);
  }
  SUBCASE("social size mismatch") {
    SocialLayer social;
    social.members = {"A1", "A2"};
    social.adj.assign(4, 0);
    CHECK_THROWS_AS(assemble(f.groups, social, f.actors), ValidationError);
  }
  SUBCASE("member without an individual network") {
    auto groups = f.groups;
    groups[0].individual_nets.erase("A2");
    CHECK_THROWS_WITH_AS(assemble(groups, f.social, f.actors),
                         doctest::Contains("no individual semantic network"), ValidationError);
  }
  SUBCASE("member uses a concept the group never saw") {
    auto groups = f.groups;
    groups[0].individual_nets["A1"].concept_freq["rogue"] = 1;
    CHECK_THROWS_WITH_AS(assemble(groups, f.social, f.actors), doctest::Contains("rogue"),
                         ValidationError);
  }
}

TEST_CASE("network validate catches manual corruption") {
  const auto f = two_group_fixture();
  auto net = assemble(f.groups, f.social, f.actors);

  auto bad = net;
  bad.zero_mask = {{1, 3}, {0, 2}};  // unsorted
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("sorted"), ValidationError);
  bad = net;
  bad.zero_mask = {{0, 0}};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = net;
  bad.semantic[1] = 0;  // break symmetry of x-y
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("not symmetric"), ValidationError);
  bad = net;
  bad.semantic[0] = 1;  // self-loop
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("self-loop"), ValidationError);
  bad = net;
  bad.social.members[0] = "A2";
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = net;
  bad.concepts[0] = "G1/y";  // duplicate concept id
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("duplicate concept"), ValidationError);
  bad = net;
  bad.usage.n_concepts = 5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("serialize/deserialize round-trips the network") {
  const auto f = two_group_fixture();
  const auto net = assemble(f.groups, f.social, f.actors);
  const std::string text = serialize(net);
  const auto back = deserialize(text);

  CHECK(back.n_actors() == net.n_actors());
  CHECK(back.concepts == net.concepts);
  CHECK(back.social.relation == net.social.relation);
  CHECK(back.social.members == net.social.members);
  CHECK(back.social.adj == net.social.adj);
  CHECK(back.usage.x == net.usage.x);
  CHECK(back.semantic == net.semantic);
  CHECK(back.zero_mask == net.zero_mask);
  for (int i = 0; i < net.n_actors(); ++i) {
    CHECK(back.actors[i].member_id == net.actors[i].member_id);
    CHECK(back.actors[i].group_id == net.actors[i].group_id);
    CHECK(back.actors[i].position == net.actors[i].position);
    CHECK(back.actors[i].genre == net.actors[i].genre);
  }
  // serialization is deterministic
  CHECK(serialize(back) == text);
}

TEST_CASE("deserialize accepts a social matrix and checks it") {
  const char* base = R"({
    "format": "socsem-network",
    "actors": [
      {"member_id": "a", "group_id": "G", "position": "artist"},
      {"member_id": "b", "group_id": "G", "position": "manager"}
    ],
    "concepts": ["c1", "c2"],
    "social": {"relation": "friendship", "matrix": [[0, 1], [1, 0]]},
    "usage": {"links": [["a", "c1"], ["b", "c2"]]},
    "semantic": {"edges": [["c1", "c2"]]},
    "mask": {"dyads": []}
  })";
  const auto net = deserialize(base);
  CHECK(net.social.edge(0, 1));
  CHECK(net.usage.link(0, 0));
  CHECK(net.usage.link(1, 1));
  CHECK(net.semantic_edge(0, 1));
  CHECK(net.actors[1].position == Position::manager);
  CHECK(net.actors[0].gender.empty());  // optional attribute defaults

  const auto patched = [&](const std::string& from, const std::string& to) {
    std::string s = base;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  CHECK_THROWS_WITH_AS(deserialize(patched("[[0, 1], [1, 0]]", "[[0, 1], [0, 0]]")),
                       doctest::Contains("asymmetric at (a,b)"), ParseError);
  CHECK_THROWS_WITH_AS(deserialize(patched("[[0, 1], [1, 0]]", "[[1, 1], [1, 0]]")),
                       doctest::Contains("self-tie"), ParseError);
  CHECK_THROWS_WITH_AS(deserialize(patched("[[0, 1], [1, 0]]", "[[0, 2], [2, 0]]")),
                       doctest::Contains("0 or 1"), ParseError);
  CHECK_THROWS_WITH_AS(deserialize(patched("[[0, 1], [1, 0]]", "[[0, 1]]")),
                       doctest::Contains("one row per actor"), ParseError);
  CHECK_THROWS_WITH_AS(deserialize(patched("socsem-network", "something-else")),
                       doctest::Contains("format"), ParseError);
  CHECK_THROWS_WITH_AS(deserialize(patched("[\"a\", \"c1\"]", "[\"zz\", \"c1\"]")),
                       doctest::Contains("unknown actor 'zz'"), ParseError);
  CHECK_THROWS_WITH_AS(deserialize(patched("[[\"c1\", \"c2\"]]", "[[\"c1\", \"zz\"]]")),
                       doctest::Contains("unknown concept 'zz'"), ParseError);
  CHECK_THROWS_WITH_AS(deserialize(patched("\"concepts\": [\"c1\", \"c2\"]",
                                           "\"concepts\": [\"c1\", \"c1\"]")),
                       doctest::Contains("duplicate concept"), ParseError);
  CHECK_THROWS_AS(deserialize("{not json"), ParseError);
  // a masked dyad that carries a tie fails network validation on load
  CHECK_THROWS_WITH_AS(deserialize(patched("\"dyads\": []", "\"dyads\": [[\"a\", \"b\"]]")),
                       doctest::Contains("structurally zero"), ParseError);
}

TEST_CASE("deserialize normalizes the mask") {
  const char* text = R"({
    "format": "socsem-network",
    "actors": [
      {"member_id": "a", "group_id": "G1", "position": "artist"},
      {"member_id": "b", "group_id": "G1", "position": "manager"},
      {"member_id": "c", "group_id": "G2", "position": "artist"}
    ],
    "concepts": ["c1"],
    "social": {"relation": "friendship", "edges": [["a", "b"]]},
    "usage": {"links": []},
    "semantic": {"edges": []},
    "mask": {"dyads": [["c", "a"], ["a", "c"], ["b", "c"]]}
  })";
  const auto net = deserialize(text);
  // reversed and duplicate entries collapse into sorted unique dyads
  CHECK(net.zero_mask == std::vector<std::pair<int, int>>{{0, 2}, {1, 2}});
}

TEST_CASE("graphml export lists every layer with escaped labels") {
  const auto f = two_group_fixture();
  const auto net = assemble(f.groups, f.social, f.actors);
  std::ostringstream out;
  write_graphml(net, out);
  const std::string xml = out.str();
  const auto has = [&](const std::string& needle) {
    return xml.find(needle) != std::string::npos;
  };
  CHECK(has("<graphml"));
  CHECK(has("<data key=\"relation\">collaboration</data>"));
  CHECK(has("<node id=\"a:A1\">"));
  CHECK(has("<node id=\"c:G1/x\">"));
  CHECK(has("<data key=\"position\">manager</data>"));
  CHECK(has("source=\"a:A1\" target=\"a:A2\""));
  CHECK(has("<data key=\"ekind\">social</data>"));
  CHECK(has("<data key=\"ekind\">usage</data>"));
  CHECK(has("source=\"c:G1/x\" target=\"c:G1/y\""));
  // genre "ink & \"wash\" <art>" must be escaped
  CHECK(has("ink &amp; &quot;wash&quot; &lt;art&gt;"));
  CHECK_FALSE(has("ink & \"wash\""));
}
