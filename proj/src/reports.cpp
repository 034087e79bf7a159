#include "ssn/reports.hpp"

#include <algorithm>
#include <map>

namespace ssn {

DyadMode dyad_mode_from_string(const std::string& s) {
  if (s == "within_position") return DyadMode::within_position;
  if (s == "cross_position") return DyadMode::cross_position;
  if (s == "one_position_only") return DyadMode::one_position_only;
  throw ValidationError("unknown report mode '" + s +
                        "' (expected within_position, cross_position or one_position_only)");
}

const char* to_string(DyadMode m) {
  switch (m) {
    case DyadMode::within_position: return "within_position";
    case DyadMode::cross_position: return "cross_position";
    default: return "one_position_only";
  }
}

namespace {

struct ReportContext {
  std::map<MemberId, Position> position;
  std::map<MemberId, std::set<std::string>> uses;
  // tied dyads by class
  std::vector<std::pair<MemberId, MemberId>> artist_dyads;
  std::vector<std::pair<MemberId, MemberId>> manager_dyads;
  std::vector<std::pair<MemberId, MemberId>> cross_dyads;

  bool both_use(const std::pair<MemberId, MemberId>& d, const std::string& c) const {
    const auto a = uses.find(d.first);
    const auto b = uses.find(d.second);
    return a != uses.end() && b != uses.end() && a->second.count(c) && b->second.count(c);
  }
  bool realizes(const std::pair<MemberId, MemberId>& d, const ConceptPair& p) const {
    const auto a = uses.find(d.first);
    const auto b = uses.find(d.second);
    if (a == uses.end() || b == uses.end()) return false;
    return (a->second.count(p.first) && b->second.count(p.second)) ||
           (a->second.count(p.second) && b->second.count(p.first));
  }
};

ReportContext make_context(const SemanticNetwork& group, const SocialLayer& social,
                           const std::vector<ActorAttributes>& actors) {
  if (!group.concept_freq.empty() && group.concept_sources.empty())
    throw ValidationError(
        "report: group network carries no member provenance; build it with union_group_network");
  ReportContext ctx;
  for (const auto& a : actors) ctx.position[a.member_id] = a.position;
  for (const auto& m : social.members)
    if (!ctx.position.count(m))
      throw ValidationError("report: social layer member '" + m + "' has no attributes");
  for (const auto& [c, src] : group.concept_sources)
    for (const auto& [member, freq] : src) {
      if (!ctx.position.count(member))
        throw ValidationError("report: provenance member '" + member + "' has no attributes");
      ctx.uses[member].insert(c);
    }
  for (int i = 0; i < social.n(); ++i) {
    for (int j = i + 1; j < social.n(); ++j) {
      if (!social.edge(i, j)) continue;
      const auto& a = social.members[i];
      const auto& b = social.members[j];
      const Position pa = ctx.position.at(a);
      const Position pb = ctx.position.at(b);
      if (pa != pb)
        ctx.cross_dyads.emplace_back(a, b);
      else if (pa == Position::artist)
        ctx.artist_dyads.emplace_back(a, b);
      else
        ctx.manager_dyads.emplace_back(a, b);
    }
  }
  return ctx;
}

template <class Item, class Pred>
bool any_dyad(const std::vector<std::pair<MemberId, MemberId>>& dyads, const Item& item,
              Pred pred) {
  for (const auto& d : dyads)
    if (pred(d, item)) return true;
  return false;
}

template <class Item, class Pred>
bool all_dyads(const std::vector<std::pair<MemberId, MemberId>>& dyads, const Item& item,
               Pred pred) {
  if (dyads.empty()) return false;
  for (const auto& d : dyads)
    if (!pred(d, item)) return false;
  return true;
}

}  // namespace

std::vector<SharedConceptRow> report_shared_concepts(const SemanticNetwork& group,
                                                     const SocialLayer& social,
                                                     const std::vector<ActorAttributes>& actors,
                                                     DyadMode mode) {
  const ReportContext ctx = make_context(group, social, actors);
  const auto both = [&](const auto& d, const std::string& c) { return ctx.both_use(d, c); };

  std::vector<SharedConceptRow> rows;
  for (const auto& [c, freq] : group.concept_freq) {
    bool keep = false;
    switch (mode) {
      case DyadMode::within_position:
        keep = any_dyad(ctx.artist_dyads, c, both) || any_dyad(ctx.manager_dyads, c, both);
        break;
      case DyadMode::cross_position:
        keep = any_dyad(ctx.cross_dyads, c, both);
        break;
      case DyadMode::one_position_only: {
        const bool qa = any_dyad(ctx.artist_dyads, c, both);
        const bool qm = any_dyad(ctx.manager_dyads, c, both);
        keep = qa != qm;
        break;
      }
    }
    if (!keep) continue;
    SharedConceptRow row;
    row.concept_id = c;
    const auto src = group.concept_sources.find(c);
    if (src != group.concept_sources.end()) {
      for (const auto& [member, f] : src->second) {
        if (ctx.position.at(member) == Position::artist)
          row.artist_freq += f;
        else
          row.manager_freq += f;
      }
    }
    row.total = row.artist_freq + row.manager_freq;
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const SharedConceptRow& a, const SharedConceptRow& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.concept_id < b.concept_id;
  });
  return rows;
}

std::vector<SharedAssociationRow> report_shared_associations(
    const SemanticNetwork& group, const SocialLayer& social,
    const std::vector<ActorAttributes>& actors, DyadMode mode, bool require_all_dyads) {
  const ReportContext ctx = make_context(group, social, actors);
  const auto realizes = [&](const auto& d, const ConceptPair& p) { return ctx.realizes(d, p); };

  std::vector<SharedAssociationRow> rows;
  for (const auto& [pair, weight] : group.assoc_weight) {
    bool keep = false;
    bool in_all = false;
    switch (mode) {
      case DyadMode::within_position: {
        const bool any = any_dyad(ctx.artist_dyads, pair, realizes) ||
                         any_dyad(ctx.manager_dyads, pair, realizes);
        keep = any;
        in_all = !ctx.artist_dyads.empty() || !ctx.manager_dyads.empty();
        for (const auto& d : ctx.artist_dyads) in_all = in_all && realizes(d, pair);
        for (const auto& d : ctx.manager_dyads) in_all = in_all && realizes(d, pair);
        break;
      }
      case DyadMode::cross_position:
        keep = any_dyad(ctx.cross_dyads, pair, realizes);
        in_all = all_dyads(ctx.cross_dyads, pair, realizes);
        break;
      case DyadMode::one_position_only: {
        const bool qa = any_dyad(ctx.artist_dyads, pair, realizes);
        const bool qm = any_dyad(ctx.manager_dyads, pair, realizes);
        keep = qa != qm;
        in_all = (qa && all_dyads(ctx.artist_dyads, pair, realizes) && !qm) ||
                 (qm && all_dyads(ctx.manager_dyads, pair, realizes) && !qa);
        break;
      }
    }
    if (!keep || (require_all_dyads && !in_all)) continue;
    rows.push_back(SharedAssociationRow{pair, weight, in_all});
  }
  std::sort(rows.begin(), rows.end(),
            [](const SharedAssociationRow& a, const SharedAssociationRow& b) {
              if (a.times_used != b.times_used) return a.times_used > b.times_used;
              return a.association < b.association;
            });
  return rows;
}

}  // namespace ssn
