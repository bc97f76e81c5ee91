#include "whow/aggregate.hpp"

#include <algorithm>
#include <stdexcept>

namespace whow {

namespace {

// Max-count labels (the tie set), deterministic order of first insertion.
template <typename Label>
std::pair<std::vector<Label>, bool> top_labels(const std::vector<std::pair<Label, int>>& counts) {
  int best = 0;
  for (const auto& [label, n] : counts) best = std::max(best, n);
  std::vector<Label> top;
  for (const auto& [label, n] : counts)
    if (n == best) top.push_back(label);
  return {top, top.size() > 1};
}

std::vector<std::pair<bool, int>> bool_counts(const std::vector<bool>& votes) {
  int yes = static_cast<int>(std::count(votes.begin(), votes.end(), true));
  int no = static_cast<int>(votes.size()) - yes;
  return {{true, yes}, {false, no}};
}

bool resolve_motive(const std::vector<bool>& votes, Dimension dim,
                    const TiebreakPolicy& policy, const ExternalResolution* res,
                    TieFlags& flags) {
  auto [top, tied] = top_labels(bool_counts(votes));
  if (!tied) return top.front();
  flags.insert(dim);
  if (policy.kind == TiebreakKind::external_file && res != nullptr) {
    const std::optional<bool>* ext = nullptr;
    if (dim == Dimension::IM) ext = &res->im;
    if (dim == Dimension::CM) ext = &res->cm;
    if (dim == Dimension::SM) ext = &res->sm;
    if (ext != nullptr && ext->has_value()) return **ext;
  }
  return true;  // positive over negative
}

}  // namespace

TiebreakPolicy TiebreakPolicy::priority_for(const Episode& ep) {
  TiebreakPolicy policy;
  policy.target_order = target_vocabulary(ep);
  return policy;
}

AggregatedAnnotation majority_vote(const std::vector<Annotation>& annotations,
                                   const TiebreakPolicy& policy) {
  if (annotations.empty())
    throw std::invalid_argument("majority_vote: no annotations");
  const SentenceKey& key = annotations.front().key;
  for (const auto& a : annotations)
    if (a.key != key)
      throw std::invalid_argument("majority_vote: mixed keys (" + to_string(key) +
                                  " vs " + to_string(a.key) + ")");

  AggregatedAnnotation agg;
  agg.key = key;
  const ExternalResolution* res = nullptr;
  if (auto it = policy.external.find(key); it != policy.external.end()) res = &it->second;

  // Motives, independently per flag.
  std::vector<bool> im, cm, sm;
  for (const auto& a : annotations) {
    im.push_back(a.motives.informational);
    cm.push_back(a.motives.coordinative);
    sm.push_back(a.motives.social);
  }
  agg.motives.informational = resolve_motive(im, Dimension::IM, policy, res, agg.tie_flags);
  agg.motives.coordinative = resolve_motive(cm, Dimension::CM, policy, res, agg.tie_flags);
  agg.motives.social = resolve_motive(sm, Dimension::SM, policy, res, agg.tie_flags);

  // Dialogue act.
  {
    std::vector<std::pair<DialogueAct, int>> counts;
    for (int i = 0; i < kDialogueActCount; ++i) {
      DialogueAct act = static_cast<DialogueAct>(i);
      int n = static_cast<int>(std::count_if(annotations.begin(), annotations.end(),
                                             [&](const Annotation& a) { return a.act == act; }));
      if (n > 0) counts.push_back({act, n});
    }
    auto [top, tied] = top_labels(counts);
    DialogueAct chosen = top.front();
    if (tied) {
      agg.tie_flags.insert(Dimension::DA);
      if (policy.kind == TiebreakKind::external_file && res != nullptr && res->act)
        chosen = *res->act;
      else  // enum order is the priority order: prob > conf > inst > inte > supp > util
        chosen = *std::min_element(top.begin(), top.end());
    }
    agg.act = chosen;
  }

  // Target.
  {
    std::vector<std::pair<TargetLabel, int>> counts;
    for (const auto& a : annotations) {
      auto it = std::find_if(counts.begin(), counts.end(),
                             [&](const auto& c) { return c.first == a.target; });
      if (it == counts.end())
        counts.push_back({a.target, 1});
      else
        ++it->second;
    }
    auto [top, tied] = top_labels(counts);
    TargetLabel chosen = top.front();
    if (tied) {
      agg.tie_flags.insert(Dimension::TS);
      if (policy.kind == TiebreakKind::external_file && res != nullptr && res->target) {
        chosen = *res->target;
      } else if (!policy.target_order.empty()) {
        auto rank = [&](const TargetLabel& t) {
          auto pos = std::find(policy.target_order.begin(), policy.target_order.end(), t);
          return std::distance(policy.target_order.begin(), pos);
        };
        chosen = *std::min_element(top.begin(), top.end(),
                                   [&](const auto& a, const auto& b) {
                                     return rank(a) < rank(b);
                                   });
      } else {
        chosen = *std::min_element(top.begin(), top.end());
      }
    }
    agg.target = chosen;
  }

  // Vote tallies for audit output.
  for (const auto& a : annotations) {
    agg.vote_detail.da[to_string(a.act)]++;
    agg.vote_detail.im[a.motives.informational ? "true" : "false"]++;
    agg.vote_detail.cm[a.motives.coordinative ? "true" : "false"]++;
    agg.vote_detail.sm[a.motives.social ? "true" : "false"]++;
    agg.vote_detail.ts[a.target.canonical()]++;
  }
  return agg;
}

std::vector<AggregatedAnnotation> aggregate_corpus(
    const std::vector<Annotation>& annotations, const Corpus& corpus, TiebreakKind kind,
    const std::map<SentenceKey, ExternalResolution>* external) {
  std::map<SentenceKey, std::vector<Annotation>> by_key;
  for (const auto& a : annotations) by_key[a.key].push_back(a);

  std::vector<AggregatedAnnotation> out;
  out.reserve(by_key.size());
  for (const auto& [key, group] : by_key) {
    const Episode* ep = corpus.find_episode(key.episode_id);
    if (ep == nullptr)
      throw std::invalid_argument("aggregate: unknown episode '" + key.episode_id + "'");
    TiebreakPolicy policy = TiebreakPolicy::priority_for(*ep);
    policy.kind = kind;
    if (external != nullptr) policy.external = *external;
    out.push_back(majority_vote(group, policy));
  }
  return out;
}

Annotation to_annotation(const AggregatedAnnotation& agg, const std::string& annotator) {
  Annotation a;
  a.key = agg.key;
  a.annotator = annotator;
  a.motives = agg.motives;
  a.act = agg.act;
  a.target = agg.target;
  return a;
}

std::vector<std::vector<double>> CooccurrenceMatrix::row_normalized() const {
  std::vector<std::vector<double>> out = counts;
  for (auto& row : out) {
    double sum = 0;
    for (double v : row) sum += v;
    if (sum > 0)
      for (double& v : row) v /= sum;
  }
  return out;
}

namespace {

std::string dimension_label(const Annotation& a, Dimension dim) {
  switch (dim) {
    case Dimension::DA: return to_string(a.act);
    case Dimension::IM: return a.motives.informational ? "true" : "false";
    case Dimension::CM: return a.motives.coordinative ? "true" : "false";
    case Dimension::SM: return a.motives.social ? "true" : "false";
    case Dimension::TS: return a.target.canonical();
  }
  return {};
}

}  // namespace

CooccurrenceMatrix vote_cooccurrence(const std::vector<Annotation>& annotations,
                                     Dimension dimension) {
  std::map<SentenceKey, std::vector<std::string>> by_key;
  std::set<std::string> label_set;
  for (const auto& a : annotations) {
    std::string label = dimension_label(a, dimension);
    label_set.insert(label);
    by_key[a.key].push_back(std::move(label));
  }

  CooccurrenceMatrix m;
  m.labels.assign(label_set.begin(), label_set.end());
  auto index_of = [&](const std::string& label) {
    return std::distance(m.labels.begin(),
                         std::find(m.labels.begin(), m.labels.end(), label));
  };
  m.counts.assign(m.labels.size(), std::vector<double>(m.labels.size(), 0.0));
  for (const auto& [key, labels] : by_key) {
    for (size_t i = 0; i < labels.size(); ++i) {
      for (size_t j = i + 1; j < labels.size(); ++j) {
        auto a = index_of(labels[i]);
        auto b = index_of(labels[j]);
        m.counts[a][b] += 1;
        if (a != b) m.counts[b][a] += 1;
      }
    }
  }
  return m;
}

}  // namespace whow
