#include "whow/analysis.hpp"

#include <algorithm>
#include <stdexcept>

namespace whow {

const char* to_string(SpeakerState s) {
  switch (s) {
    case SpeakerState::moderation: return "moderation";
    case SpeakerState::continuation: return "continuation";
    case SpeakerState::rotation: return "rotation";
  }
  return "moderation";
}

SpeakerStateSequence state_sequence(const Episode& ep) {
  SpeakerStateSequence seq;
  seq.episode_id = ep.id;
  seq.states.reserve(ep.turns.size());
  const std::string* last_participant = nullptr;  // p_{t'}
  for (const auto& t : ep.turns) {
    if (ep.is_moderator(t.speaker_id)) {
      seq.states.push_back(SpeakerState::moderation);
      continue;
    }
    if (last_participant != nullptr && *last_participant == t.speaker_id)
      seq.states.push_back(SpeakerState::continuation);
    else
      seq.states.push_back(SpeakerState::rotation);
    last_participant = &t.speaker_id;
  }
  return seq;
}

bool TransitionMatrix::possible(SpeakerState from, SpeakerState to) {
  if (from == SpeakerState::moderation) return to != SpeakerState::moderation;
  // After a participant turn the next participant differs (turns are merged),
  // so a continuation can never directly follow another participant turn.
  return to != SpeakerState::continuation;
}

TransitionMatrix transition_matrix(const std::vector<SpeakerStateSequence>& seqs) {
  TransitionMatrix m;
  for (const auto& seq : seqs) {
    for (size_t i = 0; i + 1 < seq.states.size(); ++i) {
      SpeakerState from = seq.states[i], to = seq.states[i + 1];
      if (!TransitionMatrix::possible(from, to))
        throw std::invalid_argument(
            std::string("impossible transition ") + to_string(from) + " -> " +
            to_string(to) + " in episode '" + seq.episode_id +
            "' (episode not merged?)");
      m.counts[static_cast<int>(from)][static_cast<int>(to)] += 1.0;
    }
  }
  for (int from = 0; from < kSpeakerStateCount; ++from) {
    double row = 0;
    for (int to = 0; to < kSpeakerStateCount; ++to) row += m.counts[from][to];
    for (int to = 0; to < kSpeakerStateCount; ++to) {
      if (!TransitionMatrix::possible(static_cast<SpeakerState>(from),
                                      static_cast<SpeakerState>(to)))
        continue;  // stays nullopt
      if (row > 0) m.probs[from][to] = m.counts[from][to] / row;
    }
  }
  return m;
}

std::map<SentenceKey, Annotation> index_by_key(const std::vector<Annotation>& anns) {
  std::map<SentenceKey, Annotation> index;
  for (const auto& a : anns) {
    auto [it, inserted] = index.emplace(a.key, a);
    if (!inserted)
      throw std::invalid_argument("duplicate annotation for " + to_string(a.key) +
                                  " (aggregate first?)");
  }
  return index;
}

std::vector<ModeratorTurnView> moderator_turn_views(
    const Episode& ep, const std::map<SentenceKey, Annotation>& annotations) {
  const SpeakerStateSequence seq = state_sequence(ep);
  std::vector<ModeratorTurnView> views;
  for (const auto& t : ep.turns) {
    if (!ep.is_moderator(t.speaker_id)) continue;
    ModeratorTurnView v;
    v.episode_id = ep.id;
    v.turn_index = t.index;
    for (const auto& s : t.sentences) {
      SentenceKey key{ep.id, t.index, s.index};
      auto it = annotations.find(key);
      if (it == annotations.end()) {
        v.unannotated.push_back(key);
        continue;
      }
      v.acts.insert(it->second.act);
      v.acts_per_sentence.push_back(it->second.act);
      v.targets.insert(it->second.target);
    }
    if (t.index > 0) v.prev_speaker = ep.turns[t.index - 1].speaker_id;
    if (t.index + 1 < static_cast<int>(ep.turns.size())) {
      v.next_speaker = ep.turns[t.index + 1].speaker_id;
      v.next_state = seq.states[t.index + 1];
    }
    views.push_back(std::move(v));
  }
  return views;
}

ActTransitionReport act_conditioned_transitions(const Corpus& corpus,
                                                const std::vector<Annotation>& annotations,
                                                bool per_sentence_counts) {
  const auto index = index_by_key(annotations);
  ActTransitionReport report;
  for (int i = 0; i < kDialogueActCount; ++i)
    report.rows[static_cast<DialogueAct>(i)] = {};

  for (const auto& ep : corpus.episodes) {
    for (const auto& view : moderator_turn_views(ep, index)) {
      report.unannotated.insert(report.unannotated.end(), view.unannotated.begin(),
                                view.unannotated.end());
      std::vector<DialogueAct> contributions;
      if (per_sentence_counts)
        contributions = view.acts_per_sentence;
      else
        contributions.assign(view.acts.begin(), view.acts.end());
      for (DialogueAct act : contributions) {
        auto& row = report.rows[act];
        if (!view.next_state.has_value())
          row.episode_end += 1.0;
        else if (*view.next_state == SpeakerState::continuation)
          row.to_continuation += 1.0;
        else
          row.to_rotation += 1.0;
      }
    }
  }
  for (auto& [act, row] : report.rows) {
    const double total = row.to_continuation + row.to_rotation;
    if (total > 0) {
      row.p_continuation = row.to_continuation / total;
      row.p_rotation = row.to_rotation / total;
    }
  }
  return report;
}

namespace {

std::optional<double> sample_mean(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  return mean(xs);
}

}  // namespace

ConditionalTable conditional_table(const Corpus& corpus,
                                   const std::vector<Annotation>& annotations,
                                   bool zero_fill) {
  const auto index = index_by_key(annotations);
  ConditionalTable table;
  double sentence_sum = 0;

  for (const auto& ep : corpus.episodes) {
    std::vector<const Annotation*> labeled;
    for (const auto& [key, a] : index)
      if (key.episode_id == ep.id) labeled.push_back(&a);
    if (labeled.empty()) continue;
    ++table.episode_count;
    const double n = static_cast<double>(labeled.size());
    sentence_sum += n;

    auto has_motive = [](const Annotation& a, int m) {
      return m == 0 ? a.motives.informational
                    : m == 1 ? a.motives.coordinative : a.motives.social;
    };

    for (int d = 0; d < kDialogueActCount; ++d) {
      const DialogueAct act = static_cast<DialogueAct>(d);
      const double n_act = static_cast<double>(
          std::count_if(labeled.begin(), labeled.end(),
                        [&](const Annotation* a) { return a->act == act; }));
      table.act_samples[d].push_back(n_act / n);
    }
    for (int m = 0; m < ConditionalTable::kMotives; ++m) {
      const double n_m = static_cast<double>(
          std::count_if(labeled.begin(), labeled.end(),
                        [&](const Annotation* a) { return has_motive(*a, m); }));
      table.motive_samples[m].push_back(n_m / n);
      if (n_m == 0) {
        if (zero_fill)
          for (int d = 0; d < kDialogueActCount; ++d)
            table.cell_samples[m][d].push_back(0.0);
        continue;
      }
      for (int d = 0; d < kDialogueActCount; ++d) {
        const DialogueAct act = static_cast<DialogueAct>(d);
        const double n_md = static_cast<double>(std::count_if(
            labeled.begin(), labeled.end(),
            [&](const Annotation* a) { return has_motive(*a, m) && a->act == act; }));
        table.cell_samples[m][d].push_back(n_md / n_m);
      }
    }
  }

  if (table.episode_count > 0)
    table.mean_sentences_per_episode = sentence_sum / table.episode_count;
  for (int m = 0; m < ConditionalTable::kMotives; ++m) {
    table.p_motive[m] = sample_mean(table.motive_samples[m]);
    for (int d = 0; d < kDialogueActCount; ++d)
      table.cells[m][d] = sample_mean(table.cell_samples[m][d]);
  }
  for (int d = 0; d < kDialogueActCount; ++d)
    table.p_act[d] = sample_mean(table.act_samples[d]);
  return table;
}

namespace {

// Does the target set cover this (non-moderator) speaker?
bool targets_cover(const std::set<TargetLabel>& targets, const Episode& ep,
                   const std::string& speaker_id) {
  const Speaker* s = ep.find_speaker(speaker_id);
  for (const auto& t : targets) {
    switch (t.kind) {
      case TargetKind::speaker:
        if (t.speaker_id == speaker_id) return true;
        break;
      case TargetKind::everyone:
      case TargetKind::all_speakers:
        return true;
      case TargetKind::audience:
        if (s != nullptr && s->role == Role::audience_member) return true;
        break;
      case TargetKind::support_team:
        if (s != nullptr && s->role == Role::for_team) return true;
        break;
      case TargetKind::against_team:
        if (s != nullptr && s->role == Role::against_team) return true;
        break;
      case TargetKind::self:
      case TargetKind::unknown:
        break;  // self is the moderator; unknown covers nobody
    }
  }
  return false;
}

bool all_individual(const std::set<TargetLabel>& targets) {
  return std::all_of(targets.begin(), targets.end(), [](const TargetLabel& t) {
    return t.kind == TargetKind::speaker;
  });
}

}  // namespace

WhoMetrics who_metrics(const Corpus& corpus, const std::vector<Annotation>& annotations) {
  const auto index = index_by_key(annotations);
  WhoMetrics metrics;
  long pro = 0, inter = 0, spec = 0;

  for (const auto& ep : corpus.episodes) {
    long ep_m = 0, ep_pro = 0, ep_inter = 0, ep_spec = 0;
    for (const auto& view : moderator_turn_views(ep, index)) {
      if (view.targets.empty()) {
        ++metrics.skipped_turns;
        continue;
      }
      ++ep_m;
      // Episode-initial turns have no p_{t-1}: nobody was just addressed.
      if (!view.prev_speaker.has_value() ||
          !targets_cover(view.targets, ep, *view.prev_speaker))
        ++ep_pro;
      // Episode-final turns have no p_{t+1}: nobody took the floor.
      if (view.next_speaker.has_value() &&
          targets_cover(view.targets, ep, *view.next_speaker))
        ++ep_inter;
      if (all_individual(view.targets)) ++ep_spec;
    }
    metrics.moderator_turn_count += static_cast<int>(ep_m);
    pro += ep_pro;
    inter += ep_inter;
    spec += ep_spec;
    if (ep_m > 0) {
      const double m = static_cast<double>(ep_m);
      metrics.pro_activity_samples.push_back(ep_pro / m);
      metrics.interactivity_samples.push_back(ep_inter / m);
      metrics.specificity_samples.push_back(ep_spec / m);
    }
  }
  if (metrics.moderator_turn_count > 0) {
    const double m = static_cast<double>(metrics.moderator_turn_count);
    metrics.pro_activity = pro / m;
    metrics.interactivity = inter / m;
    metrics.specificity = spec / m;
  }
  return metrics;
}

TableComparison compare_tables(const ConditionalTable& a, const ConditionalTable& b,
                               double alpha) {
  TableComparison cmp;
  for (int m = 0; m < ConditionalTable::kMotives; ++m) {
    cmp.p_motive[m] = cross_corpus_test(a.motive_samples[m], b.motive_samples[m], alpha);
    for (int d = 0; d < kDialogueActCount; ++d)
      cmp.cells[m][d] =
          cross_corpus_test(a.cell_samples[m][d], b.cell_samples[m][d], alpha);
  }
  for (int d = 0; d < kDialogueActCount; ++d)
    cmp.p_act[d] = cross_corpus_test(a.act_samples[d], b.act_samples[d], alpha);
  return cmp;
}

SourceComparison compare_sources(const Corpus& corpus,
                                 const std::vector<Annotation>& annotations_a,
                                 const std::vector<Annotation>& annotations_b,
                                 bool zero_fill) {
  SourceComparison cmp;
  std::set<SentenceKey> keys_a, keys_b;
  for (const auto& a : annotations_a) keys_a.insert(a.key);
  for (const auto& b : annotations_b) keys_b.insert(b.key);
  std::set_difference(keys_a.begin(), keys_a.end(), keys_b.begin(), keys_b.end(),
                      std::back_inserter(cmp.only_in_a));
  std::set_difference(keys_b.begin(), keys_b.end(), keys_a.begin(), keys_a.end(),
                      std::back_inserter(cmp.only_in_b));
  cmp.table_a = conditional_table(corpus, annotations_a, zero_fill);
  cmp.table_b = conditional_table(corpus, annotations_b, zero_fill);
  cmp.tests = compare_tables(cmp.table_a, cmp.table_b);
  return cmp;
}

}  // namespace whow
