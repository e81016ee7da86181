#include "pulse/extraction/extractor.hpp"

#include "pulse/dialogue/engine.hpp"
#include "pulse/extraction/escalation.hpp"
#include "pulse/survey/text.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pulse::extraction {

using survey::AnswerKind;
using survey::LexiconHit;

struct RuleExtractor::Evidence {
    const survey::Turn* turn = nullptr;
    const survey::QuestionSpec* step = nullptr;
    std::set<std::string> dims;
    std::vector<LexiconHit> hits;
    std::vector<std::string> words;
    /// Rubric negation is clause-wide: "no problems with my usual activities"
    /// negates everything after "no" up to the next clause break.
    std::vector<bool> negated;
    std::vector<std::vector<bool>> clause_negated;

    bool addresses(std::string_view dim) const { return dims.count(std::string(dim)) > 0; }

    bool has_word(const std::vector<std::string>& list) const {
        for (size_t i = 0; i < words.size(); ++i) {
            if (!negated[i] && std::find(list.begin(), list.end(), words[i]) != list.end()) return true;
        }
        return false;
    }

    bool has_negator() const {
        return std::any_of(words.begin(), words.end(), [](const std::string& w) {
            return survey::is_negator(w) || w == "none";
        });
    }

    bool hit_negated(const LexiconHit& h) const { return clause_negated[h.clause][h.position]; }

    bool hit_for(std::string_view dim, bool want_negated) const {
        return std::any_of(hits.begin(), hits.end(), [&](const LexiconHit& h) {
            return hit_negated(h) == want_negated && h.entry->evidences(dim);
        });
    }

    std::optional<int> rating() const {
        if (!step || step->answer_kind != AnswerKind::NumericRating0to100) return std::nullopt;
        const auto n = survey::parse_first_number(turn->text);
        if (!n || *n < 0 || *n > 100) return std::nullopt;
        return n;
    }

    std::optional<bool> polar() const { return survey::parse_polar(turn->text); }

    std::string note() const {
        std::string out = "\"" + turn->text + "\"";
        for (const auto& h : hits) {
            if (h.is_correction()) {
                out += " (heard \"" + h.heard + "\", read as \"" + h.entry->canonical() + "\")";
            }
        }
        return out;
    }
};

RuleExtractor::RuleExtractor(survey::ConsolidatedFlow flow, RubricConfig rubric,
                             const survey::Lexicon& lexicon)
    : flow_(std::move(flow)), rubric_(std::move(rubric)), lexicon_(lexicon) {}

std::vector<RuleExtractor::Evidence> RuleExtractor::collect(
    const survey::ConversationTranscript& transcript) const {
    std::vector<Evidence> out;
    static const std::set<std::string> kNoDims;
    for (const auto& turn : transcript.turns) {
        if (turn.speaker != survey::Speaker::Patient || survey::is_blank(turn.text)) continue;
        Evidence ev;
        ev.turn = &turn;
        ev.step = turn.step_id ? flow_.find_step(*turn.step_id) : nullptr;
        const auto& own = ev.step ? flow_.dimensions_of(ev.step->id) : kNoDims;
        ev.hits = lexicon_.scan(turn.text);
        ev.dims = own;
        const auto spill = dialogue::volunteered_dimensions(ev.hits, own);
        ev.dims.insert(spill.begin(), spill.end());
        for (const auto& clause : survey::clauses(turn.text)) {
            auto& flags = ev.clause_negated.emplace_back();
            bool neg = false;
            for (const auto& w : clause) {
                ev.words.push_back(w);
                ev.negated.push_back(neg);
                flags.push_back(neg);
                neg = neg || survey::is_negator(w);
            }
        }
        // Any named manifestation counts towards the extra-intestinal tally.
        for (const auto& h : ev.hits) {
            if (!ev.hit_negated(h) && !h.entry->manifestation.empty()) {
                ev.dims.insert(std::string(survey::dim::AdditionalManifestations));
            }
        }
        out.push_back(std::move(ev));
    }
    return out;
}

AssessmentResult RuleExtractor::extract_mhbi(const survey::ConversationTranscript& transcript) const {
    AssessmentResult r;
    r.session_id = transcript.session_id;
    r.patient_id = transcript.patient_id;
    r.assessed_at = transcript.ended_at;
    const auto evidence = collect(transcript);

    // Latest evidence turn for `dim` that yields a score.
    auto decide = [&](std::string_view dim, auto&& score) -> std::optional<std::pair<int, const Evidence*>> {
        for (auto it = evidence.rbegin(); it != evidence.rend(); ++it) {
            if (!it->addresses(dim)) continue;
            if (auto v = score(*it)) return std::make_pair(*v, &*it);
        }
        return std::nullopt;
    };
    auto put = [&](std::string_view dim, const std::optional<std::pair<int, const Evidence*>>& d) {
        if (!d) return;
        r.mhbi[std::string(dim)] = d->first;
        r.notes[std::string(dim)] = d->second->note();
    };

    // Health scale: the latest 0..100 rating given for wellbeing or health scale.
    for (auto it = evidence.rbegin(); it != evidence.rend(); ++it) {
        if (!it->addresses(survey::dim::GeneralWellbeing) && !it->addresses(survey::dim::HealthScale)) continue;
        if (auto v = it->rating()) {
            r.health_scale = *v;
            r.notes[std::string(kHealthScale)] = "rated " + std::to_string(*v) + "/100: " + it->note();
            break;
        }
    }

    put(survey::dim::LiquidStools, decide(survey::dim::LiquidStools, [&](const Evidence& e) -> std::optional<int> {
            if (e.has_word(rubric_.stool_formed) && !e.has_word(rubric_.stool_liquid)) return 0;
            const auto n = survey::parse_first_number(e.turn->text, true);
            if (n && *n >= 0) return n;
            return std::nullopt;
        }));

    put(survey::dim::AbdominalPain, decide(survey::dim::AbdominalPain, [&](const Evidence& e) -> std::optional<int> {
            const bool symptom = e.hit_for(survey::dim::AbdominalPain, false);
            if (e.has_word(rubric_.pain_severe)) return 3;
            if (symptom) return e.has_word(rubric_.pain_mild) ? 1 : 2;
            if (e.has_word(rubric_.pain_moderate)) return 2;
            if (e.hit_for(survey::dim::AbdominalPain, true) || e.has_negator()) return 0;
            return std::nullopt;
        }));

    put(survey::dim::GeneralWellbeing, decide(survey::dim::GeneralWellbeing, [&](const Evidence& e) -> std::optional<int> {
            if (auto v = e.rating()) {
                const long band = std::lround(static_cast<double>(*v) / rubric_.rating_band);
                return static_cast<int>(std::clamp(4L - band, 0L, 4L));
            }
            if (e.has_word(rubric_.wellbeing_4)) return 4;
            if (e.has_word(rubric_.wellbeing_3)) return 3;
            if (e.has_word(rubric_.wellbeing_2)) return 2;
            if (e.has_word(rubric_.wellbeing_0)) return 0;
            if (e.has_word(rubric_.wellbeing_1)) return 1;
            return std::nullopt;
        }));

    // Additional manifestations: distinct families over every turn that
    // addressed the dimension.
    std::set<std::string> families;
    std::vector<std::string> sources;
    for (const auto& e : evidence) {
        if (!e.addresses(survey::dim::AdditionalManifestations)) continue;
        for (const auto& h : e.hits) {
            if (!e.hit_negated(h) && !h.entry->manifestation.empty()) families.insert(h.entry->manifestation);
        }
        sources.push_back(e.note());
    }
    if (!sources.empty()) {
        r.mhbi[std::string(survey::dim::AdditionalManifestations)] = static_cast<int>(families.size());
        std::string note;
        for (const auto& f : families) note += (note.empty() ? "" : ", ") + f;
        note = (note.empty() ? std::string("none reported") : note) + ". ";
        for (size_t i = 0; i < sources.size(); ++i) note += (i ? " / " : "") + sources[i];
        r.notes[std::string(survey::dim::AdditionalManifestations)] = note;
    }
    return r;
}

AssessmentResult RuleExtractor::extract_eq5d(const survey::ConversationTranscript& transcript) const {
    AssessmentResult r;
    r.session_id = transcript.session_id;
    r.patient_id = transcript.patient_id;
    r.assessed_at = transcript.ended_at;
    const auto evidence = collect(transcript);

    for (auto dim : kEq5dDimensions) {
        for (auto it = evidence.rbegin(); it != evidence.rend(); ++it) {
            const Evidence& e = *it;
            if (!e.addresses(dim)) continue;
            const bool direct = e.step && flow_.dimensions_of(e.step->id).count(std::string(dim));
            std::optional<int> level;
            if (e.has_word(rubric_.eq5d_extreme)) {
                level = 3;
            } else if (e.has_word(rubric_.eq5d_some)) {
                level = 2;
            } else if (e.has_word(rubric_.eq5d_none)) {
                level = 1;
            } else if (e.hit_for(dim, false) || (direct && e.polar() == true)) {
                level = 2;
            } else if (e.has_negator() || e.hit_for(dim, true)) {
                level = 1;
            }
            if (!level) continue;
            r.eq5d[std::string(dim)] = *level;
            r.notes[std::string(dim)] = e.note();
            break;
        }
    }
    return r;
}

AssessmentResult RuleExtractor::extract(const survey::ConversationTranscript& transcript) const {
    AssessmentResult r = extract_mhbi(transcript);
    AssessmentResult eq = extract_eq5d(transcript);
    r.eq5d = std::move(eq.eq5d);
    r.notes.insert(eq.notes.begin(), eq.notes.end());
    r.recommended_action = recommended_action(detect_escalation(transcript));
    return r;
}

}  // namespace pulse::extraction
