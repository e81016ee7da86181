#include "pulse/survey/lexicon.hpp"

#include "pulse/survey/text.hpp"

#include <algorithm>
#include <array>
#include <climits>

namespace pulse::survey {

namespace {

std::vector<std::string> split_words(const std::string& phrase) { return tokenize(phrase); }

const std::string kAM{dim::AdditionalManifestations};
const std::string kAP{dim::AbdominalPain};
const std::string kPD{dim::PainDiscomfort};
const std::string kLS{dim::LiquidStools};
const std::string kAD{dim::AnxietyDepression};
const std::string kGW{dim::GeneralWellbeing};
const std::string kMob{dim::Mobility};
const std::string kUA{dim::UsualActivities};
const std::string kSC{dim::SelfCare};

std::vector<LexiconEntry> builtin_entries() {
    return {
        // abdominal symptoms
        {{"pain", "painful", "pains"}, {}, {kAP, kPD}, ""},
        {{"ache", "aches", "aching", "achy", "hurts", "hurt", "hurting"}, {}, {kAP, kPD}, ""},
        {{"cramp", "cramps", "cramping"}, {}, {kAP, kPD}, ""},
        {{"bloating", "bloated", "bloat"}, {"loading", "floating", "bloading"}, {kAP, kPD}, ""},
        {{"gas", "gassy", "flatulence"}, {}, {kAP, kPD}, ""},
        {{"discomfort", "uncomfortable"}, {}, {kAP, kPD}, ""},
        {{"twinge", "twinges"}, {}, {kAP, kPD}, ""},
        {{"stomach", "abdomen", "abdominal", "belly", "tummy"}, {}, {kAP}, ""},
        {{"nausea", "nauseous", "vomiting"}, {}, {kAP}, ""},
        // stools
        {{"diarrhea", "diarrhoea"}, {"diarrhia", "diaria"}, {kLS}, ""},
        {{"stool", "stools", "poop"}, {}, {kLS}, ""},
        {{"bowel", "bowels", "movements", "movement"}, {}, {kLS}, ""},
        {{"loose", "watery", "liquid", "runny"}, {}, {kLS}, ""},
        {{"formed", "solid"}, {}, {kLS}, ""},
        // extra-intestinal manifestations
        {{"joint pain", "joint pains", "achy joints", "sore joints"}, {}, {kAM, kPD}, "joint"},
        {{"joint", "joints", "arthritis", "knees"}, {}, {kAM}, "joint"},
        {{"eye inflammation", "red eyes"}, {}, {kAM}, "eye"},
        {{"eye", "eyes", "vision"}, {}, {kAM}, "eye"},
        {{"skin", "rash", "rashes", "ulcer", "ulcers", "bumps", "sores"}, {}, {kAM}, "skin"},
        {{"fever", "fevers", "feverish", "chills"}, {}, {kAM}, "fever"},
        {{"stress", "stressed", "stressful"}, {}, {kAM, kAD}, "psychological"},
        {{"anxiety", "anxious", "worried", "worry", "nervous"}, {}, {kAM, kAD}, "psychological"},
        {{"depressed", "depression", "hopeless", "overwhelmed", "sad"}, {}, {kAM, kAD},
         "psychological"},
        {{"rectal", "rectum", "discharge", "fistula", "abscess", "perianal"}, {}, {kAM}, ""},
        // general state
        {{"tired", "fatigue", "fatigued", "exhausted", "weary"}, {}, {kGW, kAD}, ""},
        // mobility and activities
        {{"get around", "getting around", "move around"}, {}, {kMob}, ""},
        {{"walk", "walking", "walked", "mobility", "bedridden", "stairs", "limping", "wheelchair"},
         {},
         {kMob},
         ""},
        {{"daily activities", "usual activities"}, {}, {kUA}, ""},
        {{"moving", "activities", "work", "working", "chores", "housework", "errands"}, {}, {kUA},
         ""},
        {{"wash", "washing", "dress", "dressing", "dressed", "shower", "showering", "bathe",
          "bathing", "helps", "help", "helping", "assistance"},
         {},
         {kSC},
         ""},
        // generic answer words
        {{"fine", "okay", "ok", "alright"}, {}, {}, ""},
        {{"good", "great", "well", "better", "excellent"}, {}, {}, ""},
        {{"bad", "worse", "poor", "terrible", "awful"}, {}, {}, ""},
        {{"no", "none", "nothing", "nope"}, {}, {}, ""},
        {{"yes", "yeah", "yep"}, {}, {}, ""},
        {{"independent", "independently", "myself"}, {}, {}, ""},
    };
}

constexpr std::array<std::string_view, 44> kStopwords{
    "some",  "have",   "having", "been",   "when",   "with",   "that",   "this",   "what",
    "from",  "they",   "them",   "were",   "will",   "just",   "like",   "very",   "much",
    "more",  "feel",   "feeling", "also",  "time",   "times",  "then",   "there",  "here",
    "about", "into",   "over",   "only",   "really", "today",  "since",  "pretty", "it's",
    "i'm",   "would",  "could",  "should", "things", "thing",  "going",  "doing",
};

constexpr std::array<std::string_view, 13> kNegators{
    "no",     "not",   "never",  "without", "don't",  "dont",  "didn't",
    "haven't", "hasn't", "isn't", "wasn't",  "aren't", "nothing",
};

}  // namespace

bool LexiconEntry::is_phrase() const {
    return forms.front().find(' ') != std::string::npos;
}

bool LexiconEntry::evidences(std::string_view dimension) const {
    return std::find(dimensions.begin(), dimensions.end(), dimension) != dimensions.end();
}

int max_fuzzy_distance(size_t word_length) {
    if (word_length < kMinFuzzyLength) return 0;
    return word_length < 6 ? 1 : 2;
}

bool is_fuzzy_stopword(std::string_view word) {
    return std::find(kStopwords.begin(), kStopwords.end(), word) != kStopwords.end();
}

bool is_negator(std::string_view token) {
    return std::find(kNegators.begin(), kNegators.end(), token) != kNegators.end();
}

std::vector<std::vector<std::string>> clauses(std::string_view text) {
    std::vector<std::vector<std::string>> out;
    std::string current;
    auto flush = [&] {
        auto words = tokenize(current);
        current.clear();
        // "but" opens a new clause as well
        std::vector<std::string> clause;
        for (auto& w : words) {
            if (w == "but") {
                if (!clause.empty()) out.push_back(std::move(clause));
                clause.clear();
                continue;
            }
            clause.push_back(std::move(w));
        }
        if (!clause.empty()) out.push_back(std::move(clause));
    };
    for (char c : text) {
        if (c == '.' || c == '?' || c == '!' || c == ';' || c == ',') {
            flush();
        } else {
            current += c;
        }
    }
    flush();
    return out;
}

Lexicon::Lexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) {}

std::vector<LexiconHit> Lexicon::scan(std::string_view text) const {
    std::vector<LexiconHit> hits;
    const auto parts = clauses(text);
    for (size_t ci = 0; ci < parts.size(); ++ci) {
        const auto& words = parts[ci];
        std::vector<bool> used(words.size(), false);
        std::vector<std::pair<size_t, LexiconHit>> found;

        auto negated_at = [&](size_t pos) {
            const size_t from = pos >= 3 ? pos - 3 : 0;
            for (size_t k = from; k < pos; ++k) {
                if (is_negator(words[k])) return true;
            }
            return false;
        };

        // Phrases first, exact only.
        for (const auto& entry : entries_) {
            for (const auto& form : entry.forms) {
                const auto pw = split_words(form);
                if (pw.size() < 2 || pw.size() > words.size()) continue;
                for (size_t i = 0; i + pw.size() <= words.size(); ++i) {
                    bool match = true;
                    for (size_t k = 0; k < pw.size() && match; ++k) {
                        match = !used[i + k] && words[i + k] == pw[k];
                    }
                    if (!match) continue;
                    for (size_t k = 0; k < pw.size(); ++k) used[i + k] = true;
                    LexiconHit hit;
                    hit.entry = &entry;
                    hit.heard = form;
                    hit.matched = form;
                    hit.clause = ci;
                    hit.position = i;
                    hit.negated = negated_at(i);
                    found.emplace_back(i, std::move(hit));
                }
            }
        }

        for (size_t i = 0; i < words.size(); ++i) {
            if (used[i]) continue;
            const std::string& w = words[i];

            const LexiconEntry* best = nullptr;
            std::string best_form;
            bool best_mishearing = false;
            int best_distance = INT_MAX;

            auto exact = [&]() {
                for (const auto& entry : entries_) {
                    for (const auto& form : entry.forms) {
                        if (form == w) {
                            best = &entry;
                            best_form = form;
                            best_distance = 0;
                            return true;
                        }
                    }
                }
                for (const auto& entry : entries_) {
                    for (const auto& m : entry.mishearings) {
                        if (m == w) {
                            best = &entry;
                            best_form = m;
                            best_distance = 0;
                            best_mishearing = true;
                            return true;
                        }
                    }
                }
                return false;
            };
            const int limit = is_fuzzy_stopword(w) ? 0 : max_fuzzy_distance(w.size());
            if (!exact() && limit > 0) {
                auto consider = [&](const LexiconEntry& entry, const std::string& form,
                                    bool mishearing) {
                    if (form.find(' ') != std::string::npos) return;
                    const int d = edit_distance(w, form);
                    if (d <= limit && d < best_distance) {
                        best = &entry;
                        best_form = form;
                        best_distance = d;
                        best_mishearing = mishearing;
                    }
                };
                for (const auto& entry : entries_) {
                    for (const auto& form : entry.forms) consider(entry, form, false);
                    for (const auto& m : entry.mishearings) consider(entry, m, true);
                }
            }
            if (!best) continue;
            LexiconHit hit;
            hit.entry = best;
            hit.heard = w;
            hit.matched = best_form;
            hit.distance = best_distance;
            hit.via_mishearing = best_mishearing;
            hit.clause = ci;
            hit.position = i;
            hit.negated = negated_at(i);
            found.emplace_back(i, std::move(hit));
        }

        std::stable_sort(found.begin(), found.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [_, h] : found) hits.push_back(std::move(h));
    }
    return hits;
}

const Lexicon& default_lexicon() {
    static const Lexicon lexicon{builtin_entries()};
    return lexicon;
}

}  // namespace pulse::survey
