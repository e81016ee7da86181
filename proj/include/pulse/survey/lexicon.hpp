#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pulse::survey {

/// Score dimension names shared by instruments, lexicon and extraction.
namespace dim {
inline constexpr std::string_view LiquidStools = "LiquidStools";
inline constexpr std::string_view AbdominalPain = "AbdominalPain";
inline constexpr std::string_view GeneralWellbeing = "GeneralWellbeing";
inline constexpr std::string_view AdditionalManifestations = "AdditionalManifestations";
inline constexpr std::string_view Mobility = "Mobility";
inline constexpr std::string_view SelfCare = "SelfCare";
inline constexpr std::string_view UsualActivities = "UsualActivities";
inline constexpr std::string_view PainDiscomfort = "PainDiscomfort";
inline constexpr std::string_view AnxietyDepression = "AnxietyDepression";
inline constexpr std::string_view HealthScale = "HealthScale";
}  // namespace dim

struct LexiconEntry {
    /// Accepted surface forms; the first one is canonical. Forms may be
    /// multi-word phrases, which only ever match exactly.
    std::vector<std::string> forms;
    /// Known speech-to-text confusions that stand for the canonical form.
    std::vector<std::string> mishearings;
    /// Dimensions the term is evidence for. Empty for generic answer words
    /// ("fine", "nothing") that make an answer parseable without scoring it.
    std::vector<std::string> dimensions;
    /// Extra-intestinal manifestation family (joint, eye, skin, psychological, fever).
    std::string manifestation;

    const std::string& canonical() const { return forms.front(); }
    bool is_phrase() const;
    bool evidences(std::string_view dimension) const;
};

struct LexiconHit {
    const LexiconEntry* entry = nullptr;
    std::string heard;    ///< token(s) as transcribed
    std::string matched;  ///< lexicon surface form it was matched against
    int distance = 0;     ///< edit distance heard -> matched
    bool via_mishearing = false;
    bool negated = false;  ///< "no", "not", "never"... shortly before, same clause
    size_t clause = 0;
    size_t position = 0;  ///< index of the first token within its clause

    bool is_correction() const { return distance > 0 || via_mishearing; }
};

/// Single words shorter than this only match exactly.
inline constexpr size_t kMinFuzzyLength = 4;

/// Largest edit distance tolerated for a transcribed word of the given length:
/// 0 below four letters, 1 for four or five, 2 from six up.
int max_fuzzy_distance(size_t word_length);

/// Common words never treated as misspelt lexicon terms.
bool is_fuzzy_stopword(std::string_view word);

class Lexicon {
public:
    explicit Lexicon(std::vector<LexiconEntry> entries);

    const std::vector<LexiconEntry>& entries() const { return entries_; }

    /// Finds every lexicon term in the text. Phrases are matched first and
    /// consume their tokens; remaining words match exactly, then by nearest
    /// edit distance within max_fuzzy_distance (ties go to the earlier entry).
    std::vector<LexiconHit> scan(std::string_view text) const;

private:
    std::vector<LexiconEntry> entries_;
};

/// The built-in IBD symptom lexicon.
const Lexicon& default_lexicon();

/// Splits text into clauses at sentence punctuation, commas and "but".
std::vector<std::vector<std::string>> clauses(std::string_view text);

bool is_negator(std::string_view token);

}  // namespace pulse::survey
