#include "doctest.h"
#include "support.hpp"

#include "pulse/dialogue/engine.hpp"
#include "pulse/error.hpp"
#include "pulse/survey/text.hpp"

#include <algorithm>

using namespace pulse;
using namespace pulse::dialogue;
using survey::AnswerKind;
using survey::Category;
using survey::CompletionStatus;
using survey::QuestionSpec;
using survey::Speaker;

namespace {

DialogueEngine make_engine(DialogueConfig cfg = {}) {
    return DialogueEngine(test::default_generator(), cfg,
                          stepping_clock(Timestamp{std::chrono::seconds{1'760'000'000}},
                                         std::chrono::seconds{4}));
}

QuestionSpec step(AnswerKind kind, std::string dimension = "AbdominalPain") {
    QuestionSpec q;
    q.id = "s";
    q.category = Category::Symptoms;
    q.answer_kind = kind;
    q.dimension = std::move(dimension);
    q.prompt_template = "How is it?";
    return q;
}

// Independent oracle: every symptom-lexicon surface form within edit distance
// two of the token, nearest first.
std::optional<std::string> brute_force_nearest(const std::string& word) {
    std::optional<std::string> best;
    int best_d = 3;
    for (const auto& e : survey::default_lexicon().entries()) {
        if (!e.evidences(survey::dim::AbdominalPain)) continue;
        std::vector<std::string> forms = e.forms;
        forms.insert(forms.end(), e.mishearings.begin(), e.mishearings.end());
        for (const auto& f : forms) {
            const int d = survey::edit_distance(word, f);
            if (d < best_d) {
                best_d = d;
                best = e.canonical();
            }
        }
    }
    return best;
}

struct Run {
    SessionState state;
    std::vector<survey::Turn> agent_turns;
};

Run drive(const DialogueEngine& engine, const survey::ConsolidatedFlow& flow,
          const std::vector<std::string>& script) {
    auto [state, first] = engine.start_session(test::patient(), flow, "sess-1");
    Run r{std::move(state), {first}};
    for (const auto& u : script) {
        if (r.state.finished) break;
        r.agent_turns.push_back(engine.advance(r.state, u));
    }
    return r;
}

}  // namespace

TEST_CASE("confusion detection on the golden utterances") {
    const auto flow = test::golden_flow();
    const auto& rating = *flow.find_step("general_wellbeing");
    const auto& pain = *flow.find_step("abdominal_pain");
    const auto& stools = *flow.find_step("liquid_stools");

    auto r = detect_confusion("25%.", rating);
    REQUIRE(r.normalized);
    CHECK(std::get<Rating>(*r.normalized).value == 25);
    CHECK(r.confidence == doctest::Approx(0.95));

    r = detect_confusion("I'm experiencing some loading. And having some gas issues.", pain);
    REQUIRE(r.corrections.size() == 1);
    CHECK(r.corrections[0] == Correction{"loading", "bloating"});
    CHECK(r.confidence == doctest::Approx(0.85));
    CHECK(r.confidence >= DialogueConfig{}.confidence_threshold);

    r = detect_confusion("Three times. And it's all been diarrhea.", stools);
    REQUIRE(r.normalized);
    CHECK(std::get<Count>(*r.normalized).value == 3);
    CHECK(r.confidence >= 0.9);
}

TEST_CASE("garbled symptom words against a brute-force lexicon scan") {
    const auto r = detect_confusion("loding and gass", step(AnswerKind::FreeText));
    REQUIRE(r.corrections.size() == 2);
    CHECK(r.corrections[0] == Correction{"loding", *brute_force_nearest("loding")});
    CHECK(r.corrections[1] == Correction{"gass", *brute_force_nearest("gass")});
    CHECK(r.corrections[0].corrected == "bloating");
    CHECK(r.corrections[1].corrected == "gas");
    // two corrections at one edit each: 0.95 - 0.2 - 0.1
    CHECK(r.confidence == doctest::Approx(0.65));
    CHECK(r.confidence > 0.35);
    CHECK(r.confidence < 0.9);
}

TEST_CASE("blank and unparseable answers") {
    for (auto kind : {AnswerKind::FreeText, AnswerKind::Count24h, AnswerKind::YesNo,
                      AnswerKind::NumericRating0to100}) {
        CHECK(detect_confusion("", step(kind)).confidence == 0.0);
        CHECK(detect_confusion("   ", step(kind)).confidence == 0.0);
    }
    CHECK(detect_confusion("purple", step(AnswerKind::NumericRating0to100)).confidence ==
          doctest::Approx(0.35));
    CHECK_FALSE(detect_confusion("150", step(AnswerKind::NumericRating0to100)).normalized);
}

TEST_CASE("confidence stays in range (property)") {
    test::Gen g(3);
    const std::vector<std::string> vocab{"pain", "gass", "loding", "three", "no", "", "blod",
                                         "%", "100", "twenty", "joint", "stres", "xyzzy", "."};
    for (int i = 0; i < 2000; ++i) {
        std::string u;
        const int n = g.uniform(0, 8);
        for (int k = 0; k < n; ++k) u += g.pick(vocab) + " ";
        const auto r = detect_confusion(u, step(static_cast<AnswerKind>(g.uniform(0, 3))));
        CHECK(r.confidence >= 0.0);
        CHECK(r.confidence <= 1.0);
        if (r.normalized) {
            if (auto* rt = std::get_if<Rating>(&*r.normalized)) {
                CHECK(rt->value >= 0);
                CHECK(rt->value <= 100);
            }
        }
    }
}

TEST_CASE("golden conversation follows the expected step order") {
    const auto engine = make_engine();
    const auto run = drive(engine, test::golden_flow(), test::golden_script());
    const auto& s = run.state;

    CHECK(run.agent_turns.front().text.find("0 to 100") != std::string::npos);
    CHECK(run.agent_turns.front().text.find("overall health") != std::string::npos);
    CHECK(run.agent_turns.front().step_id == "general_wellbeing");

    std::vector<std::string> asked_order;
    for (const auto& t : run.agent_turns) {
        if (t.step_id) asked_order.push_back(*t.step_id);
    }
    CHECK(asked_order == std::vector<std::string>{"general_wellbeing", "abdominal_pain",
                                                  "liquid_stools", "extraintestinal", "perianal",
                                                  "mobility", "self_care", "anxiety_depression"});
    CHECK(s.answered.at("usual_activities").volunteered);
    CHECK(s.answered.size() == 9);
    CHECK(s.skipped.empty());
    CHECK(s.finished);
    CHECK(s.callback_requested);
    CHECK(s.status == SessionStatus::WrapUp);
    CHECK(run.agent_turns.back().text.find("call you back") != std::string::npos);

    auto engine_copy = make_engine();
    auto state = s;
    const auto transcript = engine_copy.close_session(state, CompletionStatus::Completed);
    // 8 asked steps + wrap-up + closing agent turns, 9 patient turns
    CHECK(transcript.turns.size() == 19);
    CHECK(transcript.completion_status == CompletionStatus::Completed);
    CHECK_THROWS_AS(engine_copy.close_session(state, CompletionStatus::Completed), StateError);
    CHECK_THROWS_AS(engine_copy.advance(state, "hello"), StateError);
}

TEST_CASE("runs are deterministic") {
    const auto a = drive(make_engine(), test::golden_flow(), test::golden_script());
    const auto b = drive(make_engine(), test::golden_flow(), test::golden_script());
    CHECK(a.state.turn_log == b.state.turn_log);
}

TEST_CASE("clarification then skip") {
    const auto engine = make_engine();
    const auto flow = test::golden_flow();
    auto [s, first] = engine.start_session(test::patient(), flow, "s2");
    auto t = engine.advance(s, "");
    CHECK(t.step_id == "general_wellbeing");
    CHECK(s.pending_clarification == "general_wellbeing");
    CHECK(t.text.find("0 to 100") != std::string::npos);
    t = engine.advance(s, "banana");
    CHECK(t.step_id == "general_wellbeing");
    t = engine.advance(s, "banana");
    CHECK(t.step_id == "abdominal_pain");
    CHECK(s.skipped.count("general_wellbeing"));
    CHECK_FALSE(s.pending_clarification);
}

TEST_CASE("single-step flow reaches wrap-up after one answer") {
    survey::ConsolidatedFlow flow = survey::consolidate({test::instrument("mhbi")});
    flow.steps.resize(1);
    const auto engine = make_engine();
    auto [s, first] = engine.start_session(test::patient(), flow, "s3");
    CHECK(first.step_id == flow.steps[0].id);
    const auto t = engine.advance(s, "80");
    CHECK(s.status == SessionStatus::WrapUp);
    CHECK_FALSE(t.step_id);
    engine.advance(s, "no, that's all");
    CHECK(s.finished);
    CHECK_FALSE(s.callback_requested);
}

TEST_CASE("empty flow is rejected") {
    CHECK_THROWS_AS(make_engine().start_session(test::patient(), {}, "s"), ValidationError);
}

TEST_CASE("silence abandons the call") {
    const auto engine = make_engine();
    auto [s, first] = engine.start_session(test::patient(), test::golden_flow(), "s4");
    engine.advance(s, "");
    engine.advance(s, "");
    CHECK_FALSE(s.finished);
    engine.advance(s, "");
    CHECK(s.finished);
    CHECK(s.abandon_requested);
    const auto tr = engine.close_session(s, CompletionStatus::Abandoned);
    CHECK(tr.completion_status == CompletionStatus::Abandoned);
}

TEST_CASE("emergency ends the call") {
    const auto engine = make_engine();
    auto [s, first] = engine.start_session(test::patient(), test::golden_flow(), "s5");
    engine.advance(s, "40");
    const auto t = engine.advance(s, "severe chest pain right now");
    CHECK(s.finished);
    CHECK(s.escalation_requested);
    CHECK(t.text.find("emergency") != std::string::npos);
}

TEST_CASE("abandoned mid-survey keeps partial answers") {
    const auto engine = make_engine();
    const auto flow = test::golden_flow();
    auto [s, first] = engine.start_session(test::patient(), flow, "s6");
    engine.advance(s, "25%.");
    engine.advance(s, "some cramping");
    const auto tr = engine.close_session(s, CompletionStatus::Abandoned);
    CHECK(tr.turns.size() == 5);
    CHECK(tr.turns[1].parse_confidence == doctest::Approx(0.95));
    CHECK(s.answered.size() == 2);
}

TEST_CASE("scripted generator rejects malformed scripts") {
    CHECK_THROWS_AS(ScriptedGenerator::parse("Ask | hi\n"), ValidationError);
    CHECK_THROWS_AS(ScriptedGenerator::parse("Ask hi\n"), ParseError);
    CHECK_THROWS_AS(ScriptedGenerator::parse("Shout | hi\n"), ParseError);
}

TEST_CASE("session invariants under random scripts (property)") {
    const auto flow = test::golden_flow();
    const DialogueConfig cfg;
    const auto engine = make_engine(cfg);
    const std::vector<std::string> pool{"",      "25",    "no",   "three", "gas and pain", "banana",
                                        "tired", "helps", "walking", "stress", "joint pain",
                                        "call me back", "maybe", "loding"};
    test::Gen g(99);
    const size_t bound = flow.steps.size() * (1 + cfg.max_clarifications) + 2;
    for (int round = 0; round < 500; ++round) {
        auto [s, first] = engine.start_session(test::patient(), flow, "p" + std::to_string(round));
        size_t agent_turns = 1;
        int consecutive_clarify = 0;
        std::optional<std::string> last_step = first.step_id;
        while (!s.finished && agent_turns < 200) {
            const auto t = engine.advance(s, g.pick(pool));
            ++agent_turns;
            // answered is a subset of asked
            for (const auto& [id, _] : s.answered) CHECK(s.asked.count(id));
            if (s.pending_clarification) CHECK(s.asked.count(*s.pending_clarification));
            if (t.step_id && t.step_id == last_step) {
                ++consecutive_clarify;
                CHECK(consecutive_clarify <= cfg.max_clarifications);
            } else {
                consecutive_clarify = 0;
            }
            last_step = t.step_id;
        }
        CHECK(agent_turns <= bound);
        if (s.status == SessionStatus::WrapUp) {
            for (const auto& q : flow.steps) {
                if (q.required) CHECK((s.answered.count(q.id) || s.skipped.count(q.id)));
            }
            if (s.skipped.empty()) {
                for (const auto& q : flow.steps) {
                    if (q.required) CHECK(s.answered.count(q.id));
                }
            }
        }
        const auto tr = engine.close_session(
            s, s.status == SessionStatus::WrapUp ? CompletionStatus::Completed : CompletionStatus::Abandoned);
        CHECK_NOTHROW(survey::validate(tr));
    }
}
