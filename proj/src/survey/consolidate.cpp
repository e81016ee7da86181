#include "pulse/survey/consolidate.hpp"

#include "pulse/error.hpp"

#include <algorithm>
#include <set>

namespace pulse::survey {

namespace {

struct Draft {
    QuestionSpec step;
    std::set<std::string> instruments;
    std::set<ItemRef> covered;
    std::set<std::string> dimensions;
};

}  // namespace

ConsolidatedFlow consolidate(const std::vector<Instrument>& instruments) {
    if (instruments.empty()) throw ValidationError("consolidate needs at least one instrument");

    std::set<std::string> ids;
    for (const auto& inst : instruments) {
        validate(inst);
        if (!ids.insert(inst.id).second) {
            throw ValidationError("instrument '" + inst.id + "' given twice");
        }
    }

    std::vector<Draft> drafts;
    std::set<std::string> step_ids;
    for (const auto& inst : instruments) {
        for (const auto& item : inst.items) {
            auto fit = std::find_if(drafts.begin(), drafts.end(), [&](const Draft& d) {
                return d.step.category == item.category && !d.instruments.count(inst.id);
            });
            if (fit == drafts.end()) {
                Draft d;
                d.step = item;
                if (step_ids.count(d.step.id)) d.step.id = inst.id + "." + item.id;
                step_ids.insert(d.step.id);
                drafts.push_back(std::move(d));
                fit = std::prev(drafts.end());
            }
            fit->instruments.insert(inst.id);
            fit->covered.insert(ItemRef{inst.id, item.id});
            fit->dimensions.insert(item.dimension);
            fit->step.required = fit->step.required || item.required;
        }
    }

    std::stable_sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
        return category_priority(a.step.category) < category_priority(b.step.category);
    });

    ConsolidatedFlow flow;
    for (const auto& inst : instruments) {
        if (!flow.id.empty()) flow.id += '+';
        flow.id += inst.id;
        flow.source_instruments.push_back(inst.id);
    }
    for (auto& d : drafts) {
        flow.coverage_map[d.step.id] = std::move(d.covered);
        flow.step_dimensions[d.step.id] = std::move(d.dimensions);
        flow.steps.push_back(std::move(d.step));
    }
    return flow;
}

}  // namespace pulse::survey
