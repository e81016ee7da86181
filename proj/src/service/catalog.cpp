#include "pulse/service/catalog.hpp"

#include "pulse/error.hpp"
#include "pulse/survey/consolidate.hpp"
#include "pulse/survey/instrument_io.hpp"

namespace pulse::service {

Catalog::Catalog(const std::filesystem::path& data_dir) {
    const auto dir = data_dir / "instruments";
    if (!std::filesystem::is_directory(dir)) throw ValidationError("no instruments directory under " + data_dir.string());
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".instrument") continue;
        auto inst = survey::load_instrument_file(entry.path());
        const auto id = inst.id;
        if (!instruments_.emplace(id, std::move(inst)).second) {
            throw ValidationError("instrument id '" + id + "' defined twice");
        }
    }
    generator_ = std::make_shared<dialogue::ScriptedGenerator>(
        dialogue::ScriptedGenerator::load(data_dir / "generator" / "default.generator"));
}

survey::ConsolidatedFlow Catalog::flow(const std::string& flow_id) const {
    std::lock_guard lock(mu_);
    if (const auto it = flows_.find(flow_id); it != flows_.end()) return it->second;
    std::vector<survey::Instrument> parts;
    size_t start = 0;
    while (start <= flow_id.size()) {
        const auto end = std::min(flow_id.find('+', start), flow_id.size());
        const auto id = flow_id.substr(start, end - start);
        const auto it = instruments_.find(id);
        if (it == instruments_.end()) throw NotFound("unknown flow '" + flow_id + "'");
        parts.push_back(it->second);
        start = end + 1;
    }
    auto flow = survey::consolidate(parts);
    flows_.emplace(flow_id, flow);
    return flow;
}

}  // namespace pulse::service
