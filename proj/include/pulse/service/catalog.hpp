#pragma once

#include "pulse/dialogue/engine.hpp"
#include "pulse/survey/domain.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace pulse::service {

/// Instruments and response templates found under a data directory.
class Catalog {
public:
    /// Loads data_dir/instruments/*.instrument and data_dir/generator/default.generator.
    explicit Catalog(const std::filesystem::path& data_dir);

    const std::map<std::string, survey::Instrument>& instruments() const { return instruments_; }
    std::shared_ptr<const dialogue::ResponseGenerator> generator() const { return generator_; }

    /// Flow ids join instrument ids with '+', e.g. "mhbi+eq5d3l". Throws
    /// NotFound when an instrument is unknown.
    survey::ConsolidatedFlow flow(const std::string& flow_id) const;

private:
    std::map<std::string, survey::Instrument> instruments_;
    std::shared_ptr<const dialogue::ResponseGenerator> generator_;
    mutable std::mutex mu_;
    mutable std::map<std::string, survey::ConsolidatedFlow> flows_;
};

}  // namespace pulse::service
