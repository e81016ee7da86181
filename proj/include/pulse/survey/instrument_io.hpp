#pragma once

#include "pulse/survey/domain.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace pulse::survey {

// Instrument definition files are line-oriented `key = value` text:
//
//   format = pulse-instrument/1
//   id = mhbi
//   name = Modified Health and Behavioral Index
//   scale_docs = ...
//
//   [item]
//   id = liquid_stools
//   category = Symptoms
//   answer_kind = Count24h
//   required = true
//   dimension = LiquidStools
//   prompt = Have you had any bowel movements in the past 24 hours?
//
// Blank lines and lines starting with '#' are ignored. Values are single-line;
// "\n" and "\\" escapes are honoured.

inline constexpr std::string_view kInstrumentFormat = "pulse-instrument/1";

/// Throws ParseError (with line and field) or ValidationError.
Instrument load_instrument(std::string_view document);
Instrument load_instrument_file(const std::filesystem::path& path);

std::string serialize(const Instrument& instrument);

}  // namespace pulse::survey
