#include "pulse/survey/instrument_io.hpp"

#include "pulse/error.hpp"

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace pulse::survey {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string unescape(std::string_view s, int line, const std::string& key) {
    std::string out;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out += s[i];
            continue;
        }
        if (i + 1 == s.size()) throw ParseError("dangling escape", line, key);
        const char next = s[++i];
        if (next == 'n') {
            out += '\n';
        } else if (next == '\\') {
            out += '\\';
        } else {
            throw ParseError(std::string("unknown escape \\") + next, line, key);
        }
    }
    return out;
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '\\') {
            out += "\\\\";
        } else if (c == '\n') {
            out += "\\n";
        } else {
            out += c;
        }
    }
    return out;
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
    if (v == "true" || v == "yes") return true;
    if (v == "false" || v == "no") return false;
    throw ParseError("expected true/false, got '" + v + "'", line, key);
}

struct PendingItem {
    QuestionSpec spec;
    int line = 0;
    int id_line = 0;
    std::set<std::string> seen;
};

void finish_item(std::optional<PendingItem>& pending, Instrument& out) {
    if (!pending) return;
    for (const char* required : {"id", "category", "answer_kind", "dimension", "prompt"}) {
        if (!pending->seen.count(required)) {
            throw ParseError("item is missing a value", pending->line, required);
        }
    }
    for (const auto& existing : out.items) {
        if (existing.id == pending->spec.id) {
            throw ParseError("duplicate item id '" + pending->spec.id + "'", pending->id_line, "id");
        }
    }
    out.items.push_back(std::move(pending->spec));
    pending.reset();
}

}  // namespace

Instrument load_instrument(std::string_view document) {
    Instrument out;
    std::optional<PendingItem> item;
    std::set<std::string> header_seen;
    bool format_seen = false;

    std::istringstream in{std::string(document)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = trim(raw);
        if (text.empty() || text.front() == '#') continue;
        if (text == "[item]") {
            finish_item(item, out);
            item.emplace();
            item->line = line;
            continue;
        }
        if (text.front() == '[') throw ParseError("unknown section " + text, line, "");

        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line, "");
        const std::string key = trim(std::string_view(text).substr(0, eq));
        const std::string value = unescape(trim(std::string_view(text).substr(eq + 1)), line, key);

        if (item) {
            if (!item->seen.insert(key).second) throw ParseError("repeated key", line, key);
            QuestionSpec& q = item->spec;
            try {
                if (key == "id") {
                    q.id = value;
                    item->id_line = line;
                } else if (key == "category") {
                    q.category = category_from_string(value);
                } else if (key == "answer_kind") {
                    q.answer_kind = answer_kind_from_string(value);
                } else if (key == "required") {
                    q.required = parse_bool(value, line, key);
                } else if (key == "dimension") {
                    q.dimension = value;
                } else if (key == "prompt") {
                    q.prompt_template = value;
                } else {
                    throw ParseError("unknown item key", line, key);
                }
            } catch (const ValidationError& e) {
                throw ParseError(e.what(), line, key);
            }
            continue;
        }

        if (!header_seen.insert(key).second) throw ParseError("repeated key", line, key);
        if (key == "format") {
            if (value != kInstrumentFormat) {
                throw ParseError("unsupported format '" + value + "'", line, key);
            }
            format_seen = true;
        } else if (key == "id") {
            out.id = value;
        } else if (key == "name") {
            out.name = value;
        } else if (key == "scale_docs") {
            out.scale_docs = value;
        } else {
            throw ParseError("unknown instrument key", line, key);
        }
    }
    finish_item(item, out);

    if (!format_seen) throw ParseError("missing format declaration", 1, "format");
    if (out.id.empty()) throw ParseError("missing instrument id", 1, "id");
    if (out.items.empty()) {
        throw ParseError("instrument must have at least one item", line, "[item]");
    }
    validate(out);
    return out;
}

Instrument load_instrument_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open instrument file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_instrument(buf.str());
}

std::string serialize(const Instrument& instrument) {
    std::ostringstream out;
    out << "format = " << kInstrumentFormat << '\n';
    out << "id = " << escape(instrument.id) << '\n';
    out << "name = " << escape(instrument.name) << '\n';
    out << "scale_docs = " << escape(instrument.scale_docs) << '\n';
    for (const auto& q : instrument.items) {
        out << "\n[item]\n";
        out << "id = " << escape(q.id) << '\n';
        out << "category = " << to_string(q.category) << '\n';
        out << "answer_kind = " << to_string(q.answer_kind) << '\n';
        out << "required = " << (q.required ? "true" : "false") << '\n';
        out << "dimension = " << escape(q.dimension) << '\n';
        out << "prompt = " << escape(q.prompt_template) << '\n';
    }
    return out.str();
}

}  // namespace pulse::survey
