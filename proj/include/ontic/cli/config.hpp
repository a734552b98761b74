/*
   Copyright 2026 The ontic-sim Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#pragma once

// Scenario configuration: flat `key = value` lines, `#` starts a comment.
// Every violation is collected before reporting, each with its line and
// column (line 0 means the file as a whole).

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace ontic::cli {

enum class Scenario { measure, sweep, semigroup, trajectories, helix, nonlinear, verify };
enum class Format { csv, json };

inline constexpr Scenario all_scenarios[] = {Scenario::measure,      Scenario::sweep, Scenario::semigroup,
                                             Scenario::trajectories, Scenario::helix, Scenario::nonlinear,
                                             Scenario::verify};

inline const char* to_string(Scenario s)
{
    switch (s) {
    case Scenario::measure: return "measure";
    case Scenario::sweep: return "sweep";
    case Scenario::semigroup: return "semigroup";
    case Scenario::trajectories: return "trajectories";
    case Scenario::helix: return "helix";
    case Scenario::nonlinear: return "nonlinear";
    case Scenario::verify: return "verify";
    }
    return "?";
}

inline std::optional<Scenario> scenario_from_string(std::string_view s)
{
    for (Scenario sc : all_scenarios) {
        if (s == to_string(sc)) {
            return sc;
        }
    }
    return std::nullopt;
}

inline const char* to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

// Process exit statuses.
enum class ExitCode : int { ok = 0, failure = 1, parse = 2, validation = 3, tolerance = 4 };

struct Diagnostic {
    std::size_t line = 0;
    std::size_t column = 0;
    std::string message;

    std::string str() const
    {
        std::ostringstream os;
        if (line == 0) {
            os << "config: " << message;
        } else {
            os << "line " << line << ", column " << column << ": " << message;
        }
        return os.str();
    }
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(ExitCode code, std::vector<Diagnostic> diagnostics)
        : std::runtime_error(join(diagnostics)), code_(code), diagnostics_(std::move(diagnostics))
    {
    }

    ExitCode code() const noexcept { return code_; }
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    static std::string join(const std::vector<Diagnostic>& ds)
    {
        std::string out;
        for (const auto& d : ds) {
            if (!out.empty()) {
                out += '\n';
            }
            out += d.str();
        }
        return out;
    }

    ExitCode code_;
    std::vector<Diagnostic> diagnostics_;
};

// ---------------------------------------------------------------------------
// Value parsing
// ---------------------------------------------------------------------------

inline std::optional<double> parse_real(std::string_view s)
{
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last) {
        return std::nullopt;
    }
    return v;
}

inline std::optional<std::int64_t> parse_integer(std::string_view s)
{
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        return std::nullopt;
    }
    return v;
}

inline std::optional<std::uint64_t> parse_unsigned(std::string_view s)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        return std::nullopt;
    }
    return v;
}

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Comma-separated reals, e.g. `0.7, 0.3`.
inline std::optional<std::vector<double>> parse_real_list(std::string_view s)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        const auto item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
        auto v = parse_real(item);
        if (!v) {
            return std::nullopt;
        }
        out.push_back(*v);
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

enum class Kind { integer, real, text, choice, real_list };

struct KeySpec {
    std::string name;
    Kind kind = Kind::real;
    std::optional<std::string> default_value;  // absent: required unless `optional`
    bool optional = false;
    double lo = -1e300;
    double hi = 1e300;
    std::vector<std::string> choices;
};

namespace detail {

inline KeySpec integer_key(std::string name, std::optional<std::string> def, double lo, double hi)
{
    return {std::move(name), Kind::integer, std::move(def), false, lo, hi, {}};
}

inline KeySpec real_key(std::string name, std::optional<std::string> def, double lo, double hi)
{
    return {std::move(name), Kind::real, std::move(def), false, lo, hi, {}};
}

inline KeySpec optional_key(std::string name, Kind kind, double lo = -1e300, double hi = 1e300)
{
    return {std::move(name), kind, std::nullopt, true, lo, hi, {}};
}

inline KeySpec choice_key(std::string name, std::string def, std::vector<std::string> choices)
{
    return {std::move(name), Kind::choice, std::move(def), false, 0.0, 0.0, std::move(choices)};
}

inline void add_subject_keys(std::vector<KeySpec>& keys)
{
    keys.push_back(integer_key("subject_dim", std::nullopt, 2, 64));
    keys.push_back(optional_key("amplitudes", Kind::real_list));
    keys.push_back(optional_key("amplitudes_im", Kind::real_list));
    keys.push_back(optional_key("weights", Kind::real_list));
    keys.push_back(real_key("rate_apparatus", "1", 0.0, 1e6));
    keys.push_back(real_key("rate_environment", "1", 0.0, 1e6));
    keys.push_back(real_key("duration", "0.5", 0.0, 1e6));
}

} // namespace detail

// Keys accepted by every scenario in addition to its own.
inline const std::vector<std::string>& global_keys()
{
    static const std::vector<std::string> keys{"scenario", "seed", "out", "format"};
    return keys;
}

inline std::vector<KeySpec> scenario_schema(Scenario s)
{
    using namespace detail;
    std::vector<KeySpec> keys;
    switch (s) {
    case Scenario::measure:
        add_subject_keys(keys);
        keys.push_back(integer_key("n_apparatus", "10", 0, 1e6));
        keys.push_back(integer_key("n_environment", "10", 0, 1e6));
        keys.push_back(real_key("slack", "10", 1.0, 1e12));
        break;
    case Scenario::sweep:
        add_subject_keys(keys);
        keys.push_back(choice_key("axis", "apparatus", {"apparatus", "environment"}));
        keys.push_back(integer_key("n_min", "0", 0, 1e6));
        keys.push_back(integer_key("n_max", "20", 0, 1e6));
        keys.push_back(integer_key("n_step", "1", 1, 1e6));
        keys.push_back(integer_key("n_other", "0", 0, 1e6));
        break;
    case Scenario::semigroup:
        keys.push_back(choice_key("family", "entangling", {"entangling", "factorized", "swap"}));
        keys.push_back(optional_key("t1", Kind::real, 0.0, 1e6));
        keys.push_back(optional_key("t2", Kind::real, 0.0, 1e6));
        keys.push_back(choice_key("probe", "plus", {"plus", "zero", "one", "random"}));
        break;
    case Scenario::trajectories:
        keys.push_back(integer_key("system_dim", "2", 2, 8));
        keys.push_back(integer_key("env_dim", "2", 2, 8));
        keys.push_back(real_key("coupling", "1", 0.0, 1e3));
        keys.push_back(real_key("step", "0.5", 0.0, 1e3));
        keys.push_back(integer_key("steps", "4", 1, 64));
        keys.push_back(integer_key("initial", "1", 1, 8));
        keys.push_back(integer_key("samples", "1000", 0, 1e7));
        break;
    case Scenario::helix:
        keys.push_back(real_key("omega", "1", -1e6, 1e6));
        keys.push_back(integer_key("points", "100", 2, 1e7));
        keys.push_back(real_key("t0", "0", -1e9, 1e9));
        keys.push_back(real_key("t_end", "6.283185307179586", -1e9, 1e9));
        keys.push_back(integer_key("strand", "1", 1, 2));
        break;
    case Scenario::nonlinear:
        keys.push_back(choice_key("pair", "bell_vs_product", {"bell_vs_product", "werner_vs_product"}));
        keys.push_back(real_key("werner_p", "0.5", 0.0, 1.0));
        keys.push_back(choice_key("channel", "cnot", {"cnot", "factorized"}));
        break;
    case Scenario::verify:
        keys.push_back({"channel_file", Kind::text, std::nullopt, false, 0.0, 0.0, {}});
        break;
    }
    return keys;
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

struct Entry {
    std::string value;
    std::size_t line = 0;  // 0 for defaults
    std::size_t column = 0;
};

struct ScenarioConfig {
    Scenario scenario = Scenario::helix;
    std::map<std::string, Entry> params;
    std::uint64_t seed = 0;
    std::optional<std::string> output_path;
    Format format = Format::csv;

    bool has(const std::string& key) const { return params.count(key) != 0; }

    const std::string& text(const std::string& key) const
    {
        auto it = params.find(key);
        if (it == params.end()) {
            throw std::logic_error("config key not present: " + key);
        }
        return it->second.value;
    }

    double real(const std::string& key) const { return *parse_real(text(key)); }
    std::int64_t integer(const std::string& key) const { return *parse_integer(text(key)); }
    std::size_t count(const std::string& key) const { return static_cast<std::size_t>(integer(key)); }
    std::vector<double> reals(const std::string& key) const { return *parse_real_list(text(key)); }
};

namespace detail {

struct RawLine {
    std::string key;
    std::string value;
    std::size_t line;
    std::size_t key_column;
    std::size_t value_column;
};

inline bool valid_key(std::string_view k)
{
    if (k.empty() || !(std::isalpha(static_cast<unsigned char>(k[0])) || k[0] == '_')) {
        return false;
    }
    for (char c : k) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
            return false;
        }
    }
    return true;
}

inline std::vector<RawLine> tokenize(std::string_view text, std::vector<Diagnostic>& errors)
{
    std::vector<RawLine> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        ++line_no;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const std::size_t first = line.find_first_not_of(" \t\r") + 1;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            errors.push_back({line_no, first, "expected `key = value`"});
            continue;
        }
        const std::string_view key = trim(line.substr(0, eq));
        if (!valid_key(key)) {
            errors.push_back({line_no, first, "invalid key '" + std::string(key) + "'"});
            continue;
        }
        const std::string_view rest = line.substr(eq + 1);
        const std::string_view value = trim(rest);
        const std::size_t value_column =
            value.empty() ? eq + 2 : eq + 1 + rest.find_first_not_of(" \t\r") + 1;
        if (value.empty()) {
            errors.push_back({line_no, value_column, "missing value for '" + std::string(key) + "'"});
            continue;
        }
        out.push_back({std::string(key), std::string(value), line_no, first, value_column});
    }
    return out;
}

inline std::string kind_name(Kind k)
{
    switch (k) {
    case Kind::integer: return "an integer";
    case Kind::real: return "a number";
    case Kind::text: return "text";
    case Kind::choice: return "one of the listed choices";
    case Kind::real_list: return "a comma-separated list of numbers";
    }
    return "?";
}

inline std::string format_bound(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace detail

// Parses and validates.  `expected` is the subcommand when invoked from the
// command line; a `scenario` key, if present, must agree with it.  Syntax,
// unknown, duplicate and missing keys raise ExitCode::parse; values outside
// their ranges raise ExitCode::validation.
inline ScenarioConfig parse_config(std::string_view text, std::optional<Scenario> expected = std::nullopt)
{
    std::vector<Diagnostic> errors;
    const std::vector<detail::RawLine> lines = detail::tokenize(text, errors);

    std::map<std::string, detail::RawLine> seen;
    for (const auto& l : lines) {
        auto [it, inserted] = seen.emplace(l.key, l);
        if (!inserted) {
            errors.push_back({l.line, l.key_column,
                              "duplicate key '" + l.key + "' on lines " + std::to_string(it->second.line) + " and " +
                                  std::to_string(l.line)});
        }
    }

    ScenarioConfig config;
    std::optional<Scenario> scenario = expected;
    if (auto it = seen.find("scenario"); it != seen.end()) {
        auto parsed = scenario_from_string(it->second.value);
        if (!parsed) {
            errors.push_back({it->second.line, it->second.value_column,
                              "unknown scenario '" + it->second.value + "'"});
        } else if (expected && *parsed != *expected) {
            errors.push_back({it->second.line, it->second.value_column,
                              "scenario '" + it->second.value + "' does not match subcommand '" +
                                  to_string(*expected) + "'"});
        } else {
            scenario = parsed;
        }
    } else if (!expected) {
        errors.push_back({0, 0, "missing key 'scenario'"});
    }
    if (!scenario) {
        throw ConfigError(ExitCode::parse, std::move(errors));
    }
    config.scenario = *scenario;

    if (auto it = seen.find("seed"); it != seen.end()) {
        if (auto v = parse_unsigned(it->second.value)) {
            config.seed = *v;
        } else {
            errors.push_back({it->second.line, it->second.value_column, "seed must be an unsigned 64-bit integer"});
        }
    }
    if (auto it = seen.find("format"); it != seen.end()) {
        if (it->second.value == "csv") {
            config.format = Format::csv;
        } else if (it->second.value == "json") {
            config.format = Format::json;
        } else {
            errors.push_back({it->second.line, it->second.value_column, "format must be csv or json"});
        }
    }
    if (auto it = seen.find("out"); it != seen.end()) {
        config.output_path = it->second.value;
    }

    const std::vector<KeySpec> schema = scenario_schema(config.scenario);
    auto spec_of = [&](const std::string& key) -> const KeySpec* {
        for (const auto& k : schema) {
            if (k.name == key) {
                return &k;
            }
        }
        return nullptr;
    };

    std::vector<Diagnostic> range_errors;
    for (const auto& l : lines) {
        if (std::find(global_keys().begin(), global_keys().end(), l.key) != global_keys().end()) {
            continue;
        }
        const KeySpec* spec = spec_of(l.key);
        if (spec == nullptr) {
            errors.push_back({l.line, l.key_column,
                              "unknown key '" + l.key + "' for scenario " + to_string(config.scenario)});
            continue;
        }
        if (seen.at(l.key).line != l.line) {
            continue;  // duplicate, already reported
        }
        const std::string must = "'" + l.key + "' must be " + detail::kind_name(spec->kind);
        auto check_range = [&](double v) {
            if (!(v >= spec->lo && v <= spec->hi)) {
                range_errors.push_back({l.line, l.value_column,
                                        "'" + l.key + "' = " + l.value + " is outside [" +
                                            detail::format_bound(spec->lo) + ", " + detail::format_bound(spec->hi) +
                                            "]"});
            }
        };
        switch (spec->kind) {
        case Kind::integer:
            if (auto v = parse_integer(l.value)) {
                check_range(static_cast<double>(*v));
            } else {
                errors.push_back({l.line, l.value_column, must});
            }
            break;
        case Kind::real:
            if (auto v = parse_real(l.value)) {
                check_range(*v);
            } else {
                errors.push_back({l.line, l.value_column, must});
            }
            break;
        case Kind::real_list:
            if (!parse_real_list(l.value)) {
                errors.push_back({l.line, l.value_column, must});
            }
            break;
        case Kind::choice:
            if (std::find(spec->choices.begin(), spec->choices.end(), l.value) == spec->choices.end()) {
                std::string list;
                for (const auto& c : spec->choices) {
                    list += (list.empty() ? "" : ", ") + c;
                }
                errors.push_back({l.line, l.value_column, "'" + l.key + "' must be one of: " + list});
            }
            break;
        case Kind::text:
            break;
        }
        config.params[l.key] = Entry{l.value, l.line, l.value_column};
    }

    for (const auto& spec : schema) {
        if (config.params.count(spec.name) != 0 || seen.count(spec.name) != 0) {
            continue;
        }
        if (spec.default_value) {
            config.params[spec.name] = Entry{*spec.default_value, 0, 0};
        } else if (!spec.optional) {
            errors.push_back({0, 0, "missing key '" + spec.name + "'"});
        }
    }

    if (config.scenario == Scenario::measure || config.scenario == Scenario::sweep) {
        const bool amps = seen.count("amplitudes") != 0;
        const bool weights = seen.count("weights") != 0;
        if (!amps && !weights) {
            errors.push_back({0, 0, "missing key 'amplitudes' (or 'weights')"});
        } else if (amps && weights) {
            const auto& w = seen.at("weights");
            errors.push_back({w.line, w.key_column, "give either 'amplitudes' or 'weights', not both"});
        }
        if (seen.count("amplitudes_im") != 0 && !amps) {
            const auto& im = seen.at("amplitudes_im");
            errors.push_back({im.line, im.key_column, "'amplitudes_im' requires 'amplitudes'"});
        }
    }

    if (!errors.empty()) {
        throw ConfigError(ExitCode::parse, std::move(errors));
    }
    if (!range_errors.empty()) {
        throw ConfigError(ExitCode::validation, std::move(range_errors));
    }
    return config;
}

} // namespace ontic::cli
