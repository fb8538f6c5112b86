#pragma once

#include "nlw/expansion.hpp"
#include "nlw/recovery.hpp"
#include "nlw/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace nlw {

enum class KeyType { Integer, Real, RealList, Word };

/// One entry of the configuration grammar: `section.name`, its default in
/// canonical form, its type and, for words, the accepted values.
struct ConfigKey {
    std::string key;
    std::string default_value;
    KeyType type = KeyType::Real;
    std::vector<std::string> choices;
    std::string help;
};

/// Every accepted key in output order. The defaults are the reference
/// configuration.
const std::vector<ConfigKey>& config_schema();

/// Edit distance between two strings (insertions, deletions, substitutions).
std::size_t edit_distance(const std::string& a, const std::string& b);

/// Closest valid `section.name` to an unknown key, or an empty string when
/// nothing is close. Keys of the same section are preferred; a key without a
/// section is compared by bare name.
std::string suggest_key(const std::string& unknown);

/// Resolved configuration: every schema key with a canonical value.
class Config {
public:
    /// The reference configuration.
    Config();

    /// INI file with [section] headers and `name = value` lines; `#` and `;`
    /// start comments. Unknown keys and malformed values throw ConfigError.
    static Config from_file(const std::filesystem::path& path);
    static Config from_string(const std::string& text);

    /// Sets `section.name` to a value, canonicalizing it. Throws ConfigError.
    void set(const std::string& key, const std::string& value);
    /// `section.name=value`.
    void apply_override(const std::string& assignment);

    const std::string& raw(const std::string& key) const;
    double real(const std::string& key) const;
    long integer(const std::string& key) const;
    std::size_t count(const std::string& key) const;
    std::vector<double> real_list(const std::string& key) const;
    const std::string& word(const std::string& key) const;

    /// INI text in schema order. Parsing it gives the same configuration.
    std::string canonical() const;
    /// 64-bit FNV-1a of canonical().
    std::uint64_t hash() const;
    std::string hash_hex() const;

    /// Cross-parameter guards (WKB wavelength against grid spacing, recovery
    /// factors against the grid, ordering of epsilon lists). Throws ConfigError.
    void validate() const;

    ScenarioSpec scenario() const;
    /// Scenario of the second medium: the first with b and R from [medium2].
    ScenarioSpec scenario2() const;
    NonlinearOptions solver_options() const;
    Scheme scheme() const;
    EndToEndConfig end_to_end() const;

    bool operator==(const Config& o) const { return values_ == o.values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace nlw
