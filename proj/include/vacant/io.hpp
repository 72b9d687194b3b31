#pragma once

// Serialization: JSON reports, CSV tables, flat key=value configs and path
// checkpoints.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vacant/brownian.hpp"
#include "vacant/capacity.hpp"
#include "vacant/census.hpp"
#include "vacant/spectra.hpp"

namespace vacant {

using json = nlohmann::ordered_json;

void to_json(json& j, const GridSpec& g);
void to_json(json& j, const SimConfig& c);
void to_json(json& j, const CapacityEstimate& c);
void to_json(json& j, const EigenResult& e);
void to_json(json& j, const ComponentRecord& r);
void to_json(json& j, const CensusReport& r);

/// Doubles are printed with %.10g, so a table body depends only on the
/// values put in it.
std::string format_number(double v);

class CsvTable {
  public:
    using Cell = std::variant<std::string, double, std::int64_t, std::uint64_t>;

    explicit CsvTable(std::vector<std::string> columns);

    void add_row(std::vector<Cell> row);
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& columns() const { return columns_; }

    void write(std::ostream& os) const;
    void save(const std::string& path) const;

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// "key = value" lines; '#' starts a comment; lists are comma separated.
class KeyValueConfig {
  public:
    static KeyValueConfig parse(std::istream& is);
    static KeyValueConfig load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string text(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key, double fallback) const;
    long long integer(const std::string& key, long long fallback) const;
    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::string> texts(const std::string& key, const std::vector<std::string>& fallback) const;

    /// Throws ConfigError naming the first key not in `known`.
    void check_known(const std::set<std::string>& known) const;

    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

/// Layout (little-endian): "PCKP" | u32 version=1 | u32 d | u64 seed |
/// u64 step | f64 time | f64[d] position.
void write_path_checkpoint(std::ostream& os, const SimConfig& cfg, const PathWalker::State& s);
PathWalker::State read_path_checkpoint(std::istream& is, const SimConfig& cfg);

}  // namespace vacant
