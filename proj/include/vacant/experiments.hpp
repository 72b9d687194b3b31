#pragma once

// Batch experiments driven by a flat key=value config. Each run returns its
// CSV tables and a JSON manifest; replicas are independent jobs whose rows
// come out in job order whatever the thread count.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vacant/io.hpp"

namespace vacant {

/// Estimated work above the --budget cap, or an enumeration over its limit.
class ResourceRefusal : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The base seed is the config key `seed`; replica i runs with seed + i.
struct RunOptions {
    int threads = 1;
    double budget = 3600.0;  // estimated CPU seconds
};

struct ExperimentResult {
    std::string name;
    json manifest;
    std::vector<std::pair<std::string, CsvTable>> tables;     // file stem, table
    std::vector<std::pair<std::string, std::string>> files;  // extra text outputs
    const CsvTable& table(const std::string& stem) const;
};

/// inradius-vs-t, cover-time, census, capacity-validate, excursion-validate,
/// local-limit, animal-count, translate-pack, predict.
const std::vector<std::string>& experiment_names();

/// Keys understood by an experiment, with defaults as text.
const std::vector<std::pair<std::string, std::string>>& experiment_keys(const std::string& name);

/// Rough CPU-seconds estimate; throws ConfigError for invalid configs.
double estimate_cost(const std::string& name, const KeyValueConfig& cfg);

/// Validates, checks the budget, runs. Throws ConfigError or ResourceRefusal.
ExperimentResult run_experiment(const std::string& name, const KeyValueConfig& cfg, const RunOptions& opt);

/// Writes <dir>/<stem>.csv per table, the extra files, and <dir>/manifest.json.
void write_outputs(const ExperimentResult& r, const std::string& dir);

/// Runs fn(0..count-1) on up to `threads` workers; rethrows the exception of
/// the lowest failing index.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace vacant
