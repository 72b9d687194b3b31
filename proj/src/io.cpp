#include "vacant/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace vacant {

namespace {

json vec_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
    return a;
}

json ivec_json(const IVec& v) {
    json a = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
    return a;
}

// NaN and inf are not JSON numbers.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void to_json(json& j, const GridSpec& g) {
    j = json{{"d", g.d}, {"n", g.n}, {"offset", vec_json(g.offset)}};
}

void to_json(json& j, const SimConfig& c) {
    j = json{{"d", c.d},         {"t_max", c.t_max}, {"dt", c.dt},
             {"rho", c.rho},     {"seed", c.seed},   {"grid", c.grid},
             {"start", vec_json(c.start)}};
}

void to_json(json& j, const CapacityEstimate& c) {
    j = json{{"value", num(c.value)},
             {"stderr", num(c.std_error)},
             {"method", to_string(c.method)},
             {"samples", c.samples},
             {"censored", c.censored}};
}

void to_json(json& j, const EigenResult& e) {
    j = json{{"lambda", num(e.lambda)}, {"residual", num(e.residual)}, {"h", e.h},
             {"grid_n", e.grid_n},      {"iterations", e.iterations},  {"cg_iterations", e.cg_iterations},
             {"single_cell", e.single_cell}};
    if (e.shell_lo > 0.0 || e.shell_hi > 0.0) {
        j["shell_lo"] = e.shell_lo;
        j["shell_hi"] = e.shell_hi;
    }
}

void to_json(json& j, const ComponentRecord& r) {
    j = json{{"id", r.id},
             {"voxels", r.voxels},
             {"volume", r.volume},
             {"boundary_voxels", r.boundary_voxels},
             {"shell_voxels", r.shell_voxels},
             {"bbox_lo", ivec_json(r.bbox_lo)},
             {"bbox_hi", ivec_json(r.bbox_hi)},
             {"wraps", r.wraps},
             {"wrap_axes", r.wrap_axes},
             {"diameter", num(r.diameter)},
             {"inradius", r.inradius}};
    j["capacity"] = r.capacity ? json(*r.capacity) : json(nullptr);
    j["eigen"] = r.eigen ? json(*r.eigen) : json(nullptr);
}

void to_json(json& j, const CensusReport& r) {
    j = json{{"d", r.d}, {"n", r.n}, {"components", r.components.size()}, {"any_wrap", r.any_wrap}};
    j["kappa_star"] = r.kappa_star ? json(*r.kappa_star) : json(nullptr);
    j["kappa_star_censored"] = r.kappa_star_censored;
    j["records"] = r.components;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw std::invalid_argument("csv: row width does not match header");
    std::vector<std::string> out;
    out.reserve(row.size());
    for (const auto& c : row) {
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::string>)
                    out.push_back(v);
                else if constexpr (std::is_same_v<T, double>)
                    out.push_back(format_number(v));
                else
                    out.push_back(std::to_string(v));
            },
            c);
    }
    rows_.push_back(std::move(out));
}

void CsvTable::write(std::ostream& os) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << '\n';
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }
}

void CsvTable::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("csv: cannot write " + path);
    write(f);
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size()) throw ConfigError("config: '" + key + "' expects a number, got '" + s + "'");
    return v;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& is) {
    KeyValueConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " has no '='");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config: line " + std::to_string(lineno) + " has an empty key");
        if (c.values_.count(key)) throw ConfigError("config: duplicate key '" + key + "'");
        c.values_[key] = trim(line.substr(eq + 1));
    }
    return c;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    return parse(f);
}

std::string KeyValueConfig::text(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::number(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : to_double(key, it->second);
}

long long KeyValueConfig::integer(const std::string& key, long long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const double v = to_double(key, it->second);
    if (v != std::floor(v) || std::abs(v) > 9.0e15)
        throw ConfigError("config: '" + key + "' expects an integer, got '" + it->second + "'");
    return static_cast<long long>(v);
}

std::vector<double> KeyValueConfig::numbers(const std::string& key, const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& s : split_list(it->second)) out.push_back(to_double(key, s));
    if (out.empty()) throw ConfigError("config: '" + key + "' is an empty list");
    return out;
}

std::vector<std::string> KeyValueConfig::texts(const std::string& key,
                                               const std::vector<std::string>& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : split_list(it->second);
}

void KeyValueConfig::check_known(const std::set<std::string>& known) const {
    for (const auto& [k, v] : values_)
        if (!known.count(k)) throw ConfigError("config: unknown key '" + k + "'");
}

namespace {

void put_le(std::ostream& os, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::istream& is, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        const int c = is.get();
        if (c == EOF) throw std::runtime_error("checkpoint: truncated");
        v |= static_cast<std::uint64_t>(c) << (8 * i);
    }
    return v;
}

}  // namespace

void write_path_checkpoint(std::ostream& os, const SimConfig& cfg, const PathWalker::State& s) {
    os.write("PCKP", 4);
    put_le(os, 1, 4);
    put_le(os, static_cast<std::uint64_t>(cfg.d), 4);
    put_le(os, cfg.seed, 8);
    put_le(os, s.step, 8);
    put_le(os, std::bit_cast<std::uint64_t>(s.time), 8);
    for (int k = 0; k < cfg.d; ++k) put_le(os, std::bit_cast<std::uint64_t>(s.position[k]), 8);
}

PathWalker::State read_path_checkpoint(std::istream& is, const SimConfig& cfg) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "PCKP", 4) != 0) throw std::runtime_error("checkpoint: bad magic");
    if (get_le(is, 4) != 1) throw std::runtime_error("checkpoint: unsupported version");
    if (static_cast<int>(get_le(is, 4)) != cfg.d) throw std::runtime_error("checkpoint: dimension mismatch");
    if (get_le(is, 8) != cfg.seed) throw std::runtime_error("checkpoint: seed mismatch");
    PathWalker::State s;
    s.step = get_le(is, 8);
    s.time = std::bit_cast<double>(get_le(is, 8));
    s.position = Vec(cfg.d);
    for (int k = 0; k < cfg.d; ++k) s.position[k] = std::bit_cast<double>(get_le(is, 8));
    return s;
}

}  // namespace vacant
