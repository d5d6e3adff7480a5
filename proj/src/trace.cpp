#include "orra/trace.hpp"

#include "orra/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace orra::harness {

Trace::Trace(std::vector<std::string> columns) : columns_(std::move(columns)) {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (!index_.emplace(columns_[i], i).second) {
            throw DimensionError("duplicate trace column '" + columns_[i] + "'");
        }
    }
}

void Trace::add_row(std::vector<double> row) {
    if (row.size() != columns_.size()) {
        throw DimensionError("trace row has " + std::to_string(row.size()) + " values for " +
                             std::to_string(columns_.size()) + " columns");
    }
    data_.push_back(std::move(row));
}

std::size_t Trace::index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw IncompleteTraceError("trace has no column '" + name + "'");
    return it->second;
}

std::vector<double> Trace::column(const std::string& name) const {
    const auto c = index(name);
    std::vector<double> out;
    out.reserve(data_.size());
    for (const auto& r : data_) out.push_back(r[c]);
    return out;
}

std::string Trace::meta_string(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end()) throw IncompleteTraceError("trace metadata lacks '" + key + "'");
    return it->second;
}

namespace {

double parse_number(std::string_view s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw IncompleteTraceError("malformed number '" + std::string(s) + "' in trace");
    }
    return v;
}

}  // namespace

double Trace::meta_number(const std::string& key) const { return parse_number(meta_string(key)); }

std::vector<double> Trace::meta_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(meta_string(key));
    std::string item;
    while (std::getline(ss, item, ';')) out.push_back(parse_number(item));
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ';';
        out += format_number(values[i]);
    }
    return out;
}

std::string Trace::to_csv() const {
    std::string out = "# orra-trace schema=" + std::to_string(kTraceSchemaVersion);
    for (const auto& [k, v] : meta) out += " " + k + "=" + v;
    out += '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    for (const auto& r : data_) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            out += format_number(r[i]);
        }
        out += '\n';
    }
    return out;
}

void Trace::write_csv(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write trace " + path.string());
    out << to_csv();
}

Trace Trace::parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# orra-trace ", 0) != 0) {
        throw IncompleteTraceError("trace lacks the '# orra-trace' schema line");
    }
    std::map<std::string, std::string> meta;
    {
        std::istringstream words(line.substr(13));
        std::string w;
        while (words >> w) {
            const auto eq = w.find('=');
            if (eq == std::string::npos) continue;
            meta[w.substr(0, eq)] = w.substr(eq + 1);
        }
    }
    auto schema = meta.find("schema");
    if (schema == meta.end() || schema->second != std::to_string(kTraceSchemaVersion)) {
        throw IncompleteTraceError("unsupported trace schema version");
    }
    meta.erase(schema);

    if (!std::getline(in, line)) throw IncompleteTraceError("trace lacks a header row");
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    Trace t(cols);
    t.meta = std::move(meta);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(cols.size());
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            const auto end = comma == std::string::npos ? line.size() : comma;
            row.push_back(parse_number(std::string_view(line).substr(start, end - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (row.size() != cols.size()) {
            throw IncompleteTraceError("trace row " + std::to_string(t.rows()) + " has " +
                                       std::to_string(row.size()) + " fields");
        }
        t.add_row(std::move(row));
    }
    return t;
}

Trace Trace::read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open trace " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

}  // namespace orra::harness
