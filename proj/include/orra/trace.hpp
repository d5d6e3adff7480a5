#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace orra::harness {

inline constexpr int kTraceSchemaVersion = 1;

/// Column-named table of doubles with free-form metadata. Written as CSV with
/// one leading comment line carrying the schema version and metadata.
class Trace {
public:
    Trace() = default;
    explicit Trace(std::vector<std::string> columns);

    void add_row(std::vector<double> row);

    std::size_t rows() const { return data_.size(); }
    std::size_t cols() const { return columns_.size(); }
    const std::vector<std::string>& columns() const { return columns_; }
    bool has(const std::string& name) const { return index_.count(name) != 0; }
    /// Throws IncompleteTraceError for an unknown column.
    std::size_t index(const std::string& name) const;

    double at(std::size_t row, std::size_t col) const { return data_[row][col]; }
    double at(std::size_t row, const std::string& name) const { return data_[row][index(name)]; }
    std::vector<double> column(const std::string& name) const;

    std::map<std::string, std::string> meta;
    std::string meta_string(const std::string& key) const;
    double meta_number(const std::string& key) const;
    std::vector<double> meta_list(const std::string& key) const;

    std::string to_csv() const;
    void write_csv(const std::filesystem::path& path) const;
    /// Throws IncompleteTraceError on a missing or malformed schema line,
    /// ragged rows or unparsable numbers.
    static Trace read_csv(const std::filesystem::path& path);
    static Trace parse_csv(const std::string& text);

private:
    std::vector<std::string> columns_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::vector<double>> data_;
};

/// Shortest round-trip decimal form; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double v);
std::string format_list(const std::vector<double>& values);

}  // namespace orra::harness
