#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace muprobe {

/// Shortest decimal form that round-trips; "nan", "inf", "-inf" otherwise.
std::string format_double(double value);

/// Small CSV builder; cells containing commas, quotes or newlines are quoted.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    std::size_t rows() const noexcept { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes to a sibling temporary and renames, so readers never observe a
/// truncated file. Creates parent directories.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace muprobe
