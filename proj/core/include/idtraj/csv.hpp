#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace idtraj {

// Minimal CSV support for the fixed schemas this project reads and writes.
// Values are unquoted, comma separated, '.' decimal separator.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
    int require_column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

// Requires the file's header to equal `header` exactly.
CsvTable read_csv(const std::filesystem::path& path,
                  const std::vector<std::string>& header);

double parse_double(const std::string& field);
long parse_long(const std::string& field);

// 17 significant digits: doubles round-trip exactly, so equal inputs give
// byte-equal artifacts.
std::string format_double(double v);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    ~CsvWriter();

    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void write_row(const std::vector<std::string>& fields);
    void close();

private:
    std::filesystem::path path_;
    std::string buffer_;
    std::size_t n_columns_;
    bool closed_ = false;
};

}  // namespace idtraj
