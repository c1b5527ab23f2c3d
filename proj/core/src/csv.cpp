#include "idtraj/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "idtraj/errors.hpp"

namespace idtraj {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

int CsvTable::require_column(const std::string& name) const {
    const int idx = column(name);
    if (idx < 0) throw DataError("missing CSV column '" + name + "'");
    return idx;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV file " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV file " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split_line(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != table.header.size()) {
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": expected " + std::to_string(table.header.size()) +
                            " fields, got " + std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path,
                  const std::vector<std::string>& header) {
    CsvTable table = read_csv(path);
    if (table.header != header) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        throw DataError(path.string() + ": unexpected header, want '" + want + "'");
    }
    return table;
}

double parse_double(const std::string& field) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    auto [p, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || p != last) {
        throw InputError("bad numeric field '" + field + "'");
    }
    return value;
}

long parse_long(const std::string& field) {
    long value = 0;
    const char* first = field.data();
    const char* last = first + field.size();
    auto [p, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || p != last) {
        throw InputError("bad integer field '" + field + "'");
    }
    return value;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : path_(path), n_columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += header[i];
    }
    buffer_ += '\n';
}

CsvWriter::~CsvWriter() {
    if (!closed_) close();
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
    if (fields.size() != n_columns_) throw ContractError("CSV row width mismatch");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += fields[i];
    }
    buffer_ += '\n';
}

void CsvWriter::close() {
    if (closed_) return;
    closed_ = true;
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write CSV file " + path_.string());
    out.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (!out) throw DataError("short write on " + path_.string());
}

}  // namespace idtraj
