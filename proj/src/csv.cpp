#include "rapport/csv.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rapport/common.hpp"

namespace rapport {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = line.find(',', start);
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

bool file_exists(const std::string& path) { return std::filesystem::exists(path); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw MissingFile("cannot write file: " + path);
    out << content;
}

CsvTable read_csv(const std::string& path) {
    std::string content = read_file(path);

    CsvTable table;
    table.path = path;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        std::size_t nl = content.find('\n', pos);
        std::string line = nl == std::string::npos ? content.substr(pos)
                                                   : content.substr(pos, nl - pos);
        pos = nl == std::string::npos ? content.size() + 1 : nl + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no;
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (line_no == 1) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size())
            throw SchemaViolation(path + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(table.header.size()) + " columns, got " +
                                  std::to_string(cells.size()));
        table.rows.push_back(std::move(cells));
        table.row_lines.push_back(line_no);
    }
    if (table.header.empty()) throw ParseError(path, 1, "missing header row");
    return table;
}

std::optional<double> csv_number(const CsvTable& table, std::size_t row, std::size_t col) {
    const std::string& cell = table.rows[row][col];
    if (cell.empty()) return std::nullopt;
    double value = 0.0;
    const char* first = cell.data();
    const char* last = first + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ParseError(table.path, table.row_lines[row],
                         "malformed number '" + cell + "' in column " + table.header[col]);
    return value;
}

std::string format_number(double v) {
    if (is_missing(v)) return "";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

struct CsvWriter::Impl {
    std::ofstream out;
    std::string path;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
    impl_->path = path;
    impl_->out.open(path, std::ios::binary | std::ios::trunc);
    if (!impl_->out) {
        delete impl_;
        throw MissingFile("cannot write file: " + path);
    }
}

CsvWriter::~CsvWriter() {
    close();
    delete impl_;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) impl_->out << ',';
        impl_->out << cells[i];
    }
    impl_->out << '\n';
}

void CsvWriter::close() {
    if (impl_->out.is_open()) impl_->out.close();
}

}  // namespace rapport
