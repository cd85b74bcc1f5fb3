#ifndef RAPPORT_CSV_HPP
#define RAPPORT_CSV_HPP

#include <optional>
#include <string>
#include <vector>

namespace rapport {

// Minimal CSV support for the corpus file formats: comma separation, one
// header row, no quoting or escaping (fields never contain commas).

struct CsvTable {
    std::string path;
    std::vector<std::string> header;
    // cell text rows; empty string = empty cell
    std::vector<std::vector<std::string>> rows;
    // 1-based file line of each row (header is line 1)
    std::vector<std::size_t> row_lines;
};

// Throws MissingFile / ParseError.
CsvTable read_csv(const std::string& path);

// Parses a cell as double; empty cell yields nullopt. Throws ParseError on
// malformed numbers.
std::optional<double> csv_number(const CsvTable& table, std::size_t row, std::size_t col);

// Shortest round-trip decimal form of v (empty cell when missing-NaN).
std::string format_number(double v);

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& cells);
    void close();

private:
    struct Impl;
    Impl* impl_;
};

bool file_exists(const std::string& path);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace rapport

#endif  // RAPPORT_CSV_HPP
