#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nbflow {

enum class TableFormat { Csv, Jsonl };

/// Format a double with 17 significant digits (lossless round trip).
std::string format_real(double v);

/// Streaming writer for numeric tables: CSV with a header row, or JSONL with
/// one flat object per line.
class TableWriter {
public:
    TableWriter(std::ostream& out, TableFormat format, std::vector<std::string> columns);
    void row(const std::vector<double>& values);

private:
    std::ostream& out_;
    TableFormat format_;
    std::vector<std::string> columns_;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Inverse of TableWriter, for round-trip checks and downstream tooling.
Table read_table(std::istream& in, TableFormat format);
Table read_table_file(const std::string& path, TableFormat format);

}  // namespace nbflow
