#include "nbflow/table_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nbflow/errors.hpp"

namespace nbflow {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

TableWriter::TableWriter(std::ostream& out, TableFormat format, std::vector<std::string> columns)
    : out_(out), format_(format), columns_(std::move(columns)) {
    if (format_ == TableFormat::Csv) {
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) out_ << ',';
            out_ << columns_[i];
        }
        out_ << '\n';
    }
}

void TableWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_.size())
        throw DomainError("table row has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(columns_.size()));
    if (format_ == TableFormat::Csv) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << format_real(values[i]);
        }
        out_ << '\n';
    } else {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < values.size(); ++i) obj[columns_[i]] = values[i];
        out_ << obj.dump() << '\n';
    }
}

Table read_table(std::istream& in, TableFormat format) {
    Table t;
    std::string line;
    if (format == TableFormat::Csv) {
        if (!std::getline(in, line)) throw ParseError("table: missing CSV header");
        std::istringstream h(line);
        std::string cell;
        while (std::getline(h, cell, ',')) t.columns.push_back(cell);
        int lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            std::istringstream r(line);
            std::vector<double> vals;
            while (std::getline(r, cell, ',')) {
                char* end = nullptr;
                double v = std::strtod(cell.c_str(), &end);
                if (end == cell.c_str())
                    throw ParseError("table line " + std::to_string(lineno) + ": bad number \"" +
                                     cell + "\"");
                vals.push_back(v);
            }
            if (vals.size() != t.columns.size())
                throw ParseError("table line " + std::to_string(lineno) + ": expected " +
                                 std::to_string(t.columns.size()) + " cells");
            t.rows.push_back(std::move(vals));
        }
    } else {
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            nlohmann::ordered_json obj;
            try {
                obj = nlohmann::ordered_json::parse(line);
            } catch (const std::exception& e) {
                throw ParseError("jsonl line " + std::to_string(lineno) + ": " + e.what());
            }
            if (t.columns.empty())
                for (auto it = obj.begin(); it != obj.end(); ++it) t.columns.push_back(it.key());
            std::vector<double> vals;
            for (const auto& c : t.columns) vals.push_back(obj.at(c).get<double>());
            t.rows.push_back(std::move(vals));
        }
    }
    return t;
}

Table read_table_file(const std::string& path, TableFormat format) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open table file");
    return read_table(in, format);
}

}  // namespace nbflow
