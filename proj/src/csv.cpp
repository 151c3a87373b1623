#include "dendrite/csv.hpp"

#include "dendrite/si.hpp"

#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dendrite::csv {

namespace {

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\r\n") != std::string::npos;
}

std::string quote(const std::string& s) {
    if (!needs_quoting(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string cell_text(const Cell& cell) {
    if (const auto* d = std::get_if<double>(&cell)) return si::format_double(*d);
    if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
    return quote(std::get<std::string>(cell));
}

std::vector<std::string> split_line(const std::string& line) {
    // The simulator never emits quoted cells, but accept them on input.
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace

std::string to_string(const Table& table) {
    std::ostringstream os;
    write(os, table);
    return os.str();
}

void write(std::ostream& os, const Table& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) os << ',';
        os << quote(table.header[i]);
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << cell_text(row[i]);
        }
        os << '\n';
    }
}

Table trace_table(const Trace& trace, const std::vector<std::string>& channels) {
    const std::vector<std::string>& names =
        channels.empty() ? trace.channel_names() : channels;
    Table t;
    t.header.push_back("time_s");
    for (const auto& n : names) t.header.push_back(n);
    std::vector<const std::vector<double>*> cols;
    cols.reserve(names.size());
    for (const auto& n : names) cols.push_back(&trace.channel(n));
    t.rows.reserve(trace.sample_count());
    for (std::size_t i = 0; i < trace.sample_count(); ++i) {
        std::vector<Cell> row;
        row.reserve(names.size() + 1);
        row.emplace_back(trace.time(i));
        for (const auto* c : cols) row.emplace_back((*c)[i]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

Trace read_trace(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv: empty input");
    const auto header = split_line(line);
    if (header.empty() || header.front() != "time_s")
        throw std::runtime_error("csv: first column must be time_s");

    std::vector<double> times;
    std::vector<std::vector<double>> columns(header.size() - 1);
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error("csv: line " + std::to_string(line_no) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(header.size()));
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const char* begin = fields[i].c_str();
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end != begin + fields[i].size() || !std::isfinite(v))
                throw std::runtime_error("csv: line " + std::to_string(line_no) +
                                         ": bad number '" + fields[i] + "'");
            if (i == 0) times.push_back(v);
            else columns[i - 1].push_back(v);
        }
    }
    if (times.empty()) throw std::runtime_error("csv: no data rows");
    const double t0 = times.front();
    const double dt = times.size() > 1 ? times[1] - times[0] : 1.0;
    if (times.size() > 1 && dt <= 0) throw std::runtime_error("csv: non-increasing time column");
    Trace trace(dt, t0);
    for (std::size_t i = 0; i + 1 < header.size(); ++i)
        trace.add_channel(header[i + 1], std::move(columns[i]));
    return trace;
}

} // namespace dendrite::csv
