#pragma once

#include "dendrite/core.hpp"

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

// RFC-4180 CSV output with deterministic float formatting (shortest decimal
// that round-trips), plus reading of trace CSVs produced by the simulator
// ("time_s" first, one column per channel).

namespace dendrite::csv {

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

std::string to_string(const Table& table);
void write(std::ostream& os, const Table& table);

/// Trace -> CSV with a "time_s" first column.  An empty channel selection
/// exports every channel.
Table trace_table(const Trace& trace, const std::vector<std::string>& channels = {});

/// Parses a trace CSV (header row, "time_s" first column, numeric cells).
/// Throws std::runtime_error with a descriptive message on malformed input.
Trace read_trace(std::istream& is);

} // namespace dendrite::csv
