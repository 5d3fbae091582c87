#include "icudo/table.hpp"

#include <algorithm>
#include <sstream>

namespace icudo {

std::string table_to_csv(const Table& t) {
    std::ostringstream os;
    auto emit_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << row[i];
        }
        os << '\n';
    };
    emit_row(t.header);
    for (const auto& r : t.rows) emit_row(r);
    return os.str();
}

Table table_from_csv(const std::string& csv) {
    Table t;
    std::istringstream is(csv);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> cells;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        cells.push_back(cur);
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != t.header.size())
                throw DataError("table CSV: row width " + std::to_string(cells.size()) +
                                " does not match header width " + std::to_string(t.header.size()));
            t.rows.push_back(std::move(cells));
        }
    }
    if (first) throw DataError("table CSV: empty input");
    return t;
}

std::string table_to_markdown(const Table& t) {
    std::vector<std::size_t> width(t.header.size());
    for (std::size_t c = 0; c < t.header.size(); ++c) width[c] = t.header[c].size();
    for (const auto& r : t.rows)
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());

    std::ostringstream os;
    auto emit_row = [&](const std::vector<std::string>& row) {
        os << '|';
        for (std::size_t c = 0; c < row.size(); ++c) {
            os << ' ' << row[c] << std::string(width[c] - row[c].size(), ' ') << " |";
        }
        os << '\n';
    };
    emit_row(t.header);
    os << '|';
    for (std::size_t c = 0; c < t.header.size(); ++c) os << std::string(width[c] + 2, '-') << '|';
    os << '\n';
    for (const auto& r : t.rows) emit_row(r);
    return os.str();
}

}  // namespace icudo
