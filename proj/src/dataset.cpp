#include "icudo/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace icudo {

DataSet DataSet::from_values(std::vector<double> values) {
    DataSet d;
    d.dim = 1;
    d.samples.push_back(std::move(values));
    return d;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

}  // namespace

DataSet read_dataset_csv(std::istream& is) {
    std::string line;
    long lineno = 0;
    if (!std::getline(is, line)) throw DataError("dataset CSV: empty input, expected a header row");
    ++lineno;
    const auto header = split_csv_line(line);
    int id_col = -1;
    std::vector<int> coord_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (trim(header[c]) == "sample_id") {
            if (id_col >= 0) throw DataError("dataset CSV line 1: duplicate sample_id column");
            id_col = static_cast<int>(c);
        } else {
            coord_cols.push_back(static_cast<int>(c));
        }
    }
    if (coord_cols.empty()) throw DataError("dataset CSV line 1: no coordinate columns");

    DataSet data;
    data.dim = static_cast<int>(coord_cols.size());
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError("dataset CSV line " + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(cells.size()));
        int sample = 1;
        if (id_col >= 0) {
            try {
                std::size_t pos = 0;
                sample = std::stoi(trim(cells[static_cast<std::size_t>(id_col)]), &pos);
            } catch (...) {
                throw DataError("dataset CSV line " + std::to_string(lineno) + ": bad sample_id");
            }
            if (sample < 1)
                throw DataError("dataset CSV line " + std::to_string(lineno) +
                                ": sample_id must be >= 1");
        }
        if (sample > data.num_samples()) data.samples.resize(static_cast<std::size_t>(sample));
        auto& dest = data.samples[static_cast<std::size_t>(sample - 1)];
        for (int c : coord_cols) {
            const std::string cell = trim(cells[static_cast<std::size_t>(c)]);
            try {
                std::size_t pos = 0;
                double v = std::stod(cell, &pos);
                if (pos != cell.size()) throw std::invalid_argument("");
                dest.push_back(v);
            } catch (...) {
                throw DataError("dataset CSV line " + std::to_string(lineno) +
                                ": cannot parse coordinate '" + cell + "'");
            }
        }
    }
    if (data.samples.empty()) throw DataError("dataset CSV: no data rows");
    for (int k = 0; k < data.num_samples(); ++k)
        if (data.samples[static_cast<std::size_t>(k)].empty())
            throw DataError("dataset CSV: sample " + std::to_string(k + 1) +
                            " has no rows (sample ids must be contiguous from 1)");
    return data;
}

DataSet read_dataset_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open dataset file: " + path);
    return read_dataset_csv(f);
}

void write_dataset_csv(const DataSet& data, std::ostream& os) {
    const bool with_id = data.num_samples() > 1;
    if (with_id) os << "sample_id,";
    for (int c = 0; c < data.dim; ++c) {
        if (c) os << ',';
        os << 'x' << (c + 1);
    }
    os << '\n';
    os.precision(17);
    for (int k = 0; k < data.num_samples(); ++k) {
        for (int i = 0; i < data.count(k); ++i) {
            if (with_id) os << (k + 1) << ',';
            const auto pt = data.point(k, i);
            for (int c = 0; c < data.dim; ++c) {
                if (c) os << ',';
                os << pt[static_cast<std::size_t>(c)];
            }
            os << '\n';
        }
    }
}

}  // namespace icudo
