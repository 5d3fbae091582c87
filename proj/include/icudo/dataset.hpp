#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "icudo/errors.hpp"

namespace icudo {

// K samples of fixed-dimension points. Sample k holds count(k) points of
// dimension dim, stored flat row-major.
struct DataSet {
    int dim = 1;
    std::vector<std::vector<double>> samples;

    int num_samples() const { return static_cast<int>(samples.size()); }
    int count(int k) const { return static_cast<int>(samples[static_cast<std::size_t>(k)].size()) / dim; }
    std::span<const double> point(int k, int i) const {
        return {samples[static_cast<std::size_t>(k)].data() + static_cast<std::size_t>(i) * dim,
                static_cast<std::size_t>(dim)};
    }
    double value(int k, int i) const { return samples[static_cast<std::size_t>(k)][static_cast<std::size_t>(i) * dim]; }

    static DataSet from_values(std::vector<double> values);  // one univariate sample
};

// CSV with a header row. An optional `sample_id` column (values 1..K,
// default 1) selects the sample; every other column is a coordinate, in file
// order. Errors carry 1-based line numbers.
DataSet read_dataset_csv(std::istream& is);
DataSet read_dataset_csv_file(const std::string& path);
void write_dataset_csv(const DataSet& data, std::ostream& os);

}  // namespace icudo
