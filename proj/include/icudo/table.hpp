#pragma once

#include <string>
#include <vector>

#include "icudo/errors.hpp"

namespace icudo {

// A rectangular table of strings with a header row. The CSV writer is
// byte-stable: emit(parse(emit(t))) == emit(t).
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string table_to_csv(const Table& t);
Table table_from_csv(const std::string& csv);
std::string table_to_markdown(const Table& t);

}  // namespace icudo
