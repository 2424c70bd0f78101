#pragma once

#include <string>
#include <vector>

namespace consparse::csv {

using Row = std::vector<std::string>;

// RFC 4180: quoted fields, doubled quotes, CRLF or LF line ends
std::vector<Row> parse(const std::string& text);
std::string quote(const std::string& field);
std::string join(const Row& row);
std::string number(double v);  // shortest text that reads back to the same double

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace consparse::csv
