#pragma once

#include <map>
#include <set>
#include <string>

#include "muonlab/matrix.hpp"

namespace muonlab {

// Shortest representation that round-trips a double exactly ("%.17g").
std::string format_g17(double x);

// Whole file as a string; ParseError if it cannot be opened.
std::string read_text_file(const std::string& path);

// Comma-separated values, one matrix row per line, written with format_g17
// so read_matrix_csv(write_matrix_csv(m)) == m bit for bit.
void write_matrix_csv(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(const std::string& path);
std::string matrix_to_csv(const Matrix& m);
Matrix matrix_from_csv(const std::string& text);

// Line-oriented "key = value" config format. '#' starts a comment, blank
// lines are ignored. Fails closed: keys outside `allowed`, duplicate keys,
// or lines without '=' all raise ParseError.
std::map<std::string, std::string> parse_kv_config(
    const std::string& text, const std::set<std::string>& allowed);
std::map<std::string, std::string> read_kv_config_file(
    const std::string& path, const std::set<std::string>& allowed);

// Strict scalar parsers for config/CLI values (whole string must consume).
double parse_double(const std::string& s, const std::string& what);
long parse_long(const std::string& s, const std::string& what);
bool parse_bool(const std::string& s, const std::string& what);

}  // namespace muonlab
