#include "muonlab/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "muonlab/errors.hpp"

namespace muonlab {

namespace {

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string matrix_to_csv(const Matrix& m) {
    std::string out;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += format_g17(m(r, c));
        }
        out += '\n';
    }
    return out;
}

Matrix matrix_from_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        line = strip(line);
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const auto comma = line.find(',', pos);
            const std::string cell =
                strip(line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                  : comma - pos));
            row.push_back(parse_double(cell, "csv cell"));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError("csv rows have unequal lengths");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("csv text holds no rows");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out << matrix_to_csv(m);
}

Matrix read_matrix_csv(const std::string& path) { return matrix_from_csv(read_text_file(path)); }

std::map<std::string, std::string> parse_kv_config(
    const std::string& text, const std::set<std::string>& allowed) {
    std::map<std::string, std::string> out;
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("config line " + std::to_string(lineno) +
                             ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty()) {
            throw ParseError("config line " + std::to_string(lineno) + ": empty key");
        }
        if (!allowed.count(key)) {
            throw ParseError("config line " + std::to_string(lineno) +
                             ": unknown key '" + key + "'");
        }
        if (out.count(key)) {
            throw ParseError("config line " + std::to_string(lineno) +
                             ": duplicate key '" + key + "'");
        }
        out[key] = value;
    }
    return out;
}

std::map<std::string, std::string> read_kv_config_file(
    const std::string& path, const std::set<std::string>& allowed) {
    return parse_kv_config(read_text_file(path), allowed);
}

double parse_double(const std::string& s, const std::string& what) {
    if (s.empty()) throw ParseError(what + ": empty value");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) {
        throw ParseError(what + ": not a number: '" + s + "'");
    }
    // Underflow to a denormal is a faithful nearest value; overflow is not.
    if (errno == ERANGE && (v == HUGE_VAL || v == -HUGE_VAL)) {
        throw ParseError(what + ": magnitude out of double range: '" + s + "'");
    }
    return v;
}

long parse_long(const std::string& s, const std::string& what) {
    if (s.empty()) throw ParseError(what + ": empty value");
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size()) {
        throw ParseError(what + ": not an integer: '" + s + "'");
    }
    if (errno == ERANGE) {
        throw ParseError(what + ": out of range: '" + s + "'");
    }
    return v;
}

bool parse_bool(const std::string& s, const std::string& what) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ParseError(what + ": expected true/false, got '" + s + "'");
}

}  // namespace muonlab
