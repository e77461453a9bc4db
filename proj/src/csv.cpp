#include "depthmon/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "depthmon/error.hpp"

namespace depthmon::core {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
    throw IoError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view field, std::string_view source, std::size_t line, std::string_view column) {
    double value = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (!field.empty() && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc() || ptr != last) {
        fail(source, line, "non-numeric field '" + std::string(field) + "' in column '" + std::string(column) + "'");
    }
    return value;
}

}  // namespace

std::vector<Observation> read_observations_csv(std::istream& in, std::string_view source) {
    std::string line;
    std::size_t line_no = 0;

    // Header.
    std::vector<std::string> columns;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            for (auto f : split(line)) {
                columns.emplace_back(f);
            }
            break;
        }
    }
    if (columns.empty()) {
        fail(source, line_no, "missing header row");
    }
    if (columns.front() != "index") {
        fail(source, line_no, "first column must be 'index'");
    }
    const bool has_time = columns.size() > 1 && columns[1] == "time";
    const std::size_t first_value = has_time ? 2 : 1;
    const std::size_t dim = columns.size() - first_value;
    if (dim == 0) {
        fail(source, line_no, "no value columns (expected v1..vd)");
    }
    for (std::size_t j = 0; j < dim; ++j) {
        if (columns[first_value + j] != "v" + std::to_string(j + 1)) {
            fail(source, line_no, "expected column 'v" + std::to_string(j + 1) + "', found '" +
                                      columns[first_value + j] + "'");
        }
    }

    std::vector<Observation> out;
    Window validator(1, dim);
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != columns.size()) {
            fail(source, line_no, "expected " + std::to_string(columns.size()) + " fields, found " +
                                      std::to_string(fields.size()));
        }
        const double index = parse_number(fields[0], source, line_no, "index");
        if (index < 0 || index != std::floor(index)) {
            fail(source, line_no, "index must be a nonnegative integer");
        }
        Observation obs;
        obs.index = static_cast<std::size_t>(index);
        if (has_time) {
            obs.time = parse_number(fields[1], source, line_no, "time");
        }
        obs.value.reserve(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            obs.value.push_back(parse_number(fields[first_value + j], source, line_no, columns[first_value + j]));
        }
        try {
            validator.push(obs);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(std::move(obs));
    }
    return out;
}

std::vector<Observation> read_observations_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return read_observations_csv(in, path.string());
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) {
        return std::to_string(value);
    }
    return std::string(buf, ptr);
}

void write_observations_csv(std::ostream& out, const std::vector<Observation>& observations) {
    const std::size_t dim = observations.empty() ? 1 : observations.front().value.size();
    const bool has_time = !observations.empty() && observations.front().time.has_value();
    out << "index";
    if (has_time) {
        out << ",time";
    }
    for (std::size_t j = 0; j < dim; ++j) {
        out << ",v" << j + 1;
    }
    out << '\n';
    for (const auto& obs : observations) {
        out << obs.index;
        if (has_time) {
            out << ',' << format_double(obs.time.value_or(0.0));
        }
        for (double v : obs.value) {
            out << ',' << format_double(v);
        }
        out << '\n';
    }
}

}  // namespace depthmon::core
