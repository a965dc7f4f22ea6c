#include "sigval/csv_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace sigval {

namespace {

[[noreturn]] void parse_error(const std::string& path, std::size_t line,
                              const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& path, std::size_t line,
                    const std::string& field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        parse_error(path, line, "bad numeric field '" + field + "'");
    }
}

long parse_long(const std::string& path, std::size_t line,
                const std::string& field) {
    try {
        std::size_t used = 0;
        const long v = std::stol(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        parse_error(path, line, "bad integer field '" + field + "'");
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool valid_iso_date(const std::string& d) {
    if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (d[i] < '0' || d[i] > '9') return false;
    }
    return true;
}

} // namespace

DatedSeries read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    DatedSeries series;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != "date,value") {
                parse_error(path, lineno, "expected header 'date,value'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 2) parse_error(path, lineno, "expected 2 fields");
        if (!valid_iso_date(fields[0])) {
            parse_error(path, lineno, "bad ISO-8601 date '" + fields[0] + "'");
        }
        if (!series.dates.empty() && fields[0] <= series.dates.back()) {
            parse_error(path, lineno, "dates must strictly increase");
        }
        series.dates.push_back(fields[0]);
        series.values.push_back(parse_double(path, lineno, fields[1]));
    }
    if (!header_seen) throw std::runtime_error(path + ": empty file");
    return series;
}

DatedSeries monthly_downsample(const DatedSeries& series) {
    DatedSeries out;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const std::string month = series.dates[i].substr(0, 7);
        if (!out.dates.empty() && out.dates.back().substr(0, 7) == month) {
            out.dates.back() = series.dates[i];
            out.values.back() = series.values[i];
        } else {
            out.dates.push_back(series.dates[i]);
            out.values.push_back(series.values[i]);
        }
    }
    return out;
}

PathSample read_paths_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    double horizon = 1.0;
    int steps = -1;
    bool grid_seen = false;
    bool header_seen = false;
    struct Row {
        long path_id;
        long time_index;
        long dim;
        double value;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const std::string prefix = "# grid: T=";
            if (line.rfind(prefix, 0) == 0) {
                const auto comma = line.find(",steps=");
                if (comma == std::string::npos) {
                    parse_error(path, lineno, "bad grid comment");
                }
                horizon = parse_double(path, lineno,
                                       line.substr(prefix.size(),
                                                   comma - prefix.size()));
                steps = static_cast<int>(
                    parse_long(path, lineno, line.substr(comma + 7)));
                grid_seen = true;
            }
            continue;
        }
        if (!header_seen) {
            if (line != "path_id,time_index,dim,value") {
                parse_error(path, lineno,
                            "expected header 'path_id,time_index,dim,value'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 4) parse_error(path, lineno, "expected 4 fields");
        rows.push_back({parse_long(path, lineno, fields[0]),
                        parse_long(path, lineno, fields[1]),
                        parse_long(path, lineno, fields[2]),
                        parse_double(path, lineno, fields[3])});
    }
    if (!header_seen) throw std::runtime_error(path + ": missing header");
    if (!grid_seen) throw std::runtime_error(path + ": missing '# grid:' comment");
    if (rows.empty()) {
        PathSample empty = PathSample::zeros(0, steps + 1, 1);
        empty.times = PathSample::uniform_times(steps + 1, horizon);
        return empty;
    }
    long max_path = 0, max_dim = 0;
    for (const auto& r : rows) {
        if (r.path_id < 0 || r.time_index < 0 || r.dim < 0) {
            throw std::runtime_error(path + ": negative index");
        }
        max_path = std::max(max_path, r.path_id);
        max_dim = std::max(max_dim, r.dim);
        if (r.time_index > steps) {
            throw std::runtime_error(path + ": time_index exceeds declared grid");
        }
    }
    PathSample sample =
        PathSample::zeros(static_cast<std::size_t>(max_path) + 1, steps + 1,
                          static_cast<int>(max_dim) + 1);
    sample.times = PathSample::uniform_times(steps + 1, horizon);
    const std::size_t expected = sample.data.size();
    if (rows.size() != expected) {
        throw std::runtime_error(path + ": incomplete path grid (" +
                                 std::to_string(rows.size()) + " rows, expected " +
                                 std::to_string(expected) + ")");
    }
    for (const auto& r : rows) {
        sample.at(static_cast<std::size_t>(r.path_id),
                  static_cast<int>(r.time_index), static_cast<int>(r.dim)) =
            r.value;
    }
    return sample;
}

void write_paths_csv(const PathSample& sample, const std::string& path) {
    std::ofstream file;
    const bool to_stdout = path.empty() || path == "-";
    if (!to_stdout) {
        file.open(path);
        if (!file) throw std::runtime_error("cannot write " + path);
    }
    std::ostream& out = to_stdout ? std::cout : file;
    const double horizon = sample.times.empty() ? 1.0 : sample.times.back();
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", horizon);
    out << "# grid: T=" << buf << ",steps=" << (sample.nodes - 1) << "\n";
    out << "path_id,time_index,dim,value\n";
    for (std::size_t p = 0; p < sample.paths(); ++p) {
        for (int k = 0; k < sample.nodes; ++k) {
            for (int j = 0; j < sample.dim; ++j) {
                std::snprintf(buf, sizeof(buf), "%.17g", sample.at(p, k, j));
                out << p << ',' << k << ',' << j << ',' << buf << "\n";
            }
        }
    }
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace sigval
