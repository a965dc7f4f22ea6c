#pragma once

#include <string>
#include <vector>

#include "sigval/signature.hpp"

namespace sigval {

// Dated scalar series, dates as ISO-8601 strings (YYYY-MM-DD).
struct DatedSeries {
    std::vector<std::string> dates;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

// Reads `date,value` CSV with a header row; dates must be ISO-8601 and
// strictly increasing. Lines starting with '#' are ignored.
DatedSeries read_series_csv(const std::string& path);

// Keeps the last observation of every calendar month.
DatedSeries monthly_downsample(const DatedSeries& series);

// Long-format path CSV: comment line `# grid: T=<horizon>,steps=<steps>`,
// header `path_id,time_index,dim,value`, then one row per coefficient.
// Round-trips losslessly at 17 significant digits.
PathSample read_paths_csv(const std::string& path);
void write_paths_csv(const PathSample& sample, const std::string& path);

} // namespace sigval
