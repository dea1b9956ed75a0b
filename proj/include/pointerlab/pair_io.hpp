#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "pointerlab/grid.hpp"
#include "pointerlab/sweep.hpp"
#include "pointerlab/wavefunction.hpp"

namespace pointerlab {

struct LoadedPair {
    Wavefunction plus;
    Wavefunction minus;
};

inline const char* kPairCsvHeader = "x,re_plus,im_plus,re_minus,im_minus";

/**
 * Read a pointer pair from CSV with the exact header
 * x,re_plus,im_plus,re_minus,im_minus. The x column must be a uniform
 * ascending grid (spacing consistent within 1e-6 relative) with an odd
 * number of rows, at least 3. Malformed rows raise ConfigSyntaxError;
 * grid violations raise ConfigValidationError, matching the CLI's exit
 * code taxonomy for input problems.
 */
inline LoadedPair load_pair_csv(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line))
        throw ConfigSyntaxError(origin + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kPairCsvHeader)
        throw ConfigSyntaxError(origin + ": first line must be '" +
                                std::string(kPairCsvHeader) + "'");
    std::vector<double> xs;
    std::vector<complex> plus, minus;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double cells[5];
        std::size_t start = 0;
        for (int c = 0; c < 5; ++c) {
            std::size_t end = line.find(',', start);
            const bool last = (c == 4);
            if (last != (end == std::string::npos))
                throw ConfigSyntaxError(origin + ":" + std::to_string(lineno) +
                                        ": expected 5 comma-separated cells");
            if (end == std::string::npos) end = line.size();
            const std::string cell = line.substr(start, end - start);
            char* stop = nullptr;
            cells[c] = std::strtod(cell.c_str(), &stop);
            if (cell.empty() || stop != cell.c_str() + cell.size() ||
                !std::isfinite(cells[c]))
                throw ConfigSyntaxError(origin + ":" + std::to_string(lineno) +
                                        ": '" + cell + "' is not a finite number");
            start = end + 1;
        }
        xs.push_back(cells[0]);
        plus.emplace_back(cells[1], cells[2]);
        minus.emplace_back(cells[3], cells[4]);
    }
    const int n = static_cast<int>(xs.size());
    if (n < 3)
        throw ConfigValidationError(origin + ": need at least 3 rows");
    if (n % 2 == 0)
        throw ConfigValidationError(origin + ": row count must be odd, got " +
                                    std::to_string(n));
    const double h = xs[1] - xs[0];
    if (!(h > 0.0))
        throw ConfigValidationError(origin + ": x must ascend");
    for (int i = 0; i + 1 < n; ++i) {
        const double dx = xs[static_cast<std::size_t>(i) + 1] -
                          xs[static_cast<std::size_t>(i)];
        if (std::abs(dx - h) > 1e-6 * h)
            throw ConfigValidationError(
                origin + ": x is not uniformly spaced near row " +
                std::to_string(i + 2));
    }
    const Grid grid(xs.front(), xs.back(), n);
    return LoadedPair{Wavefunction(grid, std::move(plus)),
                      Wavefunction(grid, std::move(minus))};
}

inline LoadedPair load_pair_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigValidationError("cannot open pair file '" + path + "'");
    return load_pair_csv(in, path);
}

}  // namespace pointerlab
