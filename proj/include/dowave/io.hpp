#pragma once

#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dowave/analysis.hpp"
#include "dowave/errors.hpp"
#include "dowave/model.hpp"

namespace dowave::io {

/// Writes one line per grid node, i-major: x, y, u_numeric and, when `exact`
/// is given, u_exact, abs_err, rel_err. 17 significant digits throughout.
inline void write_field_csv(std::ostream& os, const Discretization& disc, const Field& numeric,
                            const Field* exact = nullptr) {
    if (numeric.M1() != disc.M1() || numeric.M2() != disc.M2()) throw ShapeMismatch("field does not match the grid");
    os << std::setprecision(17);
    os << "x,y,u_numeric";
    Field rel;
    if (exact != nullptr) {
        if (!exact->same_shape(numeric)) throw ShapeMismatch("exact field shape differs");
        rel = relative_error_field(numeric, *exact);
        os << ",u_exact,abs_err,rel_err";
    }
    os << '\n';
    for (std::size_t i = 0; i <= disc.M1(); ++i) {
        for (std::size_t j = 0; j <= disc.M2(); ++j) {
            os << disc.x(i) << ',' << disc.y(j) << ',' << numeric(i, j);
            if (exact != nullptr) {
                os << ',' << (*exact)(i, j) << ',' << std::abs(numeric(i, j) - (*exact)(i, j)) << ',' << rel(i, j);
            }
            os << '\n';
        }
    }
}

/// Reads the u_numeric column of a file written by write_field_csv back into a
/// Field of the given grid shape.
inline Field read_field_csv(std::istream& is, std::size_t M1, std::size_t M2) {
    std::string line;
    if (!std::getline(is, line)) throw Error("field csv: empty input");
    std::vector<std::string> header;
    {
        std::stringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
    }
    std::size_t col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "u_numeric") col = c;
    }
    if (col == header.size()) throw Error("field csv: no u_numeric column");

    Field f(M1, M2);
    std::size_t q = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (q >= f.size()) throw ShapeMismatch("field csv: more rows than grid nodes");
        std::stringstream ls(line);
        std::string cell;
        for (std::size_t c = 0; c <= col; ++c) std::getline(ls, cell, ',');
        f.values()[q++] = std::stod(cell);
    }
    if (q != f.size()) throw ShapeMismatch("field csv: fewer rows than grid nodes");
    return f;
}

}  // namespace dowave::io
