#include "kmreg/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "kmreg/errors.hpp"

namespace kmreg::io {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& token) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) throw UsageError("not a number: '" + token + "'");
    return v;
}

namespace {

std::size_t parse_size(const std::string& token) {
    std::size_t v = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
        throw UsageError("not a grid size: '" + token + "'");
    }
    return v;
}

}  // namespace

void write_grid(std::ostream& os, const GridField& grid) {
    const RectDomain& d = grid.domain();
    os << "# " << d.nx << ' ' << d.ny << ' ' << format_double(d.lx) << ' ' << format_double(d.ly) << '\n';
    for (std::size_t j = 0; j < d.ny; ++j) {
        for (std::size_t i = 0; i < d.nx; ++i) {
            if (i) os << ' ';
            os << format_double(grid(i, j));
        }
        os << '\n';
    }
}

GridField read_grid(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.empty() || line[0] != '#') throw UsageError("grid dump: missing '#' header");
    std::istringstream header(line.substr(1));
    std::string snx, sny, slx, sly, extra;
    if (!(header >> snx >> sny >> slx >> sly) || (header >> extra)) {
        throw UsageError("grid dump: header must be '# nx ny lx ly'");
    }
    RectDomain dom{parse_double(slx), parse_double(sly), parse_size(snx), parse_size(sny)};
    dom.validate();

    std::vector<double> values;
    values.reserve(dom.nx * dom.ny);
    for (std::size_t j = 0; j < dom.ny; ++j) {
        if (!std::getline(is, line)) throw UsageError("grid dump: expected " + std::to_string(dom.ny) + " rows");
        std::istringstream row(line);
        std::string tok;
        std::size_t count = 0;
        while (row >> tok) {
            values.push_back(parse_double(tok));
            ++count;
        }
        if (count != dom.nx) {
            std::ostringstream os;
            os << "grid dump: row " << j << " has " << count << " values, expected " << dom.nx;
            throw UsageError(os.str());
        }
    }
    return GridField(dom, std::move(values));
}

void save_grid(const std::string& path, const GridField& grid) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_grid(os, grid);
    if (!os) throw std::runtime_error("failed writing " + path);
}

GridField load_grid(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    return read_grid(is);
}

void write_report_csv(std::ostream& os, const RunReport& report) {
    os << "step,rel_error_percent,increment_norm,wall_ms\n";
    for (const auto& row : report.rows) {
        os << row.step << ',' << format_double(row.rel_error_percent) << ',' << format_double(row.increment_norm)
           << ',' << format_double(row.wall_ms) << '\n';
    }
}

}  // namespace kmreg::io
