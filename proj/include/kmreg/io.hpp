#pragma once

#include <iosfwd>
#include <string>

#include "kmreg/harness.hpp"
#include "kmreg/spectral.hpp"

namespace kmreg::io {

/// Grid dump: a header line "# nx ny lx ly", then ny rows of nx
/// space-separated values (y outer), each written with 17 significant digits.
void write_grid(std::ostream& os, const GridField& grid);
GridField read_grid(std::istream& is);

void save_grid(const std::string& path, const GridField& grid);
GridField load_grid(const std::string& path);

/// CSV with header step,rel_error_percent,increment_norm,wall_ms.
void write_report_csv(std::ostream& os, const RunReport& report);

/// Locale-independent decimal with 17 significant digits.
std::string format_double(double v);
/// Throws UsageError unless the whole token is a decimal number.
double parse_double(const std::string& token);

}  // namespace kmreg::io
