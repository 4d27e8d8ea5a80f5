#pragma once

// Command-line front end. Subcommands:
//   design           residence time, flow balance, restrictor sizing, flow regime
//   rtd-fit          RTD model fits over a batch of trace files
//   kinetics         kinetic model fits, optional bimolecular k
//   ms               full mass-spectrum workflow from a dataset manifest
//   simulate rtd|kinetics|ms   synthetic input files
//
// Exit codes: 0 success, 1 input/parse error, 2 physical-validity error,
// 3 fit non-convergence.

#include <iosfwd>
#include <string_view>

namespace flowtube::cli {

enum class Format { text, csv, json };

/// "1bar", "950 mbar", "2e4Pa", "0.5 atm", "760torr"; a bare number is Pa.
double parse_pressure(std::string_view text);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace flowtube::cli
