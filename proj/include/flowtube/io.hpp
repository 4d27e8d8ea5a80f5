#pragma once

// Text file formats shared by the command-line tools:
//   trace     CSV, header `time_s,signal`
//   spectrum  CSV, header `flight_time,intensity`
//   manifest  JSON listing reaction times, spectrum files and calibrants
//
// Numbers are written in shortest round-trip form, so a write/read cycle
// reproduces every double exactly.

#include "flowtube/massspec.hpp"
#include "flowtube/timeseries.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace flowtube::io {

inline constexpr const char* trace_header = "time_s,signal";
inline constexpr const char* spectrum_header = "flight_time,intensity";

/// Throws InvalidSpecError naming the file for unreadable, empty or
/// malformed input.
TimeSeries read_trace_csv(const std::filesystem::path& path);
void write_trace_csv(std::ostream& out, const TimeSeries& trace);
void write_trace_csv(const std::filesystem::path& path, const TimeSeries& trace);

MassSpectrum read_spectrum_csv(const std::filesystem::path& path);
void write_spectrum_csv(std::ostream& out, const MassSpectrum& spectrum);
void write_spectrum_csv(const std::filesystem::path& path, const MassSpectrum& spectrum);

// ---------------------------------------------------------------------------
// Dataset manifest
// ---------------------------------------------------------------------------

struct ManifestEntry {
    double reaction_time = 0.0;                    // s
    std::vector<std::filesystem::path> spectra;
};

struct DatasetManifest {
    std::vector<Composition> references;           // calibrant ions
    std::optional<CalibrationParams> nominal_calibration;
    std::optional<Composition> reference_species;  // rate ratio denominator
    std::vector<ManifestEntry> entries;
};

/// Relative spectrum paths are resolved against the manifest's directory.
/// A manifest without "references" parses, the workflow rejects it later.
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Writes paths exactly as stored.
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Reads every spectrum listed, in manifest order.
std::vector<TimedSpectra> load_dataset(const DatasetManifest& manifest);

} // namespace flowtube::io
