#include "flowtube/io.hpp"

#include "flowtube/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

namespace flowtube::io {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, const fs::path& path, std::size_t line) {
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw InvalidSpecError(fmt::format("{}:{}: '{}' is not a number", path.string(), line, text));
    }
    return v;
}

// Two numeric columns under a fixed header.
std::pair<std::vector<double>, std::vector<double>> read_two_columns(const fs::path& path,
                                                                     std::string_view header) {
    std::ifstream in(path);
    if (!in) throw InvalidSpecError(fmt::format("{}: cannot open file", path.string()));

    std::vector<double> a;
    std::vector<double> b;
    std::string raw;
    std::size_t line = 0;
    bool seen_header = false;
    while (std::getline(in, raw)) {
        ++line;
        const std::string_view row = trim(raw);
        if (row.empty()) continue;
        if (!seen_header) {
            if (row != header) {
                throw InvalidSpecError(fmt::format("{}:{}: expected header '{}', got '{}'", path.string(),
                                                   line, header, row));
            }
            seen_header = true;
            continue;
        }
        const auto comma = row.find(',');
        if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
            throw InvalidSpecError(fmt::format("{}:{}: expected two comma-separated values", path.string(), line));
        }
        a.push_back(parse_number(row.substr(0, comma), path, line));
        b.push_back(parse_number(row.substr(comma + 1), path, line));
    }
    if (!seen_header) throw InvalidSpecError(fmt::format("{}: file is empty", path.string()));
    if (a.empty()) throw InvalidSpecError(fmt::format("{}: no data rows", path.string()));
    return {std::move(a), std::move(b)};
}

void write_two_columns(std::ostream& out, std::string_view header, std::span<const double> a,
                       std::span<const double> b) {
    std::string buf;
    buf.reserve(a.size() * 40 + header.size() + 1);
    buf.append(header);
    buf.push_back('\n');
    for (std::size_t i = 0; i < a.size(); ++i) fmt::format_to(std::back_inserter(buf), "{},{}\n", a[i], b[i]);
    out << buf;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw InvalidSpecError(fmt::format("{}: cannot open for writing", path.string()));
    return out;
}

// Re-throws construction failures with the file name attached.
template <class F>
auto with_file_context(const fs::path& path, F&& make) {
    try {
        return make();
    } catch (const InvalidSpecError& e) {
        throw InvalidSpecError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

} // namespace

// ---------------------------------------------------------------------------

TimeSeries read_trace_csv(const fs::path& path) {
    auto [t, y] = read_two_columns(path, trace_header);
    return with_file_context(path, [&] { return TimeSeries(std::move(t), std::move(y)); });
}

void write_trace_csv(std::ostream& out, const TimeSeries& trace) {
    write_two_columns(out, trace_header, trace.times(), trace.signal());
}

void write_trace_csv(const fs::path& path, const TimeSeries& trace) {
    auto out = open_out(path);
    write_trace_csv(out, trace);
}

MassSpectrum read_spectrum_csv(const fs::path& path) {
    auto [t, y] = read_two_columns(path, spectrum_header);
    return with_file_context(path, [&] { return MassSpectrum(std::move(t), std::move(y)); });
}

void write_spectrum_csv(std::ostream& out, const MassSpectrum& spectrum) {
    write_two_columns(out, spectrum_header, spectrum.flight_times(), spectrum.intensities());
}

void write_spectrum_csv(const fs::path& path, const MassSpectrum& spectrum) {
    auto out = open_out(path);
    write_spectrum_csv(out, spectrum);
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

DatasetManifest read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidSpecError(fmt::format("{}: cannot open manifest", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidSpecError(fmt::format("{}: {}", path.string(), e.what()));
    }

    const fs::path base = path.parent_path();
    DatasetManifest m;
    try {
        if (doc.contains("references")) {
            for (const auto& r : doc.at("references")) {
                m.references.push_back(Composition::parse(r.get<std::string>()));
            }
        }
        if (doc.contains("nominal_calibration")) {
            const auto& c = doc.at("nominal_calibration");
            CalibrationParams p{c.at("a").get<double>(), c.at("b").get<double>(), c.at("c").get<double>()};
            p.validate();
            m.nominal_calibration = p;
        }
        if (doc.contains("reference_species")) {
            m.reference_species = Composition::parse(doc.at("reference_species").get<std::string>());
        }
        for (const auto& e : doc.at("reaction_times")) {
            ManifestEntry entry;
            entry.reaction_time = e.at("time_s").get<double>();
            for (const auto& f : e.at("spectra")) {
                fs::path p = f.get<std::string>();
                entry.spectra.push_back(p.is_absolute() ? p : base / p);
            }
            m.entries.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw InvalidSpecError(fmt::format("{}: {}", path.string(), e.what()));
    } catch (const Error& e) {
        throw InvalidSpecError(fmt::format("{}: {}", path.string(), e.what()));
    }
    if (m.entries.empty()) throw InvalidSpecError(fmt::format("{}: no reaction times listed", path.string()));
    return m;
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest) {
    json doc = json::object();
    json refs = json::array();
    for (const auto& r : manifest.references) refs.push_back(r.to_string() + "+");
    doc["references"] = refs;
    if (manifest.nominal_calibration) {
        const auto& c = *manifest.nominal_calibration;
        doc["nominal_calibration"] = {{"a", c.a}, {"b", c.b}, {"c", c.c}};
    }
    if (manifest.reference_species) doc["reference_species"] = manifest.reference_species->to_string() + "+";
    json times = json::array();
    for (const auto& e : manifest.entries) {
        json files = json::array();
        for (const auto& f : e.spectra) files.push_back(f.generic_string());
        times.push_back({{"time_s", e.reaction_time}, {"spectra", files}});
    }
    doc["reaction_times"] = times;
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

std::vector<TimedSpectra> load_dataset(const DatasetManifest& manifest) {
    std::vector<TimedSpectra> data;
    data.reserve(manifest.entries.size());
    for (const auto& e : manifest.entries) {
        TimedSpectra ts;
        ts.reaction_time = e.reaction_time;
        for (const auto& f : e.spectra) {
            ts.spectra.push_back(read_spectrum_csv(f));
            ts.labels.push_back(f.string());
        }
        data.push_back(std::move(ts));
    }
    return data;
}

} // namespace flowtube::io
