#pragma once

// Time-of-flight mass calibration, peak detection and integration, exact-mass
// formula assignment and kinetic classification of every detected species.

#include "flowtube/kernels.hpp"
#include "flowtube/kinetics.hpp"
#include "flowtube/timeseries.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flowtube {

// ---------------------------------------------------------------------------
// Compositions and masses
// ---------------------------------------------------------------------------

struct Composition {
    int c = 0;
    int h = 0;
    int o = 0;
    int n = 0;

    bool empty() const { return c == 0 && h == 0 && o == 0 && n == 0; }
    int heteroatoms() const { return o + n; }
    Composition operator+(const Composition& other) const {
        return {c + other.c, h + other.h, o + other.o, n + other.n};
    }
    bool operator==(const Composition&) const = default;

    /// Accepts strings like "C3H7O", "H3O+", "C3H9NO", "NO2H+" (one trailing
    /// '+' allowed, element order free, repeated elements summed).
    static Composition parse(std::string_view text);
    /// Hill order: C, H, then N, O.
    std::string to_string() const;
};

using ElementBounds = kernels::ElementBounds;

/// Monoisotopic mass minus `charge` electron masses. Throws on an empty composition.
double monoisotopic_mass(const Composition& comp, int charge = 1);

/// Gaussian sigma (Da) of a peak at `mz` for resolving power m/FWHM.
double resolution_sigma(double mz, double resolution);

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

/// m(t) = a t^c + b
struct CalibrationParams {
    double a = 1.0;
    double b = 0.0;
    double c = 0.5;

    void validate() const;
    double mass(double flight_time) const;
    double flight_time(double mass) const;
    /// dm/dt at flight time t.
    double slope(double flight_time) const;
};

struct CalibrationPoint {
    double flight_time = 0.0;
    double mass = 0.0;
};

inline constexpr double calibration_c_min = 0.3;
inline constexpr double calibration_c_max = 0.7;

/// Exact three-point solve: bracketing root search on c with (a, b) solved
/// linearly at each c. Throws CalibrationError for coincident flight times
/// or when no root lies in (0.3, 0.7).
CalibrationParams calibrate(std::span<const CalibrationPoint> refs);

/// Least-squares (a, b) at a fixed exponent; at least two points.
CalibrationParams calibrate_fixed_exponent(std::span<const CalibrationPoint> refs, double c);

// ---------------------------------------------------------------------------
// Formula assignment
// ---------------------------------------------------------------------------

struct FormulaAssignment {
    Composition composition;
    int charge = 1;
    double exact_mass = 0.0;
    double mass_error = 0.0;  // observed - exact
    int candidate_rank = 0;   // 1 = best

    std::string formula() const { return composition.to_string() + "+"; }
};

/// Sorted table of every candidate ion in the element bounds.
class FormulaIndex {
public:
    explicit FormulaIndex(const ElementBounds& bounds = {});

    /// Candidates within tolerance, ranked by |error|, then fewer heteroatoms,
    /// then fewer carbons. An empty result means no match. When `database`
    /// is non-empty only ions equal to an entry or to an entry plus one H
    /// survive.
    std::vector<FormulaAssignment> match(double observed_mz, double tolerance,
                                         std::span<const Composition> database = {}) const;

    std::size_t size() const { return table_.size(); }
    const ElementBounds& bounds() const { return bounds_; }

private:
    ElementBounds bounds_;
    std::vector<kernels::CandidateFormula> table_;  // sorted by mass
};

struct ReferenceIon {
    const char* label;
    Composition ion;
    bool default_calibrant;
};

/// Calibrant ions. The third calibrant has two readings: protonated TME
/// (C6H13+, 85.101 Da, the calibrant in use) and the literal C6H12OH+
/// (C6H13O+, 101.096 Da).
std::span<const ReferenceIon> reference_ion_table();

/// Ions flagged default_calibrant, in table order.
std::vector<Composition> default_calibrant_ions();

inline constexpr double default_mass_tolerance = 0.03;

std::vector<FormulaAssignment> assign_formula(double observed_mz,
                                              double tolerance = default_mass_tolerance,
                                              const ElementBounds& bounds = {},
                                              std::span<const Composition> database = {});

// ---------------------------------------------------------------------------
// Spectra and peaks
// ---------------------------------------------------------------------------

class MassSpectrum {
public:
    MassSpectrum() = default;
    MassSpectrum(std::vector<double> flight_times, std::vector<double> intensities,
                 std::optional<CalibrationParams> calibration = std::nullopt);

    std::span<const double> flight_times() const { return flight_times_; }
    std::span<const double> intensities() const { return intensities_; }
    std::size_t size() const { return flight_times_.size(); }

    const std::optional<CalibrationParams>& calibration() const { return calibration_; }
    void set_calibration(const CalibrationParams& calib);
    /// Throws CalibrationError if uncalibrated.
    const CalibrationParams& require_calibration() const;

private:
    std::vector<double> flight_times_;
    std::vector<double> intensities_;
    std::optional<CalibrationParams> calibration_;
};

struct Peak {
    double centroid_mz = 0.0;  // Da
    double width_sigma = 0.0;  // Da
    double area = 0.0;         // counts Da
    double height = 0.0;       // counts
    double centroid_time = 0.0;
};

inline constexpr double default_resolution = 7000.0;

struct PeakDetectionOptions {
    double resolution = default_resolution;
    int noise_segments = 10;
    double noise_sigmas = 5.0;      // threshold = median + k * robust std
    double absolute_floor = 0.0;    // threshold never drops below this
};

/// Noise floor from the quietest of `noise_segments` contiguous segments
/// (smallest median absolute deviation).
double noise_threshold(const MassSpectrum& spectrum, const PeakDetectionOptions& options = {});

/// Local maxima (within +-1 sigma) above the noise floor, centroided by a
/// weighted parabola on log intensity. Needs a calibrated spectrum.
std::vector<Peak> detect_peaks(const MassSpectrum& spectrum, const PeakDetectionOptions& options = {});

/// Flight-time centroid of the local maximum nearest to `mass` within
/// +-window_da, using `calib` to map masses; nullopt when no maximum there
/// exceeds `threshold`.
std::optional<double> locate_peak_time(const MassSpectrum& spectrum, const CalibrationParams& calib,
                                       double mass, double window_da, double threshold,
                                       double resolution = default_resolution);

struct PeakIntegral {
    double area = 0.0;  // counts Da
    bool partial_window = false;
};

/// Trapezoid over [centroid - 2 sigma, centroid + 2 sigma] in the mass
/// domain minus a linear baseline through the flank windows [3 sigma,
/// 4 sigma] on each side (flank statistic: minimum). Flanks that overlap a
/// neighbour's +-2 sigma window are dropped.
PeakIntegral integrate_peak(const MassSpectrum& spectrum, const Peak& peak,
                            std::span<const Peak> neighbours = {});

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

enum class VerdictKind { product, reactant, intermediate, insignificant, unclassifiable };

std::string_view to_string(VerdictKind kind);

enum class ThresholdMode { absolute, relative };

struct ClassifyOptions {
    ThresholdMode threshold_mode = ThresholdMode::absolute;
    double rate_threshold = 0.02;       // 1/s, absolute mode
    double relative_threshold = 0.05;   // fraction of the reference rate
    // A model only counts if its curve moves by this many residual standard
    // deviations over the sampled times.
    double min_excursion_snr = 5.0;
    lsq::Options solver;
};

struct ModelScore {
    bool valid = false;
    double aicc = 0.0;
    std::string reason;
};

struct TraceClassification {
    VerdictKind kind = VerdictKind::unclassifiable;
    KineticModel fitted;
    double primary_rate = 0.0;  // k' (k'_grow for intermediates); 0 when insignificant
    std::optional<KineticFit> fit;
    ModelScore reactant, product, intermediate, constant;
};

/// Fits reactant, product, intermediate and constant models and keeps the
/// lowest AICc among the admissible ones.
TraceClassification classify_trace(const TimeSeries& trace, double reference_rate,
                                   const ClassifyOptions& options = {});

// ---------------------------------------------------------------------------
// Workflow
// ---------------------------------------------------------------------------

struct SpeciesVerdict {
    FormulaAssignment formula;
    VerdictKind kind = VerdictKind::unclassifiable;
    KineticModel fitted;
    double rate = 0.0;
    double ratio_to_reference = 0.0;
    TimeSeries trace;
    double detection_fraction = 0.0;
};

struct TimedSpectra {
    double reaction_time = 0.0;
    std::vector<MassSpectrum> spectra;
    std::vector<std::string> labels;  // optional, used in error messages
};

struct WorkflowConfig {
    std::vector<Composition> references;     // three calibrant ions
    CalibrationParams nominal_calibration;   // used to locate the calibrants
    double reference_window_da = 0.1;
    Composition reference_species{6, 13, 0, 0};  // ratio denominator (protonated C6H12)
    double tolerance = default_mass_tolerance;
    ElementBounds bounds;
    std::vector<Composition> database;
    std::vector<Composition> exclude;         // ions left out of classification
    double min_detection_fraction = 0.5;
    PeakDetectionOptions detection;
    ClassifyOptions classify;
};

struct WorkflowResult {
    std::vector<SpeciesVerdict> species;    // ascending exact mass
    double reference_rate = 0.0;
    std::vector<std::vector<CalibrationParams>> calibrations;  // [time][spectrum]
    std::size_t spectra = 0;
};

/// Per spectrum: calibrate on the references, detect and assign peaks. Then
/// keep formulas seen in at least `min_detection_fraction` of spectra,
/// integrate each in every spectrum, average per reaction time and classify.
WorkflowResult run_workflow(std::span<const TimedSpectra> data, const WorkflowConfig& config);

} // namespace flowtube
