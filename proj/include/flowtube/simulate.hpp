#pragma once

// Synthetic experiments: tracer-pulse RTD traces, kinetic datasets and TOF
// spectra. Every generator is a pure function of its parameters and seed.

#include "flowtube/kinetics.hpp"
#include "flowtube/massspec.hpp"
#include "flowtube/rtd.hpp"
#include "flowtube/timeseries.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace flowtube {

struct PulseSpec {
    double duration = 1.0;            // s
    double mfc_response_time = 0.0;   // first-order lag constant, s
    double amplitude = 1.0;           // signal

    void validate() const;
    /// Integral of the lagged pulse from 0 to t.
    double cumulative(double t) const;
    /// Instantaneous lagged pulse value.
    double value(double t) const;
    /// Time after which the lagged pulse is negligible (< e^-40 of its peak).
    double support() const;
};

struct NoiseSpec {
    double relative_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct LaminarRtd {
    double tau = 1.0;  // s
};

using RtdShape = std::variant<SymGaussParams, AsymGaussParams, LaminarRtd>;

/// Cumulative integral of the RTD density (baseline excluded) up to t.
double rtd_cumulative(const RtdShape& shape, double t);

struct RtdSynthOptions {
    double duration = 0.0;  // trace length in s; 0 picks one that holds the whole response
    int oversample = 10;    // fine convolution cells per output sample
    bool parallel = true;   // OpenMP convolution (bit-identical to serial)
};

/// Lagged rectangular pulse convolved with the RTD density, sampled at
/// `sampling_rate` from t = 0, plus the RTD baseline, times (1 + sigma z).
TimeSeries synth_rtd_trace(const RtdShape& shape, const PulseSpec& pulse, double sampling_rate,
                           const NoiseSpec& noise, const RtdSynthOptions& options = {});

struct KineticSensitivity {
    double organic = 1.0;
    double oxidant = 1.0;
    double product = 1.0;
};

struct KineticDataset {
    TimeSeries organic;
    TimeSeries oxidant;
    TimeSeries product;
};

/// Bimolecular oracle sampled at `reaction_times`, scaled by sensitivities,
/// multiplicative noise drawn organic-first, then oxidant, then product.
KineticDataset synth_kinetic_dataset(const ReactionConditions& cond, double k,
                                     std::span<const double> reaction_times,
                                     const KineticSensitivity& sensitivity, const NoiseSpec& noise);

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

struct SpectrumLine {
    Composition composition;  // ion composition, singly charged
    double intensity = 0.0;   // peak area, counts Da
};

struct SpectrumNoise {
    double counting_scale = 0.0;  // sd = scale * sqrt(intensity); 1 mimics counting statistics
    double background = 0.0;      // flat counts per sample
    std::uint64_t seed = 0;
};

/// Flight times whose masses are uniform in ln m, `samples_per_sigma`
/// samples per peak sigma at the given resolution.
std::vector<double> flight_time_axis(const CalibrationParams& calib, double mass_lo, double mass_hi,
                                     double resolution = default_resolution,
                                     double samples_per_sigma = 6.0);

/// Gaussian per line at t = ((m - b)/a)^(1/c), mass-domain FWHM m/resolution.
/// Throws InvalidSpecError when a line falls outside the axis.
MassSpectrum synth_spectrum(std::span<const SpectrumLine> lines, const CalibrationParams& calib,
                            double resolution, std::vector<double> time_axis,
                            const SpectrumNoise& noise = {}, bool attach_calibration = false);

// ---------------------------------------------------------------------------
// Ozonolysis species set and workflow datasets
// ---------------------------------------------------------------------------

struct SyntheticSpecies {
    std::string name;
    Composition ion;
    KineticModel model;  // signal as peak area, counts Da
};

/// The 35 species of the TME ozonolysis run with their measured rates:
/// products A(1 - e^{-k't}) plus a 5% background, reactants A e^{-k't} plus
/// 5% background, and the rise-then-decay intermediate.
std::vector<SyntheticSpecies> ozonolysis_species_models(double amplitude_scale = 100.0);

struct WorkflowDatasetSpec {
    std::vector<SyntheticSpecies> species;
    std::vector<SpectrumLine> constant_lines;  // e.g. the reagent ion
    std::vector<double> reaction_times;
    int spectra_per_time = 2;
    CalibrationParams calibration{0.70710678, 0.01, 0.502};
    double calibration_jitter = 2e-5;  // relative sd of a per spectrum
    double resolution = default_resolution;
    double mass_lo = 15.0;
    double mass_hi = 130.0;
    double samples_per_sigma = 5.0;
    double trace_noise = 0.01;        // relative, shared by spectra at one reaction time
    double counting_scale = 1.0;
    double background = 2.0;
    std::uint64_t seed = 1;
};

/// Default spec: all 35 species, H3O+ reagent line, 20 reaction times 0.4-12 s.
WorkflowDatasetSpec default_workflow_dataset_spec();

std::vector<TimedSpectra> synth_workflow_dataset(const WorkflowDatasetSpec& spec);

/// Calibrant ions: H3O+, protonated acetone, protonated TME.
std::vector<Composition> default_reference_ions();

} // namespace flowtube
