#include "flowtube/simulate.hpp"

#include "flowtube/errors.hpp"
#include "flowtube/kernels.hpp"
#include "flowtube/random.hpp"
#include "flowtube/reference_data.hpp"

#include <boost/math/special_functions/owens_t.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace flowtube {

// ---------------------------------------------------------------------------
// Pulse and noise
// ---------------------------------------------------------------------------

void PulseSpec::validate() const {
    if (!(duration > 0.0)) throw InvalidSpecError("PulseSpec: duration must be > 0");
    if (!(mfc_response_time >= 0.0)) throw InvalidSpecError("PulseSpec: mfc_response_time must be >= 0");
    if (!std::isfinite(amplitude)) throw InvalidSpecError("PulseSpec: amplitude must be finite");
}

double PulseSpec::cumulative(double t) const {
    if (t <= 0.0) return 0.0;
    const double lag = mfc_response_time;
    if (lag == 0.0) return amplitude * std::min(t, duration);
    if (t <= duration) return amplitude * (t + lag * std::expm1(-t / lag));
    const double at_end = amplitude * (duration + lag * std::expm1(-duration / lag));
    const double level = -amplitude * std::expm1(-duration / lag);
    return at_end - level * lag * std::expm1(-(t - duration) / lag);
}

double PulseSpec::value(double t) const {
    if (t < 0.0) return 0.0;
    const double lag = mfc_response_time;
    if (lag == 0.0) return t < duration ? amplitude : 0.0;
    if (t < duration) return -amplitude * std::expm1(-t / lag);
    return -amplitude * std::expm1(-duration / lag) * std::exp(-(t - duration) / lag);
}

double PulseSpec::support() const { return duration + 40.0 * mfc_response_time; }

void NoiseSpec::validate() const {
    if (!(relative_sigma >= 0.0)) throw InvalidSpecError("NoiseSpec: relative_sigma must be >= 0");
}

// ---------------------------------------------------------------------------
// RTD traces
// ---------------------------------------------------------------------------

double rtd_cumulative(const RtdShape& shape, double t) {
    if (const auto* s = std::get_if<SymGaussParams>(&shape)) {
        const double z = (t - s->mean) / s->width;
        return s->amplitude * 0.5 * std::erfc(-z / std::numbers::sqrt2);
    }
    if (const auto* a = std::get_if<AsymGaussParams>(&shape)) {
        // skew-normal CDF: Phi(z) - 2 T(z, beta)
        const double z = (t - a->position) / a->width;
        const double phi = 0.5 * std::erfc(-z / std::numbers::sqrt2);
        return a->amplitude * (phi - 2.0 * boost::math::owens_t(z, a->skewness));
    }
    const double tau = std::get<LaminarRtd>(shape).tau;
    if (t < 0.5 * tau) return 0.0;
    return 4.0 / 3.0 - tau * tau * tau / (6.0 * t * t * t);
}

namespace {

void validate_shape(const RtdShape& shape) {
    if (const auto* s = std::get_if<SymGaussParams>(&shape)) {
        s->validate();
    } else if (const auto* a = std::get_if<AsymGaussParams>(&shape)) {
        a->validate();
    } else if (!(std::get<LaminarRtd>(shape).tau > 0.0)) {
        throw InvalidSpecError("LaminarRtd: tau must be > 0");
    }
}

double default_duration(const RtdShape& shape, const PulseSpec& pulse) {
    if (const auto* s = std::get_if<SymGaussParams>(&shape)) {
        return s->mean + 10.0 * s->width + pulse.support();
    }
    if (const auto* a = std::get_if<AsymGaussParams>(&shape)) {
        return a->position + 10.0 * a->width + pulse.support();
    }
    return 30.0 * std::get<LaminarRtd>(shape).tau + pulse.support();
}

double shape_baseline(const RtdShape& shape) {
    if (const auto* s = std::get_if<SymGaussParams>(&shape)) return s->baseline;
    if (const auto* a = std::get_if<AsymGaussParams>(&shape)) return a->baseline;
    return 0.0;
}

} // namespace

TimeSeries synth_rtd_trace(const RtdShape& shape, const PulseSpec& pulse, double sampling_rate,
                           const NoiseSpec& noise, const RtdSynthOptions& options) {
    validate_shape(shape);
    pulse.validate();
    noise.validate();
    if (!(sampling_rate > 0.0)) throw InvalidSpecError("synth_rtd_trace: sampling_rate must be > 0");
    if (options.oversample < 1) throw InvalidSpecError("synth_rtd_trace: oversample must be >= 1");

    const double span = options.duration > 0.0 ? options.duration : default_duration(shape, pulse);
    const auto m = static_cast<std::size_t>(options.oversample);
    const double h = 1.0 / (sampling_rate * static_cast<double>(m));
    const auto n_out = static_cast<std::size_t>(std::floor(span * sampling_rate)) + 1;
    const std::size_t n_fine = (n_out - 1) * m + 1;

    // Exact cell averages of the lagged pulse and exact cell integrals of
    // the RTD, so the discrete convolution conserves area exactly.
    const auto n_pulse = std::min(n_fine, static_cast<std::size_t>(std::ceil(pulse.support() / h)) + 1);
    std::vector<double> u(n_pulse);
    for (std::size_t j = 0; j < n_pulse; ++j) {
        u[j] = (pulse.cumulative((j + 1) * h) - pulse.cumulative(j * h)) / h;
    }
    std::vector<double> kernel(n_fine);
    double prev = rtd_cumulative(shape, -h);
    for (std::size_t i = 0; i < n_fine; ++i) {
        const double cur = rtd_cumulative(shape, static_cast<double>(i) * h);
        kernel[i] = (cur - prev) / h;
        prev = cur;
    }
    const std::vector<double> fine = options.parallel ? kernels::convolve_omp(u, kernel, h)
                                                      : kernels::convolve_serial(u, kernel, h);

    Rng rng(noise.seed);
    const double base = shape_baseline(shape);
    std::vector<double> t(n_out), y(n_out);
    for (std::size_t i = 0; i < n_out; ++i) {
        t[i] = static_cast<double>(i) / sampling_rate;
        const double clean = fine[i * m] + base;
        y[i] = noise.relative_sigma > 0.0 ? clean * (1.0 + noise.relative_sigma * rng.normal()) : clean;
    }
    return TimeSeries(std::move(t), std::move(y));
}

// ---------------------------------------------------------------------------
// Kinetic datasets
// ---------------------------------------------------------------------------

KineticDataset synth_kinetic_dataset(const ReactionConditions& cond, double k,
                                     std::span<const double> reaction_times,
                                     const KineticSensitivity& sensitivity, const NoiseSpec& noise) {
    noise.validate();
    const OdeOracleResult truth = ode_oracle(cond, k, reaction_times);
    Rng rng(noise.seed);
    const auto series = [&](const std::vector<double>& conc, double sens) {
        std::vector<double> y(conc.size());
        for (std::size_t i = 0; i < conc.size(); ++i) {
            const double clean = conc[i] * sens;
            y[i] = noise.relative_sigma > 0.0 ? clean * (1.0 + noise.relative_sigma * rng.normal())
                                              : clean;
        }
        return TimeSeries(truth.times, std::move(y));
    };
    KineticDataset out;
    out.organic = series(truth.organic, sensitivity.organic);
    out.oxidant = series(truth.oxidant, sensitivity.oxidant);
    out.product = series(truth.product, sensitivity.product);
    return out;
}

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

std::vector<double> flight_time_axis(const CalibrationParams& calib, double mass_lo, double mass_hi,
                                     double resolution, double samples_per_sigma) {
    calib.validate();
    if (!(mass_lo > calib.b) || !(mass_hi > mass_lo)) {
        throw InvalidSpecError("flight_time_axis: need b < mass_lo < mass_hi");
    }
    if (!(resolution > 0.0) || !(samples_per_sigma > 0.0)) {
        throw InvalidSpecError("flight_time_axis: resolution and samples_per_sigma must be > 0");
    }
    const double step = resolution_sigma(1.0, resolution) / samples_per_sigma;  // in ln m
    const double l0 = std::log(mass_lo);
    const auto n = static_cast<std::size_t>(std::ceil((std::log(mass_hi) - l0) / step)) + 1;
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = calib.flight_time(std::exp(l0 + step * static_cast<double>(i)));
    return t;
}

MassSpectrum synth_spectrum(std::span<const SpectrumLine> lines, const CalibrationParams& calib,
                            double resolution, std::vector<double> time_axis,
                            const SpectrumNoise& noise, bool attach_calibration) {
    calib.validate();
    if (time_axis.size() < 3) throw InvalidSpecError("synth_spectrum: time axis too short");
    if (!(resolution > 0.0)) throw InvalidSpecError("synth_spectrum: resolution must be > 0");
    const double m_lo = calib.mass(time_axis.front());
    const double m_hi = calib.mass(time_axis.back());

    std::vector<kernels::GaussianLine> gauss;
    for (const auto& line : lines) {
        const double m = monoisotopic_mass(line.composition);
        if (m < m_lo || m > m_hi) {
            throw InvalidSpecError("synth_spectrum: " + line.composition.to_string() +
                                   "+ lies outside the calibrated range");
        }
        if (!(line.intensity >= 0.0)) throw InvalidSpecError("synth_spectrum: intensity must be >= 0");
        const double sig_m = resolution_sigma(m, resolution);
        const double tc = calib.flight_time(m);
        const double sig_t = sig_m / calib.slope(tc);
        gauss.push_back({tc, sig_t, line.intensity / (sig_m * std::sqrt(2.0 * std::numbers::pi))});
    }
    std::vector<double> y(time_axis.size(), noise.background);
    kernels::add_gaussians_omp(time_axis, gauss, y);
    if (noise.counting_scale > 0.0) {
        Rng rng(noise.seed);
        for (double& v : y) v = std::max(0.0, v + noise.counting_scale * std::sqrt(v) * rng.normal());
    }
    return MassSpectrum(std::move(time_axis), std::move(y),
                        attach_calibration ? std::optional<CalibrationParams>(calib) : std::nullopt);
}

// ---------------------------------------------------------------------------
// Ozonolysis datasets
// ---------------------------------------------------------------------------

std::vector<SyntheticSpecies> ozonolysis_species_models(double amplitude_scale) {
    std::vector<SyntheticSpecies> out;
    std::size_t i = 0;
    for (const auto& r : reference::ozonolysis_species()) {
        SyntheticSpecies s;
        s.name = r.name;
        s.ion = Composition::parse(r.ion);
        const double a = amplitude_scale * (1.0 + 0.25 * static_cast<double>(i % 5));
        switch (r.kind) {
        case KineticKind::product:
            s.model = {KineticKind::product, a, 0.0, r.rate, 0.0, 0.0, 0.05 * a};
            break;
        case KineticKind::reactant:
            s.model = {KineticKind::reactant, a, 0.0, r.rate, 0.0, 0.0, 0.05 * a};
            break;
        case KineticKind::intermediate: {
            const double scale = 2.0 * amplitude_scale;
            s.model = {KineticKind::intermediate, 0.1 * scale, 0.528 * scale, r.rate, r.decay_rate, 3.0, 0.0};
            break;
        }
        }
        out.push_back(std::move(s));
        ++i;
    }
    return out;
}

std::vector<Composition> default_reference_ions() {
    return default_calibrant_ions();
}

WorkflowDatasetSpec default_workflow_dataset_spec() {
    WorkflowDatasetSpec spec;
    spec.species = ozonolysis_species_models();
    spec.constant_lines.push_back({Composition{0, 3, 1, 0}, 400.0});
    for (int i = 0; i < 20; ++i) spec.reaction_times.push_back(0.4 + i * (11.6 / 19.0));
    return spec;
}

std::vector<TimedSpectra> synth_workflow_dataset(const WorkflowDatasetSpec& spec) {
    if (spec.spectra_per_time < 1) throw InvalidSpecError("synth_workflow_dataset: spectra_per_time < 1");
    const std::vector<double> axis = flight_time_axis(spec.calibration, spec.mass_lo, spec.mass_hi,
                                                      spec.resolution, spec.samples_per_sigma);
    Rng rng(spec.seed);
    std::vector<TimedSpectra> out;
    for (double t : spec.reaction_times) {
        TimedSpectra ts;
        ts.reaction_time = t;
        std::vector<SpectrumLine> lines = spec.constant_lines;
        for (const auto& s : spec.species) {
            const double factor = 1.0 + spec.trace_noise * rng.normal();
            lines.push_back({s.ion, std::max(0.0, eval_kinetic(s.model, t) * factor)});
        }
        for (int k = 0; k < spec.spectra_per_time; ++k) {
            CalibrationParams calib = spec.calibration;
            calib.a *= 1.0 + spec.calibration_jitter * rng.normal();
            SpectrumNoise noise{spec.counting_scale, spec.background, rng.next()};
            ts.spectra.push_back(synth_spectrum(lines, calib, spec.resolution, axis, noise));
            ts.labels.push_back("t=" + std::to_string(t) + "s #" + std::to_string(k));
        }
        out.push_back(std::move(ts));
    }
    return out;
}

} // namespace flowtube
