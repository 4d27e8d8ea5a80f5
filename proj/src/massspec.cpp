#include "flowtube/massspec.hpp"

#include "flowtube/elements.hpp"
#include "flowtube/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

namespace flowtube {

namespace {

// FWHM = 2 sqrt(2 ln 2) sigma
const double fwhm_per_sigma = 2.0 * std::sqrt(2.0 * std::log(2.0));

} // namespace

// ---------------------------------------------------------------------------
// Compositions and masses
// ---------------------------------------------------------------------------

Composition Composition::parse(std::string_view text) {
    Composition comp;
    std::size_t i = 0;
    const auto fail = [&](const std::string& why) {
        throw InvalidSpecError("cannot parse formula '" + std::string(text) + "': " + why);
    };
    if (text.empty()) fail("empty");
    while (i < text.size()) {
        const char e = text[i];
        if (e == '+') {
            if (i + 1 != text.size()) fail("'+' must be last");
            break;
        }
        int* slot = nullptr;
        switch (e) {
        case 'C': slot = &comp.c; break;
        case 'H': slot = &comp.h; break;
        case 'O': slot = &comp.o; break;
        case 'N': slot = &comp.n; break;
        default: fail(std::string("unsupported element '") + e + "'");
        }
        ++i;
        int count = 0;
        bool digits = false;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            count = count * 10 + (text[i] - '0');
            digits = true;
            ++i;
            if (count > 100000) fail("count too large");
        }
        *slot += digits ? count : 1;
    }
    if (comp.empty()) fail("no atoms");
    return comp;
}

std::string Composition::to_string() const {
    std::string out;
    const auto put = [&](const char* sym, int count) {
        if (count <= 0) return;
        out += sym;
        if (count > 1) out += std::to_string(count);
    };
    put("C", c);
    put("H", h);
    put("N", n);
    put("O", o);
    return out;
}

double monoisotopic_mass(const Composition& comp, int charge) {
    if (comp.empty()) throw InvalidSpecError("monoisotopic_mass: empty composition");
    if (comp.c < 0 || comp.h < 0 || comp.o < 0 || comp.n < 0) {
        throw InvalidSpecError("monoisotopic_mass: negative element count");
    }
    return elements::ion_mass(comp.c, comp.h, comp.o, comp.n, charge);
}

double resolution_sigma(double mz, double resolution) {
    return mz / resolution / fwhm_per_sigma;
}

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

void CalibrationParams::validate() const {
    if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw CalibrationError("calibration: a must be > 0 and b finite");
    }
    if (!(c > calibration_c_min && c < calibration_c_max)) {
        throw CalibrationError("calibration: exponent c outside (0.3, 0.7)");
    }
}

double CalibrationParams::mass(double t) const { return a * std::pow(t, c) + b; }

double CalibrationParams::flight_time(double m) const {
    if (!(m > b)) throw CalibrationError("calibration: mass below the calibration offset");
    return std::pow((m - b) / a, 1.0 / c);
}

double CalibrationParams::slope(double t) const { return a * c * std::pow(t, c - 1.0); }

namespace {

struct AbAtC {
    double a;
    double b;
};

AbAtC solve_ab(const CalibrationPoint& p1, const CalibrationPoint& p2, double c) {
    const double x1 = std::pow(p1.flight_time, c);
    const double x2 = std::pow(p2.flight_time, c);
    const double a = (p1.mass - p2.mass) / (x1 - x2);
    return {a, p1.mass - a * x1};
}

} // namespace

CalibrationParams calibrate(std::span<const CalibrationPoint> refs) {
    if (refs.size() != 3) {
        throw CalibrationError("calibrate: exactly three reference peaks are required");
    }
    std::vector<CalibrationPoint> p(refs.begin(), refs.end());
    std::sort(p.begin(), p.end(),
              [](const auto& l, const auto& r) { return l.flight_time < r.flight_time; });
    for (const auto& q : p) {
        if (!(q.flight_time > 0.0) || !std::isfinite(q.mass)) {
            throw CalibrationError("calibrate: flight times must be > 0 and masses finite");
        }
    }
    if (p[0].flight_time == p[1].flight_time || p[1].flight_time == p[2].flight_time) {
        throw CalibrationError("calibrate: two reference peaks share a flight time");
    }

    const auto residual = [&](double c) {
        const auto [a, b] = solve_ab(p[0], p[2], c);
        return a * std::pow(p[1].flight_time, c) + b - p[1].mass;
    };

    // Scan for sign changes, then polish the bracket nearest the ideal 0.5.
    constexpr int cells = 400;
    const double lo = calibration_c_min;
    const double step = (calibration_c_max - calibration_c_min) / cells;
    std::optional<std::pair<double, double>> bracket;
    double best_distance = std::numeric_limits<double>::infinity();
    double prev_c = lo + 1e-9;
    double prev_r = residual(prev_c);
    for (int i = 1; i <= cells; ++i) {
        const double c = i == cells ? calibration_c_max - 1e-9 : lo + i * step;
        const double r = residual(c);
        if (std::isfinite(r) && std::isfinite(prev_r) && (r == 0.0 || (prev_r < 0.0) != (r < 0.0))) {
            const double d = std::abs(0.5 * (prev_c + c) - 0.5);
            if (d < best_distance) {
                best_distance = d;
                bracket = {prev_c, c};
            }
        }
        prev_c = c;
        prev_r = r;
    }
    if (!bracket) {
        throw CalibrationError("calibrate: no exponent c in (0.3, 0.7) reproduces the references");
    }

    double c = 0.0;
    if (residual(bracket->second) == 0.0) {
        c = bracket->second;
    } else {
        std::uintmax_t iters = 200;
        const auto [l, r] = boost::math::tools::toms748_solve(
            residual, bracket->first, bracket->second, boost::math::tools::eps_tolerance<double>(52),
            iters);
        c = 0.5 * (l + r);
        if (std::abs(residual(r)) < std::abs(residual(c))) c = r;
        if (std::abs(residual(l)) < std::abs(residual(c))) c = l;
    }
    const auto [a, b] = solve_ab(p[0], p[2], c);
    CalibrationParams out{a, b, c};
    out.validate();
    return out;
}

CalibrationParams calibrate_fixed_exponent(std::span<const CalibrationPoint> refs, double c) {
    if (refs.size() < 2) throw CalibrationError("calibrate_fixed_exponent: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& q : refs) {
        const double x = std::pow(q.flight_time, c);
        sx += x;
        sy += q.mass;
        sxx += x * x;
        sxy += x * q.mass;
    }
    const double n = static_cast<double>(refs.size());
    const double det = n * sxx - sx * sx;
    if (det == 0.0) throw CalibrationError("calibrate_fixed_exponent: coincident flight times");
    const double a = (n * sxy - sx * sy) / det;
    const double b = (sy - a * sx) / n;
    if (!(a > 0.0)) throw CalibrationError("calibrate_fixed_exponent: non-positive scale");
    return {a, b, c};
}

// ---------------------------------------------------------------------------
// Formula assignment
// ---------------------------------------------------------------------------

FormulaIndex::FormulaIndex(const ElementBounds& bounds) : bounds_(bounds) {
    if (bounds.c_max < 0 || bounds.h_max < 0 || bounds.o_max < 0 || bounds.n_max < 0) {
        throw InvalidSpecError("element bounds must be >= 0");
    }
    table_ = kernels::enumerate_formulas_omp(bounds);
    std::stable_sort(table_.begin(), table_.end(),
                     [](const auto& l, const auto& r) { return l.mass < r.mass; });
}

std::vector<FormulaAssignment> FormulaIndex::match(double observed_mz, double tolerance,
                                                   std::span<const Composition> database) const {
    if (!(observed_mz > 0.0)) throw InvalidSpecError("assign_formula: observed m/z must be > 0");
    if (!(tolerance > 0.0)) throw InvalidSpecError("assign_formula: tolerance must be > 0");

    const auto first = std::lower_bound(
        table_.begin(), table_.end(), observed_mz - tolerance,
        [](const kernels::CandidateFormula& f, double v) { return f.mass < v; });
    std::vector<FormulaAssignment> out;
    for (auto it = first; it != table_.end() && it->mass <= observed_mz + tolerance; ++it) {
        const Composition comp{it->c, it->h, it->o, it->n};
        if (!database.empty()) {
            const bool listed = std::any_of(database.begin(), database.end(), [&](const Composition& d) {
                return d == comp || d + Composition{0, 1, 0, 0} == comp;
            });
            if (!listed) continue;
        }
        const double err = observed_mz - it->mass;
        if (std::abs(err) > tolerance) continue;
        out.push_back({comp, 1, it->mass, err, 0});
    }
    std::sort(out.begin(), out.end(), [](const FormulaAssignment& l, const FormulaAssignment& r) {
        const auto key = [](const FormulaAssignment& f) {
            const auto& c = f.composition;
            return std::make_tuple(std::abs(f.mass_error), c.heteroatoms(), c.c, c.n, c.o, c.h);
        };
        return key(l) < key(r);
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].candidate_rank = static_cast<int>(i + 1);
    return out;
}

namespace {
const ReferenceIon reference_ions[] = {
    {"H3O+", {0, 3, 1, 0}, true},
    {"C3H6OH+ (protonated acetone)", {3, 7, 1, 0}, true},
    {"C6H12H+ (protonated TME)", {6, 13, 0, 0}, true},
    {"C6H12OH+ (literal reading)", {6, 13, 1, 0}, false},
};
} // namespace

std::span<const ReferenceIon> reference_ion_table() { return reference_ions; }

std::vector<Composition> default_calibrant_ions() {
    std::vector<Composition> out;
    for (const auto& r : reference_ions) {
        if (r.default_calibrant) out.push_back(r.ion);
    }
    return out;
}

std::vector<FormulaAssignment> assign_formula(double observed_mz, double tolerance,
                                              const ElementBounds& bounds,
                                              std::span<const Composition> database) {
    return FormulaIndex(bounds).match(observed_mz, tolerance, database);
}

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

MassSpectrum::MassSpectrum(std::vector<double> flight_times, std::vector<double> intensities,
                           std::optional<CalibrationParams> calibration)
    : flight_times_(std::move(flight_times)),
      intensities_(std::move(intensities)),
      calibration_(calibration) {
    if (flight_times_.size() != intensities_.size()) {
        throw InvalidSpecError("MassSpectrum: flight_time and intensity lengths differ");
    }
    if (flight_times_.size() < 3) throw InvalidSpecError("MassSpectrum: fewer than 3 samples");
    for (std::size_t i = 0; i < flight_times_.size(); ++i) {
        if (!std::isfinite(flight_times_[i]) || !std::isfinite(intensities_[i])) {
            throw InvalidSpecError("MassSpectrum: non-finite sample at row " + std::to_string(i));
        }
        if (intensities_[i] < 0.0) {
            throw InvalidSpecError("MassSpectrum: negative intensity at row " + std::to_string(i));
        }
        if (i > 0 && !(flight_times_[i] > flight_times_[i - 1])) {
            throw InvalidSpecError("MassSpectrum: flight times not strictly increasing at row " +
                                   std::to_string(i));
        }
    }
    if (flight_times_.front() <= 0.0) throw InvalidSpecError("MassSpectrum: flight times must be > 0");
    if (calibration_) calibration_->validate();
}

void MassSpectrum::set_calibration(const CalibrationParams& calib) {
    calib.validate();
    calibration_ = calib;
}

const CalibrationParams& MassSpectrum::require_calibration() const {
    if (!calibration_) throw CalibrationError("spectrum is not calibrated");
    return *calibration_;
}

// ---------------------------------------------------------------------------
// Peaks
// ---------------------------------------------------------------------------

namespace {

struct Samples {
    std::span<const double> t;
    std::span<const double> y;
};

double median_of(std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return m;
}

double threshold_of(Samples s, const PeakDetectionOptions& opt) {
    const std::size_t n = s.y.size();
    const std::size_t segments =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::max(opt.noise_segments, 1)), 1, n);
    double best_mad = std::numeric_limits<double>::infinity();
    double best_median = 0.0;
    std::vector<double> buf;
    for (std::size_t k = 0; k < segments; ++k) {
        const std::size_t lo = k * n / segments;
        const std::size_t hi = (k + 1) * n / segments;
        buf.assign(s.y.begin() + static_cast<std::ptrdiff_t>(lo),
                   s.y.begin() + static_cast<std::ptrdiff_t>(hi));
        const double med = median_of(buf);
        for (auto& v : buf) v = std::abs(v - med);
        const double mad = median_of(buf);
        if (mad < best_mad || (mad == best_mad && med < best_median)) {
            best_mad = mad;
            best_median = med;
        }
    }
    return std::max(best_median + opt.noise_sigmas * 1.4826 * best_mad, opt.absolute_floor);
}

// Samples spanned by +-1 sigma around index i (at least one).
std::size_t half_window(Samples s, const CalibrationParams& calib, std::size_t i, double resolution) {
    const double m = calib.mass(s.t[i]);
    const double sig_t = resolution_sigma(m, resolution) / calib.slope(s.t[i]);
    const std::size_t l = i > 0 ? i - 1 : i;
    const std::size_t r = i + 1 < s.t.size() ? i + 1 : i;
    const double dt = (s.t[r] - s.t[l]) / static_cast<double>(std::max<std::size_t>(r - l, 1));
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(sig_t / dt)));
}

struct Centroid {
    double time;
    double height;
};

// Weighted parabola on ln y around index i (weights y^2, the inverse
// variance of ln y for counting noise).
Centroid refine(Samples s, std::size_t i, std::size_t k) {
    const std::size_t lo = i >= k ? i - k : 0;
    const std::size_t hi = std::min(s.t.size() - 1, i + k);
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    const double scale = std::max(s.t[hi] - s.t[lo], 1e-300);
    int used = 0;
    for (std::size_t j = lo; j <= hi; ++j) {
        if (!(s.y[j] > 0.0)) continue;
        const double x = (s.t[j] - s.t[i]) / scale;
        const double w = s.y[j] * s.y[j];
        const Eigen::Vector3d row(1.0, x, x * x);
        ata += w * row * row.transpose();
        atb += w * row * std::log(s.y[j]);
        ++used;
    }
    Centroid c{s.t[i], s.y[i]};
    if (used < 3) return c;
    const Eigen::Vector3d p = ata.ldlt().solve(atb);
    if (!(p[2] < 0.0) || !p.allFinite()) return c;
    double x = -p[1] / (2.0 * p[2]);
    const double x_lo = (s.t[lo] - s.t[i]) / scale;
    const double x_hi = (s.t[hi] - s.t[i]) / scale;
    if (x < x_lo || x > x_hi) return c;
    c.time = s.t[i] + x * scale;
    c.height = std::exp(p[0] + p[1] * x + p[2] * x * x);
    return c;
}

struct MassWindow {
    std::size_t lo;
    std::size_t hi;  // exclusive
};

MassWindow index_range(Samples s, const CalibrationParams& calib, double m_lo, double m_hi) {
    const auto t_of = [&](double m) {
        if (m <= calib.b) return 0.0;
        return calib.flight_time(m);
    };
    const double t_lo = t_of(m_lo);
    const double t_hi = t_of(m_hi);
    const auto lo = static_cast<std::size_t>(std::lower_bound(s.t.begin(), s.t.end(), t_lo) - s.t.begin());
    const auto hi = static_cast<std::size_t>(std::upper_bound(s.t.begin(), s.t.end(), t_hi) - s.t.begin());
    return {lo, std::max(lo, hi)};
}

PeakIntegral integrate_samples(Samples s, const CalibrationParams& calib, const Peak& peak,
                               std::span<const Peak> neighbours) {
    const double c = peak.centroid_mz;
    const double sig = peak.width_sigma;
    if (!(sig > 0.0)) throw InvalidSpecError("integrate_peak: width_sigma must be > 0");
    const MassWindow w = index_range(s, calib, c - 4.5 * sig, c + 4.5 * sig);
    // one sample of margin on each side for interpolation at the window edges
    const std::size_t lo = w.lo > 0 ? w.lo - 1 : 0;
    const std::size_t hi = std::min(s.t.size(), w.hi + 1);
    std::vector<double> m, y;
    for (std::size_t i = lo; i < hi; ++i) {
        m.push_back(calib.mass(s.t[i]));
        y.push_back(s.y[i]);
    }
    PeakIntegral out;
    const double win_lo = c - 2.0 * sig;
    const double win_hi = c + 2.0 * sig;
    const double spec_lo = calib.mass(s.t.front());
    const double spec_hi = calib.mass(s.t.back());
    out.partial_window = win_lo < spec_lo || win_hi > spec_hi;
    if (m.size() < 2) return out;

    // trapezoid of the piecewise-linear interpolant over [a, b]
    const auto integral = [&](double a, double b) {
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < m.size(); ++j) {
            const double x0 = std::max(a, m[j]);
            const double x1 = std::min(b, m[j + 1]);
            if (x1 <= x0) continue;
            const double slope = (y[j + 1] - y[j]) / (m[j + 1] - m[j]);
            const double y0 = y[j] + slope * (x0 - m[j]);
            const double y1 = y[j] + slope * (x1 - m[j]);
            acc += 0.5 * (y0 + y1) * (x1 - x0);
        }
        return acc;
    };
    const double a = std::max(win_lo, m.front());
    const double b = std::min(win_hi, m.back());
    if (b <= a) return out;
    const double raw = integral(a, b);

    const auto flank = [&](double f_lo, double f_hi) -> std::optional<double> {
        if (f_lo < spec_lo || f_hi > spec_hi) return std::nullopt;
        for (const auto& nb : neighbours) {
            if (std::abs(nb.centroid_mz - c) <= 1e-9 * c) continue;
            const double n_lo = nb.centroid_mz - 2.0 * nb.width_sigma;
            const double n_hi = nb.centroid_mz + 2.0 * nb.width_sigma;
            if (n_lo < f_hi && n_hi > f_lo) return std::nullopt;
        }
        double v = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (m[j] >= f_lo && m[j] <= f_hi) v = std::min(v, y[j]);
        }
        if (!std::isfinite(v)) return std::nullopt;
        return v;
    };
    const auto left = flank(c - 4.0 * sig, c - 3.0 * sig);
    const auto right = flank(c + 3.0 * sig, c + 4.0 * sig);
    double base_mid = 0.0;
    const double mid = 0.5 * (a + b);
    if (left && right) {
        const double xl = c - 3.5 * sig;
        const double xr = c + 3.5 * sig;
        base_mid = *left + (*right - *left) * (mid - xl) / (xr - xl);
    } else if (left) {
        base_mid = *left;
    } else if (right) {
        base_mid = *right;
    }
    out.area = raw - base_mid * (b - a);
    return out;
}

std::vector<Peak> detect_samples(Samples s, const CalibrationParams& calib,
                                 const PeakDetectionOptions& opt) {
    const double thr = threshold_of(s, opt);
    std::vector<Peak> peaks;
    const std::size_t n = s.t.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(s.y[i] > thr)) continue;
        if (s.y[i] <= s.y[i - 1] || s.y[i] < s.y[i + 1]) continue;
        const std::size_t k = half_window(s, calib, i, opt.resolution);
        bool is_max = true;
        for (std::size_t j = (i >= k ? i - k : 0); j < std::min(n, i + k + 1) && is_max; ++j) {
            if (j < i && s.y[j] >= s.y[i]) is_max = false;
            if (j > i && s.y[j] > s.y[i]) is_max = false;
        }
        if (!is_max) continue;
        const Centroid ct = refine(s, i, k);
        Peak p;
        p.centroid_time = ct.time;
        p.centroid_mz = calib.mass(ct.time);
        p.height = ct.height;
        p.width_sigma = resolution_sigma(p.centroid_mz, opt.resolution);
        peaks.push_back(p);
    }
    for (auto& p : peaks) p.area = integrate_samples(s, calib, p, peaks).area;
    return peaks;
}

std::optional<double> locate_samples(Samples s, const CalibrationParams& calib, double mass,
                                     double window_da, double threshold, double resolution) {
    // Nearest local maximum above threshold: a neighbouring ion can outgrow
    // the calibrant inside the search window.
    const MassWindow w = index_range(s, calib, mass - window_da, mass + window_da);
    std::optional<std::size_t> best;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = std::max<std::size_t>(w.lo, 1); i < std::min(w.hi, s.t.size() - 1); ++i) {
        if (!(s.y[i] > threshold) || s.y[i] <= s.y[i - 1] || s.y[i] < s.y[i + 1]) continue;
        const std::size_t k = half_window(s, calib, i, resolution);
        bool is_max = true;
        for (std::size_t j = (i >= k ? i - k : 0); j < std::min(s.t.size(), i + k + 1) && is_max; ++j) {
            if ((j < i && s.y[j] >= s.y[i]) || (j > i && s.y[j] > s.y[i])) is_max = false;
        }
        if (!is_max) continue;
        const double d = std::abs(calib.mass(s.t[i]) - mass);
        if (d < best_distance) {
            best_distance = d;
            best = i;
        }
    }
    if (!best) return std::nullopt;
    return refine(s, *best, half_window(s, calib, *best, resolution)).time;
}

} // namespace

double noise_threshold(const MassSpectrum& spectrum, const PeakDetectionOptions& options) {
    return threshold_of({spectrum.flight_times(), spectrum.intensities()}, options);
}

std::vector<Peak> detect_peaks(const MassSpectrum& spectrum, const PeakDetectionOptions& options) {
    return detect_samples({spectrum.flight_times(), spectrum.intensities()},
                          spectrum.require_calibration(), options);
}

std::optional<double> locate_peak_time(const MassSpectrum& spectrum, const CalibrationParams& calib,
                                       double mass, double window_da, double threshold,
                                       double resolution) {
    return locate_samples({spectrum.flight_times(), spectrum.intensities()}, calib, mass, window_da,
                          threshold, resolution);
}

PeakIntegral integrate_peak(const MassSpectrum& spectrum, const Peak& peak,
                            std::span<const Peak> neighbours) {
    return integrate_samples({spectrum.flight_times(), spectrum.intensities()},
                             spectrum.require_calibration(), peak, neighbours);
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

std::string_view to_string(VerdictKind kind) {
    switch (kind) {
    case VerdictKind::product: return "product";
    case VerdictKind::reactant: return "reactant";
    case VerdictKind::intermediate: return "intermediate";
    case VerdictKind::insignificant: return "insignificant";
    case VerdictKind::unclassifiable: return "unclassifiable";
    }
    return "unknown";
}

namespace {

struct Candidate {
    KineticKind kind;
    std::optional<KineticFit> fit;
    ModelScore score;
};

double curve_excursion(const KineticModel& m, double t0, double t1) {
    constexpr int grid = 200;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i <= grid; ++i) {
        const double v = eval_kinetic(m, t0 + (t1 - t0) * i / grid);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

} // namespace

TraceClassification classify_trace(const TimeSeries& trace, double reference_rate,
                                   const ClassifyOptions& options) {
    if (!(reference_rate > 0.0)) throw InvalidSpecError("classify_trace: reference k' must be > 0");
    const auto t = trace.times();
    const auto y = trace.signal();
    const std::size_t n = trace.size();
    const double t_first = t.front();
    const double t_last = t.back();

    double sum_sq = 0.0;
    for (double v : y) sum_sq += v * v;
    const double ssr_floor = 1e-30 * sum_sq + std::numeric_limits<double>::min();
    const auto score_of = [&](double ssr, std::size_t p) {
        return lsq::aicc(std::max(ssr, ssr_floor), n, p);
    };

    TraceClassification out;
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double ssr_const = 0.0;
    for (double v : y) ssr_const += (v - mean) * (v - mean);
    out.constant = {true, score_of(ssr_const, 1), ""};

    std::vector<Candidate> cands{{KineticKind::reactant, {}, {}},
                                 {KineticKind::product, {}, {}},
                                 {KineticKind::intermediate, {}, {}}};
    for (auto& c : cands) {
        KineticFitOptions fo;
        fo.solver = options.solver;
        try {
            c.fit = fit_kinetic(trace, c.kind, fo);
        } catch (const Error& e) {
            c.score = {false, 0.0, e.what()};
            continue;
        }
        const KineticFit& f = *c.fit;
        const KineticModel& m = f.model;
        ModelScore& s = c.score;
        s.aicc = score_of(f.ssr, f.free_parameters);
        if (!std::isfinite(f.ssr) || n <= f.free_parameters) {
            s.reason = "fit failed";
            continue;
        }
        const double resid_sd = std::sqrt(f.ssr / static_cast<double>(n - f.free_parameters));
        const double floor = options.min_excursion_snr * resid_sd;
        if (c.kind != KineticKind::intermediate) {
            if (!(m.amplitude > 0.0)) {
                s.reason = "wrong sign";
                continue;
            }
            if (!(curve_excursion(m, t_first, t_last) >= floor)) {
                s.reason = "no significant change";
                continue;
            }
        } else {
            const double kg = m.rate;
            const double kd = m.decay_rate;
            const double ratio = (m.secondary_amplitude * kd) / (m.amplitude * kg);
            if (!(ratio > 0.0) || kg == kd || !std::isfinite(ratio)) {
                s.reason = "monotone";
                continue;
            }
            const double t_star = m.time_offset + std::log(ratio) / (kd - kg);
            if (!(t_star > t_first && t_star < t_last)) {
                s.reason = "extremum outside sampled times";
                continue;
            }
            const double v_star = eval_kinetic(m, t_star);
            if (!(std::abs(v_star - eval_kinetic(m, t_first)) >= floor &&
                  std::abs(v_star - eval_kinetic(m, t_last)) >= floor)) {
                s.reason = "extremum not significant";
                continue;
            }
        }
        s.valid = true;
    }
    out.reactant = cands[0].score;
    out.product = cands[1].score;
    out.intermediate = cands[2].score;

    const Candidate* best = nullptr;
    double best_score = out.constant.aicc;
    bool any_fit = false;
    for (const auto& c : cands) {
        if (c.fit) any_fit = true;
        if (c.score.valid && c.score.aicc < best_score) {
            best = &c;
            best_score = c.score.aicc;
        }
    }
    if (!any_fit) return out;  // unclassifiable
    if (best == nullptr) {
        out.kind = VerdictKind::insignificant;
        out.fitted = KineticModel{KineticKind::reactant, 0.0, 0.0, 0.0, 0.0, 0.0, mean};
        return out;
    }
    out.fit = best->fit;
    out.fitted = best->fit->model;
    const double threshold = options.threshold_mode == ThresholdMode::absolute
                                 ? options.rate_threshold
                                 : options.relative_threshold * reference_rate;
    if (out.fitted.rate < threshold) {
        out.kind = VerdictKind::insignificant;
        return out;
    }
    out.primary_rate = out.fitted.rate;
    switch (best->kind) {
    case KineticKind::reactant: out.kind = VerdictKind::reactant; break;
    case KineticKind::product: out.kind = VerdictKind::product; break;
    case KineticKind::intermediate: out.kind = VerdictKind::intermediate; break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Workflow
// ---------------------------------------------------------------------------

namespace {

struct SpectrumRef {
    std::size_t time_index;
    std::size_t spectrum_index;
    const MassSpectrum* spectrum;
    std::string label;
};

struct Detection {
    Composition comp;
    double observed;
};

using CompKey = std::tuple<int, int, int, int>;

CompKey key_of(const Composition& c) { return {c.c, c.h, c.o, c.n}; }

} // namespace

WorkflowResult run_workflow(std::span<const TimedSpectra> data, const WorkflowConfig& config) {
    if (config.references.size() != 3) {
        throw CalibrationError("run_workflow: exactly three reference ions must be declared");
    }
    if (data.size() < TimeSeries::min_points) {
        throw InvalidSpecError("run_workflow: need at least " + std::to_string(TimeSeries::min_points) +
                               " reaction times");
    }
    config.nominal_calibration.validate();

    std::vector<SpectrumRef> all;
    for (std::size_t ti = 0; ti < data.size(); ++ti) {
        if (data[ti].spectra.empty()) {
            throw InvalidSpecError("run_workflow: no spectra at reaction time " +
                                   std::to_string(data[ti].reaction_time));
        }
        for (std::size_t si = 0; si < data[ti].spectra.size(); ++si) {
            std::string label = si < data[ti].labels.size()
                                    ? data[ti].labels[si]
                                    : "spectrum " + std::to_string(si) + " at t=" +
                                          std::to_string(data[ti].reaction_time) + " s";
            all.push_back({ti, si, &data[ti].spectra[si], std::move(label)});
        }
    }

    const FormulaIndex index(config.bounds);
    std::vector<double> ref_masses;
    for (const auto& r : config.references) ref_masses.push_back(monoisotopic_mass(r));

    // -- per spectrum: calibrate, detect, assign ---------------------------
    const std::size_t n_spec = all.size();
    std::vector<CalibrationParams> calibs(n_spec);
    std::vector<std::vector<Detection>> detections(n_spec);
    std::vector<std::string> errors(n_spec);
    std::vector<int> error_codes(n_spec, 0);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n_spec); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const SpectrumRef& ref = all[i];
        try {
            const Samples s{ref.spectrum->flight_times(), ref.spectrum->intensities()};
            const double thr = threshold_of(s, config.detection);
            std::vector<CalibrationPoint> pts;
            for (std::size_t r = 0; r < ref_masses.size(); ++r) {
                const auto tc = locate_samples(s, config.nominal_calibration, ref_masses[r],
                                               config.reference_window_da, thr,
                                               config.detection.resolution);
                if (!tc) {
                    throw CalibrationError("reference ion " + config.references[r].to_string() +
                                           "+ not found in " + ref.label);
                }
                pts.push_back({*tc, ref_masses[r]});
            }
            calibs[i] = calibrate(pts);
            for (const Peak& p : detect_samples(s, calibs[i], config.detection)) {
                const auto cands = index.match(p.centroid_mz, config.tolerance, config.database);
                if (cands.empty()) continue;
                detections[i].push_back({cands.front().composition, p.centroid_mz});
            }
        } catch (const Error& e) {
            errors[i] = e.what();
            error_codes[i] = e.exit_code();
        } catch (const std::exception& e) {
            errors[i] = e.what();
            error_codes[i] = 1;
        }
    }
    for (std::size_t i = 0; i < n_spec; ++i) {
        if (error_codes[i] == 0) continue;
        if (error_codes[i] == static_cast<int>(ErrorCategory::fit)) throw FitError(errors[i]);
        throw CalibrationError("run_workflow: " + errors[i]);
    }

    // -- peak list ---------------------------------------------------------
    std::map<CompKey, std::pair<std::size_t, double>> seen;  // spectra count, sum of errors
    for (const auto& det : detections) {
        std::map<CompKey, double> uniq;
        for (const auto& d : det) {
            const double err = d.observed - monoisotopic_mass(d.comp);
            auto [it, inserted] = uniq.emplace(key_of(d.comp), err);
            if (!inserted && std::abs(err) < std::abs(it->second)) it->second = err;
        }
        for (const auto& [k, err] : uniq) {
            auto& slot = seen[k];
            slot.first += 1;
            slot.second += err;
        }
    }
    std::vector<FormulaAssignment> listed;
    std::vector<double> fractions;
    for (const auto& [k, v] : seen) {
        const double frac = static_cast<double>(v.first) / static_cast<double>(n_spec);
        if (frac < config.min_detection_fraction) continue;
        const Composition comp{std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k)};
        if (std::find(config.exclude.begin(), config.exclude.end(), comp) != config.exclude.end()) {
            continue;
        }
        const double exact = monoisotopic_mass(comp);
        listed.push_back({comp, 1, exact, v.second / static_cast<double>(v.first), 1});
        fractions.push_back(frac);
    }
    std::vector<std::size_t> order(listed.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t l, std::size_t r) { return listed[l].exact_mass < listed[r].exact_mass; });

    std::vector<Peak> windows;
    for (std::size_t j : order) {
        Peak p;
        p.centroid_mz = listed[j].exact_mass;
        p.width_sigma = resolution_sigma(p.centroid_mz, config.detection.resolution);
        windows.push_back(p);
    }

    // -- integrate every listed formula in every spectrum ------------------
    const std::size_t n_species = windows.size();
    std::vector<std::vector<double>> area(n_spec, std::vector<double>(n_species, 0.0));
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n_spec); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const Samples s{all[i].spectrum->flight_times(), all[i].spectrum->intensities()};
        for (std::size_t k = 0; k < n_species; ++k) {
            area[i][k] = integrate_samples(s, calibs[i], windows[k], windows).area;
        }
    }

    WorkflowResult result;
    result.spectra = n_spec;
    result.calibrations.resize(data.size());
    for (std::size_t i = 0; i < n_spec; ++i) result.calibrations[all[i].time_index].push_back(calibs[i]);

    // average per reaction time, sorted by time
    std::vector<std::size_t> time_order(data.size());
    std::iota(time_order.begin(), time_order.end(), 0);
    std::sort(time_order.begin(), time_order.end(), [&](std::size_t l, std::size_t r) {
        return data[l].reaction_time < data[r].reaction_time;
    });
    std::vector<std::vector<double>> sums(data.size(), std::vector<double>(n_species, 0.0));
    for (std::size_t i = 0; i < n_spec; ++i) {
        for (std::size_t k = 0; k < n_species; ++k) sums[all[i].time_index][k] += area[i][k];
    }
    std::vector<TimeSeries> traces;
    for (std::size_t k = 0; k < n_species; ++k) {
        std::vector<double> tt, yy;
        for (std::size_t ti : time_order) {
            tt.push_back(data[ti].reaction_time);
            yy.push_back(sums[ti][k] / static_cast<double>(data[ti].spectra.size()));
        }
        traces.emplace_back(std::move(tt), std::move(yy));
    }

    // -- classify ----------------------------------------------------------
    std::size_t ref_k = n_species;
    for (std::size_t k = 0; k < n_species; ++k) {
        if (listed[order[k]].composition == config.reference_species) ref_k = k;
    }
    if (ref_k == n_species) {
        throw InvalidSpecError("run_workflow: reference species " +
                               config.reference_species.to_string() + "+ was not detected");
    }
    {
        // the reference rate only needs to be positive for classification
        ClassifyOptions opt = config.classify;
        opt.threshold_mode = ThresholdMode::absolute;
        opt.rate_threshold = 0.0;
        const auto ref = classify_trace(traces[ref_k], 1.0, opt);
        if (ref.kind == VerdictKind::unclassifiable || ref.kind == VerdictKind::insignificant) {
            throw FitError("run_workflow: the reference species trace shows no kinetics");
        }
        result.reference_rate = ref.primary_rate;
    }

    std::vector<TraceClassification> verdicts(n_species);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(n_species); ++kk) {
        const auto k = static_cast<std::size_t>(kk);
        verdicts[k] = classify_trace(traces[k], result.reference_rate, config.classify);
    }
    for (std::size_t k = 0; k < n_species; ++k) {
        SpeciesVerdict v;
        v.formula = listed[order[k]];
        v.kind = verdicts[k].kind;
        v.fitted = verdicts[k].fitted;
        v.rate = verdicts[k].primary_rate;
        v.ratio_to_reference = v.rate / result.reference_rate;
        v.trace = traces[k];
        v.detection_fraction = fractions[order[k]];
        result.species.push_back(std::move(v));
    }
    return result;
}

} // namespace flowtube
