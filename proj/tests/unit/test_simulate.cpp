#include "flowtube/errors.hpp"
#include "flowtube/massspec.hpp"
#include "flowtube/reference_data.hpp"
#include "flowtube/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <map>
#include <vector>

using namespace flowtube;

namespace {

bool same_bits(const TimeSeries& a, const TimeSeries& b) {
    return a.size() == b.size() && std::memcmp(a.signal().data(), b.signal().data(), a.size() * sizeof(double)) == 0 &&
           std::memcmp(a.times().data(), b.times().data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> reaction_times(int n) {
    std::vector<double> t;
    for (int i = 0; i < n; ++i) t.push_back(0.4 + i * (11.6 / (n - 1)));
    return t;
}

} // namespace

TEST_SUITE("simulate") {

TEST_CASE("short pulse reproduces the RTD shape") {
    const SymGaussParams rtd{1.0, 15.0, 1.0, 0.0};
    const double d = 1e-3;
    const auto trace = synth_rtd_trace(rtd, PulseSpec{d, 0.0, 1.0 / d}, 20.0, {}, {30.0, 100, true});
    const double peak = eval_sym_gaussian(rtd, rtd.mean);
    double worst = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        worst = std::max(worst, std::abs(trace.signal()[i] - eval_sym_gaussian(rtd, trace.times()[i])) / peak);
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("pulse area is conserved") {
    const SymGaussParams rtd{2.5, 20.0, 1.5, 0.0};
    for (double lag : {0.0, 0.3, 1.0, 2.0}) {
        const PulseSpec pulse{1.2, lag, 3.0};
        const auto trace = synth_rtd_trace(rtd, pulse, 10.0, {});
        CHECK(trace.trapezoid() == doctest::Approx(3.0 * 1.2 * 2.5).epsilon(1e-4));
    }
    const AsymGaussParams asym{2.0, 20.0, 1.0, 3.0, 0.0};
    const auto a0 = synth_rtd_trace(asym, PulseSpec{1.0, 0.0, 1.0}, 10.0, {}).trapezoid();
    const auto a1 = synth_rtd_trace(asym, PulseSpec{1.0, 1.5, 1.0}, 10.0, {}).trapezoid();
    CHECK(a1 == doctest::Approx(a0).epsilon(1e-4));
    const auto lam = synth_rtd_trace(LaminarRtd{5.0}, PulseSpec{0.5, 0.2, 1.0}, 20.0, {}, {400.0, 10, true});
    CHECK(lam.trapezoid() == doctest::Approx(0.5 * rtd_cumulative(LaminarRtd{5.0}, 400.0)).epsilon(1e-3));
}

TEST_CASE("controller lag pushes the symmetric fit late") {
    const SymGaussParams rtd{10.0, 20.0, 1.0, 0.05};
    const auto fit_mu = [&](double lag) {
        const auto trace = synth_rtd_trace(rtd, PulseSpec{1.0, lag, 1.0}, 10.0, {});
        const auto fit = fit_rtd(trace, RtdModel::symmetric);
        REQUIRE(fit.converged);
        return fit.position();
    };
    const double mu0 = fit_mu(0.0);
    const double mu1 = fit_mu(1.0);
    CHECK(mu0 == doctest::Approx(rtd.mean + 0.5).epsilon(1e-3));  // rectangular pulse centre
    CHECK(mu1 > mu0 + 0.5);
    const auto lagged = synth_rtd_trace(rtd, PulseSpec{1.0, 1.0, 1.0}, 10.0, {});
    const auto asym = fit_rtd(lagged, RtdModel::asymmetric);
    CHECK(std::get<AsymGaussParams>(asym.params).skewness > 0.0);
}

TEST_CASE("generators are deterministic") {
    const AsymGaussParams rtd{5.0, 30.0, 2.0, 2.0, 0.1};
    const PulseSpec pulse{1.0, 0.4, 1.0};
    const auto a = synth_rtd_trace(rtd, pulse, 5.0, {0.01, 42});
    const auto b = synth_rtd_trace(rtd, pulse, 5.0, {0.01, 42});
    const auto c = synth_rtd_trace(rtd, pulse, 5.0, {0.01, 43});
    const auto serial = synth_rtd_trace(rtd, pulse, 5.0, {0.01, 42}, {0.0, 10, false});
    CHECK(same_bits(a, b));
    CHECK_FALSE(same_bits(a, c));
    CHECK(same_bits(a, serial));

    const ReactionConditions cond{reference::ozone_concentration, reference::tme_initial_concentration, 293.15};
    const auto t = reaction_times(12);
    const auto k1 = synth_kinetic_dataset(cond, 2.1e-15, t, {}, {0.01, 7});
    const auto k2 = synth_kinetic_dataset(cond, 2.1e-15, t, {}, {0.01, 7});
    CHECK(same_bits(k1.organic, k2.organic));
    CHECK(same_bits(k1.product, k2.product));

    const CalibrationParams calib{0.70710678, 0.01, 0.502};
    const std::vector<SpectrumLine> lines{{Composition{3, 7, 1, 0}, 500.0}};
    const auto axis = flight_time_axis(calib, 50.0, 70.0);
    const auto s1 = synth_spectrum(lines, calib, default_resolution, axis, {1.0, 2.0, 9});
    const auto s2 = synth_spectrum(lines, calib, default_resolution, axis, {1.0, 2.0, 9});
    CHECK(std::memcmp(s1.intensities().data(), s2.intensities().data(), s1.size() * sizeof(double)) == 0);
}

TEST_CASE("pulse and noise validation") {
    CHECK_THROWS_AS(PulseSpec({0.0, 0.0, 1.0}).validate(), InvalidSpecError);
    CHECK_THROWS_AS(PulseSpec({1.0, -1.0, 1.0}).validate(), InvalidSpecError);
    CHECK_THROWS_AS(NoiseSpec({-0.1, 0}).validate(), InvalidSpecError);
    CHECK_THROWS_AS(synth_rtd_trace(SymGaussParams{}, PulseSpec{}, 0.0, {}), InvalidSpecError);
    const PulseSpec p{2.0, 0.5, 3.0};
    CHECK(p.cumulative(100.0) == doctest::Approx(6.0));
    CHECK(p.value(0.0) == 0.0);
}

TEST_CASE("noiseless kinetic dataset equals the oracle") {
    const ReactionConditions cond{reference::ozone_concentration, reference::tme_initial_concentration, 293.15};
    const auto t = reaction_times(12);
    const auto data = synth_kinetic_dataset(cond, 2.1e-15, t, {}, {});
    const auto truth = ode_oracle(cond, 2.1e-15, t);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(data.organic.signal()[i] == truth.organic[i]);
        CHECK(data.oxidant.signal()[i] == truth.oxidant[i]);
        CHECK(data.product.signal()[i] == truth.product[i]);
    }
    const std::vector<double> late{100.0, 200.0, 300.0, 400.0};
    const auto asym = synth_kinetic_dataset(cond, 2.1e-15, late, {1.0, 1.0, 0.25}, {});
    CHECK(asym.product.signal().back() == doctest::Approx(0.25 * reference::tme_initial_concentration).epsilon(1e-9));
}

TEST_CASE("reference-condition dataset fits within the oracle bias") {
    const ReactionConditions cond{reference::ozone_concentration, reference::tme_initial_concentration, 293.15};
    const auto data = synth_kinetic_dataset(cond, reference::tme_ozone_k, reaction_times(12), {}, {});
    const auto fit = fit_kinetic(data.organic, KineticKind::reactant);
    REQUIRE(fit.converged);
    const double kprime = reference::tme_ozone_k * reference::ozone_concentration;
    CHECK(std::abs(fit.model.rate / kprime - 1.0) <= 0.06);
}

TEST_CASE("spectrum generation") {
    const CalibrationParams calib{0.70710678, 0.01, 0.502};
    const auto axis = flight_time_axis(calib, 15.0, 110.0);
    const std::vector<SpectrumLine> refs{{Composition{0, 3, 1, 0}, 4e4}, {Composition{3, 7, 1, 0}, 2e3}, {Composition{6, 13, 0, 0}, 3e3}};
    const auto s = synth_spectrum(refs, calib, default_resolution, axis);
    CHECK_FALSE(s.calibration().has_value());

    // calibrants located from a rough guess give back the generating calibration
    const CalibrationParams guess{0.7072, 0.012, 0.502};
    std::vector<CalibrationPoint> pts;
    for (const auto& line : refs) {
        const double m = monoisotopic_mass(line.composition);
        const auto t = locate_peak_time(s, guess, m, 0.1, 1.0);
        REQUIRE(t.has_value());
        pts.push_back({*t, m});
    }
    const auto got = calibrate(pts);
    CHECK(std::abs(got.a / calib.a - 1.0) < 1e-6);
    CHECK(std::abs(got.b - calib.b) < 1e-6);
    CHECK(std::abs(got.c / calib.c - 1.0) < 1e-6);

    // single line round trip through calibration and assignment
    const std::vector<SpectrumLine> one{{Composition{4, 9, 1, 0}, 800.0}};
    const auto single = synth_spectrum(one, calib, default_resolution, axis, {}, true);
    const auto peaks = detect_peaks(single);
    REQUIRE(peaks.size() == 1);
    CHECK(assign_formula(peaks[0].centroid_mz).front().composition == Composition{4, 9, 1, 0});

    const std::vector<SpectrumLine> heavy{{Composition{10, 21, 0, 0}, 10.0}};
    CHECK_THROWS_AS(synth_spectrum(heavy, calib, default_resolution, axis), InvalidSpecError);
}

TEST_CASE("species models cover the ozonolysis run") {
    const auto species = ozonolysis_species_models();
    CHECK(species.size() == 35);
    std::map<KineticKind, int> counts;
    for (const auto& s : species) ++counts[s.model.kind];
    CHECK(counts[KineticKind::product] == 29);
    CHECK(counts[KineticKind::reactant] == 5);
    CHECK(counts[KineticKind::intermediate] == 1);
}

TEST_CASE("end-to-end workflow recovers every kind") {
    const WorkflowDatasetSpec spec = default_workflow_dataset_spec();
    const auto data = synth_workflow_dataset(spec);
    WorkflowConfig cfg;
    cfg.references = default_reference_ions();
    cfg.nominal_calibration = spec.calibration;
    const auto result = run_workflow(data, cfg);

    std::map<std::tuple<int, int, int, int>, const SyntheticSpecies*> truth;
    for (const auto& s : spec.species) truth[{s.ion.c, s.ion.h, s.ion.o, s.ion.n}] = &s;
    std::size_t matched = 0;
    for (const auto& v : result.species) {
        const auto& c = v.formula.composition;
        const auto it = truth.find({c.c, c.h, c.o, c.n});
        if (it == truth.end()) {
            CHECK(v.kind == VerdictKind::insignificant);
            continue;
        }
        ++matched;
        const auto& m = it->second->model;
        const VerdictKind want = m.kind == KineticKind::product    ? VerdictKind::product
                                 : m.kind == KineticKind::reactant ? VerdictKind::reactant
                                                                   : VerdictKind::intermediate;
        CHECK_MESSAGE(v.kind == want, v.formula.formula());
        CHECK_MESSAGE(std::abs(v.rate / m.rate - 1.0) <= 0.10, v.formula.formula());
    }
    CHECK(matched == spec.species.size());
}

}
