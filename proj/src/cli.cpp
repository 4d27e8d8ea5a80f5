#include "flowtube/cli.hpp"

#include "flowtube/errors.hpp"
#include "flowtube/io.hpp"
#include "flowtube/kinetics.hpp"
#include "flowtube/massspec.hpp"
#include "flowtube/reactor.hpp"
#include "flowtube/reference_data.hpp"
#include "flowtube/rtd.hpp"
#include "flowtube/simulate.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace flowtube::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

std::string g6(double v) { return fmt::format("{:.6g}", v); }

std::string csv_cell(const ojson& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) return fmt::format("{}", v.get<double>());
    if (v.is_number_integer()) return fmt::format("{}", v.get<long long>());
    if (v.is_number_unsigned()) return fmt::format("{}", v.get<unsigned long long>());
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    }
    return s;
}

// Records share the key order of the first record.
std::string render_csv(const ojson& records) {
    std::string out;
    if (records.empty()) return out;
    std::vector<std::string> keys;
    for (const auto& [k, v] : records.front().items()) keys.push_back(k);
    for (std::size_t i = 0; i < keys.size(); ++i) out += (i ? "," : "") + keys[i];
    out += '\n';
    for (const auto& r : records) {
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (i) out += ',';
            out += r.contains(keys[i]) ? csv_cell(r.at(keys[i])) : "";
        }
        out += '\n';
    }
    return out;
}

struct Report {
    std::string command;
    ojson records = ojson::array();
    ojson summary = ojson::object();
    std::string text;  // human-readable rendering
};

struct OutputOptions {
    std::string format = "text";
    std::string path;
};

void add_output_options(CLI::App* cmd, OutputOptions& o) {
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"text", "csv", "json"}))
        ->capture_default_str();
    cmd->add_option("-o,--output", o.path, "Write the report here instead of stdout");
}

void emit(const Report& r, const OutputOptions& o, std::ostream& out) {
    std::string body;
    if (o.format == "json") {
        ojson doc = ojson::object();
        doc["command"] = r.command;
        doc["records"] = r.records;
        doc["summary"] = r.summary;
        body = doc.dump(2) + "\n";
    } else if (o.format == "csv") {
        body = render_csv(r.records);
    } else {
        body = r.text;
    }
    if (o.path.empty()) {
        out << body;
        return;
    }
    std::ofstream f(o.path);
    if (!f) throw InvalidSpecError(fmt::format("cannot open '{}' for writing", o.path));
    f << body;
}

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// ---------------------------------------------------------------------------
// design
// ---------------------------------------------------------------------------

struct DesignArgs {
    double radius_mm = reference::radius_m * 1e3;
    double fixed_length_cm = reference::fixed_length_m * 1e2;
    double length_cm = 0.0;
    double inlet_a_length_cm = reference::inlet_length_a_m * 1e2;
    double inlet_b_length_cm = reference::inlet_length_b_m * 1e2;
    double flow_a = reference::flow_a_sccm;
    double flow_b = reference::flow_b_sccm;
    double sampling_flow = 50.0;
    double pump_flow = 0.0;
    std::optional<double> reactor_flow;
    double restrictor_radius_um = 65.0;
    std::optional<double> restrictor_length_cm;
    std::optional<std::string> target_dp;
    double shrinkage = 0.5;
    std::optional<double> restrictor_flow;
    std::optional<double> upstream_radius_mm;
    double viscosity = 1.81e-5;
    double density = 1.20;
    double diffusivity = 1.0e-5;
    double temperature = 293.0;
    double pressure = StandardConditions::pressure_pa;
    double taylor_aris_threshold = default_taylor_aris_threshold;
    OutputOptions output;
};

void add_design(CLI::App& app, DesignArgs& a) {
    auto* c = app.add_subcommand("design", "Reactor residence time, flow balance, restrictor and flow regime");
    c->add_option("--radius-mm", a.radius_mm, "Reactor internal radius r")->capture_default_str();
    c->add_option("--fixed-length-cm", a.fixed_length_cm, "Tee-to-detector length l0")->capture_default_str();
    c->add_option("--length-cm", a.length_cm, "Variable reaction length L")->capture_default_str();
    c->add_option("--inlet-a-length-cm", a.inlet_a_length_cm, "Inlet A length")->capture_default_str();
    c->add_option("--inlet-b-length-cm", a.inlet_b_length_cm, "Inlet B length")->capture_default_str();
    c->add_option("--flow-a", a.flow_a, "Inlet A flow, sccm")->capture_default_str();
    c->add_option("--flow-b", a.flow_b, "Inlet B flow, sccm")->capture_default_str();
    c->add_option("--sampling-flow", a.sampling_flow, "Detector sampling flow Q0, sccm")->capture_default_str();
    c->add_option("--pump-flow", a.pump_flow, "Pump flow, sccm")->capture_default_str();
    c->add_option("--reactor-flow", a.reactor_flow,
                  "Total reactor flow, sccm; sets the pump flow to reactor - sampling")
        ->excludes("--pump-flow");
    c->add_option("--restrictor-radius-um", a.restrictor_radius_um, "Capillary radius r0")->capture_default_str();
    auto* len = c->add_option("--restrictor-length-cm", a.restrictor_length_cm, "Capillary length");
    c->add_option("--target-dp", a.target_dp, "Target restrictor pressure drop, e.g. 1bar (default 1bar)")
        ->excludes(len);
    c->add_option("--shrinkage", a.shrinkage, "Singular loss coefficient kappa")->capture_default_str();
    c->add_option("--restrictor-flow", a.restrictor_flow, "Flow through the capillary, sccm (default: sampling flow)");
    c->add_option("--upstream-radius-mm", a.upstream_radius_mm, "Radius before the contraction (default: reactor)");
    c->add_option("--viscosity", a.viscosity, "Gas dynamic viscosity, Pa s")->capture_default_str();
    c->add_option("--density", a.density, "Gas density, kg/m^3")->capture_default_str();
    c->add_option("--diffusivity", a.diffusivity, "Molecular diffusivity, m^2/s")->capture_default_str();
    c->add_option("--temperature", a.temperature, "Gas temperature, K")->capture_default_str();
    c->add_option("--pressure", a.pressure, "Gas pressure, Pa")->capture_default_str();
    c->add_option("--taylor-aris-threshold", a.taylor_aris_threshold, "tau/tau_diff needed for a symmetric RTD")
        ->capture_default_str();
    add_output_options(c, a.output);
}

Report run_design(const DesignArgs& a) {
    ReactorSpec spec;
    spec.radius_m = units::mm(a.radius_mm);
    spec.fixed_length_m = units::cm(a.fixed_length_cm);
    spec.variable_length_m = units::cm(a.length_cm);
    spec.inlet_length_a_m = units::cm(a.inlet_a_length_cm);
    spec.inlet_length_b_m = units::cm(a.inlet_b_length_cm);
    spec.flow_a = FlowRate(a.flow_a);
    spec.flow_b = FlowRate(a.flow_b);
    spec.sampling_flow = FlowRate(a.sampling_flow);
    double pump = a.pump_flow;
    if (a.reactor_flow) {
        pump = *a.reactor_flow - a.sampling_flow;
        if (pump < 0.0) {
            throw InvalidSpecError(fmt::format("reactor flow {} sccm is below the sampling flow {} sccm",
                                               *a.reactor_flow, a.sampling_flow));
        }
    }
    spec.pump_flow = FlowRate(pump);
    spec.validate_geometry();

    const FlowBalance balance = flow_balance(spec);
    if (balance.exhaust_sccm < 0.0) {
        throw BackDiffusionError(fmt::format(
            "back-diffusion: exhaust flow {} sccm < 0 (inlets {} sccm, reactor {} sccm)",
            g6(balance.exhaust_sccm), g6(a.flow_a + a.flow_b), g6(balance.reactor_sccm)));
    }
    const GasProperties gas(a.viscosity, a.density, a.diffusivity, a.temperature, a.pressure);
    const double tau = residence_time(spec);
    const RegimeReport regime = regime_report(spec, gas, a.taylor_aris_threshold);

    RestrictorGeometry geom;
    geom.radius_m = units::um(a.restrictor_radius_um);
    geom.shrinkage = a.shrinkage;
    geom.upstream_radius_m = a.upstream_radius_mm ? units::mm(*a.upstream_radius_mm) : spec.radius_m;
    geom.validate();
    const FlowRate q0(a.restrictor_flow.value_or(a.sampling_flow));
    double length_m = 0.0;
    std::optional<double> target_pa;
    if (a.restrictor_length_cm) {
        length_m = units::cm(*a.restrictor_length_cm);
    } else {
        target_pa = parse_pressure(a.target_dp.value_or("1bar"));
        length_m = restrictor_length_for_dp(geom, q0, gas, *target_pa);
    }
    const PressureDrop dp = capillary_pressure_drop({geom, length_m}, q0, gas);

    Report r;
    r.command = "design";
    ojson rec = ojson::object();
    rec["residence_time_s"] = tau;
    rec["reactor_flow_sccm"] = balance.reactor_sccm;
    rec["exhaust_flow_sccm"] = balance.exhaust_sccm;
    rec["operable"] = balance.operable;
    rec["restrictor_radius_um"] = a.restrictor_radius_um;
    rec["restrictor_flow_sccm"] = q0.sccm();
    rec["restrictor_length_cm"] = units::to_cm(length_m);
    rec["target_dp_pa"] = target_pa ? ojson(*target_pa) : ojson(nullptr);
    rec["dp_total_pa"] = dp.total_pa;
    rec["dp_regular_pa"] = dp.regular_pa;
    rec["dp_singular_pa"] = dp.singular_pa;
    rec["singular_fraction"] = dp.singular_fraction();
    rec["reynolds"] = regime.reynolds;
    rec["radial_diffusion_time_s"] = regime.radial_diffusion_time_s;
    rec["taylor_aris_ratio"] = regime.taylor_aris_ratio;
    rec["laminar"] = regime.laminar;
    rec["symmetric_rtd_expected"] = regime.symmetric_rtd_expected;
    r.records.push_back(rec);
    r.summary = rec;

    std::string& t = r.text;
    t += "Residence time\n";
    t += fmt::format("  tau                    {} s\n", g6(tau));
    t += "Flow balance\n";
    t += fmt::format("  reactor flow           {} sccm\n", g6(balance.reactor_sccm));
    t += fmt::format("  exhaust flow           {} sccm\n", g6(balance.exhaust_sccm));
    t += fmt::format("  operable               {}\n", balance.operable ? "yes" : "no");
    t += "Restrictor\n";
    t += fmt::format("  radius                 {} um\n", g6(a.restrictor_radius_um));
    t += fmt::format("  flow                   {} sccm\n", g6(q0.sccm()));
    t += fmt::format("  length                 {} cm\n", g6(units::to_cm(length_m)));
    t += fmt::format("  dP total               {} Pa\n", g6(dp.total_pa));
    t += fmt::format("  dP regular             {} Pa\n", g6(dp.regular_pa));
    t += fmt::format("  dP singular            {} Pa ({} %)\n", g6(dp.singular_pa), g6(100.0 * dp.singular_fraction()));
    t += "Flow regime\n";
    t += fmt::format("  Reynolds               {}\n", g6(regime.reynolds));
    t += fmt::format("  laminar                {}\n", regime.laminar ? "yes" : "no");
    t += fmt::format("  radial diffusion time  {} s\n", g6(regime.radial_diffusion_time_s));
    t += fmt::format("  tau / tau_diff         {}\n", g6(regime.taylor_aris_ratio));
    t += fmt::format("  symmetric RTD expected {}\n", regime.symmetric_rtd_expected ? "yes" : "no");
    return r;
}

// ---------------------------------------------------------------------------
// rtd-fit
// ---------------------------------------------------------------------------

struct RtdFitArgs {
    std::vector<std::string> files;
    std::string list;
    std::vector<double> tau;
    std::string model = "sym";
    double baseline_fraction = 0.05;
    OutputOptions output;
};

void add_rtd_fit(CLI::App& app, RtdFitArgs& a) {
    auto* c = app.add_subcommand("rtd-fit", "Fit RTD models to tracer traces");
    c->add_option("files", a.files, "Trace files (time_s,signal)");
    c->add_option("--list", a.list, "CSV with columns path,tau_s; paths relative to the list file");
    c->add_option("--tau", a.tau, "Expected residence time per positional file, s");
    c->add_option("--model", a.model, "RTD model")->check(CLI::IsMember({"sym", "asym"}))->capture_default_str();
    c->add_option("--baseline-fraction", a.baseline_fraction, "Edge fraction used for the baseline start")
        ->capture_default_str();
    add_output_options(c, a.output);
}

struct TraceJob {
    std::string file;
    std::optional<double> tau;
};

std::vector<TraceJob> rtd_jobs(const RtdFitArgs& a) {
    std::vector<TraceJob> jobs;
    if (!a.tau.empty() && a.tau.size() != a.files.size()) {
        throw InvalidSpecError(fmt::format("{} --tau values for {} files", a.tau.size(), a.files.size()));
    }
    for (std::size_t i = 0; i < a.files.size(); ++i) {
        jobs.push_back({a.files[i], a.tau.empty() ? std::nullopt : std::optional<double>(a.tau[i])});
    }
    if (!a.list.empty()) {
        std::ifstream in(a.list);
        if (!in) throw InvalidSpecError(fmt::format("{}: cannot open list", a.list));
        const fs::path base = fs::path(a.list).parent_path();
        std::string line;
        bool header = true;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (header) {
                header = false;
                if (line != "path,tau_s") throw InvalidSpecError(fmt::format("{}: expected header 'path,tau_s'", a.list));
                continue;
            }
            const auto comma = line.rfind(',');
            if (comma == std::string::npos) throw InvalidSpecError(fmt::format("{}: bad row '{}'", a.list, line));
            fs::path p = line.substr(0, comma);
            const std::string tau_text = line.substr(comma + 1);
            std::optional<double> tau;
            if (!tau_text.empty()) {
                double v = 0.0;
                const auto [ptr, ec] = std::from_chars(tau_text.data(), tau_text.data() + tau_text.size(), v);
                if (ec != std::errc() || ptr != tau_text.data() + tau_text.size()) {
                    throw InvalidSpecError(fmt::format("{}: bad tau '{}'", a.list, tau_text));
                }
                tau = v;
            }
            jobs.push_back({(p.is_absolute() ? p : base / p).string(), tau});
        }
    }
    if (jobs.empty()) throw InvalidSpecError("no trace files given");
    return jobs;
}

struct BatchOutcome {
    Report report;
    int exit_code = 0;
};

BatchOutcome run_rtd_fit(const RtdFitArgs& a, std::ostream& err) {
    const std::vector<TraceJob> jobs = rtd_jobs(a);
    const RtdModel model = a.model == "asym" ? RtdModel::asymmetric : RtdModel::symmetric;

    std::vector<std::optional<TimeSeries>> traces(jobs.size());
    std::vector<std::string> read_errors(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        try {
            traces[i] = io::read_trace_csv(jobs[i].file);
        } catch (const Error& e) {
            read_errors[i] = e.what();
        }
    }
    std::vector<TimeSeries> loaded;
    for (const auto& t : traces) {
        if (t) loaded.push_back(*t);
    }
    RtdFitOptions opts;
    opts.baseline_fraction = a.baseline_fraction;
    const std::vector<RtdFit> fits = fit_rtd_batch(loaded, model, opts);

    BatchOutcome outcome;
    Report& r = outcome.report;
    r.command = "rtd-fit";
    std::vector<std::pair<double, double>> pairs;
    std::size_t failed = 0;
    std::size_t unconverged = 0;
    std::size_t next = 0;
    r.text += fmt::format("{:<32} {:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>9}\n", "file", "model",
                          a.model == "asym" ? "mu0_s" : "mu_s", "sigma_s", "beta", "eta_s", "mean_s", "residual",
                          "converged");
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        ojson rec = ojson::object();
        rec["file"] = jobs[i].file;
        rec["model"] = a.model;
        std::string status = "ok";
        std::string message;
        std::optional<RtdFit> fit;
        bool named = false;  // io errors already carry the file name
        if (!traces[i]) {
            status = "error";
            message = read_errors[i];
            named = true;
        } else {
            fit = fits[next++];
            if (fit->points == 0) {
                status = "error";
                message = fit->message;
                fit.reset();
            } else if (!fit->converged) {
                status = "not_converged";
                message = fit->message;
            }
        }
        if (status == "error") {
            ++failed;
            err << (named ? fmt::format("rtd-fit: {}\n", message)
                          : fmt::format("rtd-fit: {}: {}\n", jobs[i].file, message));
        }
        if (status == "not_converged") ++unconverged;

        double pos = NAN, width = NAN, beta = NAN, eta = NAN, mean = NAN, amp = NAN, base = NAN;
        RtdUncertainty unc{NAN, NAN, NAN, NAN, NAN};
        if (fit) {
            unc = fit->uncertainty;
            if (const auto* s = std::get_if<SymGaussParams>(&fit->params)) {
                pos = s->mean; width = s->width; eta = s->mean; mean = s->mean;
                amp = s->amplitude; base = s->baseline;
                unc.skewness = NAN;
            } else {
                const auto& q = std::get<AsymGaussParams>(fit->params);
                pos = q.position; width = q.width; beta = q.skewness;
                eta = asym_mode(q); mean = asym_mean(q); amp = q.amplitude; base = q.baseline;
            }
            if (status == "ok" && jobs[i].tau) pairs.emplace_back(*jobs[i].tau, mean);
        }
        rec["tau_s"] = jobs[i].tau ? ojson(*jobs[i].tau) : ojson(nullptr);
        rec["position_s"] = number_or_null(pos);
        rec["position_sd_s"] = number_or_null(unc.position);
        rec["width_s"] = number_or_null(width);
        rec["width_sd_s"] = number_or_null(unc.width);
        rec["skewness"] = number_or_null(beta);
        rec["skewness_sd"] = number_or_null(unc.skewness);
        rec["mode_s"] = number_or_null(eta);
        rec["mean_s"] = number_or_null(mean);
        rec["amplitude"] = number_or_null(amp);
        rec["baseline"] = number_or_null(base);
        rec["residual"] = fit ? ojson(fit->residual_norm) : ojson(nullptr);
        rec["iterations"] = fit ? fit->iterations : 0;
        rec["converged"] = fit && fit->converged;
        rec["status"] = status;
        rec["message"] = message;
        r.records.push_back(rec);

        const auto cell = [](double v) { return std::isfinite(v) ? g6(v) : std::string("-"); };
        r.text += fmt::format("{:<32} {:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>9}\n", jobs[i].file,
                              a.model, cell(pos), cell(width), cell(beta), cell(eta), cell(mean),
                              fit ? g6(fit->residual_norm) : std::string("-"), status == "ok" ? "yes" : status);
    }
    r.summary["traces"] = jobs.size();
    r.summary["failed"] = failed;
    r.summary["not_converged"] = unconverged;
    if (!pairs.empty()) {
        const double slope = regression_through_origin(pairs);
        r.summary["regression_pairs"] = pairs.size();
        r.summary["slope"] = slope;
        r.text += fmt::format("mean = {} x tau through the origin ({} traces)\n", g6(slope), pairs.size());
    }
    if (failed == jobs.size()) {
        outcome.exit_code = 1;
    } else if (unconverged > 0) {
        outcome.exit_code = 3;
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// kinetics
// ---------------------------------------------------------------------------

struct KineticsArgs {
    std::vector<std::string> files;
    std::string kind = "reactant";
    std::optional<double> t0;
    std::optional<double> baseline;
    std::optional<double> fix_rate;
    std::optional<double> oxidant_conc;
    double oxidant_conc_sd = 0.0;
    double tau_rel_error = 0.0;
    std::string threshold_mode = "absolute";
    double rate_threshold = 0.02;
    double relative_threshold = 0.05;
    std::optional<double> reference_rate;
    OutputOptions output;
};

void add_kinetics(CLI::App& app, KineticsArgs& a) {
    auto* c = app.add_subcommand("kinetics", "Fit kinetic models to signal traces");
    c->add_option("files", a.files, "Trace files (time_s,signal)")->required();
    c->add_option("--kind", a.kind, "Model, or auto to classify")
        ->check(CLI::IsMember({"reactant", "product", "intermediate", "auto"}))
        ->capture_default_str();
    c->add_option("--t0", a.t0, "Pin the time offset t0, s");
    c->add_option("--baseline", a.baseline, "Pin the baseline c");
    c->add_option("--fix-rate", a.fix_rate, "Pin k' (k'_grow for intermediates), e.g. a product at its reactant's rate, 1/s")
        ->check(CLI::PositiveNumber);
    c->add_option("--oxidant-conc", a.oxidant_conc, "Excess reagent concentration, molecules/cm^3; reports k = k'/[ox]");
    c->add_option("--oxidant-conc-sd", a.oxidant_conc_sd, "1-sigma of the oxidant concentration")->capture_default_str();
    c->add_option("--tau-rel-error", a.tau_rel_error, "Relative residence-time error")->capture_default_str();
    c->add_option("--threshold-mode", a.threshold_mode, "Significance rule for --kind auto")
        ->check(CLI::IsMember({"absolute", "relative"}))
        ->capture_default_str();
    c->add_option("--rate-threshold", a.rate_threshold, "Absolute rate threshold, 1/s")->capture_default_str();
    c->add_option("--relative-threshold", a.relative_threshold, "Fraction of --reference-rate")->capture_default_str();
    c->add_option("--reference-rate", a.reference_rate, "Reference k', 1/s (relative mode)");
    add_output_options(c, a.output);
}

KineticKind parse_kind(const std::string& s) {
    if (s == "reactant") return KineticKind::reactant;
    if (s == "product") return KineticKind::product;
    return KineticKind::intermediate;
}

BatchOutcome run_kinetics(const KineticsArgs& a, std::ostream& err) {
    KineticFitOptions fopts;
    if (a.t0) fopts.fixed.time_offset = *a.t0;
    if (a.baseline) fopts.fixed.baseline = *a.baseline;
    if (a.fix_rate) {
        if (a.kind == "auto") throw InvalidSpecError("--fix-rate needs an explicit --kind");
        fopts.fixed.rate = *a.fix_rate;
    }
    if (a.threshold_mode == "relative" && !a.reference_rate) {
        throw InvalidSpecError("--threshold-mode relative needs --reference-rate");
    }

    BatchOutcome outcome;
    Report& r = outcome.report;
    r.command = "kinetics";
    std::size_t failed = 0;
    std::size_t unconverged = 0;
    for (const auto& file : a.files) {
        ojson rec = ojson::object();
        rec["file"] = file;
        std::optional<KineticFit> fit;
        std::string verdict;
        std::string message;
        try {
            const TimeSeries trace = io::read_trace_csv(file);
            if (a.kind == "auto") {
                ClassifyOptions copts;
                copts.threshold_mode = a.threshold_mode == "relative" ? ThresholdMode::relative : ThresholdMode::absolute;
                copts.rate_threshold = a.rate_threshold;
                copts.relative_threshold = a.relative_threshold;
                // only the relative threshold reads the reference rate
                const TraceClassification c = classify_trace(trace, a.reference_rate.value_or(1.0), copts);
                verdict = std::string(to_string(c.kind));
                fit = c.fit;
            } else {
                fit = fit_kinetic(trace, parse_kind(a.kind), fopts);
                verdict = a.kind;
            }
        } catch (const Error& e) {
            message = e.what();
            ++failed;
            err << fmt::format("kinetics: {}\n", message);
        }
        if (fit && !fit->converged) {
            ++unconverged;
            message = fit->message;
        }
        const KineticModel m = fit ? fit->model : KineticModel{};
        const auto sd = [&](KineticParam p) {
            if (!fit) return ojson(nullptr);
            const auto v = fit->uncertainty.get(p);
            return v ? number_or_null(*v) : ojson(nullptr);
        };
        const bool inter = fit && m.kind == KineticKind::intermediate;
        rec["kind"] = verdict.empty() ? ojson(nullptr) : ojson(verdict);
        rec["model"] = fit ? ojson(std::string(to_string(m.kind))) : ojson(nullptr);
        rec["amplitude"] = fit ? ojson(m.amplitude) : ojson(nullptr);
        rec["amplitude_sd"] = sd(KineticParam::amplitude);
        rec["secondary_amplitude"] = inter ? ojson(m.secondary_amplitude) : ojson(nullptr);
        rec["rate_per_s"] = fit ? ojson(m.rate) : ojson(nullptr);
        rec["rate_sd_per_s"] = sd(KineticParam::rate);
        rec["decay_rate_per_s"] = inter ? ojson(m.decay_rate) : ojson(nullptr);
        rec["decay_rate_sd_per_s"] = inter ? sd(KineticParam::decay_rate) : ojson(nullptr);
        rec["time_offset_s"] = fit ? ojson(m.time_offset) : ojson(nullptr);
        rec["baseline"] = fit ? ojson(m.baseline) : ojson(nullptr);
        rec["ssr"] = fit ? ojson(fit->ssr) : ojson(nullptr);
        rec["aicc"] = fit ? number_or_null(fit->aicc) : ojson(nullptr);
        rec["converged"] = fit && fit->converged;
        std::optional<RateUncertainty> k;
        if (fit && a.oxidant_conc) {
            const double sk = fit->uncertainty.get(KineticParam::rate).value_or(0.0);
            k = uncertainty_on_k(m.rate, sk, *a.oxidant_conc, a.oxidant_conc_sd, a.tau_rel_error);
        }
        rec["k_cm3_per_s"] = k ? ojson(k->k) : ojson(nullptr);
        rec["k_sd_cm3_per_s"] = k ? ojson(k->sigma_k) : ojson(nullptr);
        rec["message"] = message;
        r.records.push_back(rec);

        if (!fit) {
            r.text += fmt::format("{}: error: {}\n", file, message);
            continue;
        }
        r.text += fmt::format("{}: {} ({})\n", file, verdict, fit->converged ? "converged" : "not converged");
        const auto with_sd = [&](double v, KineticParam p) {
            const auto s = fit->uncertainty.get(p);
            return s ? fmt::format("{} +- {}", g6(v), g6(*s)) : g6(v);
        };
        r.text += fmt::format("  k'        {} 1/s\n", with_sd(m.rate, KineticParam::rate));
        if (inter) r.text += fmt::format("  k'_decay  {} 1/s\n", with_sd(m.decay_rate, KineticParam::decay_rate));
        r.text += fmt::format("  A         {}\n", with_sd(m.amplitude, KineticParam::amplitude));
        if (inter) r.text += fmt::format("  B         {}\n", with_sd(m.secondary_amplitude, KineticParam::secondary_amplitude));
        r.text += fmt::format("  t0        {} s\n", with_sd(m.time_offset, KineticParam::time_offset));
        r.text += fmt::format("  c         {}\n", with_sd(m.baseline, KineticParam::baseline));
        r.text += fmt::format("  SSR       {}\n", g6(fit->ssr));
        if (k) r.text += fmt::format("  k         {} +- {} cm^3/s\n", g6(k->k), g6(k->sigma_k));
    }
    r.summary["traces"] = a.files.size();
    r.summary["failed"] = failed;
    r.summary["not_converged"] = unconverged;
    if (failed == a.files.size()) {
        outcome.exit_code = 1;
    } else if (unconverged > 0) {
        outcome.exit_code = 3;
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// ms
// ---------------------------------------------------------------------------

struct MsArgs {
    std::string manifest;
    double tolerance = default_mass_tolerance;
    double min_detection = 0.5;
    double reference_window = 0.1;
    std::string reference_species;
    double resolution = default_resolution;
    std::vector<std::string> exclude;
    std::vector<std::string> database;
    std::string threshold_mode = "absolute";
    double rate_threshold = 0.02;
    double relative_threshold = 0.05;
    std::string traces_dir;
    OutputOptions output;
};

void add_ms(CLI::App& app, MsArgs& a) {
    auto* c = app.add_subcommand("ms", "Mass-spectrum workflow: calibrate, detect, assign, classify");
    c->add_option("manifest", a.manifest, "Dataset manifest (JSON)")->required();
    c->add_option("--tolerance", a.tolerance, "Formula match tolerance, Da")->capture_default_str();
    c->add_option("--min-detection", a.min_detection, "Fraction of spectra a formula must appear in")
        ->capture_default_str();
    c->add_option("--reference-window", a.reference_window, "Calibrant search window, Da")->capture_default_str();
    c->add_option("--reference-species", a.reference_species, "Rate-ratio denominator ion (default: manifest, else C6H13+)");
    c->add_option("--resolution", a.resolution, "Resolving power m/dm")->capture_default_str();
    c->add_option("--exclude", a.exclude, "Ions left out of classification");
    c->add_option("--database", a.database, "Restrict assignments to these neutrals (or their protonated ions)");
    c->add_option("--threshold-mode", a.threshold_mode, "Significance rule")
        ->check(CLI::IsMember({"absolute", "relative"}))
        ->capture_default_str();
    c->add_option("--rate-threshold", a.rate_threshold, "Absolute rate threshold, 1/s")->capture_default_str();
    c->add_option("--relative-threshold", a.relative_threshold, "Fraction of the reference rate")
        ->capture_default_str();
    c->add_option("--traces-dir", a.traces_dir, "Write each species' averaged trace here");
    add_output_options(c, a.output);
}

int verdict_order(VerdictKind k) {
    switch (k) {
    case VerdictKind::product: return 0;
    case VerdictKind::reactant: return 1;
    case VerdictKind::intermediate: return 2;
    case VerdictKind::insignificant: return 3;
    case VerdictKind::unclassifiable: return 4;
    }
    return 5;
}

Report run_ms(const MsArgs& a) {
    const io::DatasetManifest manifest = io::read_manifest(a.manifest);
    if (manifest.references.empty()) {
        throw CalibrationError(fmt::format("{}: no reference peaks declared (\"references\")", a.manifest));
    }
    if (!manifest.nominal_calibration) {
        throw CalibrationError(fmt::format("{}: no nominal calibration declared", a.manifest));
    }
    WorkflowConfig cfg;
    cfg.references = manifest.references;
    cfg.nominal_calibration = *manifest.nominal_calibration;
    cfg.reference_window_da = a.reference_window;
    if (!a.reference_species.empty()) {
        cfg.reference_species = Composition::parse(a.reference_species);
    } else if (manifest.reference_species) {
        cfg.reference_species = *manifest.reference_species;
    }
    cfg.tolerance = a.tolerance;
    cfg.min_detection_fraction = a.min_detection;
    cfg.detection.resolution = a.resolution;
    for (const auto& e : a.exclude) cfg.exclude.push_back(Composition::parse(e));
    for (const auto& d : a.database) cfg.database.push_back(Composition::parse(d));
    cfg.classify.threshold_mode = a.threshold_mode == "relative" ? ThresholdMode::relative : ThresholdMode::absolute;
    cfg.classify.rate_threshold = a.rate_threshold;
    cfg.classify.relative_threshold = a.relative_threshold;

    const std::vector<TimedSpectra> data = io::load_dataset(manifest);
    const WorkflowResult res = run_workflow(data, cfg);

    std::vector<const SpeciesVerdict*> order;
    for (const auto& s : res.species) order.push_back(&s);
    std::stable_sort(order.begin(), order.end(), [](const SpeciesVerdict* x, const SpeciesVerdict* y) {
        return verdict_order(x->kind) < verdict_order(y->kind);
    });

    if (!a.traces_dir.empty()) {
        fs::create_directories(a.traces_dir);
        for (const auto* s : order) {
            io::write_trace_csv(fs::path(a.traces_dir) / (s->formula.composition.to_string() + ".csv"), s->trace);
        }
    }

    Report r;
    r.command = "ms";
    std::map<VerdictKind, std::size_t> counts;
    for (const auto* s : order) {
        ++counts[s->kind];
        ojson rec = ojson::object();
        const bool inter = s->kind == VerdictKind::intermediate;
        rec["ion"] = s->formula.formula();
        rec["exact_mass"] = s->formula.exact_mass;
        rec["mass_error"] = s->formula.mass_error;
        rec["kind"] = std::string(to_string(s->kind));
        rec["rate_per_s"] = s->rate;
        rec["rate_ratio"] = inter ? ojson(nullptr) : ojson(s->ratio_to_reference);
        rec["decay_rate_per_s"] = inter ? ojson(s->fitted.decay_rate) : ojson(nullptr);
        rec["detection_fraction"] = s->detection_fraction;
        r.records.push_back(rec);
    }
    r.summary["spectra"] = res.spectra;
    r.summary["reaction_times"] = data.size();
    r.summary["reference_rate_per_s"] = res.reference_rate;
    for (VerdictKind k : {VerdictKind::product, VerdictKind::reactant, VerdictKind::intermediate,
                          VerdictKind::insignificant, VerdictKind::unclassifiable}) {
        r.summary[std::string(to_string(k))] = counts[k];
    }

    std::string& t = r.text;
    t += fmt::format("{} spectra at {} reaction times; reference {} k' = {} 1/s\n", res.spectra, data.size(),
                     cfg.reference_species.to_string() + "+", g6(res.reference_rate));
    const std::pair<VerdictKind, const char*> sections[] = {
        {VerdictKind::product, "Products"},         {VerdictKind::reactant, "Reactants"},
        {VerdictKind::intermediate, "Intermediates"}, {VerdictKind::insignificant, "No significant change"},
        {VerdictKind::unclassifiable, "Unclassifiable"}};
    for (const auto& [kind, title] : sections) {
        if (counts[kind] == 0) continue;
        t += fmt::format("\n{} ({})\n", title, counts[kind]);
        if (kind == VerdictKind::intermediate) {
            t += fmt::format("  {:<14} {:>12} {:>12} {:>12}\n", "ion", "m/z", "k'_grow", "k'_decay");
        } else {
            t += fmt::format("  {:<14} {:>12} {:>12} {:>12}\n", "ion", "m/z", "k' (1/s)", "ratio");
        }
        for (const auto* s : order) {
            if (s->kind != kind) continue;
            const std::string last = kind == VerdictKind::intermediate ? g6(s->fitted.decay_rate)
                                                                       : g6(s->ratio_to_reference);
            t += fmt::format("  {:<14} {:>12} {:>12} {:>12}\n", s->formula.formula(), g6(s->formula.exact_mass),
                             g6(s->rate), last);
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimRtdArgs {
    std::string model = "sym";
    double amplitude = 1.0;
    double mean = 10.0;       // mu or mu0
    double width = 0.5;
    double skewness = 0.0;
    double baseline = 0.0;
    double tau = 10.0;        // laminar
    double pulse_duration = 1.0;
    double mfc_lag = 0.0;
    double pulse_amplitude = 1.0;
    double sampling_rate = 1.0;
    double duration = 0.0;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string output;
    std::string reference_runs;
};

struct SimKineticsArgs {
    double oxidant_conc = reference::ozone_concentration;
    double organic_conc = reference::tme_initial_concentration;
    double k = reference::tme_ozone_k;
    std::vector<double> times;
    double t_min = 0.4;
    double t_max = 12.0;
    int points = 12;
    double sens_organic = 1.0;
    double sens_oxidant = 1.0;
    double sens_product = 1.0;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string output_dir;
};

struct SimMsArgs {
    std::string output_dir;
    int times = 20;
    double t_min = 0.4;
    double t_max = 12.0;
    int spectra_per_time = 2;
    double noise = 0.01;
    double counting_scale = 1.0;
    double background = 2.0;
    double samples_per_sigma = 5.0;
    double scale = 100.0;
    std::uint64_t seed = 1;
};

struct SimArgs {
    SimRtdArgs rtd;
    SimKineticsArgs kin;
    SimMsArgs ms;
    CLI::App* rtd_cmd = nullptr;
    CLI::App* kin_cmd = nullptr;
    CLI::App* ms_cmd = nullptr;
};

void add_simulate(CLI::App& app, SimArgs& a) {
    auto* sim = app.add_subcommand("simulate", "Write synthetic input files");
    sim->require_subcommand(1);

    auto* r = sim->add_subcommand("rtd", "Tracer-pulse trace through an RTD");
    a.rtd_cmd = r;
    r->add_option("--model", a.rtd.model, "RTD shape")
        ->check(CLI::IsMember({"sym", "asym", "laminar"}))
        ->capture_default_str();
    r->add_option("--amplitude", a.rtd.amplitude, "RTD area alpha")->capture_default_str();
    r->add_option("--mean", a.rtd.mean, "mu (sym) or mu0 (asym), s")->capture_default_str();
    r->add_option("--width", a.rtd.width, "sigma, s")->capture_default_str();
    r->add_option("--skewness", a.rtd.skewness, "beta (asym)")->capture_default_str();
    r->add_option("--baseline", a.rtd.baseline, "Baseline epsilon")->capture_default_str();
    r->add_option("--tau", a.rtd.tau, "Residence time (laminar), s")->capture_default_str();
    r->add_option("--pulse-duration", a.rtd.pulse_duration, "Tracer pulse length, s")->capture_default_str();
    r->add_option("--mfc-lag", a.rtd.mfc_lag, "Flow controller response time, s")->capture_default_str();
    r->add_option("--pulse-amplitude", a.rtd.pulse_amplitude, "Pulse height")->capture_default_str();
    r->add_option("--sampling-rate", a.rtd.sampling_rate, "Samples per second")->capture_default_str();
    r->add_option("--duration", a.rtd.duration, "Trace length, s (0: automatic)")->capture_default_str();
    r->add_option("--noise", a.rtd.noise, "Relative Gaussian noise")->capture_default_str();
    r->add_option("--seed", a.rtd.seed, "Noise seed")->capture_default_str();
    r->add_option("-o,--output", a.rtd.output, "Trace file (default stdout)");
    r->add_option("--reference-runs", a.rtd.reference_runs,
                  "Write one trace per measured symmetric run (mu = tau) plus runs.csv into this directory");

    auto* k = sim->add_subcommand("kinetics", "Bimolecular organic + oxidant traces");
    a.kin_cmd = k;
    k->add_option("--oxidant-conc", a.kin.oxidant_conc, "molecules/cm^3")->capture_default_str();
    k->add_option("--organic-conc", a.kin.organic_conc, "Initial organic, molecules/cm^3")->capture_default_str();
    k->add_option("--k", a.kin.k, "Rate coefficient, cm^3/s")->capture_default_str();
    k->add_option("--times", a.kin.times, "Reaction times, s (overrides the linear grid)");
    k->add_option("--t-min", a.kin.t_min, "First reaction time, s")->capture_default_str();
    k->add_option("--t-max", a.kin.t_max, "Last reaction time, s")->capture_default_str();
    k->add_option("--points", a.kin.points, "Reaction times on the grid")->capture_default_str();
    k->add_option("--sens-organic", a.kin.sens_organic, "Signal per molecule/cm^3")->capture_default_str();
    k->add_option("--sens-oxidant", a.kin.sens_oxidant, "Signal per molecule/cm^3")->capture_default_str();
    k->add_option("--sens-product", a.kin.sens_product, "Signal per molecule/cm^3")->capture_default_str();
    k->add_option("--noise", a.kin.noise, "Relative Gaussian noise")->capture_default_str();
    k->add_option("--seed", a.kin.seed, "Noise seed")->capture_default_str();
    k->add_option("--output-dir", a.kin.output_dir, "Directory for organic.csv, oxidant.csv, product.csv")->required();

    auto* m = sim->add_subcommand("ms", "Time-of-flight spectra of the ozonolysis species set");
    a.ms_cmd = m;
    m->add_option("--output-dir", a.ms.output_dir, "Directory for spectra, manifest.json, truth.csv")->required();
    m->add_option("--times", a.ms.times, "Reaction times")->capture_default_str();
    m->add_option("--t-min", a.ms.t_min, "First reaction time, s")->capture_default_str();
    m->add_option("--t-max", a.ms.t_max, "Last reaction time, s")->capture_default_str();
    m->add_option("--spectra-per-time", a.ms.spectra_per_time, "Spectra per reaction time")->capture_default_str();
    m->add_option("--noise", a.ms.noise, "Relative trace noise per reaction time")->capture_default_str();
    m->add_option("--counting-scale", a.ms.counting_scale, "Counting noise scale")->capture_default_str();
    m->add_option("--background", a.ms.background, "Flat background, counts")->capture_default_str();
    m->add_option("--samples-per-sigma", a.ms.samples_per_sigma, "Axis density")->capture_default_str();
    m->add_option("--scale", a.ms.scale, "Species amplitude scale, counts Da")->capture_default_str();
    m->add_option("--seed", a.ms.seed, "Noise seed")->capture_default_str();
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw InvalidSpecError("need at least one reaction time");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

std::string sim_rtd(const SimRtdArgs& a, std::ostream& out) {
    const PulseSpec pulse{a.pulse_duration, a.mfc_lag, a.pulse_amplitude};
    const NoiseSpec noise{a.noise, a.seed};
    RtdSynthOptions opts;
    opts.duration = a.duration;

    if (!a.reference_runs.empty()) {
        const fs::path dir = a.reference_runs;
        fs::create_directories(dir);
        std::ofstream list(dir / "runs.csv");
        if (!list) throw InvalidSpecError(fmt::format("{}: cannot write runs.csv", dir.string()));
        list << "path,tau_s\n";
        std::size_t n = 0;
        for (const auto& run : reference::symmetric_rtd_runs()) {
            if (run.exploratory) continue;
            const SymGaussParams p{a.amplitude, run.tau_s, run.acetonitrile.sigma, a.baseline};
            const std::string name = fmt::format("run_{:02}.csv", n);
            NoiseSpec ns = noise;
            ns.seed = a.seed + n;
            io::write_trace_csv(dir / name, synth_rtd_trace(p, pulse, a.sampling_rate, ns, opts));
            list << fmt::format("{},{}\n", name, run.tau_s);
            ++n;
        }
        return fmt::format("wrote {} traces and runs.csv to {}\n", n, dir.string());
    }

    RtdShape shape;
    if (a.model == "sym") {
        shape = SymGaussParams{a.amplitude, a.mean, a.width, a.baseline};
    } else if (a.model == "asym") {
        shape = AsymGaussParams{a.amplitude, a.mean, a.width, a.skewness, a.baseline};
    } else {
        shape = LaminarRtd{a.tau};
    }
    const TimeSeries trace = synth_rtd_trace(shape, pulse, a.sampling_rate, noise, opts);
    if (a.output.empty()) {
        io::write_trace_csv(out, trace);
        return {};
    }
    io::write_trace_csv(fs::path(a.output), trace);
    return fmt::format("wrote {} samples to {}\n", trace.size(), a.output);
}

std::string sim_kinetics(const SimKineticsArgs& a) {
    const ReactionConditions cond{a.oxidant_conc, a.organic_conc};
    const std::vector<double> times = a.times.empty() ? linspace(a.t_min, a.t_max, a.points) : a.times;
    const KineticDataset d = synth_kinetic_dataset(cond, a.k, times, {a.sens_organic, a.sens_oxidant, a.sens_product},
                                                   {a.noise, a.seed});
    const fs::path dir = a.output_dir;
    fs::create_directories(dir);
    io::write_trace_csv(dir / "organic.csv", d.organic);
    io::write_trace_csv(dir / "oxidant.csv", d.oxidant);
    io::write_trace_csv(dir / "product.csv", d.product);
    return fmt::format("wrote organic.csv, oxidant.csv, product.csv ({} reaction times) to {}\n", times.size(),
                       dir.string());
}

std::string sim_ms(const SimMsArgs& a) {
    WorkflowDatasetSpec spec = default_workflow_dataset_spec();
    spec.species = ozonolysis_species_models(a.scale);
    spec.reaction_times = linspace(a.t_min, a.t_max, a.times);
    spec.spectra_per_time = a.spectra_per_time;
    spec.trace_noise = a.noise;
    spec.counting_scale = a.counting_scale;
    spec.background = a.background;
    spec.samples_per_sigma = a.samples_per_sigma;
    spec.seed = a.seed;
    const std::vector<TimedSpectra> data = synth_workflow_dataset(spec);

    const fs::path dir = a.output_dir;
    fs::create_directories(dir);
    io::DatasetManifest manifest;
    manifest.references = default_reference_ions();
    manifest.nominal_calibration = spec.calibration;
    manifest.reference_species = Composition{6, 13, 0, 0};
    std::size_t files = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        io::ManifestEntry e;
        e.reaction_time = data[i].reaction_time;
        for (std::size_t j = 0; j < data[i].spectra.size(); ++j) {
            const std::string name = fmt::format("spectrum_t{:02}_{}.csv", i, j);
            io::write_spectrum_csv(dir / name, data[i].spectra[j]);
            e.spectra.emplace_back(name);
            ++files;
        }
        manifest.entries.push_back(std::move(e));
    }
    io::write_manifest(dir / "manifest.json", manifest);

    std::ofstream truth(dir / "truth.csv");
    truth << "ion,name,kind,rate_per_s,decay_rate_per_s\n";
    for (const auto& s : spec.species) {
        const bool inter = s.model.kind == KineticKind::intermediate;
        truth << fmt::format("{}+,{},{},{},{}\n", s.ion.to_string(), s.name, to_string(s.model.kind), s.model.rate,
                             inter ? fmt::format("{}", s.model.decay_rate) : std::string());
    }
    return fmt::format("wrote {} spectra, manifest.json and truth.csv to {}\n", files, dir.string());
}

const char* module_of(const std::string& cmd) {
    if (cmd == "design") return "reactor";
    if (cmd == "rtd-fit") return "rtd";
    if (cmd == "kinetics") return "kinetics";
    if (cmd == "ms") return "massspec";
    if (cmd == "simulate") return "simulate";
    return "cli";
}

} // namespace

// ---------------------------------------------------------------------------

double parse_pressure(std::string_view text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr == s.data()) {
        throw InvalidSpecError(fmt::format("cannot parse pressure '{}'", text));
    }
    const std::string unit = lower(std::string(std::string_view(ptr, static_cast<std::size_t>(s.data() + s.size() - ptr))));
    static const std::map<std::string, double> scale = {
        {"", 1.0},        {"pa", 1.0},      {"hpa", 100.0},  {"kpa", 1e3},      {"mpa", 1e6},
        {"mbar", 100.0},  {"bar", 1e5},     {"atm", 101325.0}, {"torr", 101325.0 / 760.0}};
    const auto it = scale.find(unit);
    if (it == scale.end()) throw InvalidSpecError(fmt::format("unknown pressure unit '{}'", unit));
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidSpecError(fmt::format("pressure must be > 0, got '{}'", text));
    return v * it->second;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Flow tube reactor design and analysis"};
    app.name("flowtube");
    app.set_config("--config", "", "TOML or INI file with option values; command-line flags win");
    app.require_subcommand(1);
    app.fallthrough(false);

    DesignArgs design;
    RtdFitArgs rtd_fit;
    KineticsArgs kinetics;
    MsArgs ms;
    SimArgs sim;
    add_design(app, design);
    add_rtd_fit(app, rtd_fit);
    add_kinetics(app, kinetics);
    add_ms(app, ms);
    add_simulate(app, sim);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        if (cmd == "design") {
            emit(run_design(design), design.output, out);
            return 0;
        }
        if (cmd == "rtd-fit") {
            const BatchOutcome o = run_rtd_fit(rtd_fit, err);
            emit(o.report, rtd_fit.output, out);
            return o.exit_code;
        }
        if (cmd == "kinetics") {
            const BatchOutcome o = run_kinetics(kinetics, err);
            emit(o.report, kinetics.output, out);
            return o.exit_code;
        }
        if (cmd == "ms") {
            emit(run_ms(ms), ms.output, out);
            return 0;
        }
        if (sim.rtd_cmd->parsed()) {
            err << sim_rtd(sim.rtd, out);
        } else if (sim.kin_cmd->parsed()) {
            err << sim_kinetics(sim.kin);
        } else {
            err << sim_ms(sim.ms);
        }
        return 0;
    } catch (const Error& e) {
        err << fmt::format("error [{}]: {}\n", module_of(cmd), e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        err << fmt::format("error [{}]: {}\n", module_of(cmd), e.what());
        return 1;
    }
}

} // namespace flowtube::cli
