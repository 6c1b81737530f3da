#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "infoextract/datasets.hpp"
#include "infoextract/decoupling.hpp"
#include "infoextract/errors.hpp"
#include "infoextract/extraction.hpp"
#include "infoextract/granger.hpp"
#include "infoextract/infoflow.hpp"
#include "infoextract/parallel.hpp"
#include "infoextract/quantile.hpp"
#include "infoextract/serialize.hpp"
#include "infoextract/svg.hpp"
#include "infoextract/table.hpp"

namespace {

namespace ie = infoextract;
using ie::serialize::ordered_json;

constexpr double kLn2 = 0.6931471805599453;

struct GlobalOptions {
    int threads = 0;
    bool force = false;
    bool json_errors = false;
    std::string units = "bits";
};

double in_units(double nats, const std::string& units) {
    return units == "bits" ? nats / kLn2 : nats;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Effective-config sidecar, written next to the first artifact of a run.
void write_run_config(const std::string& first_output, const std::string& subcommand,
                      const GlobalOptions& global, const ordered_json& options) {
    ordered_json j;
    j["tool"] = "infoextract";
    j["subcommand"] = subcommand;
    j["threads"] = ie::effective_threads();
    j["units"] = global.units;
    j["options"] = options;
    ie::serialize::write_json_file(j, first_output + ".run.json", true);
}

ie::SampleTable load_normalized(const std::string& path, char delimiter, bool drop_missing) {
    ie::datasets::CsvOptions opts;
    opts.delimiter = delimiter;
    opts.drop_missing = drop_missing;
    ie::SampleTable raw = ie::datasets::load_csv(path, opts);
    return ie::normalization::normalize_table(raw).first;
}

std::vector<std::string> resolve_columns(const ie::SampleTable& table,
                                         const std::vector<std::string>& names) {
    for (const auto& name : names) table.column_index(name);
    return names;
}

void scale_report(ie::decoupling::DependenceReport& report, const std::string& units) {
    if (units != "bits") return;
    for (auto& row : report.mi)
        for (double& v : row) v /= kLn2;
}

void scale_profile(ie::granger::DelayProfile& profile, const std::string& units) {
    if (units != "bits") return;
    for (double& v : profile.mi) v /= kLn2;
}

// --- synth ---------------------------------------------------------------

struct SynthOptions {
    ie::datasets::GeneratorSpec spec;
    std::string kind = "gaussian-copula";
    std::string output;
};

void run_synth(SynthOptions& o, const GlobalOptions& g) {
    o.spec.kind = ie::datasets::parse_generator_kind(o.kind);
    ie::SampleTable table = ie::datasets::generate(o.spec);
    ie::datasets::write_csv(table, o.output, g.force);
    ordered_json opts;
    opts["kind"] = o.kind;
    opts["seed"] = o.spec.seed;
    opts["n"] = o.spec.n;
    opts["dims"] = o.spec.dims;
    opts["rho"] = o.spec.rho;
    opts["alpha"] = o.spec.alpha;
    opts["beta"] = o.spec.beta;
    opts["noise"] = o.spec.noise;
    opts["delay"] = o.spec.delay;
    opts["coupling"] = o.spec.coupling;
    opts["d1"] = o.spec.d1;
    opts["d2"] = o.spec.d2;
    opts["c1"] = o.spec.c1;
    opts["c2"] = o.spec.c2;
    opts["normalized"] = o.spec.normalized;
    opts["output"] = o.output;
    write_run_config(o.output, "synth", g, opts);
}

// --- normalize ------------------------------------------------------------

struct NormalizeOptions {
    std::string input;
    std::string output;
    std::string delimiter = ",";
    bool drop_missing = false;
};

void run_normalize(NormalizeOptions& o, const GlobalOptions& g) {
    if (o.delimiter.size() != 1)
        throw ie::InvalidInput("delimiter must be a single character");
    ie::SampleTable normalized = load_normalized(o.input, o.delimiter[0], o.drop_missing);
    ie::datasets::write_csv(normalized, o.output, g.force);
    ordered_json opts;
    opts["input"] = o.input;
    opts["output"] = o.output;
    opts["delimiter"] = o.delimiter;
    opts["drop-missing"] = o.drop_missing;
    write_run_config(o.output, "normalize", g, opts);
}

// --- extract ---------------------------------------------------------------

ie::extraction::ConditionalMethod parse_method(const std::string& name) {
    if (name == "auto") return ie::extraction::ConditionalMethod::kAuto;
    if (name == "joint-slice") return ie::extraction::ConditionalMethod::kJointSlice;
    if (name == "moment-regression") return ie::extraction::ConditionalMethod::kMomentRegression;
    throw ie::InvalidInput("unknown conditional method '" + name + "'");
}

struct ExtractOptions {
    std::string input;
    std::string target;
    std::vector<std::string> given;
    std::string method = "auto";
    int degree = ie::hcr::kDefaultDegree;
    int grid = ie::hcr::kDefaultGrid;
    double floor = ie::hcr::kDefaultFloor;
    int iterations = 1;
    std::string output;
    std::string layers;
};

void run_extract(ExtractOptions& o, const GlobalOptions& g) {
    ie::SampleTable table = load_normalized(o.input, ',', false);
    ie::extraction::ConditionalMethod method = parse_method(o.method);
    ie::extraction::IteratedExtraction run = ie::extraction::iterate_extraction(
        table, o.target, o.given, o.iterations, method, o.degree, o.grid, o.floor);
    ie::datasets::write_csv(run.result, o.output, g.force);
    if (!o.layers.empty()) {
        ie::serialize::LayerStack stack;
        stack.layers = run.layers;
        ie::serialize::write_json_file(ie::serialize::to_json(stack), o.layers, g.force);
    }
    ordered_json opts;
    opts["input"] = o.input;
    opts["target"] = o.target;
    opts["given"] = o.given;
    opts["method"] = o.method;
    opts["degree"] = o.degree;
    opts["grid"] = o.grid;
    opts["floor"] = o.floor;
    opts["iterations"] = o.iterations;
    opts["output"] = o.output;
    opts["layers"] = o.layers;
    write_run_config(o.output, "extract", g, opts);
}

// --- reconstruct -------------------------------------------------------------

struct ReconstructOptions {
    std::string input;
    std::string layers;
    std::string output;
};

void run_reconstruct(ReconstructOptions& o, const GlobalOptions& g) {
    ie::SampleTable table = ie::datasets::load_csv(o.input, {});
    ie::serialize::LayerStack stack =
        ie::serialize::layer_stack_from_json(ie::serialize::read_json_file(o.layers));
    ie::decoupling::DecoupledDataset dataset;
    dataset.layers = stack.layers;
    dataset.result = std::move(table);
    dataset.mode = stack.mode;
    ie::SampleTable restored = ie::decoupling::reconstruct(dataset);
    ie::datasets::write_csv(restored, o.output, g.force);
    ordered_json opts;
    opts["input"] = o.input;
    opts["layers"] = o.layers;
    opts["output"] = o.output;
    write_run_config(o.output, "reconstruct", g, opts);
}

// --- decouple ---------------------------------------------------------------

struct DecoupleOptions {
    std::string input;
    std::vector<std::string> order;
    std::string method = "auto";
    int degree = ie::hcr::kDefaultDegree;
    int sweeps = ie::decoupling::kDefaultSweeps;
    std::string conditioning = "current";
    std::string output;
    std::string layers;
    std::string report;
};

ie::decoupling::ConditioningMode parse_conditioning(const std::string& name) {
    if (name == "current") return ie::decoupling::ConditioningMode::kCurrent;
    if (name == "original") return ie::decoupling::ConditioningMode::kOriginal;
    throw ie::InvalidInput("unknown conditioning mode '" + name + "'");
}

void run_decouple(DecoupleOptions& o, const GlobalOptions& g) {
    ie::SampleTable table = load_normalized(o.input, ',', false);
    ie::decoupling::DecoupledDataset dataset = ie::decoupling::decouple(
        table, o.order, parse_method(o.method), o.degree, o.sweeps,
        parse_conditioning(o.conditioning));
    ie::datasets::write_csv(dataset.result, o.output, g.force);
    if (!o.layers.empty()) {
        ie::serialize::LayerStack stack;
        stack.layers = dataset.layers;
        stack.mode = dataset.mode;
        stack.order = dataset.order_used;
        stack.sweeps = dataset.sweeps;
        ie::serialize::write_json_file(ie::serialize::to_json(stack), o.layers, g.force);
    }
    if (!o.report.empty()) {
        ordered_json history = ordered_json::array();
        for (auto sweep : dataset.sweep_history) {
            scale_report(sweep, g.units);
            history.push_back(ie::serialize::to_json(sweep));
        }
        ordered_json j;
        j["units"] = g.units;
        j["sweeps"] = history;
        ie::serialize::write_json_file(j, o.report, g.force);
    }
    ordered_json opts;
    opts["input"] = o.input;
    opts["order"] = o.order;
    opts["method"] = o.method;
    opts["degree"] = o.degree;
    opts["sweeps"] = o.sweeps;
    opts["conditioning"] = o.conditioning;
    opts["output"] = o.output;
    opts["layers"] = o.layers;
    opts["report"] = o.report;
    write_run_config(o.output, "decouple", g, opts);
}

// --- mi ----------------------------------------------------------------------

struct MiOptions {
    std::string input;
    std::string x;
    std::string y;
    std::string estimator = "binned";
    int bins = ie::infoflow::kDefaultBins;
    int degree = ie::hcr::kDefaultDegree;
    std::string output;
};

ordered_json estimate_json(const ie::infoflow::MiEstimate& estimate, const std::string& units) {
    ie::infoflow::MiEstimate scaled = estimate;
    scaled.value = in_units(scaled.value, units);
    if (scaled.quadratic) scaled.quadratic = in_units(*scaled.quadratic, units);
    if (scaled.raw) scaled.raw = in_units(*scaled.raw, units);
    ordered_json j = ie::serialize::to_json(scaled);
    j["units"] = units;
    return j;
}

void run_mi(MiOptions& o, const GlobalOptions& g) {
    ie::SampleTable table = load_normalized(o.input, ',', false);
    const std::vector<double>& xs = table.data[table.column_index(o.x)];
    const std::vector<double>& ys = table.data[table.column_index(o.y)];
    ie::infoflow::MiEstimate estimate =
        o.estimator == "hcr" ? ie::infoflow::mutual_information_hcr(xs, ys, o.degree)
                             : ie::infoflow::mutual_information_binned(xs, ys, o.bins);
    ordered_json j;
    j["x"] = o.x;
    j["y"] = o.y;
    j["estimate"] = estimate_json(estimate, g.units);
    std::cout << j.dump(2) << "\n";
    if (!o.output.empty()) {
        ie::serialize::write_json_file(j, o.output, g.force);
        ordered_json opts;
        opts["input"] = o.input;
        opts["x"] = o.x;
        opts["y"] = o.y;
        opts["estimator"] = o.estimator;
        opts["bins"] = o.bins;
        opts["degree"] = o.degree;
        opts["output"] = o.output;
        write_run_config(o.output, "mi", g, opts);
    }
}

// --- dmi ----------------------------------------------------------------------

struct DmiOptions {
    std::string input;
    std::string x;
    std::string y;
    std::vector<std::string> z;
    std::string method = "auto";
    int degree = ie::hcr::kDefaultDegree;
    int bins = ie::infoflow::kDefaultBins;
    bool reference = false;
    int reference_bins = ie::infoflow::kDefaultReferenceBins;
    std::string output;
    std::string matrix;
};

ordered_json dmi_pair_json(const ie::SampleTable& table, const std::string& x,
                           const std::string& y, const std::vector<std::string>& z,
                           const DmiOptions& o, const GlobalOptions& g) {
    ie::infoflow::MiEstimate direct = ie::infoflow::direct_mutual_information(
        table, x, y, z, parse_method(o.method), o.degree, o.bins);
    ordered_json pair;
    pair["x"] = x;
    pair["y"] = y;
    pair["z"] = z;
    ordered_json j;
    j["pair"] = pair;
    j["I"] = in_units(direct.raw.value_or(0.0), g.units);
    j["I_d"] = in_units(direct.value, g.units);
    if (o.reference) {
        ie::infoflow::MiEstimate ref =
            ie::infoflow::conditional_mi_reference(table, x, y, z, o.reference_bins);
        j["reference"] = in_units(ref.value, g.units);
    }
    j["units"] = g.units;
    return j;
}

void write_matrix_csv(const std::string& path, const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& values, bool force) {
    if (!force && std::filesystem::exists(path))
        throw ie::RefusedOverwrite("refusing to overwrite '" + path + "'");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ie::InvalidInput("cannot open '" + path + "' for writing");
    out << "column";
    for (const auto& name : names) out << "," << name;
    out << "\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
        out << names[i];
        for (std::size_t k = 0; k < names.size(); ++k) out << "," << format_double(values[i][k]);
        out << "\n";
    }
    out.flush();
    if (!out) throw ie::InvalidInput("failed to write '" + path + "'");
}

void run_dmi(DmiOptions& o, const GlobalOptions& g) {
    ie::SampleTable table = load_normalized(o.input, ',', false);
    ordered_json opts;
    opts["input"] = o.input;
    opts["x"] = o.x;
    opts["y"] = o.y;
    opts["z"] = o.z;
    opts["method"] = o.method;
    opts["degree"] = o.degree;
    opts["bins"] = o.bins;
    opts["reference"] = o.reference;
    opts["reference-bins"] = o.reference_bins;
    opts["output"] = o.output;
    opts["matrix"] = o.matrix;

    if (o.x.empty() != o.y.empty())
        throw ie::InvalidInput("--x and --y must be given together");
    if (!o.x.empty()) {
        ordered_json j = dmi_pair_json(table, o.x, o.y, o.z, o, g);
        std::cout << j.dump(2) << "\n";
        if (!o.output.empty()) {
            ie::serialize::write_json_file(j, o.output, g.force);
            write_run_config(o.output, "dmi", g, opts);
        }
        return;
    }

    // Scan mode: every pair, conditioned on all remaining columns.
    if (o.matrix.empty())
        throw ie::InvalidInput("scan mode requires --matrix (or pass --x and --y)");
    if (!o.z.empty())
        throw ie::InvalidInput("--z is only valid together with --x and --y");
    const std::size_t dims = table.columns.size();
    std::vector<std::vector<double>> values(dims, std::vector<double>(dims, 0.0));
    for (std::size_t i = 0; i < dims; ++i) {
        for (std::size_t k = i + 1; k < dims; ++k) {
            std::vector<std::string> rest;
            for (std::size_t c = 0; c < dims; ++c)
                if (c != i && c != k) rest.push_back(table.columns[c]);
            ie::infoflow::MiEstimate direct = ie::infoflow::direct_mutual_information(
                table, table.columns[i], table.columns[k], rest, parse_method(o.method),
                o.degree, o.bins);
            values[i][k] = values[k][i] = in_units(direct.value, g.units);
        }
    }
    write_matrix_csv(o.matrix, table.columns, values, g.force);
    write_run_config(o.matrix, "dmi", g, opts);
}

// --- granger --------------------------------------------------------------------

struct GrangerOptions {
    std::string input;
    std::string target;
    std::string source;
    int lags = ie::granger::kDefaultLagOrder;
    int max_delay = ie::granger::kDefaultMaxDelay;
    int degree = 4;
    std::string mode = "distribution";
    bool decouple = false;
    int sweeps = ie::decoupling::kDefaultSweeps;
    std::vector<std::string> order;
    int pca_rank = 3;
    std::string prefix;
    std::string plot;
};

ie::granger::ResidueMode parse_residue_mode(const std::string& name) {
    if (name == "distribution") return ie::granger::ResidueMode::kDistribution;
    if (name == "linear") return ie::granger::ResidueMode::kLinear;
    throw ie::InvalidInput("unknown residue mode '" + name + "'");
}

void write_profile_csv(const std::string& path, const ie::granger::DelayProfile& profile,
                       const GlobalOptions& g) {
    ie::SampleTable out;
    out.columns = {"delay", "correlation", "mi_" + g.units};
    out.data.resize(3);
    for (std::size_t i = 0; i < profile.delays.size(); ++i) {
        out.data[0].push_back(static_cast<double>(profile.delays[i]));
        out.data[1].push_back(profile.correlation[i]);
        out.data[2].push_back(in_units(profile.mi[i], g.units));
    }
    ie::datasets::write_csv(out, path, g.force);
}

void write_field_csv(const std::string& path, const ie::granger::DelayCoefficientField& field,
                     const GlobalOptions& g) {
    const int order = field.degree + 1;
    ie::SampleTable out;
    out.columns = {"delay", "j", "k", "a"};
    out.data.resize(4);
    for (std::size_t d = 0; d < field.delays.size(); ++d) {
        for (int j = 0; j < order; ++j) {
            for (int k = 0; k < order; ++k) {
                out.data[0].push_back(static_cast<double>(field.delays[d]));
                out.data[1].push_back(static_cast<double>(j));
                out.data[2].push_back(static_cast<double>(k));
                out.data[3].push_back(field.a(d, j, k));
            }
        }
    }
    ie::datasets::write_csv(out, path, g.force);
}

void write_spectrum_csv(const std::string& path,
                        const std::vector<ie::granger::SpectrumPoint>& spectrum,
                        const GlobalOptions& g) {
    ie::SampleTable out;
    out.columns = {"frequency", "magnitude"};
    out.data.resize(2);
    for (const auto& point : spectrum) {
        out.data[0].push_back(point.frequency);
        out.data[1].push_back(point.magnitude);
    }
    ie::datasets::write_csv(out, path, g.force);
}

void plot_profile(const std::string& path, const ie::granger::DelayProfile& profile,
                  const std::string& source, const std::string& target, bool force) {
    ie::svg::SvgSeries corr;
    corr.name = "corr(" + source + " \xE2\x86\x92 " + target + ")";
    for (std::size_t i = 0; i < profile.delays.size(); ++i) {
        corr.xs.push_back(static_cast<double>(profile.delays[i]));
        corr.ys.push_back(profile.correlation[i]);
    }
    double lo = *std::min_element(profile.correlation.begin(), profile.correlation.end());
    double hi = *std::max_element(profile.correlation.begin(), profile.correlation.end());
    ie::svg::SvgSeries marker;
    marker.name = "argmax delay=" + std::to_string(profile.argmax_delay);
    marker.xs = {static_cast<double>(profile.argmax_delay),
                 static_cast<double>(profile.argmax_delay)};
    marker.ys = {lo, hi};
    ie::svg::emit_svg_lineplot({corr, marker}, path, "delay profile", force);
}

void run_granger(GrangerOptions& o, const GlobalOptions& g) {
    ie::SampleTable table = load_normalized(o.input, ',', false);
    if (o.prefix.empty())
        o.prefix = std::filesystem::path(o.input).stem().string() + ".granger";
    ie::granger::ResidueMode mode = parse_residue_mode(o.mode);
    ordered_json opts;
    opts["input"] = o.input;
    opts["target"] = o.target;
    opts["source"] = o.source;
    opts["lags"] = o.lags;
    opts["max-delay"] = o.max_delay;
    opts["degree"] = o.degree;
    opts["mode"] = o.mode;
    opts["decouple"] = o.decouple;
    opts["sweeps"] = o.sweeps;
    opts["order"] = o.order;
    opts["pca-rank"] = o.pca_rank;
    opts["prefix"] = o.prefix;
    opts["plot"] = o.plot;

    if (o.target.empty() != o.source.empty())
        throw ie::InvalidInput("--target and --source must be given together");

    if (o.target.empty()) {
        ie::granger::MultivariateGrangerReport report = ie::granger::multivariate_granger(
            table, o.lags, o.max_delay, o.degree, o.decouple, mode, o.sweeps, o.order,
            o.pca_rank);
        ordered_json j = ie::serialize::to_json(report);
        std::size_t pair_index = 0;
        for (auto pair : report.pairs) {
            scale_profile(pair.profile, g.units);
            j["pairs"][pair_index++] = ie::serialize::to_json(pair);
        }
        j["units"] = g.units;
        const std::string path = o.prefix + ".report.json";
        ie::serialize::write_json_file(j, path, g.force);
        write_run_config(path, "granger", g, opts);
        return;
    }

    if (o.decouple) {
        ie::decoupling::DecoupledDataset dataset = ie::decoupling::decouple(
            table, o.order, ie::extraction::ConditionalMethod::kAuto, o.degree, o.sweeps);
        table = dataset.result;
    }
    const std::vector<double>& target = table.data[table.column_index(o.target)];
    const std::vector<double>& source = table.data[table.column_index(o.source)];
    ie::granger::ResidueSeries residues =
        ie::granger::fit_residues(target, o.lags, o.degree, mode, o.target);
    ie::granger::DelayProfile profile =
        ie::granger::delay_profile(residues, source, o.max_delay);
    ie::granger::DelayCoefficientField field =
        ie::granger::delay_coefficients(residues, source, o.max_delay, o.degree);
    int rank = std::min<int>(o.pca_rank, static_cast<int>(field.delays.size()));
    rank = std::min(rank, field.degree * field.degree);
    ie::granger::DelayFeatureDecomposition pca = ie::granger::pca_reduce(field, rank);
    std::vector<ie::granger::SpectrumPoint> spectrum = ie::granger::delay_spectrum(profile);

    write_profile_csv(o.prefix + ".profile.csv", profile, g);
    write_field_csv(o.prefix + ".field.csv", field, g);
    ie::serialize::write_json_file(ie::serialize::to_json(pca), o.prefix + ".pca.json",
                                   g.force);
    write_spectrum_csv(o.prefix + ".spectrum.csv", spectrum, g);
    if (!o.plot.empty()) plot_profile(o.plot, profile, o.source, o.target, g.force);
    write_run_config(o.prefix + ".profile.csv", "granger", g, opts);
}

// --- report ------------------------------------------------------------------

struct ReportOptions {
    std::string input;
    int bins = ie::infoflow::kDefaultBins;
    std::string output;
    std::string x;
    std::string y;
    std::string plot;
};

void run_report(ReportOptions& o, const GlobalOptions& g) {
    ie::SampleTable table = load_normalized(o.input, ',', false);
    ie::decoupling::DependenceReport report = ie::decoupling::dependence_report(table, o.bins);
    scale_report(report, g.units);
    ordered_json j = ie::serialize::to_json(report);
    j["units"] = g.units;
    std::cout << j.dump(2) << "\n";
    if (!o.plot.empty()) {
        if (o.x.empty() || o.y.empty())
            throw ie::InvalidInput("--plot requires --x and --y");
        const std::vector<double>& xs = table.data[table.column_index(o.x)];
        const std::vector<double>& ys = table.data[table.column_index(o.y)];
        ie::extraction::ExtractionLayer layer = ie::extraction::fit_extraction(
            table, o.x, {o.y}, ie::extraction::ConditionalMethod::kAuto);
        ie::SampleTable extracted = ie::extraction::apply_extraction(layer, table);
        const std::vector<double>& xbar = extracted.data[extracted.column_index(o.x)];
        ie::svg::ScatterPanel before{o.x + " vs " + o.y, ys, xs};
        ie::svg::ScatterPanel after{"extracted " + o.x + " vs " + o.y, ys, xbar};
        ie::svg::emit_svg_scatter({before, after}, o.plot, g.force);
    }
    if (!o.output.empty()) {
        ie::serialize::write_json_file(j, o.output, g.force);
        ordered_json opts;
        opts["input"] = o.input;
        opts["bins"] = o.bins;
        opts["output"] = o.output;
        opts["x"] = o.x;
        opts["y"] = o.y;
        opts["plot"] = o.plot;
        write_run_config(o.output, "report", g, opts);
    }
}

// --- error reporting -----------------------------------------------------------

int exit_code_for(const ie::Error& error) {
    if (dynamic_cast<const ie::NumericalFailure*>(&error)) return 2;
    if (dynamic_cast<const ie::CapacityExceeded*>(&error)) return 2;
    return 1;
}

const char* error_type_name(const ie::Error& error) {
    if (dynamic_cast<const ie::ParseError*>(&error)) return "ParseError";
    if (dynamic_cast<const ie::FormatError*>(&error)) return "FormatError";
    if (dynamic_cast<const ie::InvalidInput*>(&error)) return "InvalidInput";
    if (dynamic_cast<const ie::CapacityExceeded*>(&error)) return "CapacityExceeded";
    if (dynamic_cast<const ie::NumericalFailure*>(&error)) return "NumericalFailure";
    if (dynamic_cast<const ie::Unsupported*>(&error)) return "Unsupported";
    if (dynamic_cast<const ie::RefusedOverwrite*>(&error)) return "RefusedOverwrite";
    return "Error";
}

int report_error(const ie::Error& error, bool json_errors) {
    if (json_errors) {
        ordered_json j;
        j["error"]["type"] = error_type_name(error);
        j["error"]["message"] = error.what();
        if (const auto* parse = dynamic_cast<const ie::ParseError*>(&error)) {
            j["error"]["line"] = parse->line();
            j["error"]["column"] = parse->column();
        }
        std::cerr << j.dump() << "\n";
    } else {
        std::cerr << "infoextract: " << error_type_name(error) << ": " << error.what() << "\n";
    }
    return exit_code_for(error);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conditional-CDF information extraction toolkit"};
    app.require_subcommand(1);

    GlobalOptions global;
    if (const char* env = std::getenv("INFOEXTRACT_THREADS")) global.threads = std::atoi(env);
    app.add_option("--threads", global.threads, "worker thread limit (0 = hardware)");
    app.add_flag("--force", global.force, "overwrite existing output files");
    app.add_flag("--json-errors", global.json_errors, "report errors as JSON on stderr");
    app.add_option("--units", global.units, "information units")
        ->check(CLI::IsMember({"bits", "nats"}));

    SynthOptions synth;
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a benchmark dataset");
    synth_cmd->add_option("--kind", synth.kind, "generator kind")->required();
    synth_cmd->add_option("--seed", synth.spec.seed, "RNG seed");
    synth_cmd->add_option("-n,--n", synth.spec.n, "sample count");
    synth_cmd->add_option("--dims", synth.spec.dims, "column count (gaussian-copula)");
    synth_cmd->add_option("--rho", synth.spec.rho, "copula correlation");
    synth_cmd->add_option("--alpha", synth.spec.alpha, "markov-chain X to Z weight");
    synth_cmd->add_option("--beta", synth.spec.beta, "markov-chain Z to Y weight");
    synth_cmd->add_option("--noise", synth.spec.noise, "markov-chain noise scale");
    synth_cmd->add_option("--delay", synth.spec.delay, "lagged-pair delay");
    synth_cmd->add_option("--coupling", synth.spec.coupling, "lagged-pair coupling");
    synth_cmd->add_option("--d1", synth.spec.d1, "lagged-chain x to y delay");
    synth_cmd->add_option("--d2", synth.spec.d2, "lagged-chain y to z delay");
    synth_cmd->add_option("--c1", synth.spec.c1, "lagged-chain x to y coupling");
    synth_cmd->add_option("--c2", synth.spec.c2, "lagged-chain y to z coupling");
    synth_cmd->add_flag("--normalized", synth.spec.normalized, "emit quantile-normalized data");
    synth_cmd->add_option("-o,--output", synth.output, "output CSV path")->required();

    NormalizeOptions normalize;
    CLI::App* normalize_cmd = app.add_subcommand("normalize", "quantile-normalize a CSV");
    normalize_cmd->add_option("-i,--input", normalize.input, "input CSV path")->required();
    normalize_cmd->add_option("-o,--output", normalize.output, "output CSV path")->required();
    normalize_cmd->add_option("--delimiter", normalize.delimiter, "cell delimiter");
    normalize_cmd->add_flag("--drop-missing", normalize.drop_missing,
                            "drop rows with missing cells");

    ExtractOptions extract;
    CLI::App* extract_cmd = app.add_subcommand("extract", "extract individual information");
    extract_cmd->add_option("-i,--input", extract.input, "input CSV path")->required();
    extract_cmd->add_option("--target", extract.target, "column to transform")->required();
    extract_cmd->add_option("--given", extract.given, "conditioning columns")
        ->required()
        ->delimiter(',');
    extract_cmd->add_option("--method", extract.method, "conditional estimator")
        ->check(CLI::IsMember({"auto", "joint-slice", "moment-regression"}));
    extract_cmd->add_option("--degree", extract.degree, "polynomial degree");
    extract_cmd->add_option("--grid", extract.grid, "calibration grid size");
    extract_cmd->add_option("--floor", extract.floor, "density floor");
    extract_cmd->add_option("--iterations", extract.iterations, "repeat count");
    extract_cmd->add_option("-o,--output", extract.output, "output CSV path")->required();
    extract_cmd->add_option("--layers", extract.layers, "layer stack JSON path");

    ReconstructOptions reconstruct;
    CLI::App* reconstruct_cmd = app.add_subcommand("reconstruct", "invert a layer stack");
    reconstruct_cmd->add_option("-i,--input", reconstruct.input, "transformed CSV path")
        ->required();
    reconstruct_cmd->add_option("--layers", reconstruct.layers, "layer stack JSON path")
        ->required();
    reconstruct_cmd->add_option("-o,--output", reconstruct.output, "output CSV path")
        ->required();

    DecoupleOptions decouple;
    CLI::App* decouple_cmd = app.add_subcommand("decouple", "decouple all columns");
    decouple_cmd->add_option("-i,--input", decouple.input, "input CSV path")->required();
    decouple_cmd->add_option("--order", decouple.order, "column visit order")->delimiter(',');
    decouple_cmd->add_option("--method", decouple.method, "conditional estimator")
        ->check(CLI::IsMember({"auto", "joint-slice", "moment-regression"}));
    decouple_cmd->add_option("--degree", decouple.degree, "polynomial degree");
    decouple_cmd->add_option("--sweeps", decouple.sweeps, "sweep count");
    decouple_cmd->add_option("--conditioning", decouple.conditioning,
                             "condition on current or original columns")
        ->check(CLI::IsMember({"current", "original"}));
    decouple_cmd->add_option("-o,--output", decouple.output, "output CSV path")->required();
    decouple_cmd->add_option("--layers", decouple.layers, "layer stack JSON path");
    decouple_cmd->add_option("--report", decouple.report, "dependence report JSON path");

    MiOptions mi;
    CLI::App* mi_cmd = app.add_subcommand("mi", "estimate mutual information");
    mi_cmd->add_option("-i,--input", mi.input, "input CSV path")->required();
    mi_cmd->add_option("--x", mi.x, "first column")->required();
    mi_cmd->add_option("--y", mi.y, "second column")->required();
    mi_cmd->add_option("--estimator", mi.estimator, "binned or hcr")
        ->check(CLI::IsMember({"binned", "hcr"}));
    mi_cmd->add_option("--bins", mi.bins, "bin count per axis");
    mi_cmd->add_option("--degree", mi.degree, "polynomial degree (hcr)");
    mi_cmd->add_option("-o,--output", mi.output, "output JSON path");

    DmiOptions dmi;
    CLI::App* dmi_cmd = app.add_subcommand("dmi", "direct mutual information");
    dmi_cmd->add_option("-i,--input", dmi.input, "input CSV path")->required();
    dmi_cmd->add_option("--x", dmi.x, "first column");
    dmi_cmd->add_option("--y", dmi.y, "second column");
    dmi_cmd->add_option("--z", dmi.z, "conditioning columns")->delimiter(',');
    dmi_cmd->add_option("--method", dmi.method, "conditional estimator")
        ->check(CLI::IsMember({"auto", "joint-slice", "moment-regression"}));
    dmi_cmd->add_option("--degree", dmi.degree, "polynomial degree");
    dmi_cmd->add_option("--bins", dmi.bins, "bin count per axis");
    dmi_cmd->add_flag("--reference", dmi.reference, "also compute the chain-rule reference");
    dmi_cmd->add_option("--reference-bins", dmi.reference_bins, "reference bin count");
    dmi_cmd->add_option("-o,--output", dmi.output, "output JSON path");
    dmi_cmd->add_option("--matrix", dmi.matrix, "scan-mode matrix CSV path");

    GrangerOptions granger;
    CLI::App* granger_cmd = app.add_subcommand("granger", "multi-feature causality analysis");
    granger_cmd->add_option("-i,--input", granger.input, "input CSV path")->required();
    granger_cmd->add_option("--target", granger.target, "target column");
    granger_cmd->add_option("--source", granger.source, "source column");
    granger_cmd->add_option("--lags", granger.lags, "autoregressive lag order");
    granger_cmd->add_option("--max-delay", granger.max_delay, "largest tested delay");
    granger_cmd->add_option("--degree", granger.degree, "polynomial degree");
    granger_cmd->add_option("--mode", granger.mode, "residue mode")
        ->check(CLI::IsMember({"distribution", "linear"}));
    granger_cmd->add_flag("--decouple", granger.decouple, "decouple the panel first");
    granger_cmd->add_option("--sweeps", granger.sweeps, "decoupling sweeps");
    granger_cmd->add_option("--order", granger.order, "decoupling order")->delimiter(',');
    granger_cmd->add_option("--pca-rank", granger.pca_rank, "retained PCA directions");
    granger_cmd->add_option("-o,--output", granger.prefix, "output path prefix");
    granger_cmd->add_option("--plot", granger.plot, "delay profile SVG path");

    ReportOptions report;
    CLI::App* report_cmd = app.add_subcommand("report", "pairwise dependence report");
    report_cmd->add_option("-i,--input", report.input, "input CSV path")->required();
    report_cmd->add_option("--bins", report.bins, "bin count per axis");
    report_cmd->add_option("-o,--output", report.output, "output JSON path");
    report_cmd->add_option("--x", report.x, "scatter x column");
    report_cmd->add_option("--y", report.y, "scatter y column");
    report_cmd->add_option("--plot", report.plot, "before/after scatter SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    ie::set_thread_limit(global.threads > 0 ? static_cast<unsigned>(global.threads) : 0);

    try {
        if (synth_cmd->parsed()) run_synth(synth, global);
        if (normalize_cmd->parsed()) run_normalize(normalize, global);
        if (extract_cmd->parsed()) run_extract(extract, global);
        if (reconstruct_cmd->parsed()) run_reconstruct(reconstruct, global);
        if (decouple_cmd->parsed()) run_decouple(decouple, global);
        if (mi_cmd->parsed()) run_mi(mi, global);
        if (dmi_cmd->parsed()) run_dmi(dmi, global);
        if (granger_cmd->parsed()) run_granger(granger, global);
        if (report_cmd->parsed()) run_report(report, global);
    } catch (const ie::Error& error) {
        return report_error(error, global.json_errors);
    } catch (const std::exception& error) {
        std::cerr << "infoextract: internal error: " << error.what() << "\n";
        return 2;
    }
    return 0;
}
