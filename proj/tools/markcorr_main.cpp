// markcorr command line tool. All analysis goes through the public C API; this
// file only handles argument parsing, file naming and run manifests.
#include <algorithm>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "markcorr/markcorr.h"

namespace {

// Expands `--config file` into ordinary flags: every `key = value` line whose
// flag is absent from the command line is appended, so explicit flags always
// win over the file, and the file over built-in defaults.
std::vector<std::string> apply_config_file(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    std::string config_path;
    std::set<std::string> given;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) {
                std::fprintf(stderr, "markcorr: --config expects a file path\n");
                std::exit(1);
            }
            config_path = args[++i];
            continue;
        }
        if (args[i].rfind("--", 0) == 0) given.insert(args[i]);
        out.push_back(args[i]);
    }
    if (config_path.empty()) return out;

    std::ifstream file(config_path);
    if (!file) {
        std::fprintf(stderr, "markcorr: cannot open config file %s\n", config_path.c_str());
        std::exit(1);
    }
    std::string line;
    while (std::getline(file, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) continue;
        const std::string flag = "--" + key;
        if (given.count(flag)) continue;
        out.push_back(flag);
        std::stringstream parts(value); // multi-valued options are space separated
        std::string token;
        while (parts >> token) out.push_back(token);
    }
    return out;
}

[[noreturn]] void die(const std::string& context, mcf_status status) {
    std::fprintf(stderr, "markcorr: %s: %s\n", context.c_str(), mcf_last_error());
    std::exit(status == MCF_OK ? 1 : static_cast<int>(status));
}

void check(mcf_status status, const std::string& context) {
    if (status != MCF_OK) die(context, status);
}

struct PatternHandle {
    mcf_pattern* ptr = nullptr;
    ~PatternHandle() { mcf_pattern_free(ptr); }
};
struct IntensityHandle {
    mcf_intensity* ptr = nullptr;
    ~IntensityHandle() { mcf_intensity_free(ptr); }
};
struct CurveHandle {
    mcf_curve* ptr = nullptr;
    ~CurveHandle() { mcf_curve_free(ptr); }
};
struct EnvelopeHandle {
    mcf_envelope* ptr = nullptr;
    ~EnvelopeHandle() { mcf_envelope_free(ptr); }
};
struct SimulatorHandle {
    mcf_simulator* ptr = nullptr;
    ~SimulatorHandle() { mcf_simulator_free(ptr); }
};

// Options shared by the commands that read a pattern CSV.
struct CommonOptions {
    std::string input;
    std::string output = "markcorr_out";
    std::vector<double> window; // empty: bounding box of the data
    std::string flavor = "inhom";
    std::string tf = "mm";
    std::string edge = "translation";
    std::string form = "density";
    std::string bandwidth = "auto"; // intensity bandwidth
    double rmax = 0.0;
    int rsteps = 100;
    double pair_bandwidth = 0.0;
    int perms = 999;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    int grid = 128;
    std::string preset = "assoc-poisson";
};

void add_window_option(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--window", opt.window,
                    "observation window as xmin xmax ymin ymax (default: data bounding box)")
        ->expected(4);
}

PatternHandle load_pattern(const CommonOptions& opt) {
    PatternHandle pattern;
    const double* window = opt.window.size() == 4 ? opt.window.data() : nullptr;
    check(mcf_pattern_read_csv(opt.input.c_str(), window, &pattern.ptr), "reading " + opt.input);
    for (size_t i = 0; i < mcf_pattern_warning_count(pattern.ptr); ++i) {
        std::fprintf(stderr, "warning: %s\n", mcf_pattern_warning(pattern.ptr, i));
    }
    return pattern;
}

double parse_bandwidth(const std::string& text) {
    if (text == "auto") return 0.0;
    try {
        return std::stod(text);
    } catch (...) {
        std::fprintf(stderr, "markcorr: --bandwidth expects a number or `auto`\n");
        std::exit(1);
    }
}

mcf_statistic_spec build_statistic(const CommonOptions& opt) {
    mcf_statistic_spec spec;
    mcf_statistic_spec_default(&spec);
    spec.flavor = opt.flavor == "hom" ? MCF_FLAVOR_HOMOGENEOUS : MCF_FLAVOR_INHOMOGENEOUS;
    spec.tf = opt.tf == "vario" ? MCF_TF_VARIO : MCF_TF_MM;
    spec.edge = opt.edge == "ripley" ? MCF_EDGE_RIPLEY : MCF_EDGE_TRANSLATION;
    spec.form = opt.form == "cumulative" ? MCF_FORM_CUMULATIVE : MCF_FORM_DENSITY;
    spec.rgrid = {opt.rmax, opt.rsteps, opt.pair_bandwidth};
    spec.intensity_bandwidth = parse_bandwidth(opt.bandwidth);
    spec.grid_nx = opt.grid;
    spec.grid_ny = opt.grid;
    return spec;
}

// the estimators take an intensity handle; NULL means the constant field
IntensityHandle build_intensity(const CommonOptions& opt, const PatternHandle& pattern) {
    IntensityHandle intensity;
    if (opt.flavor == "hom") return intensity;
    check(mcf_intensity_kernel(pattern.ptr, MCF_INTENSITY_MASS_CONSERVING,
                               parse_bandwidth(opt.bandwidth), opt.grid, opt.grid, &intensity.ptr),
          "estimating intensity");
    return intensity;
}

// temp-and-rename, matching the library's own writers
void write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    FILE* f = std::fopen(tmp.c_str(), "w");
    if (!f) {
        std::fprintf(stderr, "markcorr: cannot write %s\n", tmp.c_str());
        std::exit(1);
    }
    std::fwrite(content.data(), 1, content.size(), f);
    std::fclose(f);
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::fprintf(stderr, "markcorr: cannot move %s into place\n", tmp.c_str());
        std::exit(1);
    }
}

std::string replicate_name(const std::string& outdir, int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "/replicate_%03d.csv", index);
    return outdir + buf;
}

int cmd_simulate(const CommonOptions& opt, int replicates) {
    std::error_code ec;
    std::filesystem::create_directories(opt.output, ec);
    SimulatorHandle simulator;
    check(mcf_simulator_create(opt.preset.c_str(), &simulator.ptr), "preset " + opt.preset);

    nlohmann::json manifest;
    manifest["preset"] = opt.preset;
    manifest["seed"] = opt.seed;
    manifest["replicates"] = replicates;
    auto& files = manifest["files"];
    auto& counts = manifest["counts"];
    for (int i = 0; i < replicates; ++i) {
        PatternHandle pattern;
        check(mcf_simulator_replicate(simulator.ptr, opt.seed, static_cast<std::uint64_t>(i),
                                      &pattern.ptr),
              "simulating replicate");
        const std::string path = replicate_name(opt.output, i);
        check(mcf_pattern_write_csv(pattern.ptr, path.c_str()), "writing " + path);
        files.push_back(path);
        counts.push_back(mcf_pattern_size(pattern.ptr));
        double window[4];
        mcf_pattern_window(pattern.ptr, window);
        manifest["window"] = {window[0], window[1], window[2], window[3]};
    }
    write_text(opt.output + "/manifest.json", manifest.dump(2) + "\n");
    std::printf("wrote %d replicate(s) and manifest.json under %s\n", replicates,
                opt.output.c_str());
    return 0;
}

int cmd_markcorr(const CommonOptions& opt) {
    const PatternHandle pattern = load_pattern(opt);
    const IntensityHandle intensity = build_intensity(opt, pattern);

    const mcf_rgrid_spec rgrid{opt.rmax, opt.rsteps, opt.pair_bandwidth};
    CurveHandle curve;
    check(mcf_curve_kappa(pattern.ptr, intensity.ptr,
                          opt.tf == "vario" ? MCF_TF_VARIO : MCF_TF_MM,
                          opt.form == "cumulative" ? MCF_FORM_CUMULATIVE : MCF_FORM_DENSITY,
                          opt.edge == "ripley" ? MCF_EDGE_RIPLEY : MCF_EDGE_TRANSLATION, &rgrid,
                          &curve.ptr),
          "computing curve");
    const std::string csv = opt.output + ".csv";
    const std::string json = opt.output + ".json";
    check(mcf_curve_write(curve.ptr, csv.c_str(), json.c_str()), "writing curve");
    std::printf("wrote %s and %s\n", csv.c_str(), json.c_str());
    return 0;
}

int cmd_envelope(const CommonOptions& opt) {
    const PatternHandle pattern = load_pattern(opt);
    const mcf_statistic_spec spec = build_statistic(opt);
    EnvelopeHandle envelope;
    check(mcf_envelope_run(pattern.ptr, &spec, opt.perms, opt.alpha, opt.seed, &envelope.ptr),
          "running envelope test");
    const std::string csv = opt.output + ".csv";
    const std::string json = opt.output + ".json";
    check(mcf_envelope_write(envelope.ptr, csv.c_str(), json.c_str()), "writing envelope");
    if (opt.alpha * (opt.perms + 1) < 1.0) {
        std::fprintf(stderr,
                     "warning: %d permutations cannot resolve alpha=%g; the envelope keeps "
                     "every curve\n",
                     opt.perms, opt.alpha);
    }
    double p_lower = 0.0, p_upper = 0.0;
    mcf_envelope_pvalues(envelope.ptr, &p_lower, &p_upper);
    std::printf("p interval [%g, %g], %s at alpha=%g; wrote %s and %s\n", p_lower, p_upper,
                mcf_envelope_reject(envelope.ptr) ? "reject" : "no rejection", opt.alpha,
                csv.c_str(), json.c_str());
    return 0; // the verdict is data, not a failure
}

int cmd_power_study(const CommonOptions& opt, int patterns) {
    const mcf_statistic_spec spec = build_statistic(opt);
    mcf_power_result result;
    check(mcf_power_study(opt.preset.c_str(), patterns, opt.perms, opt.alpha, opt.seed, &spec,
                          &result),
          "running power study");

    std::string csv = "preset,flavor,mark_rule,rejection_rate,completed\n";
    char buf[256];
    const auto row = [&](const char* flavor, const char* rule, double rate, int completed) {
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%.6g,%d\n", opt.preset.c_str(), flavor, rule,
                      rate, completed);
        csv += buf;
    };
    row("inhomogeneous", "scenario", result.power_inhomogeneous, result.completed_power);
    row("homogeneous", "scenario", result.power_homogeneous, result.completed_power);
    row("inhomogeneous", "iid-uniform", result.type1_inhomogeneous, result.completed_type1);
    row("homogeneous", "iid-uniform", result.type1_homogeneous, result.completed_type1);
    write_text(opt.output + ".csv", csv);

    nlohmann::json j;
    j["preset"] = opt.preset;
    j["patterns"] = patterns;
    j["permutations"] = opt.perms;
    j["alpha"] = opt.alpha;
    j["seed"] = opt.seed;
    j["failures"] = result.failures;
    j["power"] = {{"inhomogeneous", result.power_inhomogeneous},
                  {"homogeneous", result.power_homogeneous}};
    j["type1"] = {{"inhomogeneous", result.type1_inhomogeneous},
                  {"homogeneous", result.type1_homogeneous}};
    write_text(opt.output + ".json", j.dump(2) + "\n");

    std::printf("%s", csv.c_str());
    if (result.failures > 0) {
        std::fprintf(stderr, "warning: %d pattern(s) failed and were excluded\n", result.failures);
    }
    return 0;
}

int cmd_intensity(const CommonOptions& opt, const std::string& estimator, double retention,
                  int replicates) {
    const PatternHandle pattern = load_pattern(opt);
    IntensityHandle intensity;
    if (estimator == "voronoi") {
        check(mcf_intensity_voronoi(pattern.ptr, retention, replicates, opt.seed, opt.grid,
                                    opt.grid, &intensity.ptr),
              "voronoi intensity");
    } else if (estimator == "constant") {
        check(mcf_intensity_constant(pattern.ptr, &intensity.ptr), "constant intensity");
    } else {
        const mcf_intensity_kind kind =
            estimator == "uniform" ? MCF_INTENSITY_UNIFORM : MCF_INTENSITY_MASS_CONSERVING;
        check(mcf_intensity_kernel(pattern.ptr, kind, parse_bandwidth(opt.bandwidth), opt.grid,
                                   opt.grid, &intensity.ptr),
              "kernel intensity");
    }
    const std::string csv = opt.output + ".csv";
    const std::string json = opt.output + ".json";
    check(mcf_intensity_write(intensity.ptr, csv.c_str(), json.c_str()), "writing intensity");
    std::printf("wrote %s and %s (bandwidth %g, mass %g)\n", csv.c_str(), json.c_str(),
                mcf_intensity_bandwidth(intensity.ptr), mcf_intensity_grid_mass(intensity.ptr));
    return 0;
}

int cmd_marksurface(const CommonOptions& opt, const std::string& statistic) {
    const PatternHandle pattern = load_pattern(opt);
    const std::string csv = opt.output + ".csv";
    const std::string json = opt.output + ".json";
    double selected = 0.0;
    check(mcf_mark_surface_write(pattern.ptr, parse_bandwidth(opt.bandwidth), opt.grid, opt.grid,
                                 statistic == "variance" ? 1 : 0, csv.c_str(), json.c_str(),
                                 &selected),
          "smoothing marks");
    std::printf("wrote %s and %s (bandwidth %g)\n", csv.c_str(), json.c_str(), selected);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mark correlation analysis for spatial point patterns"};
    app.require_subcommand(1);

    CommonOptions opt;
    int replicates = 1;
    int patterns = 50;
    std::string estimator = "mass";
    std::string statistic = "mean";

    const auto add_io = [&](CLI::App* cmd) {
        cmd->add_option("--input", opt.input, "pattern CSV with header x,y,mark")->required();
        cmd->add_option("--output", opt.output, "output path prefix");
        add_window_option(cmd, opt);
    };
    const auto add_statistic_flags = [&](CLI::App* cmd) {
        cmd->add_option("--flavor", opt.flavor, "hom or inhom")
            ->check(CLI::IsMember({"hom", "inhom"}));
        cmd->add_option("--tf", opt.tf, "test function: mm or vario")
            ->check(CLI::IsMember({"mm", "vario"}));
        cmd->add_option("--edge", opt.edge, "edge correction: translation or ripley")
            ->check(CLI::IsMember({"translation", "ripley"}));
        cmd->add_option("--form", opt.form, "curve form: density or cumulative")
            ->check(CLI::IsMember({"density", "cumulative"}));
        cmd->add_option("--bandwidth", opt.bandwidth, "intensity bandwidth or `auto`");
        cmd->add_option("--rmax", opt.rmax, "largest r (default: shorter side / 4)");
        cmd->add_option("--rsteps", opt.rsteps, "number of r steps (grid has rsteps+1 values)");
        cmd->add_option("--pair-bandwidth", opt.pair_bandwidth,
                        "pair kernel bandwidth (default: Stoyan rule)");
        cmd->add_option("--grid", opt.grid, "intensity grid resolution per axis");
    };

    auto* simulate = app.add_subcommand("simulate", "generate scenario replicates");
    simulate->add_option("--preset", opt.preset, "scenario preset")->required();
    simulate->add_option("--replicates", replicates, "number of replicates");
    simulate->add_option("--seed", opt.seed, "run seed");
    simulate->add_option("--output", opt.output, "output directory (created if missing)")->required();

    auto* markcorr = app.add_subcommand("markcorr", "mark correlation curve for one pattern");
    add_io(markcorr);
    add_statistic_flags(markcorr);

    auto* envelope = app.add_subcommand("envelope", "random labelling envelope test");
    add_io(envelope);
    add_statistic_flags(envelope);
    envelope->add_option("--perms", opt.perms, "number of permutations");
    envelope->add_option("--alpha", opt.alpha, "significance level");
    envelope->add_option("--seed", opt.seed, "run seed");

    auto* power = app.add_subcommand("power-study", "rejection rates over simulated patterns");
    power->add_option("--preset", opt.preset, "scenario preset")->required();
    power->add_option("--patterns", patterns, "number of simulated patterns");
    power->add_option("--perms", opt.perms, "permutations per test");
    power->add_option("--alpha", opt.alpha, "significance level");
    power->add_option("--seed", opt.seed, "run seed");
    power->add_option("--output", opt.output, "output path prefix");
    add_statistic_flags(power);

    auto* intensity = app.add_subcommand("intensity", "intensity surface estimate");
    add_io(intensity);
    intensity->add_option("--estimator", estimator, "uniform, mass, voronoi or constant")
        ->check(CLI::IsMember({"uniform", "mass", "voronoi", "constant"}));
    intensity->add_option("--bandwidth", opt.bandwidth, "kernel bandwidth or `auto`");
    intensity->add_option("--grid", opt.grid, "grid resolution per axis");
    double retention = 0.2;
    int vreplicates = 100;
    intensity->add_option("--retention", retention, "voronoi thinning retention probability");
    intensity->add_option("--replicates", vreplicates, "voronoi thinning replicates");
    intensity->add_option("--seed", opt.seed, "run seed");

    auto* surface = app.add_subcommand("marksurface", "smoothed mark mean or variance surface");
    add_io(surface);
    surface->add_option("--statistic", statistic, "mean or variance")
        ->check(CLI::IsMember({"mean", "variance"}));
    surface->add_option("--bandwidth", opt.bandwidth, "kernel bandwidth or `auto`");
    surface->add_option("--grid", opt.grid, "grid resolution per axis");

    // document --config; it is expanded before parsing
    std::string config_doc;
    for (auto* cmd : {simulate, markcorr, envelope, power, intensity, surface}) {
        cmd->add_option("--config", config_doc,
                        "key=value config file; explicit flags take precedence");
    }

    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config_file(args);
    std::reverse(args.begin(), args.end()); // CLI11 consumes from the back
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (simulate->parsed()) return cmd_simulate(opt, replicates);
    if (markcorr->parsed()) return cmd_markcorr(opt);
    if (envelope->parsed()) return cmd_envelope(opt);
    if (power->parsed()) return cmd_power_study(opt, patterns);
    if (intensity->parsed()) return cmd_intensity(opt, estimator, retention, vreplicates);
    if (surface->parsed()) return cmd_marksurface(opt, statistic);
    return 1;
}
