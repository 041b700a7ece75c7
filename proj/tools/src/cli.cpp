#include "cvtomo/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cvtomo/cvtomo.hpp"
#include "cvtomo/io.hpp"

namespace cvtomo::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

/// Non-finite numbers in a computed result.
class NumericalFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Invocation {
    std::string subcommand;
    std::vector<std::string> args;
};

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_manifest(const fs::path& output, const Invocation& inv, const json& config, const json& inputs,
                    const std::vector<fs::path>& outputs, std::optional<std::uint64_t> seed) {
    json outs = json::array();
    for (const auto& p : outputs) outs.push_back(p.string());
    json m = {{"subcommand", inv.subcommand},
              {"argv", inv.args},
              {"config", config},
              {"inputs", inputs},
              {"outputs", outs},
              {"tool_version", CVTOMO_VERSION},
              {"timestamp", utc_timestamp()},
              {"seed", seed ? json(*seed) : json(nullptr)}};
    io::write_json(fs::path(output.string() + ".manifest.json"), m);
}

void require_finite(double v, const std::string& what) {
    if (!std::isfinite(v)) throw NumericalFailure("non-finite value in " + what);
}

std::pair<int, int> parse_rows_cols(const std::string& spec) {
    const auto x = spec.find_first_of("xX");
    try {
        if (x == std::string::npos) throw std::invalid_argument("");
        std::size_t used = 0;
        const int r = std::stoi(spec.substr(0, x), &used);
        if (used != x) throw std::invalid_argument("");
        const std::string rest = spec.substr(x + 1);
        const int c = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("");
        return {r, c};
    } catch (const std::exception&) {
        throw std::invalid_argument("--equidistant expects ROWSxCOLS, got '" + spec + "'");
    }
}

std::string format_fixed(double v, int prec = 6) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(prec) << v;
    return os.str();
}

// ---------------------------------------------------------------- sample

struct SampleOptions {
    std::string state;
    std::optional<int> padua;
    std::optional<std::string> equidistant;
    double L = kDefaultHalfWidth;
    double eps = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    std::string function = "husimi_q";
    std::string out;
};

int cmd_sample(const SampleOptions& o, const Invocation& inv, std::ostream& out) {
    if (o.padua.has_value() == o.equidistant.has_value()) {
        throw std::invalid_argument("sample: give exactly one of --padua N or --equidistant ROWSxCOLS");
    }
    const auto rho = io::read_state(o.state);
    PhaseGrid grid;
    if (o.padua) {
        grid = padua_points(*o.padua, o.L);
    } else {
        const auto [r, c] = parse_rows_cols(*o.equidistant);
        grid = equidistant_grid(r, c, o.L);
    }
    const auto tag = function_tag_from_string(o.function);
    const auto rec = sample_state(rho, grid, tag, o.eps, o.seed, o.trial);
    for (double v : rec.values) require_finite(v, "sampled values");
    io::write_record(o.out, rec);

    json config = {{"grid", io::grid_to_json(grid)}, {"function", o.function}, {"eps", o.eps}, {"trial", o.trial}};
    std::vector<fs::path> outputs = {o.out};
    if (fs::path(o.out).extension() == ".csv") outputs.emplace_back(o.out + ".json");
    write_manifest(o.out, inv, config, {{"state", o.state}}, outputs, o.seed);
    out << "wrote " << rec.values.size() << "-point " << to_string(grid.kind) << " record to " << o.out << "\n";
    return kOk;
}

// ----------------------------------------------------------- interpolate

struct InterpolateOptions {
    std::string record;
    int resolution = 100;
    std::optional<double> threshold;
    std::optional<std::size_t> keep;
    std::string out;
    std::string csv;
};

int cmd_interpolate(const InterpolateOptions& o, const Invocation& inv, std::ostream& out) {
    auto rec = io::read_record(o.record);
    json config = {{"resolution", o.resolution}};
    if (o.threshold && o.keep) throw std::invalid_argument("interpolate: --threshold and --keep are exclusive");
    if (o.threshold) {
        if (rec.grid.kind != GridKind::padua) {
            throw std::invalid_argument("interpolate: --threshold needs a padua record (use --keep for equidistant grids)");
        }
        auto t = threshold_padua(rec, *o.threshold);
        out << "thresholded at " << io::format_double(*o.threshold) << ": " << t.surviving << " nonzero of "
            << rec.values.size() << " measurements\n";
        rec = std::move(t.record);
        config["threshold"] = *o.threshold;
    }
    if (o.keep) {
        if (rec.grid.kind != GridKind::equidistant) {
            throw std::invalid_argument("interpolate: --keep needs an equidistant record (use --threshold for padua)");
        }
        auto t = threshold_equidistant(rec, *o.keep);
        out << "kept " << t.surviving << " nonzero of " << rec.values.size() << " measurements\n";
        rec = std::move(t.record);
        config["keep"] = *o.keep;
    }
    const auto coeffs = interpolate(rec);
    const auto dense = eval_grid(coeffs, o.resolution);
    for (double v : coeffs.matrix().reshaped()) require_finite(v, "coefficients");
    for (double v : dense.values) require_finite(v, "dense grid");

    const fs::path csv = o.csv.empty() ? fs::path(o.out).replace_extension(".csv") : fs::path(o.csv);
    json doc = io::cheb_to_json(coeffs);
    doc["grid_kind"] = to_string(rec.grid.kind);
    io::write_json(o.out, doc);
    io::write_text(csv, io::dense_grid_csv(dense));
    config["csv"] = csv.string();
    write_manifest(o.out, inv, config, {{"record", o.record}}, {o.out, csv}, std::nullopt);
    write_manifest(csv, inv, config, {{"record", o.record}}, {o.out, csv}, std::nullopt);
    out << "order " << coeffs.order() << " expansion from " << rec.values.size() << " points; wrote " << o.out << " and "
        << csv.string() << "\n";
    return kOk;
}

// -------------------------------------------------------------- estimate

struct EstimateOptions {
    std::string record;
    int d_max = 4;
    double K = 1.0;
    std::string oracle;
    std::string out;
};

int cmd_estimate(const EstimateOptions& o, const Invocation& inv, std::ostream& out, std::ostream& err) {
    const auto rec = io::read_record(o.record);
    std::optional<DensityMatrix> oracle;
    if (!o.oracle.empty()) oracle = io::read_state(o.oracle);
    const auto table = estimate_with_errors(rec, oracle, o.d_max, o.K);
    for (const auto& e : table.entries) {
        require_finite(e.value.real(), "estimate");
        require_finite(e.value.imag(), "estimate");
        require_finite(e.sigma_bound, "sigma_bound");
        if (e.recon_bound) require_finite(*e.recon_bound, "recon_bound");
    }
    io::write_json(o.out, io::estimates_to_json(table));
    json config = {{"d_max", o.d_max}, {"K", o.K}, {"recon_note", table.recon_note}, {"warnings", table.warnings}};
    json inputs = {{"record", o.record}};
    if (!o.oracle.empty()) inputs["oracle"] = o.oracle;
    write_manifest(o.out, inv, config, inputs, {o.out}, std::nullopt);

    out << "rho estimates (n = " << rec.grid.order << ", N = " << rec.values.size() << ", epsilon = "
        << io::format_double(rec.noise_sigma) << ", K = " << io::format_double(o.K) << ")\n";
    out << std::setw(3) << "j" << std::setw(3) << "k" << std::setw(15) << "re" << std::setw(15) << "im" << std::setw(15)
        << "sigma_bound" << std::setw(15) << "recon_bound" << "\n";
    for (const auto& e : table.entries) {
        out << std::setw(3) << e.j << std::setw(3) << e.k << std::setw(15) << format_fixed(e.value.real())
            << std::setw(15) << format_fixed(e.value.imag()) << std::setw(15) << format_fixed(e.sigma_bound, 3)
            << std::setw(15) << (e.recon_bound ? format_fixed(*e.recon_bound, 3) : std::string("n/a")) << "\n";
    }
    out << table.recon_note << "\n";
    for (const auto& w : table.warnings) err << "warning: " << w << "\n";
    return kOk;
}

// ----------------------------------------------------------------- study

struct StudyOptions {
    std::string kind;
    std::string config;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> L;
    std::optional<int> trials;
};

std::string summary_csv(const StudyResult& r) {
    std::ostringstream os;
    os << "metric,value\n";
    for (const auto& [k, v] : r.summary) os << k << ',' << io::format_double(v) << '\n';
    return os.str();
}

int cmd_study(const StudyOptions& o, const Invocation& inv, std::ostream& out, std::ostream& err) {
    auto config = io::config_from_json(io::read_json(o.config));
    if (o.seed) config.seed = *o.seed;
    if (o.L) config.half_width = *o.L;
    if (o.trials) config.trials = *o.trials;

    StudyResult result;
    if (o.kind == "convergence") {
        result = convergence_study(config);
    } else if (o.kind == "noise") {
        result = noise_study(config);
    } else if (o.kind == "threshold") {
        result = threshold_study(config);
    } else {
        result = equidistant_comparison_study(config);
    }
    for (const auto& row : result.rows) {
        require_finite(row.mean.real(), "study mean");
        require_finite(row.sigma, "study sigma");
    }

    const fs::path dir(o.out_dir);
    json doc = io::study_to_json(result);
    doc["config"] = io::config_to_json(config);
    std::vector<std::pair<fs::path, std::string>> files;
    files.emplace_back(dir / (o.kind + ".json"), doc.dump(2) + "\n");
    if (o.kind == "threshold") {
        files.emplace_back(dir / (o.kind + ".csv"), summary_csv(result));
    } else {
        files.emplace_back(dir / (o.kind + ".csv"), io::study_csv(result, "padua"));
        if (o.kind == "equidistant") files.emplace_back(dir / (o.kind + "_equidistant.csv"), io::study_csv(result, "equidistant"));
        if (!result.fits.empty()) {
            std::ostringstream fits;
            fits << "series,n,j,k,slope,p,A,r2,K\n";
            for (const auto& f : result.fits) {
                fits << f.series << ',' << f.n << ',' << f.j << ',' << f.k << ',' << io::format_double(f.slope) << ','
                     << io::format_double(f.p) << ',' << io::format_double(f.A) << ',' << io::format_double(f.r2) << ','
                     << io::format_double(f.K) << '\n';
            }
            files.emplace_back(dir / (o.kind + "_fits.csv"), fits.str());
        }
    }
    std::vector<fs::path> outputs;
    for (const auto& [p, text] : files) {
        io::write_text(p, text);
        outputs.push_back(p);
    }
    for (const auto& p : outputs) write_manifest(p, inv, doc["config"], {{"config", o.config}}, outputs, config.seed);

    out << o.kind << " study: " << result.rows.size() << " rows, " << result.fits.size() << " fits\n";
    for (const auto& [k, v] : result.summary) out << "  " << k << " = " << io::format_double(v) << "\n";
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Padua-point tomography of continuous-variable quantum states"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(CVTOMO_VERSION));

    SampleOptions so;
    auto* sample = app.add_subcommand("sample", "Sample a state's Q or Wigner function on a grid");
    sample->add_option("--state", so.state, "State spec JSON")->required();
    auto* pad = sample->add_option("--padua", so.padua, "Padua order n");
    auto* eq = sample->add_option("--equidistant", so.equidistant, "Equidistant grid ROWSxCOLS");
    pad->excludes(eq);
    sample->add_option("--L", so.L, "Half-width of the square domain")->capture_default_str();
    sample->add_option("--eps", so.eps, "Gaussian noise standard deviation")->capture_default_str();
    sample->add_option("--seed", so.seed, "Noise seed")->capture_default_str();
    sample->add_option("--trial", so.trial, "Trial index within the seed's stream")->capture_default_str();
    sample->add_option("--function", so.function, "husimi_q or wigner")
        ->check(CLI::IsMember({"husimi_q", "wigner"}))
        ->capture_default_str();
    sample->add_option("-o,--out", so.out, "Output record (.json, or .csv with a .json sidecar)")->required();

    InterpolateOptions io_;
    auto* interp = app.add_subcommand("interpolate", "Interpolate a record and export coefficients and a dense grid");
    interp->add_option("record", io_.record, "Measurement record")->required();
    interp->add_option("--resolution", io_.resolution, "Dense grid points per axis")->capture_default_str();
    interp->add_option("--threshold", io_.threshold, "Zero Padua samples with |v| below this value");
    interp->add_option("--keep", io_.keep, "Keep only the largest-|v| equidistant samples");
    interp->add_option("-o,--out", io_.out, "Coefficient JSON")->required();
    interp->add_option("--csv", io_.csv, "Dense-grid CSV (default: --out with .csv extension)");

    EstimateOptions eo;
    auto* est = app.add_subcommand("estimate", "Estimate density-matrix elements with error bounds");
    est->add_option("record", eo.record, "Padua measurement record")->required();
    est->add_option("--d-max", eo.d_max, "Largest Fock index")->capture_default_str();
    est->add_option("--K", eo.K, "Noise-propagation constant")->capture_default_str();
    est->add_option("--oracle", eo.oracle, "Ground-truth state spec for recon_bound");
    est->add_option("-o,--out", eo.out, "Estimate JSON")->required();

    StudyOptions sto;
    auto* study = app.add_subcommand("study", "Run a convergence, noise, threshold or equidistant study");
    study->add_option("kind", sto.kind, "Study kind")
        ->required()
        ->check(CLI::IsMember({"convergence", "noise", "threshold", "equidistant"}));
    study->add_option("--config", sto.config, "Study config JSON")->required();
    study->add_option("--out", sto.out_dir, "Output directory")->required();
    study->add_option("--seed", sto.seed, "Override the config seed");
    study->add_option("--L", sto.L, "Override the domain half-width");
    study->add_option("--trials", sto.trials, "Override the trial count");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    Invocation inv{app.get_subcommands().front()->get_name(), args};
    try {
        if (*sample) return cmd_sample(so, inv, out);
        if (*interp) return cmd_interpolate(io_, inv, out);
        if (*est) return cmd_estimate(eo, inv, out, err);
        return cmd_study(sto, inv, out, err);
    } catch (const io::IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const NonFiniteValue& e) {
        err << "error: " << e.what() << "\n";
        return kNumerical;
    } catch (const NumericalFailure& e) {
        err << "error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInternal;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace cvtomo::cli
