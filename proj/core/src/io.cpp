#include "cvtomo/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace cvtomo::io {

namespace {

Complex complex_from_json(const json& v) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw SchemaError("expected a complex number as [re, im]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

template <typename T>
T required(const json& doc, const char* key) {
    if (!doc.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("field '") + key + "': " + e.what());
    }
}

template <typename T>
T optional_field(const json& doc, const char* key, T fallback) {
    if (!doc.contains(key)) return fallback;
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("field '") + key + "': " + e.what());
    }
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    auto p = csv;
    p += ".json";
    return p;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

DensityMatrix state_from_json(const json& doc) {
    if (!doc.is_object()) throw SchemaError("state spec must be a JSON object");
    const auto type = required<std::string>(doc, "type");
    try {
        if (type == "pure") {
            const auto& amps = doc.at("amplitudes");
            if (!amps.is_array() || amps.empty()) throw SchemaError("'amplitudes' must be a non-empty array");
            std::vector<Complex> a;
            for (const auto& v : amps) a.push_back(complex_from_json(v));
            return to_density_matrix(FockState(std::move(a)));
        }
        if (type == "mixed") {
            const auto& m = doc.at("matrix");
            if (!m.is_array() || m.empty()) throw SchemaError("'matrix' must be a non-empty array");
            const auto d = static_cast<Eigen::Index>(m.size());
            Eigen::MatrixXcd rho(d, d);
            for (Eigen::Index j = 0; j < d; ++j) {
                const auto& row = m[static_cast<std::size_t>(j)];
                if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) throw SchemaError("'matrix' must be square");
                for (Eigen::Index k = 0; k < d; ++k) rho(j, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
            }
            return DensityMatrix(std::move(rho));
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("state spec: ") + e.what());
    } catch (const SchemaError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("state spec: ") + e.what());
    }
    throw SchemaError("state spec: unknown type '" + type + "' (expected pure or mixed)");
}

json state_to_json(const FockState& state) {
    json amps = json::array();
    for (const auto& a : state.amplitudes()) amps.push_back(complex_to_json(a));
    return {{"type", "pure"}, {"amplitudes", amps}};
}

json state_to_json(const DensityMatrix& rho) {
    json m = json::array();
    for (int j = 0; j < rho.dim(); ++j) {
        json row = json::array();
        for (int k = 0; k < rho.dim(); ++k) row.push_back(complex_to_json(rho(j, k)));
        m.push_back(row);
    }
    return {{"type", "mixed"}, {"matrix", m}};
}

DensityMatrix read_state(const std::filesystem::path& path) { return state_from_json(read_json(path)); }

json grid_to_json(const PhaseGrid& grid) {
    json g = {{"kind", to_string(grid.kind)}, {"L", grid.half_width}};
    if (grid.kind == GridKind::padua) g["n"] = grid.order;
    if (grid.kind == GridKind::equidistant) {
        g["rows"] = grid.rows;
        g["cols"] = grid.cols;
    }
    return g;
}

json record_to_json(const MeasurementRecord& record) {
    json pts = json::array();
    for (const auto& p : record.grid.points) pts.push_back(json::array({p.re, p.im}));
    return {{"grid", grid_to_json(record.grid)},
            {"function", to_string(record.function)},
            {"noise_sigma", record.noise_sigma},
            {"points", pts},
            {"values", record.values}};
}

MeasurementRecord record_from_json(const json& doc) {
    if (!doc.is_object()) throw SchemaError("record must be a JSON object");
    MeasurementRecord rec;
    try {
        const auto& g = doc.at("grid");
        rec.grid.kind = grid_kind_from_string(required<std::string>(g, "kind"));
        rec.grid.half_width = required<double>(g, "L");
        if (rec.grid.kind == GridKind::padua) rec.grid.order = required<int>(g, "n");
        if (rec.grid.kind == GridKind::equidistant) {
            rec.grid.rows = required<int>(g, "rows");
            rec.grid.cols = required<int>(g, "cols");
        }
        rec.function = function_tag_from_string(optional_field<std::string>(doc, "function", "husimi_q"));
        rec.noise_sigma = optional_field<double>(doc, "noise_sigma", 0.0);
        if (doc.contains("points")) {
            for (const auto& p : doc.at("points")) {
                if (!p.is_array() || p.size() != 2) throw SchemaError("points must be [x, y] pairs");
                rec.grid.points.push_back({p[0].get<double>(), p[1].get<double>()});
            }
        } else if (rec.grid.kind == GridKind::padua) {
            rec.grid.points = padua_points(rec.grid.order, rec.grid.half_width).points;
        } else if (rec.grid.kind == GridKind::equidistant) {
            rec.grid.points = equidistant_grid(rec.grid.rows, rec.grid.cols, rec.grid.half_width).points;
        } else {
            throw SchemaError("custom grids need an explicit 'points' list");
        }
        rec.values = required<std::vector<double>>(doc, "values");
    } catch (const json::exception& e) {
        throw SchemaError(std::string("record: ") + e.what());
    } catch (const SchemaError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("record: ") + e.what());
    }
    if (rec.grid.kind == GridKind::padua && rec.grid.size() != padua_count(rec.grid.order)) {
        throw SchemaError("record: padua grid of order " + std::to_string(rec.grid.order) + " needs " +
                          std::to_string(padua_count(rec.grid.order)) + " points, found " +
                          std::to_string(rec.grid.size()));
    }
    if (rec.grid.kind == GridKind::equidistant &&
        rec.grid.size() != static_cast<std::size_t>(rec.grid.rows) * static_cast<std::size_t>(rec.grid.cols)) {
        throw SchemaError("record: equidistant grid size does not match rows x cols");
    }
    try {
        rec.validate();
    } catch (const NonFiniteValue&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
    return rec;
}

void write_record(const std::filesystem::path& path, const MeasurementRecord& record) {
    if (path.extension() == ".csv") {
        std::ostringstream csv;
        csv << "x,y,value\n";
        for (std::size_t i = 0; i < record.grid.size(); ++i) {
            csv << format_double(record.grid.points[i].re) << ',' << format_double(record.grid.points[i].im) << ','
                << format_double(record.values[i]) << '\n';
        }
        write_text(path, csv.str());
        json meta = record_to_json(record);
        meta.erase("points");
        meta.erase("values");
        write_json(sidecar_path(path), meta);
        return;
    }
    write_json(path, record_to_json(record));
}

MeasurementRecord read_record(const std::filesystem::path& path) {
    if (path.extension() != ".csv") return record_from_json(read_json(path));

    json doc = read_json(sidecar_path(path));
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,y,value", 0) != 0) throw SchemaError("CSV record needs header x,y,value");
    json pts = json::array();
    json vals = json::array();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c)) {
            throw SchemaError("malformed CSV row '" + line + "'");
        }
        try {
            pts.push_back(json::array({std::stod(a), std::stod(b)}));
            vals.push_back(std::stod(c));
        } catch (const std::exception&) {
            throw SchemaError("non-numeric CSV row '" + line + "'");
        }
    }
    doc["points"] = pts;
    doc["values"] = vals;
    return record_from_json(doc);
}

json cheb_to_json(const ChebCoeffs& coeffs) {
    json rows = json::array();
    for (int a = 0; a <= coeffs.order(); ++a) {
        json row = json::array();
        for (int b = 0; a + b <= coeffs.order(); ++b) row.push_back(coeffs(a, b));
        rows.push_back(row);
    }
    return {{"n", coeffs.order()}, {"L", coeffs.half_width()}, {"basis", "T_a(x/L) T_b(y/L), a+b<=n"}, {"coeffs", rows}};
}

ChebCoeffs cheb_from_json(const json& doc) {
    try {
        const int n = required<int>(doc, "n");
        ChebCoeffs out(n, required<double>(doc, "L"));
        const auto& rows = doc.at("coeffs");
        if (!rows.is_array() || static_cast<int>(rows.size()) != n + 1) throw SchemaError("coeffs must have n+1 rows");
        for (int a = 0; a <= n; ++a) {
            const auto& row = rows[static_cast<std::size_t>(a)];
            if (!row.is_array() || static_cast<int>(row.size()) != n + 1 - a) throw SchemaError("coeff row length mismatch");
            for (int b = 0; a + b <= n; ++b) out.set(a, b, row[static_cast<std::size_t>(b)].get<double>());
        }
        return out;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("coefficients: ") + e.what());
    }
}

std::string dense_grid_csv(const DenseGrid& grid) {
    std::ostringstream csv;
    csv << "x,y,value\n";
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        csv << format_double(grid.points[i].re) << ',' << format_double(grid.points[i].im) << ','
            << format_double(grid.values[i]) << '\n';
    }
    return csv.str();
}

json polar_to_json(const PolarPoly& poly) {
    json c = json::array();
    for (int m = 0; m <= poly.q_max(); ++m) {
        for (int p = -m; p <= m; ++p) {
            const Complex v = poly(m, p);
            if (std::abs(v) > 1e-14) c.push_back({{"m", m}, {"p", p}, {"re", v.real()}, {"im", v.imag()}});
        }
    }
    return {{"n", poly.order()}, {"q_max", poly.q_max()}, {"L", poly.half_width()},
            {"convention", "alpha = x + i y, theta from +x axis"}, {"c", c}};
}

json estimates_to_json(const EstimateTable& table) {
    json arr = json::array();
    for (const auto& e : table.entries) {
        arr.push_back({{"j", e.j},
                       {"k", e.k},
                       {"re", e.value.real()},
                       {"im", e.value.imag()},
                       {"sigma_bound", e.sigma_bound},
                       {"recon_bound", e.recon_bound ? json(*e.recon_bound) : json(nullptr)},
                       {"n", e.n_used},
                       {"N", e.N_used},
                       {"epsilon", e.epsilon},
                       {"K", e.K_used}});
    }
    return arr;
}

StudyConfig config_from_json(const json& doc) {
    static const std::set<std::string> known = {"state",          "state_label",     "n_range",   "orders",
                                                "epsilons",       "trials",          "seed",      "L",
                                                "d_max",          "K",               "threshold", "threshold_order",
                                                "equidistant_rows", "probe_resolution", "equidistant_sizes"};
    if (!doc.is_object()) throw SchemaError("study config must be a JSON object");
    for (const auto& [key, _] : doc.items()) {
        if (!known.contains(key)) throw SchemaError("study config: unknown field '" + key + "'");
    }
    StudyConfig c;
    try {
        if (doc.contains("state")) {
            c.state = state_from_json(doc.at("state"));
            c.state_label = optional_field<std::string>(doc, "state_label", "custom");
        }
        if (doc.contains("n_range")) {
            const auto r = doc.at("n_range").get<std::vector<int>>();
            if (r.size() != 2 || r[0] > r[1]) throw SchemaError("n_range must be [lo, hi] with lo <= hi");
            for (int n = r[0]; n <= r[1]; ++n) c.orders.push_back(n);
        }
        if (doc.contains("orders")) c.orders = doc.at("orders").get<std::vector<int>>();
        c.epsilons = optional_field<std::vector<double>>(doc, "epsilons", {});
        c.trials = optional_field<int>(doc, "trials", c.trials);
        c.seed = optional_field<std::uint64_t>(doc, "seed", c.seed);
        c.half_width = optional_field<double>(doc, "L", c.half_width);
        c.d_max = optional_field<int>(doc, "d_max", c.d_max);
        c.K = optional_field<double>(doc, "K", c.K);
        c.threshold = optional_field<double>(doc, "threshold", c.threshold);
        c.threshold_order = optional_field<int>(doc, "threshold_order", c.threshold_order);
        c.equidistant_rows = optional_field<int>(doc, "equidistant_rows", c.equidistant_rows);
        c.probe_resolution = optional_field<int>(doc, "probe_resolution", c.probe_resolution);
        c.equidistant_sizes = optional_field<std::vector<int>>(doc, "equidistant_sizes", {});
    } catch (const json::exception& e) {
        throw SchemaError(std::string("study config: ") + e.what());
    }
    return c;
}

json config_to_json(const StudyConfig& c) {
    return {{"state_label", c.state_label},
            {"state", state_to_json(c.state)},
            {"orders", c.orders},
            {"epsilons", c.epsilons},
            {"trials", c.trials},
            {"seed", c.seed},
            {"L", c.half_width},
            {"d_max", c.d_max},
            {"K", c.K},
            {"threshold", c.threshold},
            {"threshold_order", c.threshold_order},
            {"equidistant_rows", c.equidistant_rows},
            {"probe_resolution", c.probe_resolution},
            {"equidistant_sizes", c.equidistant_sizes}};
}

json study_to_json(const StudyResult& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"series", row.series},
                        {"n", row.n},
                        {"N", row.N},
                        {"epsilon", row.epsilon},
                        {"j", row.j},
                        {"k", row.k},
                        {"mean_re", row.mean.real()},
                        {"mean_im", row.mean.imag()},
                        {"sigma", row.sigma},
                        {"delta", row.delta},
                        {"delta_absolute", row.delta_absolute}});
    }
    json fits = json::array();
    for (const auto& f : r.fits) {
        fits.push_back({{"series", f.series}, {"j", f.j}, {"k", f.k}, {"n", f.n}, {"slope", f.slope},
                        {"p", f.p}, {"A", f.A}, {"r2", f.r2}, {"K", f.K}});
    }
    return {{"kind", r.kind}, {"rows", rows}, {"fits", fits}, {"summary", r.summary},
            {"notes", r.notes}, {"warnings", r.warnings}};
}

std::string study_csv(const StudyResult& r, const std::string& series) {
    std::ostringstream csv;
    csv << "n,N,epsilon,j,k,mean_re,mean_im,sigma,delta_rel\n";
    for (const auto& row : r.rows) {
        if (row.series != series) continue;
        csv << row.n << ',' << row.N << ',' << format_double(row.epsilon) << ',' << row.j << ',' << row.k << ','
            << format_double(row.mean.real()) << ',' << format_double(row.mean.imag()) << ','
            << format_double(row.sigma) << ',' << format_double(row.delta) << '\n';
    }
    return csv.str();
}

}  // namespace cvtomo::io
