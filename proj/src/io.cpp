#include "locstat/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace locstat {

using json = nlohmann::ordered_json;

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write file: " + path, 0);
    out << content;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    try {
        std::size_t used = 0;
        out = std::stod(s, &used);
        while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
        return used == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace

VecD load_series_csv(const std::string& path, int column, bool log_return) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open data file: " + path, 0);
    VecD series;
    std::string line;
    int row = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        const int idx = column < 0 ? static_cast<int>(cells.size()) - 1 : column;
        if (idx >= static_cast<int>(cells.size()))
            throw data_error("row " + std::to_string(row) + ": missing column " + std::to_string(idx), row);
        double v = 0.0;
        if (!parse_double(cells[static_cast<std::size_t>(idx)], v)) {
            if (header_allowed) {  // a single leading header row is fine
                header_allowed = false;
                continue;
            }
            throw data_error("row " + std::to_string(row) + ": non-numeric cell '" +
                                 cells[static_cast<std::size_t>(idx)] + "'",
                             row);
        }
        header_allowed = false;
        series.push_back(v);
    }
    if (log_return) {
        VecD ret;
        ret.reserve(series.size());
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (!(series[i] > 0.0))
                throw data_error("log-return transform requires strictly positive values (index " +
                                     std::to_string(i + 1) + ")",
                                 static_cast<int>(i + 1));
            if (i > 0) ret.push_back(std::log(series[i] / series[i - 1]));
        }
        return ret;
    }
    return series;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ostringstream os;
    os.precision(17);
    os << "t,x" << (traj.aux ? ",aux" : "") << "\n";
    for (int t = 1; t <= traj.n; ++t) {
        os << t << "," << traj.values[static_cast<std::size_t>(t - 1)];
        if (traj.aux) os << "," << (*traj.aux)[static_cast<std::size_t>(t - 1)];
        os << "\n";
    }
    write_file(path, os.str());
}

void write_curve_csv(const std::string& path, const EstimateCurve& curve) {
    std::ostringstream os;
    os.precision(17);
    os << "u";
    for (const auto& c : curve.components) os << "," << c;
    os << ",objective,converged,boundary_flag\n";
    for (const auto& pt : curve.points) {
        os << pt.u;
        for (double v : pt.theta) os << "," << v;
        os << "," << pt.objective << "," << (pt.converged ? 1 : 0) << "," << (pt.boundary ? 1 : 0)
           << "\n";
    }
    write_file(path, os.str());
}

EstimateCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open curve file: " + path, 0);
    EstimateCurve curve;
    std::string line;
    if (!std::getline(in, line)) throw data_error("empty curve file", 0);
    auto header = split_csv_line(line);
    if (header.size() < 4 || header.front() != "u")
        throw data_error("curve file: unexpected header", 1);
    curve.components.assign(header.begin() + 1, header.end() - 3);
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw data_error("curve file: ragged row " + std::to_string(row), row);
        EstimatePoint pt;
        double v = 0.0;
        if (!parse_double(cells[0], v)) throw data_error("curve file: bad u", row);
        pt.u = v;
        for (std::size_t i = 0; i < curve.components.size(); ++i) {
            if (!parse_double(cells[i + 1], v)) throw data_error("curve file: bad theta", row);
            pt.theta.push_back(v);
        }
        const std::size_t base = 1 + curve.components.size();
        if (!parse_double(cells[base], v)) throw data_error("curve file: bad objective", row);
        pt.objective = v;
        pt.converged = cells[base + 1] == "1";
        pt.boundary = cells[base + 2] == "1";
        curve.points.push_back(std::move(pt));
    }
    return curve;
}

std::string curve_to_json(const EstimateCurve& curve, const std::string& contrast,
                          const std::string& kernel,
                          const std::optional<AdmissibilityReport>& advisory) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["contrast"] = contrast;
    j["kernel"] = kernel;
    j["components"] = curve.components;
    json pts = json::array();
    for (const auto& pt : curve.points) {
        json p;
        p["u"] = pt.u;
        p["theta"] = pt.theta;
        p["objective"] = pt.objective;
        p["converged"] = pt.converged;
        p["boundary"] = pt.boundary;
        p["degenerate"] = pt.degenerate;
        p["floor_count"] = pt.floor_count;
        p["restarts_used"] = pt.restarts_used;
        pts.push_back(std::move(p));
    }
    j["points"] = std::move(pts);
    if (advisory) {
        j["advisory"] = {{"ok", advisory->ok},
                         {"margin", advisory->margin},
                         {"worst_u", advisory->worst_u},
                         {"detail", advisory->detail}};
    }
    return j.dump(2) + "\n";
}

std::string rmise_report_to_json(const RmiseReport& report) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["master_seed"] = report.master_seed;
    j["reps"] = report.reps;
    j["components"] = report.components;
    json cells = json::array();
    for (const auto& c : report.cells) {
        json jc;
        jc["n"] = c.n;
        jc["kernel"] = c.kernel;
        jc["rsmise"] = c.rsmise;
        jc["excluded"] = c.excluded;
        jc["unreliable"] = c.unreliable;
        cells.push_back(std::move(jc));
    }
    j["cells"] = std::move(cells);
    return j.dump(2) + "\n";
}

RmiseReport rmise_report_from_json(const std::string& text) {
    const json j = json::parse(text);
    RmiseReport report;
    report.master_seed = j.at("master_seed").get<std::uint64_t>();
    report.reps = j.at("reps").get<int>();
    report.components = j.at("components").get<std::vector<std::string>>();
    for (const auto& jc : j.at("cells")) {
        RmiseCell c;
        c.n = jc.at("n").get<int>();
        c.kernel = jc.at("kernel").get<std::string>();
        c.rsmise = jc.at("rsmise").get<VecD>();
        c.excluded = jc.at("excluded").get<int>();
        c.unreliable = jc.at("unreliable").get<bool>();
        report.cells.push_back(std::move(c));
    }
    return report;
}

void write_tau_csv(const std::string& path, const TauEstimate& tau) {
    std::ostringstream os;
    os.precision(17);
    os << "s,tau_hat,lambda_bound\n";
    for (std::size_t i = 0; i < tau.lags.size(); ++i)
        os << tau.lags[i] << "," << tau.tau_hat[i] << "," << tau.lambda[i] << "\n";
    write_file(path, os.str());
}

std::string check_report_to_json(const AdmissibilityReport& report) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["ok"] = report.ok;
    j["margin"] = report.margin;
    j["worst_margin"] = report.worst_margin;
    if (std::isfinite(report.worst_u)) j["worst_u"] = report.worst_u;
    j["detail"] = report.detail;
    return j.dump(2) + "\n";
}

std::string clt_check_to_json(const CltCheck& check) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["empirical_var"] = check.empirical_var;
    j["theoretical_var"] = check.theoretical_var;
    j["ratio"] = check.ratio;
    j["normality_pvalue"] = check.normality_pvalue;
    j["low_power"] = check.low_power;
    return j.dump(2) + "\n";
}

void write_svg_lines(const std::string& path, const std::string& title, const VecD& xs,
                     const std::vector<std::pair<std::string, VecD>>& series) {
    const int width = 640, height = 400;
    const int ml = 56, mr = 16, mt = 32, mb = 40;
    double xmin = xs.empty() ? 0.0 : xs.front(), xmax = xs.empty() ? 1.0 : xs.back();
    double ymin = 0.0, ymax = 1.0;
    bool first = true;
    for (const auto& [name, ys] : series)
        for (double v : ys) {
            if (!std::isfinite(v)) continue;
            if (first) {
                ymin = ymax = v;
                first = false;
            } else {
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
        }
    if (ymax - ymin < 1e-12) {
        ymax += 0.5;
        ymin -= 0.5;
    }
    if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
       << title << "</text>\n";
    // Axes
    os << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
       << height - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
       << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = xmin + (xmax - xmin) * k / 4.0;
        const double yv = ymin + (ymax - ymin) * k / 4.0;
        os << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 16
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << xv
           << "</text>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 3
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << yv
           << "</text>\n";
    }
    int ci = 0;
    for (const auto& [name, ys] : series) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[ci % 5] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i)
            os << px(xs[i]) << "," << py(ys[i]) << " ";
        os << "\"/>\n";
        os << "<text x=\"" << width - mr - 4 << "\" y=\"" << mt + 14 * (ci + 1)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
           << colors[ci % 5] << "\">" << name << "</text>\n";
        ++ci;
    }
    os << "</svg>\n";
    write_file(path, os.str());
}

// --- config ---------------------------------------------------------------

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw config_error("config: unknown key '" + key + "' in " + where);
    }
}

InnovationSpec parse_innovations(const json& j) {
    reject_unknown(j, {"family", "sigma", "half_width", "u", "x"}, "innovations");
    const std::string fam = j.value("family", "gaussian");
    if (fam == "gaussian") return InnovationSpec::gaussian(j.value("sigma", 1.0));
    if (fam == "uniform-sym")
        return InnovationSpec::uniform_sym(j.value("half_width", 1.7320508075688772));
    if (fam == "custom") {
        if (!j.contains("u") || !j.contains("x"))
            throw config_error("config: custom innovations need u and x tables");
        return InnovationSpec::custom(j.at("u").get<VecD>(), j.at("x").get<VecD>());
    }
    throw config_error("config: unknown innovation family '" + fam + "'");
}

ModelSpec parse_model(const json& j) {
    reject_unknown(j,
                   {"scenario", "family", "p", "q", "p2", "q2", "threshold_ell", "paths",
                    "innovations", "truncation_lag", "intercept_floor"},
                   "model");
    if (j.contains("scenario")) {
        if (j.size() > 1)
            throw config_error("config: model.scenario cannot be combined with other model keys");
        return builtin_scenario(scenario_from_name(j.at("scenario").get<std::string>()));
    }
    ModelSpec m;
    if (!j.contains("family")) throw config_error("config: model.family is required");
    try {
        m.family = family_from_name(j.at("family").get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    m.p = j.value("p", 0);
    m.q = j.value("q", 0);
    m.p2 = j.value("p2", 0);
    m.q2 = j.value("q2", 0);
    m.threshold_ell = j.value("threshold_ell", 1);
    if (j.contains("truncation_lag") && !j.at("truncation_lag").is_null())
        m.truncation_lag = j.at("truncation_lag").get<int>();
    m.intercept_floor = j.value("intercept_floor", 1e-8);
    if (!j.contains("paths")) throw config_error("config: model.paths is required");
    std::vector<PathExpr> exprs;
    for (const auto& item : j.at("paths")) {
        if (item.is_number()) {
            exprs.push_back(PathExpr::constant(item.get<double>()));
        } else {
            try {
                exprs.push_back(PathExpr::parse(item.get<std::string>()));
            } catch (const std::invalid_argument& e) {
                throw config_error(std::string("config: ") + e.what());
            }
        }
    }
    m.path = ParameterPath::from_exprs(std::move(exprs));
    if (j.contains("innovations")) m.innovations = parse_innovations(j.at("innovations"));
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return m;
}

KernelSpec parse_kernel_name(const std::string& name) {
    try {
        return KernelSpec::from_name(name);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }
}

}  // namespace

EstimatorConfig RunConfig::estimator_config(const ModelSpec& m) const {
    EstimatorConfig cfg;
    if (!contrast_kind) throw config_error("config: estimator.contrast is required");
    try {
        cfg.contrast = ContrastSpec::for_model(*contrast_kind, m);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    cfg.kernel = kernel;
    cfg.lambda = lambda;
    if (!u_grid.empty()) cfg.u_grid = u_grid;
    if (optimizer_set) cfg.optimizer = optimizer;
    if (!theta_box.lower.empty()) cfg.theta_box = theta_box;
    cfg.fill_defaults();
    return cfg;
}

McScenario RunConfig::mc_scenario() const {
    McScenario sc;
    sc.model = require_model();
    if (!contrast_kind) throw config_error("config: estimator.contrast is required for mc");
    sc.contrast = ContrastSpec::for_model(*contrast_kind, sc.model);
    sc.ns = mc_ns;
    sc.reps = mc_reps;
    sc.kernels = mc_kernels.empty() ? std::vector<KernelSpec>{kernel} : mc_kernels;
    if (!u_grid.empty()) sc.u_grid = u_grid;
    sc.master_seed = mc_seed;
    sc.lambda = lambda;
    if (optimizer_set) sc.optimizer = optimizer;
    if (!theta_box.lower.empty()) sc.theta_box = theta_box;
    return sc;
}

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config: invalid JSON: ") + e.what());
    }
    reject_unknown(j, {"schema_version", "model", "estimator", "simulate", "mc", "tau"}, "config root");
    RunConfig cfg;
    if (j.contains("model")) cfg.model = parse_model(j.at("model"));
    if (j.contains("estimator")) {
        const json& je = j.at("estimator");
        reject_unknown(je, {"contrast", "kernel", "lambda", "u_grid", "theta_box", "optimizer"},
                       "estimator");
        if (je.contains("contrast")) {
            try {
                cfg.contrast_kind = contrast_from_name(je.at("contrast").get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw config_error(std::string("config: ") + e.what());
            }
        }
        if (je.contains("kernel")) cfg.kernel = parse_kernel_name(je.at("kernel").get<std::string>());
        cfg.lambda = je.value("lambda", 0.35);
        if (je.contains("u_grid")) {
            const json& jg = je.at("u_grid");
            if (jg.is_array()) {
                cfg.u_grid = jg.get<VecD>();
            } else {
                reject_unknown(jg, {"k_over"}, "u_grid");
                const int m = jg.at("k_over").get<int>();
                if (m < 2) throw config_error("config: u_grid.k_over must be >= 2");
                for (int k = 1; k < m; ++k) cfg.u_grid.push_back(static_cast<double>(k) / m);
            }
        }
        if (je.contains("theta_box")) {
            const json& jb = je.at("theta_box");
            reject_unknown(jb, {"lower", "upper"}, "theta_box");
            cfg.theta_box.lower = jb.at("lower").get<VecD>();
            cfg.theta_box.upper = jb.at("upper").get<VecD>();
            try {
                cfg.theta_box.validate();
            } catch (const std::invalid_argument& e) {
                throw config_error(std::string("config: ") + e.what());
            }
        }
        if (je.contains("optimizer")) {
            const json& jo = je.at("optimizer");
            reject_unknown(jo, {"restarts", "tol", "max_iter_per_dim"}, "optimizer");
            cfg.optimizer.restarts = jo.value("restarts", cfg.optimizer.restarts);
            cfg.optimizer.tol = jo.value("tol", cfg.optimizer.tol);
            cfg.optimizer.max_iter_per_dim = jo.value("max_iter_per_dim", cfg.optimizer.max_iter_per_dim);
            cfg.optimizer_set = true;
        }
    }
    if (j.contains("simulate")) {
        const json& js = j.at("simulate");
        reject_unknown(js, {"n", "seed"}, "simulate");
        cfg.sim_n = js.value("n", 1000);
        cfg.sim_seed = js.value("seed", std::uint64_t{1});
    }
    if (j.contains("mc")) {
        const json& jm = j.at("mc");
        reject_unknown(jm, {"ns", "reps", "kernels", "seed"}, "mc");
        if (jm.contains("ns")) cfg.mc_ns = jm.at("ns").get<std::vector<int>>();
        cfg.mc_reps = jm.value("reps", 100);
        if (jm.contains("kernels"))
            for (const auto& name : jm.at("kernels"))
                cfg.mc_kernels.push_back(parse_kernel_name(name.get<std::string>()));
        cfg.mc_seed = jm.value("seed", std::uint64_t{1});
    }
    if (j.contains("tau")) {
        const json& jt = j.at("tau");
        reject_unknown(jt, {"u", "s_max", "p", "reps", "burn_in", "seed"}, "tau");
        cfg.tau_u = jt.value("u", 0.5);
        cfg.tau_smax = jt.value("s_max", 20);
        cfg.tau_p = jt.value("p", 2);
        cfg.tau_reps = jt.value("reps", 1000);
        cfg.tau_burn = jt.value("burn_in", 200);
        cfg.tau_seed = jt.value("seed", std::uint64_t{1});
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("config: cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config_text(os.str());
}

}  // namespace locstat
