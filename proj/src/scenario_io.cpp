#include "thetacbc/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "thetacbc/errors.hpp"

namespace thetacbc {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
    throw SchemaError(path.empty() ? "/" : path, what);
}

[[noreturn]] void shape_fail(const std::string& path, const std::string& what) {
    throw ShapeError((path.empty() ? "/" : path) + ": " + what);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) {
        schema_fail(path, "expected an object");
    }
}

void reject_unknown_keys(const json& j, const std::string& path,
                         const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) {
            schema_fail(path + "/" + key, "unknown field");
        }
    }
}

const json& field(const json& j, const std::string& path, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) {
        schema_fail(path + "/" + key, "missing required field");
    }
    return *it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) {
        schema_fail(path, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        schema_fail(path, "number must be finite");
    }
    return v;
}

double nonnegative(const json& j, const std::string& path) {
    const double v = number(j, path);
    if (v < 0.0) {
        schema_fail(path, "must be nonnegative");
    }
    return v;
}

double positive(const json& j, const std::string& path) {
    const double v = number(j, path);
    if (!(v > 0.0)) {
        schema_fail(path, "must be positive");
    }
    return v;
}

std::int64_t integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) {
        schema_fail(path, "expected an integer");
    }
    return j.get<std::int64_t>();
}

std::vector<double> number_list(const json& j, const std::string& path) {
    if (!j.is_array()) {
        schema_fail(path, "expected an array of numbers");
    }
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(number(j[i], path + "/" + std::to_string(i)));
    }
    return out;
}

Vector vector_of(const json& j, const std::string& path) {
    const std::vector<double> v = number_list(j, path);
    if (v.empty()) {
        schema_fail(path, "vector must be non-empty");
    }
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix matrix_of(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) {
        schema_fail(path, "expected a non-empty array of rows");
    }
    std::size_t cols = 0;
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < j.size(); ++r) {
        const std::string row_path = path + "/" + std::to_string(r);
        rows.push_back(number_list(j[r], row_path));
        if (rows.back().empty()) {
            schema_fail(row_path, "matrix rows must be non-empty");
        }
        if (r == 0) {
            cols = rows.back().size();
        } else if (rows.back().size() != cols) {
            shape_fail(row_path, "row length differs from the first row");
        }
    }
    Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return M;
}

void require_dims(const Matrix& M, Eigen::Index rows, Eigen::Index cols, const std::string& path) {
    if (M.rows() != rows || M.cols() != cols) {
        std::ostringstream msg;
        msg << "expected " << rows << "x" << cols << " matrix, got " << M.rows() << "x" << M.cols();
        shape_fail(path, msg.str());
    }
}

// Runs a constructor/validator and re-labels its error with the document path.
template <class F>
auto at_path(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const SchemaError&) {
        throw;
    } catch (const ShapeError& e) {
        shape_fail(path, e.what());
    } catch (const Error& e) {
        schema_fail(path, e.what());
    }
}

ScalarDistribution parse_distribution(const json& j, const std::string& path) {
    require_object(j, path);
    const json& type = field(j, path, "type");
    if (!type.is_string()) {
        schema_fail(path + "/type", "expected a string");
    }
    const std::string tag = type.get<std::string>();
    if (tag == "half_normal") {
        reject_unknown_keys(j, path, {"type", "sigma"});
        return ScalarDistribution(HalfNormal{positive(field(j, path, "sigma"), path + "/sigma")});
    }
    if (tag == "normal") {
        reject_unknown_keys(j, path, {"type", "mu", "sigma"});
        const double mu = number(field(j, path, "mu"), path + "/mu");
        return ScalarDistribution(Normal{mu, positive(field(j, path, "sigma"), path + "/sigma")});
    }
    if (tag == "degenerate") {
        reject_unknown_keys(j, path, {"type", "value"});
        return ScalarDistribution(Degenerate{number(field(j, path, "value"), path + "/value")});
    }
    if (tag == "tabulated") {
        reject_unknown_keys(j, path, {"type", "grid", "density"});
        Tabulated t{number_list(field(j, path, "grid"), path + "/grid"),
                    number_list(field(j, path, "density"), path + "/density")};
        return at_path(path, [&] { return ScalarDistribution(std::move(t)); });
    }
    schema_fail(path + "/type", "unknown distribution type '" + tag + "'");
}

ShapeKernel parse_kernel(const json& j, const std::string& path, Eigen::Index dim) {
    require_object(j, path);
    const json& type = field(j, path, "type");
    if (!type.is_string()) {
        schema_fail(path + "/type", "expected a string");
    }
    const std::string tag = type.get<std::string>();
    if (tag == "ball") {
        reject_unknown_keys(j, path, {"type"});
        return ShapeKernel(UnitBall{static_cast<int>(dim)});
    }
    if (tag == "box") {
        reject_unknown_keys(j, path, {"type", "half_widths"});
        const Vector h = vector_of(field(j, path, "half_widths"), path + "/half_widths");
        if (h.size() != dim) {
            shape_fail(path + "/half_widths", "length must equal the state dimension");
        }
        return at_path(path + "/half_widths", [&] { return ShapeKernel::box(h); });
    }
    schema_fail(path + "/type", "unknown kernel type '" + tag + "'");
}

UncertainSet parse_set(const json& j, const std::string& path, Eigen::Index dim) {
    require_object(j, path);
    reject_unknown_keys(j, path, {"center", "size", "kernel", "perturbation"});
    Vector center = vector_of(field(j, path, "center"), path + "/center");
    if (center.size() != dim) {
        std::ostringstream msg;
        msg << "length " << center.size() << " does not match state dimension " << dim;
        shape_fail(path + "/center", msg.str());
    }
    const double size = nonnegative(field(j, path, "size"), path + "/size");
    ShapeKernel kernel = parse_kernel(field(j, path, "kernel"), path + "/kernel", dim);
    ScalarDistribution pert = parse_distribution(field(j, path, "perturbation"), path + "/perturbation");
    return UncertainSet{std::move(center), size, std::move(kernel), std::move(pert)};
}

void require_definite_at(const Matrix& M, const std::string& path) {
    at_path(path, [&] {
        CertificateMatrix probe{M, default_p_theta()};
        probe.validate();
        return 0;
    });
}

std::optional<Matrix> optional_square(const json& j, const char* key, const std::string& path,
                                      Eigen::Index dim) {
    const auto it = j.find(key);
    if (it == j.end()) {
        return std::nullopt;
    }
    const std::string p = path + "/" + key;
    Matrix M = matrix_of(*it, p);
    require_dims(M, dim, dim, p);
    return M;
}

ordered_json matrix_json(const Matrix& M) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            row.push_back(M(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json vector_json(const Vector& v) {
    ordered_json out = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v(i));
    }
    return out;
}

ordered_json distribution_json(const ScalarDistribution& d) {
    ordered_json j;
    if (const auto* p = std::get_if<HalfNormal>(&d.variant())) {
        j["type"] = "half_normal";
        j["sigma"] = p->sigma;
    } else if (const auto* p = std::get_if<Normal>(&d.variant())) {
        j["type"] = "normal";
        j["mu"] = p->mu;
        j["sigma"] = p->sigma;
    } else if (const auto* p = std::get_if<Degenerate>(&d.variant())) {
        j["type"] = "degenerate";
        j["value"] = p->value;
    } else {
        const auto& t = std::get<Tabulated>(d.variant());
        j["type"] = "tabulated";
        j["grid"] = t.grid;
        j["density"] = t.density;
    }
    return j;
}

ordered_json kernel_json(const ShapeKernel& k) {
    ordered_json j;
    if (k.is_unit_ball()) {
        j["type"] = "ball";
    } else if (k.box_half_widths().size() > 0) {
        j["type"] = "box";
        j["half_widths"] = vector_json(k.box_half_widths());
    } else {
        throw UnsupportedConfiguration("custom support-oracle kernels cannot be serialized");
    }
    return j;
}

ordered_json set_json(const UncertainSet& s) {
    ordered_json j;
    j["center"] = vector_json(s.center);
    j["size"] = s.nominal_size;
    j["kernel"] = kernel_json(s.kernel);
    j["perturbation"] = distribution_json(s.perturbation);
    return j;
}

std::string fmt9(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

const std::vector<std::string>& certificate_columns() {
    static const std::vector<std::string> cols{
        "label", "method", "horizon", "p_empty", "p_overlap", "eta", "beta", "c",
        "safety_lower_bound", "feasibility_margin", "eta_conditional", "beta_conditional",
        "valid", "diagnostics"};
    return cols;
}

const std::vector<std::string>& monte_carlo_columns() {
    static const std::vector<std::string> cols{
        "samples", "unsafe_hits", "start_overlaps", "p_safe_empirical", "ci_low", "ci_high",
        "master_seed", "mc_horizon", "first_hit_histogram", "trajectory_dump"};
    return cols;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        out += ch;
        if (ch == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

std::vector<std::string> certificate_csv_values(const CertificateReport& r) {
    std::string diag;
    for (std::size_t i = 0; i < r.diagnostics.size(); ++i) {
        diag += (i ? ";" : "") + r.diagnostics[i];
    }
    return {csv_escape(r.label), r.method, std::to_string(r.horizon), fmt9(r.p_empty),
            fmt9(r.p_overlap), fmt9(r.eta), fmt9(r.beta), fmt9(r.c), fmt9(r.safety_lower_bound),
            fmt9(r.feasibility_margin), fmt9(r.eta_conditional), fmt9(r.beta_conditional),
            r.valid ? "true" : "false", csv_escape(diag)};
}

std::vector<std::string> monte_carlo_csv_values(const MonteCarloReport& r) {
    std::string hist;
    for (std::size_t i = 0; i < r.first_hit_histogram.size(); ++i) {
        hist += (i ? ";" : "") + std::to_string(r.first_hit_histogram[i]);
    }
    return {std::to_string(r.samples), std::to_string(r.unsafe_hits),
            std::to_string(r.start_overlaps), fmt9(r.p_safe_empirical), fmt9(r.ci_low),
            fmt9(r.ci_high), std::to_string(r.master_seed), std::to_string(r.horizon), hist,
            csv_escape(r.trajectory_dump.value_or(""))};
}

std::string join_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out += (i ? "," : "") + cells[i];
    }
    return out + "\n";
}

ordered_json certificate_json(const CertificateReport& r) {
    ordered_json j;
    j["label"] = r.label;
    j["method"] = r.method;
    j["horizon"] = r.horizon;
    j["p_empty"] = round_report_value(r.p_empty);
    j["p_overlap"] = round_report_value(r.p_overlap);
    j["eta"] = round_report_value(r.eta);
    j["beta"] = round_report_value(r.beta);
    j["c"] = round_report_value(r.c);
    j["safety_lower_bound"] = round_report_value(r.safety_lower_bound);
    j["feasibility_margin"] = round_report_value(r.feasibility_margin);
    j["eta_conditional"] = round_report_value(r.eta_conditional);
    j["beta_conditional"] = round_report_value(r.beta_conditional);
    j["valid"] = r.valid;
    j["diagnostics"] = r.diagnostics;
    return j;
}

ordered_json monte_carlo_json(const MonteCarloReport& r) {
    ordered_json j;
    j["samples"] = r.samples;
    j["unsafe_hits"] = r.unsafe_hits;
    j["start_overlaps"] = r.start_overlaps;
    j["p_safe_empirical"] = round_report_value(r.p_safe_empirical);
    j["ci_low"] = round_report_value(r.ci_low);
    j["ci_high"] = round_report_value(r.ci_high);
    j["master_seed"] = r.master_seed;
    j["horizon"] = r.horizon;
    j["first_hit_histogram"] = r.first_hit_histogram;
    j["trajectory_dump"] = r.trajectory_dump ? ordered_json(*r.trajectory_dump) : ordered_json();
    if (r.supermartingale) {
        ordered_json s;
        s["transitions"] = r.supermartingale->transitions;
        s["mean_increment"] = round_report_value(r.supermartingale->mean_increment);
        s["standard_error"] = round_report_value(r.supermartingale->standard_error);
        j["supermartingale"] = std::move(s);
    }
    return j;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        schema_fail("/", std::string("malformed JSON: ") + e.what());
    }
    require_object(root, "");
    {
        std::vector<std::string> missing;
        for (const char* key : {"system", "init_set", "unsafe_set", "horizon"}) {
            if (!root.contains(key)) {
                missing.emplace_back(key);
            }
        }
        if (!missing.empty()) {
            std::string list;
            for (std::size_t i = 0; i < missing.size(); ++i) {
                list += (i ? ", /" : "/") + missing[i];
            }
            schema_fail(missing.size() == 1 ? "/" + missing[0] : "/",
                        "missing required fields: " + list);
        }
    }
    reject_unknown_keys(root, "", {"label", "system", "gain", "certificate", "init_set",
                                   "unsafe_set", "horizon", "state_bounds", "synthesis", "sweep"});

    const json& sys = root["system"];
    require_object(sys, "/system");
    reject_unknown_keys(sys, "/system", {"A", "B", "sigma_w", "sigma_w_axes"});
    LinearSystem system;
    system.A = matrix_of(field(sys, "/system", "A"), "/system/A");
    if (system.A.rows() != system.A.cols()) {
        shape_fail("/system/A", "A must be square");
    }
    const Eigen::Index n = system.A.rows();
    system.B = matrix_of(field(sys, "/system", "B"), "/system/B");
    if (system.B.rows() != n) {
        shape_fail("/system/B", "B must have as many rows as A");
    }
    const Eigen::Index m = system.B.cols();
    system.sigma_w = nonnegative(field(sys, "/system", "sigma_w"), "/system/sigma_w");
    if (sys.contains("sigma_w_axes")) {
        Vector axes = vector_of(sys["sigma_w_axes"], "/system/sigma_w_axes");
        if (axes.size() != n) {
            shape_fail("/system/sigma_w_axes", "length must equal the state dimension");
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            if (axes(i) < 0.0) {
                schema_fail("/system/sigma_w_axes/" + std::to_string(i), "must be nonnegative");
            }
        }
        system.sigma_w_axes = std::move(axes);
    }

    std::optional<FeedbackGain> gain;
    if (root.contains("gain")) {
        const json& g = root["gain"];
        require_object(g, "/gain");
        reject_unknown_keys(g, "/gain", {"L"});
        Matrix L = matrix_of(field(g, "/gain", "L"), "/gain/L");
        require_dims(L, m, n, "/gain/L");
        gain = FeedbackGain{std::move(L)};
    }

    std::optional<CertificateSpec> certificate;
    if (root.contains("certificate")) {
        const json& c = root["certificate"];
        require_object(c, "/certificate");
        reject_unknown_keys(c, "/certificate", {"P_x", "P_theta"});
        CertificateSpec spec;
        spec.P_x = optional_square(c, "P_x", "/certificate", n);
        if (spec.P_x) {
            require_definite_at(*spec.P_x, "/certificate/P_x");
        }
        if (c.contains("P_theta")) {
            const json& pt = c["P_theta"];
            const std::string path = "/certificate/P_theta";
            if (pt.is_object()) {
                reject_unknown_keys(pt, path, {"rule", "p11", "scale", "floor"});
                const json& rule = field(pt, path, "rule");
                if (!rule.is_string() || rule.get<std::string>() != "sigma_i_power") {
                    schema_fail(path + "/rule", "unknown P_theta rule (expected 'sigma_i_power')");
                }
                SigmaPowerPTheta r;
                if (pt.contains("p11")) r.p11 = positive(pt["p11"], path + "/p11");
                if (pt.contains("scale")) r.scale = positive(pt["scale"], path + "/scale");
                if (pt.contains("floor")) r.floor = positive(pt["floor"], path + "/floor");
                if (!(r.p11 > kDefiniteTolerance)) {
                    schema_fail(path + "/p11", "must exceed the definiteness tolerance");
                }
                if (!(r.floor > kDefiniteTolerance)) {
                    schema_fail(path + "/floor", "must exceed the definiteness tolerance");
                }
                spec.P_theta = r;
            } else {
                Matrix M = matrix_of(pt, path);
                require_dims(M, 2, 2, path);
                at_path(path, [&] {
                    CertificateMatrix probe{Matrix::Identity(1, 1), M};
                    probe.validate();
                    return 0;
                });
                spec.P_theta = std::move(M);
            }
        }
        certificate = std::move(spec);
    }

    UncertainSet init = parse_set(root["init_set"], "/init_set", n);
    UncertainSet unsafe = parse_set(root["unsafe_set"], "/unsafe_set", n);

    const std::int64_t horizon = integer(root["horizon"], "/horizon");
    if (horizon < 1 || horizon > 1000000) {
        schema_fail("/horizon", "must be an integer in [1, 1000000]");
    }

    std::optional<StateBounds> bounds;
    if (root.contains("state_bounds")) {
        const json& b = root["state_bounds"];
        require_object(b, "/state_bounds");
        reject_unknown_keys(b, "/state_bounds", {"lower", "upper"});
        StateBounds sb{vector_of(field(b, "/state_bounds", "lower"), "/state_bounds/lower"),
                       vector_of(field(b, "/state_bounds", "upper"), "/state_bounds/upper")};
        if (sb.lower.size() != n) shape_fail("/state_bounds/lower", "length must equal the state dimension");
        if (sb.upper.size() != n) shape_fail("/state_bounds/upper", "length must equal the state dimension");
        if (!(sb.lower.array() <= sb.upper.array()).all()) {
            schema_fail("/state_bounds", "lower must not exceed upper");
        }
        bounds = std::move(sb);
    }

    std::string label;
    if (root.contains("label")) {
        if (!root["label"].is_string()) {
            schema_fail("/label", "expected a string");
        }
        label = root["label"].get<std::string>();
    }

    SynthesisConfig synthesis;
    if (root.contains("synthesis")) {
        const json& s = root["synthesis"];
        require_object(s, "/synthesis");
        reject_unknown_keys(s, "/synthesis", {"state_weight", "input_weight", "lyapunov_rhs",
                                              "max_iterations", "convergence_tol"});
        synthesis.state_weight = optional_square(s, "state_weight", "/synthesis", n);
        synthesis.input_weight = optional_square(s, "input_weight", "/synthesis", m);
        synthesis.lyapunov_rhs = optional_square(s, "lyapunov_rhs", "/synthesis", n);
        if (s.contains("max_iterations")) {
            const auto it = integer(s["max_iterations"], "/synthesis/max_iterations");
            if (it < 1 || it > 100000000) {
                schema_fail("/synthesis/max_iterations", "must be a positive integer");
            }
            synthesis.max_iterations = static_cast<int>(it);
        }
        if (s.contains("convergence_tol")) {
            synthesis.convergence_tol = positive(s["convergence_tol"], "/synthesis/convergence_tol");
        }
        at_path("/synthesis", [&] {
            synthesis.validate(static_cast<int>(n), static_cast<int>(m));
            return 0;
        });
    }

    std::optional<SweepGrid> grid;
    if (root.contains("sweep")) {
        const json& s = root["sweep"];
        require_object(s, "/sweep");
        reject_unknown_keys(s, "/sweep", {"sigma_w", "sigma_i", "sigma_u"});
        SweepGrid g;
        const std::pair<const char*, std::vector<double>*> lists[] = {
            {"sigma_w", &g.sigma_w}, {"sigma_i", &g.sigma_i}, {"sigma_u", &g.sigma_u}};
        for (const auto& [key, target] : lists) {
            const std::string path = std::string("/sweep/") + key;
            *target = number_list(field(s, "/sweep", key), path);
            if (target->empty()) {
                schema_fail(path, "must be non-empty");
            }
            for (std::size_t i = 0; i < target->size(); ++i) {
                if ((*target)[i] < 0.0) {
                    schema_fail(path + "/" + std::to_string(i), "must be nonnegative");
                }
            }
        }
        grid = std::move(g);
    }

    Scenario scenario{std::move(system), std::move(gain), std::move(certificate),
                      std::move(init), std::move(unsafe), static_cast<int>(horizon),
                      std::move(bounds), std::move(label), std::move(synthesis), std::move(grid)};
    at_path("/", [&] {
        scenario.validate();
        return 0;
    });
    return scenario;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open scenario file " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string emit_scenario(const Scenario& sc) {
    ordered_json root;
    if (!sc.label.empty()) {
        root["label"] = sc.label;
    }
    ordered_json sys;
    sys["A"] = matrix_json(sc.system.A);
    sys["B"] = matrix_json(sc.system.B);
    sys["sigma_w"] = sc.system.sigma_w;
    if (sc.system.sigma_w_axes) {
        sys["sigma_w_axes"] = vector_json(*sc.system.sigma_w_axes);
    }
    root["system"] = std::move(sys);
    if (sc.gain) {
        root["gain"]["L"] = matrix_json(sc.gain->L);
    }
    if (sc.certificate) {
        ordered_json cert = ordered_json::object();
        if (sc.certificate->P_x) {
            cert["P_x"] = matrix_json(*sc.certificate->P_x);
        }
        if (sc.certificate->P_theta) {
            if (const auto* M = std::get_if<Matrix>(&*sc.certificate->P_theta)) {
                cert["P_theta"] = matrix_json(*M);
            } else {
                const auto& r = std::get<SigmaPowerPTheta>(*sc.certificate->P_theta);
                ordered_json rule;
                rule["rule"] = "sigma_i_power";
                rule["p11"] = r.p11;
                rule["scale"] = r.scale;
                rule["floor"] = r.floor;
                cert["P_theta"] = std::move(rule);
            }
        }
        root["certificate"] = std::move(cert);
    }
    root["init_set"] = set_json(sc.init_set);
    root["unsafe_set"] = set_json(sc.unsafe_set);
    root["horizon"] = sc.horizon;
    if (sc.state_bounds) {
        root["state_bounds"]["lower"] = vector_json(sc.state_bounds->lower);
        root["state_bounds"]["upper"] = vector_json(sc.state_bounds->upper);
    }
    const SynthesisConfig defaults;
    const SynthesisConfig& s = sc.synthesis;
    if (s.state_weight || s.input_weight || s.lyapunov_rhs ||
        s.max_iterations != defaults.max_iterations || s.convergence_tol != defaults.convergence_tol) {
        ordered_json syn;
        if (s.state_weight) syn["state_weight"] = matrix_json(*s.state_weight);
        if (s.input_weight) syn["input_weight"] = matrix_json(*s.input_weight);
        if (s.lyapunov_rhs) syn["lyapunov_rhs"] = matrix_json(*s.lyapunov_rhs);
        syn["max_iterations"] = s.max_iterations;
        syn["convergence_tol"] = s.convergence_tol;
        root["synthesis"] = std::move(syn);
    }
    if (sc.sweep) {
        root["sweep"]["sigma_w"] = sc.sweep->sigma_w;
        root["sweep"]["sigma_i"] = sc.sweep->sigma_i;
        root["sweep"]["sigma_u"] = sc.sweep->sigma_u;
    }
    return root.dump(2) + "\n";
}

double round_report_value(double x) {
    if (!std::isfinite(x)) {
        return x;
    }
    return std::strtod(fmt9(x).c_str(), nullptr);
}

std::string emit_report(const CertificateReport& cert, const std::optional<MonteCarloReport>& mc,
                        ReportFormat format) {
    if (format == ReportFormat::Csv) {
        std::vector<std::string> header = certificate_columns();
        std::vector<std::string> values = certificate_csv_values(cert);
        if (mc) {
            const auto& mc_cols = monte_carlo_columns();
            header.insert(header.end(), mc_cols.begin(), mc_cols.end());
            const auto mc_vals = monte_carlo_csv_values(*mc);
            values.insert(values.end(), mc_vals.begin(), mc_vals.end());
        }
        return join_row(header) + join_row(values);
    }
    ordered_json root;
    root["certificate"] = certificate_json(cert);
    if (mc) {
        root["monte_carlo"] = monte_carlo_json(*mc);
    }
    return root.dump(2) + "\n";
}

std::string emit_monte_carlo_report(const MonteCarloReport& mc, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        return join_row(monte_carlo_columns()) + join_row(monte_carlo_csv_values(mc));
    }
    ordered_json root;
    root["monte_carlo"] = monte_carlo_json(mc);
    return root.dump(2) + "\n";
}

ParsedReport parse_report(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        schema_fail("/", std::string("malformed JSON: ") + e.what());
    }
    require_object(root, "");
    ParsedReport out;
    try {
        if (root.contains("certificate")) {
            const json& j = root["certificate"];
            CertificateReport r;
            r.label = j.at("label").get<std::string>();
            r.method = j.at("method").get<std::string>();
            r.horizon = j.at("horizon").get<int>();
            r.p_empty = j.at("p_empty").get<double>();
            r.p_overlap = j.at("p_overlap").get<double>();
            r.eta = j.at("eta").get<double>();
            r.beta = j.at("beta").get<double>();
            r.c = j.at("c").get<double>();
            r.safety_lower_bound = j.at("safety_lower_bound").get<double>();
            r.feasibility_margin = j.at("feasibility_margin").get<double>();
            r.eta_conditional = j.at("eta_conditional").get<double>();
            r.beta_conditional = j.at("beta_conditional").get<double>();
            r.valid = j.at("valid").get<bool>();
            r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
            out.certificate = std::move(r);
        }
        if (root.contains("monte_carlo")) {
            const json& j = root["monte_carlo"];
            MonteCarloReport r;
            r.samples = j.at("samples").get<std::int64_t>();
            r.unsafe_hits = j.at("unsafe_hits").get<std::int64_t>();
            r.start_overlaps = j.at("start_overlaps").get<std::int64_t>();
            r.p_safe_empirical = j.at("p_safe_empirical").get<double>();
            r.ci_low = j.at("ci_low").get<double>();
            r.ci_high = j.at("ci_high").get<double>();
            r.master_seed = j.at("master_seed").get<std::uint64_t>();
            r.horizon = j.at("horizon").get<int>();
            r.first_hit_histogram = j.at("first_hit_histogram").get<std::vector<std::int64_t>>();
            if (!j.at("trajectory_dump").is_null()) {
                r.trajectory_dump = j.at("trajectory_dump").get<std::string>();
            }
            if (j.contains("supermartingale")) {
                const json& s = j["supermartingale"];
                r.supermartingale = SupermartingaleStats{s.at("transitions").get<std::int64_t>(),
                                                         s.at("mean_increment").get<double>(),
                                                         s.at("standard_error").get<double>()};
            }
            out.monte_carlo = std::move(r);
        }
    } catch (const json::exception& e) {
        schema_fail("/", std::string("report does not match the schema: ") + e.what());
    }
    return out;
}

std::string emit_sweep(const std::vector<SweepRow>& rows, ReportFormat format) {
    if (format == ReportFormat::Json) {
        ordered_json arr = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json j;
            j["sigma_w"] = r.sigma_w;
            j["sigma_i"] = r.sigma_i;
            j["sigma_u"] = r.sigma_u;
            j["p_empty"] = round_report_value(r.p_empty);
            j["eta"] = round_report_value(r.eta);
            j["beta"] = round_report_value(r.beta);
            j["c"] = round_report_value(r.c);
            j["bound"] = round_report_value(r.bound);
            j["empirical"] = round_report_value(r.empirical);
            j["ci_low"] = round_report_value(r.ci_low);
            j["ci_high"] = round_report_value(r.ci_high);
            j["status"] = r.status;
            arr.push_back(std::move(j));
        }
        return arr.dump(2) + "\n";
    }
    std::string out =
        "sigma_w,sigma_i,sigma_u,p_empty,eta,beta,c,bound,empirical,ci_low,ci_high,status\n";
    for (const auto& r : rows) {
        out += join_row({fmt9(r.sigma_w), fmt9(r.sigma_i), fmt9(r.sigma_u), fmt9(r.p_empty),
                         fmt9(r.eta), fmt9(r.beta), fmt9(r.c), fmt9(r.bound), fmt9(r.empirical),
                         fmt9(r.ci_low), fmt9(r.ci_high), csv_escape(r.status)});
    }
    return out;
}

}  // namespace thetacbc
