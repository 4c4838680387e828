#include "covasym/scenario.hpp"

#include "covasym/parallel.hpp"
#include "covasym/qubit.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace covasym {

namespace {

const std::set<std::string> kTasks = {"hmin", "feasible", "smoothed", "depol-threshold", "modes", "region-scan", "net"};
const std::set<std::string> kTopKeys = {"task",   "group",  "output_group", "input_state", "target_state", "reference_state",
                                        "params", "seed",   "output",       "description"};

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ScenarioError(path + ": " + msg);
}

double get_number(const json& p, const std::string& key, double def, const std::string& path) {
    if (!p.contains(key)) return def;
    if (!p[key].is_number()) fail(path + "." + key, "expected a number");
    return p[key].get<double>();
}

int get_int(const json& p, const std::string& key, int def, const std::string& path) {
    if (!p.contains(key)) return def;
    if (!p[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    return p[key].get<int>();
}

bool get_bool(const json& p, const std::string& key, bool def, const std::string& path) {
    if (!p.contains(key)) return def;
    if (!p[key].is_boolean()) fail(path + "." + key, "expected a boolean");
    return p[key].get<bool>();
}

std::string get_string(const json& p, const std::string& key, const std::string& def, const std::string& path) {
    if (!p.contains(key)) return def;
    if (!p[key].is_string()) fail(path + "." + key, "expected a string");
    return p[key].get<std::string>();
}

Complex complex_from_json(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) fail(path, "expected [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

CMatrix state_from_json(const json& j, int dim, const std::string& path) {
    CMatrix m;
    if (j.is_object() && j.contains("bloch")) {
        const json& b = j["bloch"];
        if (dim != 2) fail(path + ".bloch", "Bloch vectors are only accepted for qubits");
        if (!b.is_array() || b.size() != 3) fail(path + ".bloch", "expected three numbers");
        Eigen::Vector3d v;
        for (int k = 0; k < 3; ++k) {
            if (!b[k].is_number()) fail(path + ".bloch[" + std::to_string(k) + "]", "expected a number");
            v(k) = b[k].get<double>();
        }
        try {
            m = qubit_state(v);
        } catch (const InvalidState& e) {
            fail(path, e.what());
        }
    } else if (j.is_object() && j.contains("matrix")) {
        m = matrix_from_json(j["matrix"], path + ".matrix");
    } else if (j.is_array()) {
        m = matrix_from_json(j, path);
    } else {
        fail(path, "expected {\"matrix\": ...} or {\"bloch\": [x, y, z]}");
    }
    if (m.rows() != dim) fail(path, "dimension " + std::to_string(m.rows()) + " does not match the representation dimension " + std::to_string(dim));
    try {
        DensityMatrix::from_matrix(m);
    } catch (const InvalidState& e) {
        fail(path, e.what());
    }
    return m;
}

SurfaceSpec surface_from_params(const json& p, std::optional<uint64_t> seed) {
    SurfaceSpec s;
    const json sp = p.contains("surface") ? p["surface"] : json::object();
    const std::string path = "params.surface";
    if (!sp.is_object()) fail(path, "expected an object");
    const std::string kind = get_string(sp, "kind", "infinity", path);
    if (kind == "infinity") s.kind = SurfaceKind::InfinityShell;
    else if (kind == "frobenius") s.kind = SurfaceKind::FrobeniusSphere;
    else fail(path + ".kind", "expected \"infinity\" or \"frobenius\"");
    s.radius = get_number(sp, "radius", 1.0, path);
    const std::string sampler = get_string(sp, "sampler", "random", path);
    if (sampler == "random") {
        s.sampler = SamplerKind::UniformRandom;
        if (!seed) fail("seed", "a seed is required for the random surface sampler");
    } else if (sampler == "net") {
        s.sampler = SamplerKind::DeterministicNet;
    } else {
        fail(path + ".sampler", "expected \"random\" or \"net\"");
    }
    s.count = get_int(sp, "count", 64, path);
    s.epsilon = get_number(sp, "epsilon", 0.1, path);
    s.seed = seed.value_or(1);
    return s;
}

json complex_to_json(Complex c) {
    return json::array({c.real(), c.imag()});
}

json finite_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

void require(const std::optional<CMatrix>& m, const char* name, const std::string& task) {
    if (!m) throw ScenarioError(std::string(name) + ": required by task " + task);
}

CsvTable flatten(const json& body) {
    CsvTable t;
    std::vector<std::string> row;
    for (auto it = body.begin(); it != body.end(); ++it) {
        const json& v = it.value();
        if (v.is_number()) {
            t.header.push_back(it.key());
            row.push_back(format_number(v.get<double>()));
        } else if (v.is_boolean()) {
            t.header.push_back(it.key());
            row.push_back(v.get<bool>() ? "1" : "0");
        } else if (v.is_string()) {
            t.header.push_back(it.key());
            row.push_back(v.get<std::string>());
        }
    }
    t.rows.push_back(row);
    return t;
}

}  // namespace

Representation Scenario::input_rep() const {
    return Representation::from_spec(group);
}

Representation Scenario::output_rep() const {
    return Representation::from_spec(output_group ? *output_group : group);
}

CMatrix matrix_from_json(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
    const size_t n = j.size();
    CMatrix m(n, n);
    for (size_t r = 0; r < n; ++r) {
        const std::string rp = path + "[" + std::to_string(r) + "]";
        if (!j[r].is_array() || j[r].size() != n) fail(rp, "expected a row of " + std::to_string(n) + " entries");
        for (size_t c = 0; c < n; ++c) m(r, c) = complex_from_json(j[r][c], rp + "[" + std::to_string(c) + "]");
    }
    return m;
}

json matrix_to_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

SymmetrySpec group_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const std::string kind = get_string(j, "kind", "", path);
    try {
        if (kind == "u1") {
            if (!j.contains("weights") || !j["weights"].is_array()) fail(path + ".weights", "expected an integer array");
            std::vector<int> w;
            for (size_t i = 0; i < j["weights"].size(); ++i) {
                if (!j["weights"][i].is_number_integer()) fail(path + ".weights[" + std::to_string(i) + "]", "expected an integer");
                w.push_back(j["weights"][i].get<int>());
            }
            return SymmetrySpec::u1(w);
        }
        if (kind == "su2") {
            if (!j.contains("spins") || !j["spins"].is_array()) fail(path + ".spins", "expected an array of {j, multiplicity}");
            std::vector<SpinBlock> s;
            for (size_t i = 0; i < j["spins"].size(); ++i) {
                const std::string sp = path + ".spins[" + std::to_string(i) + "]";
                const json& b = j["spins"][i];
                if (!b.is_object()) fail(sp, "expected an object");
                s.push_back({get_number(b, "j", -1.0, sp), get_int(b, "multiplicity", 1, sp)});
            }
            return SymmetrySpec::su2(s);
        }
        if (kind == "finite") {
            if (!j.contains("elements") || !j["elements"].is_array()) fail(path + ".elements", "expected an array of matrices");
            std::vector<CMatrix> e;
            for (size_t i = 0; i < j["elements"].size(); ++i)
                e.push_back(matrix_from_json(j["elements"][i], path + ".elements[" + std::to_string(i) + "]"));
            return SymmetrySpec::finite(e);
        }
    } catch (const SpecError& e) {
        fail(path, e.what());
    }
    fail(path + ".kind", "expected \"u1\", \"su2\" or \"finite\"");
}

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("scenario: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("scenario", "expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!kTopKeys.count(it.key())) fail(it.key(), "unknown field");

    Scenario sc;
    sc.hash = hex64(fnv1a(j.dump()));
    sc.task = get_string(j, "task", "", "scenario");
    if (!kTasks.count(sc.task)) fail("task", "unknown task \"" + sc.task + "\"");
    if (!j.contains("group")) fail("group", "required");
    sc.group = group_from_json(j["group"], "group");
    if (j.contains("output_group")) sc.output_group = group_from_json(j["output_group"], "output_group");

    auto build = [](const SymmetrySpec& spec, const char* path) {
        try {
            return Representation::from_spec(spec);
        } catch (const SpecError& e) {
            fail(path, e.what());
        }
    };
    const Representation in = build(sc.group, "group");
    const Representation out = sc.output_group ? build(*sc.output_group, "output_group") : in;
    if (j.contains("input_state")) sc.input_state = state_from_json(j["input_state"], in.dim(), "input_state");
    if (j.contains("target_state")) sc.target_state = state_from_json(j["target_state"], out.dim(), "target_state");
    if (j.contains("reference_state")) sc.reference_state = state_from_json(j["reference_state"], out.dim(), "reference_state");

    if (j.contains("params")) {
        if (!j["params"].is_object()) fail("params", "expected an object");
        sc.params = j["params"];
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) fail("seed", "expected a non-negative integer");
        sc.seed = j["seed"].get<uint64_t>();
    }
    if (j.contains("output")) {
        const json& o = j["output"];
        if (!o.is_object()) fail("output", "expected an object");
        sc.output.path = get_string(o, "path", "", "output");
        sc.output.format = get_string(o, "format", sc.task == "region-scan" ? "csv" : "json", "output");
    } else if (sc.task == "region-scan") {
        sc.output.format = "csv";
    }
    if (sc.output.format != "json" && sc.output.format != "csv") fail("output.format", "expected \"json\" or \"csv\"");
    if (sc.params.contains("resolution") && get_int(sc.params, "resolution", 2, "params") < 2) fail("params.resolution", "grid resolution must be at least 2");

    const std::string& t = sc.task;
    if (t == "hmin") {
        require(sc.input_state, "input_state", t);
        require(sc.reference_state, "reference_state", t);
    } else if (t == "feasible" || t == "smoothed" || t == "depol-threshold") {
        require(sc.input_state, "input_state", t);
        require(sc.target_state, "target_state", t);
    } else if (t == "modes") {
        require(sc.input_state, "input_state", t);
    }
    if (t == "smoothed" || t == "net") {
        if (!sc.params.contains("epsilon")) fail("params.epsilon", "required by task " + t);
        get_number(sc.params, "epsilon", 0.0, "params");
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ScenarioError(path + ": cannot open scenario file");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_scenario(ss.str());
}

json to_json(const PhiEvaluation& e) {
    return json{{"phi", e.phi},
                {"h_min", e.h_min},
                {"method", phi_method_name(e.method)},
                {"status", sdp_status_name(e.status)},
                {"gap", e.gap},
                {"certified", e.certified},
                {"x_a", matrix_to_json(e.x_a)}};
}

json to_json(const FeasibilityReport& r) {
    json j{{"verdict", verdict_name(r.verdict)},
           {"method", r.method},
           {"note", r.note},
           {"evaluated", r.evaluated},
           {"min_delta_h", finite_or_null(r.min_delta_h)},
           {"phase1_value", r.phase1_value},
           {"linear_residual", r.linear_residual},
           {"radius", r.radius},
           {"borderline_count", r.borderline.size()}};
    j["witness_eta"] = r.witness_eta ? matrix_to_json(*r.witness_eta) : json(nullptr);
    j["witness_delta_h"] = r.witness_eta ? json(r.witness_delta_h) : json(nullptr);
    json bl = json::array();
    for (const auto& b : r.borderline) bl.push_back(matrix_to_json(b));
    j["borderline"] = bl;
    if (r.channel) {
        j["channel"] = json{{"d_in", r.channel->d_in},
                            {"d_out", r.channel->d_out},
                            {"provenance", r.channel->provenance},
                            {"choi", matrix_to_json(r.channel->choi())}};
    } else {
        j["channel"] = nullptr;
    }
    return j;
}

json to_json(const DepolReport& r) {
    json modes = json::array();
    for (const auto& m : r.modes) {
        modes.push_back(json{{"label", m.label},
                             {"irrep", m.irrep},
                             {"component", m.component},
                             {"f", m.f},
                             {"g", m.g},
                             {"lhs", m.lhs},
                             {"rhs", m.rhs},
                             {"ok", m.ok}});
    }
    return json{{"verdict", r.verdict},
                {"p", r.p},
                {"q", finite_or_null(r.q)},
                {"q_star", finite_or_null(r.q_star)},
                {"lambda_min", r.lambda_min},
                {"n", r.n},
                {"d_s", r.d_s},
                {"target", matrix_to_json(r.target)},
                {"note", r.note},
                {"modes", modes}};
}

json to_json(const ModeDecomposition& md, const ItoBasis& basis) {
    json modes = json::array();
    for (const auto& m : md.modes) {
        json coeffs = json::array();
        for (const auto& c : m.coefficients) coeffs.push_back(complex_to_json(c));
        modes.push_back(json{{"label", basis.label(m.irrep, m.component)},
                             {"irrep", m.irrep},
                             {"component", m.component},
                             {"trivial", basis.irreps()[m.irrep].trivial},
                             {"coefficients", coeffs},
                             {"g", g_coefficient(md, m.irrep, m.component)},
                             {"op", matrix_to_json(m.op)}});
    }
    return json{{"dim", md.dim}, {"group", group_kind_name(basis.kind())}, {"modes", modes}};
}

json to_json(const EpsilonNet& net) {
    json states = json::array();
    for (const auto& s : net.states) states.push_back(matrix_to_json(s));
    return json{{"d", net.d},
                {"epsilon", net.epsilon},
                {"cardinality_bound", net.cardinality_bound},
                {"size", net.states.size()},
                {"states", states}};
}

json to_json(const CsvTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) rows.push_back(r);
    return json{{"header", t.header}, {"rows", rows}};
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string to_csv(const CsvTable& t) {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return out;
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream is(text);
    std::string ln;
    bool first = true;
    while (std::getline(is, ln)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(ln);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!ln.empty() && ln.back() == ',') cells.push_back("");
        if (first) {
            t.header = cells;
            first = false;
        } else {
            t.rows.push_back(cells);
        }
    }
    return t;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error(path + ": cannot open for writing");
        f << content;
        f.flush();
        if (!f) throw std::runtime_error(path + ": write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error(path + ": rename failed: " + ec.message());
    }
}

CsvTable region_scan(const Scenario& sc, int threads) {
    const json& p = sc.params;
    const std::string mode = get_string(p, "mode", "t_eta", "params");
    const int n = get_int(p, "resolution", 101, "params");
    if (n < 2) fail("params.resolution", "grid resolution must be at least 2");
    const Representation in = sc.input_rep();
    const Representation out = sc.output_rep();
    if (in.dim() != 2 || out.dim() != 2) fail("group", "region scans run over the Bloch ball and need qubit systems");
    auto coord = [n](int i) { return -1.0 + 2.0 * i / (n - 1); };
    const size_t total = static_cast<size_t>(n) * n;
    const std::string nan = "nan";
    CsvTable t;

    if (mode == "t_eta") {
        require(sc.input_state, "input_state", "region-scan/t_eta");
        require(sc.reference_state, "reference_state", "region-scan/t_eta");
        const double tol = get_number(p, "tol", 1e-9, "params");
        const JointSetting js = JointSetting::for_output(out, in);
        PhiOptions po;
        po.tol = get_number(p, "phi_tol", 1e-10, "params");
        // T_eta compares H_eta(sigma) with H_eta(rho) for sigma on the output system
        const JointSetting jo = JointSetting::for_output(out, out);
        const double log_rho = std::log2(phi_eta(*sc.reference_state, *sc.input_state, js, po).phi);
        t.header = {"x", "z", "in_body", "delta_h", "in_region"};
        t.rows = parallel_map(total, threads, [&](size_t k) {
            const double x = coord(static_cast<int>(k % n)), z = coord(static_cast<int>(k / n));
            std::vector<std::string> row{format_number(x), format_number(z)};
            if (x * x + z * z > 1.0) return std::vector<std::string>{row[0], row[1], "0", nan, "0"};
            const double dh = log_rho - std::log2(phi_eta(*sc.reference_state, qubit_state({x, 0.0, z}), jo, po).phi);
            return std::vector<std::string>{row[0], row[1], "1", format_number(dh), dh >= -tol ? "1" : "0"};
        });
    } else if (mode == "accessible") {
        const std::string vary = get_string(p, "vary", "output", "params");
        if (vary != "output" && vary != "input") fail("params.vary", "expected \"output\" or \"input\"");
        if (vary == "output") require(sc.input_state, "input_state", "region-scan/accessible");
        else require(sc.target_state, "target_state", "region-scan/accessible");
        const double dp = get_number(p, "p", 0.0, "params");
        const bool want_min_p = get_bool(p, "minimal_p", false, "params");
        const bool same = !sc.output_group;
        ChoiOptions co;
        co.tol = get_number(p, "tol", co.tol, "params");
        co.linear_tol = get_number(p, "linear_tol", co.linear_tol, "params");
        const InterconversionSetting setting(in, out);
        t.header = {"x", "z", "in_body", "sdp", "sc"};
        if (want_min_p) t.header.push_back("minimal_p");
        t.rows = parallel_map(total, threads, [&](size_t k) {
            const double x = coord(static_cast<int>(k % n)), z = coord(static_cast<int>(k / n));
            std::vector<std::string> row{format_number(x), format_number(z)};
            if (x * x + z * z > 1.0) {
                row.insert(row.end(), {"0", "0", "0"});
                if (want_min_p) row.push_back(nan);
                return row;
            }
            const CMatrix grid_state = qubit_state({x, 0.0, z});
            const CMatrix& rho = vary == "output" ? *sc.input_state : grid_state;
            const CMatrix& sigma = vary == "output" ? grid_state : *sc.target_state;
            const DepolReport dr = same ? depol_scan_q(rho, sigma, dp, in) : depol_check(rho, sigma, dp, in, out);
            const bool sdp = choi_feasibility(rho, dr.target, setting, co).verdict == Verdict::Feasible;
            row.insert(row.end(), {"1", sdp ? "1" : "0", dr.verdict ? "1" : "0"});
            if (want_min_p) row.push_back(format_number(minimal_p(rho, sigma, in, out)));
            return row;
        });
    } else if (mode == "phi_map") {
        require(sc.input_state, "input_state", "region-scan/phi_map");
        const JointSetting js = JointSetting::for_output(out, in);
        PhiOptions po;
        po.tol = get_number(p, "phi_tol", 1e-10, "params");
        const bool closed = in.kind() == GroupKind::U1 && in.weights() == std::vector<int>{1, -1} && out.weights() == in.weights();
        t.header = {"r", "z", "in_body", "phi", "phi_closed_form"};
        t.rows = parallel_map(total, threads, [&](size_t k) {
            const double r = static_cast<double>(k % n) / (n - 1), z = coord(static_cast<int>(k / n));
            std::vector<std::string> row{format_number(r), format_number(z)};
            if (r * r + z * z > 1.0) return std::vector<std::string>{row[0], row[1], "0", nan, nan};
            const Eigen::Vector3d xv(r, 0.0, z);
            const double phi = phi_eta(qubit_state(xv), *sc.input_state, js, po).phi;
            const std::string cf = closed ? format_number(phi_u1_qubit(*sc.input_state, xv)) : nan;
            return std::vector<std::string>{row[0], row[1], "1", format_number(phi), cf};
        });
    } else {
        fail("params.mode", "expected \"t_eta\", \"accessible\" or \"phi_map\"");
    }
    return t;
}

RunResult run_task(const Scenario& sc, const RunOptions& opts) {
    RunResult res;
    res.format = opts.format.value_or(sc.output.format);
    if (res.format != "json" && res.format != "csv") throw ScenarioError("--format: expected json or csv");
    const std::optional<uint64_t> seed = opts.seed ? opts.seed : sc.seed;
    const int threads = std::max(1, opts.threads);
    const json& p = sc.params;
    const Representation in = sc.input_rep();
    const Representation out = sc.output_rep();

    res.meta = json{{"tool", "covasym"}, {"version", kToolVersion}, {"task", sc.task}, {"scenario_hash", sc.hash}, {"format", res.format}};
    if (seed) res.meta["seed"] = *seed;
    json tolerances = json::object();

    json body;
    std::optional<CsvTable> table;
    if (sc.task == "hmin") {
        PhiOptions po;
        po.tol = get_number(p, "phi_tol", po.tol, "params");
        tolerances["phi_tol"] = po.tol;
        const JointSetting js = JointSetting::for_output(out, in);
        body = to_json(phi_eta(*sc.reference_state, *sc.input_state, js, po));
    } else if (sc.task == "feasible") {
        const std::string method = get_string(p, "method", "choi", "params");
        const InterconversionSetting setting(in, out);
        FeasibilityReport r;
        if (method == "choi") {
            ChoiOptions co;
            co.tol = get_number(p, "tol", co.tol, "params");
            co.linear_tol = get_number(p, "linear_tol", co.linear_tol, "params");
            tolerances["tol"] = co.tol;
            tolerances["linear_tol"] = co.linear_tol;
            r = choi_feasibility(*sc.input_state, *sc.target_state, setting, co);
        } else if (method == "surface") {
            const SurfaceSpec spec = surface_from_params(p, seed);
            tolerances["violation"] = 1e-8;
            r = surface_check(*sc.input_state, *sc.target_state, setting, spec, threads);
        } else {
            fail("params.method", "expected \"choi\" or \"surface\"");
        }
        res.infeasible = r.verdict == Verdict::Infeasible;
        body = to_json(r);
    } else if (sc.task == "smoothed") {
        const double eps = get_number(p, "epsilon", 0.0, "params");
        tolerances["violation"] = 1e-8;
        const InterconversionSetting setting(in, out);
        const FeasibilityReport r = smoothed_check(*sc.input_state, *sc.target_state, setting, eps, seed.value_or(1), threads);
        res.infeasible = r.verdict == Verdict::Infeasible;
        body = to_json(r);
    } else if (sc.task == "depol-threshold") {
        const double mp = minimal_p(*sc.input_state, *sc.target_state, in, out);
        body = json{{"minimal_p", mp}, {"depol_check", to_json(depol_check(*sc.input_state, *sc.target_state, mp, in, out))}};
        body["trace_norm_corollary"] = trace_norm_corollary(*sc.input_state, *sc.target_state, in, out);
        if (!sc.output_group) {
            const double dp = get_number(p, "p", 0.0, "params");
            body["depol_check_q"] = to_json(depol_scan_q(*sc.input_state, *sc.target_state, dp, in, get_int(p, "q_grid", 64, "params")));
        } else {
            body["depol_check_q"] = nullptr;
        }
        tolerances["bisection_steps"] = 60;
    } else if (sc.task == "modes") {
        const ItoBasis b = ItoBasis::build(in);
        const ModeDecomposition md = decompose_modes(*sc.input_state, b);
        body = to_json(md, b);
        CsvTable t;
        t.header = {"label", "irrep", "component", "g", "frobenius_norm"};
        for (const auto& m : md.modes)
            t.rows.push_back({b.label(m.irrep, m.component), std::to_string(m.irrep), std::to_string(m.component),
                              format_number(g_coefficient(md, m.irrep, m.component)), format_number(m.op.norm())});
        table = t;
    } else if (sc.task == "region-scan") {
        table = region_scan(sc, threads);
        tolerances["tol"] = get_number(p, "tol", 1e-9, "params");
    } else if (sc.task == "net") {
        const double eps = get_number(p, "epsilon", 0.0, "params");
        const int d = get_int(p, "d", out.dim(), "params");
        const EpsilonNet net = generate_epsilon_net(d, eps, seed.value_or(1));
        body = to_json(net);
        const std::vector<CMatrix> basis = bloch_basis(d);
        CsvTable t;
        t.header = {"k"};
        for (size_t i = 0; i < basis.size(); ++i) t.header.push_back("x" + std::to_string(i + 1));
        for (size_t k = 0; k < net.states.size(); ++k) {
            std::vector<std::string> row{std::to_string(k)};
            const CMatrix dev = net.states[k] - CMatrix::Identity(d, d) / static_cast<double>(d);
            for (const auto& b : basis) row.push_back(format_number((b.adjoint() * dev).trace().real() / b.squaredNorm()));
            t.rows.push_back(row);
        }
        table = t;
    }
    res.meta["tolerances"] = tolerances;

    if (res.format == "csv") {
        res.content = to_csv(table ? *table : flatten(body));
    } else {
        res.content = (table && body.is_null() ? to_json(*table) : body).dump(2) + "\n";
    }
    return res;
}

int run(const Scenario& sc, const RunOptions& opts) {
    const RunResult r = run_task(sc, opts);
    const std::string path = opts.out.value_or(sc.output.path);
    if (path.empty()) {
        std::cout << r.content;
        std::cout.flush();
    } else {
        write_atomic(path, r.content);
        write_atomic(path + ".meta.json", r.meta.dump(2) + "\n");
    }
    return opts.fail_on_infeasible && r.infeasible ? 2 : 0;
}

}  // namespace covasym
