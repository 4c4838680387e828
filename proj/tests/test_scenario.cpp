#include "covasym/scenario.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace covasym;

namespace {

const char* kHmin = R"({
  "task": "hmin",
  "group": {"kind": "u1", "weights": [1, -1]},
  "input_state": {"matrix": [[0.5, 0], [0, 0.5]]},
  "reference_state": {"bloch": [0, 0, 0]}
})";

std::string error_of(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ScenarioError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("minimal hmin scenario") {
    const Scenario sc = parse_scenario(kHmin);
    CHECK(sc.task == "hmin");
    RunOptions o;
    const RunResult r = run_task(sc, o);
    CHECK(r.format == "json");
    const json j = json::parse(r.content);
    CHECK(j["phi"].get<double>() == doctest::Approx(0.5));
    CHECK(r.meta["scenario_hash"] == sc.hash);
    CHECK(r.meta["version"] == kToolVersion);
}

TEST_CASE("rejections name the offending field") {
    std::string bad = kHmin;
    bad.replace(bad.find("[[0.5, 0], [0, 0.5]]"), 20, "[[0.5, 0], [0, 0.4]]");
    const std::string e = error_of(bad);
    CHECK(e.find("input_state") != std::string::npos);
    CHECK(e.find("trace") != std::string::npos);

    CHECK(error_of(R"({"task": "hmin", "group": {"kind": "u1", "weights": [1, -1]}, "extra": 1})").find("extra") != std::string::npos);
    CHECK(error_of(R"({"task": "frobnicate", "group": {"kind": "u1", "weights": [1]}})").find("task") != std::string::npos);
    CHECK(error_of(R"({"task": "modes", "group": {"kind": "su2", "spins": [{"j": 0.3}]}, "input_state": [[1]]})").find("group") != std::string::npos);
    CHECK(error_of(R"({"task": "modes", "group": {"kind": "u1", "weights": [1, -1]}, "input_state": {"bloch": [2, 0, 0]}})").find("input_state") != std::string::npos);
    CHECK(error_of(R"({"task": "net", "group": {"kind": "u1", "weights": [1, -1]}})").find("params.epsilon") != std::string::npos);
    CHECK(error_of(R"({"task": "hmin", "group": {"kind": "u1", "weights": [1, -1]}, "input_state": [[1, 0], [0, 0]]})").find("reference_state") != std::string::npos);
    CHECK_FALSE(error_of("{not json").empty());
}

TEST_CASE("complex entries and groups") {
    const Scenario sc = parse_scenario(R"({
      "task": "modes",
      "group": {"kind": "finite", "elements": [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]},
      "input_state": {"matrix": [[0.5, [0, -0.25]], [[0, 0.25], 0.5]]}
    })");
    CHECK(sc.input_state->coeff(0, 1) == Complex(0, -0.25));
    CHECK(sc.input_rep().kind() == GroupKind::Finite);
    const Scenario s2 = parse_scenario(R"({"task": "modes", "group": {"kind": "su2", "spins": [{"j": 1}]},
      "input_state": [[1, 0, 0], [0, 0, 0], [0, 0, 0]]})");
    CHECK(s2.input_rep().dim() == 3);
}

TEST_CASE("modes task output") {
    const Scenario sc = parse_scenario(R"({"task": "modes", "group": {"kind": "u1", "weights": [1, -1]},
      "input_state": {"bloch": [1, 0, 0]}})");
    const json j = json::parse(run_task(sc, {}).content);
    CHECK(j.dump().find("0.5") != std::string::npos);
    RunOptions o;
    o.format = "csv";
    const CsvTable t = parse_csv(run_task(sc, o).content);
    CHECK(t.header.front() == "label");
    int coherent = 0;
    for (const auto& row : t.rows)
        if (row[1] != "0" && std::stod(row[3]) > 0.49) ++coherent;
    CHECK(coherent == 2);
}

TEST_CASE("depol-threshold task") {
    std::mt19937_64 rng(191);
    const Eigen::Vector3d a = oracle::random_bloch(rng), b = oracle::random_bloch(rng);
    std::ostringstream os;
    os << R"({"task": "depol-threshold", "group": {"kind": "u1", "weights": [1, -1]}, "params": {"p": 0.1},)"
       << R"("input_state": {"bloch": [)" << a.x() << "," << a.y() << "," << a.z() << "]},"
       << R"("target_state": {"bloch": [)" << b.x() << "," << b.y() << "," << b.z() << "]}}";
    const json j = json::parse(run_task(parse_scenario(os.str()), {}).content);
    CHECK(j.contains("minimal_p"));
    CHECK(j["depol_check"]["modes"].size() == 2);
    CHECK(j.contains("depol_check_q"));
}

TEST_CASE("CSV formatting") {
    CsvTable empty;
    empty.header = {"x", "z"};
    CHECK(to_csv(empty) == "x,z\n");
    CsvTable one = empty;
    one.rows.push_back({format_number(0.1), format_number(-1.0 / 3)});
    const std::string text = to_csv(one);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    std::mt19937_64 rng(193);
    std::uniform_real_distribution<double> u(-10, 10);
    CsvTable many = empty;
    std::vector<double> vals;
    for (int k = 0; k < 100; ++k) {
        const double v = u(rng) * std::pow(10.0, k % 7 - 3);
        vals.push_back(std::stod(format_number(v)));
        many.rows.push_back({format_number(v), "1"});
    }
    const CsvTable back = parse_csv(to_csv(many));
    REQUIRE(back.rows.size() == 100);
    for (size_t k = 0; k < 100; ++k) CHECK(std::stod(back.rows[k][0]) == vals[k]);
    CHECK(format_number(1.0 / 3) == "0.333333333333");
}

TEST_CASE("deterministic region scans") {
    const std::string text = R"({"task": "region-scan", "group": {"kind": "u1", "weights": [1, -1]},
      "input_state": {"bloch": [0.5, 0, 0.5]}, "reference_state": {"bloch": [0.6, 0, 0.8]},
      "params": {"mode": "t_eta", "resolution": 7}})";
    const Scenario sc = parse_scenario(text);
    RunOptions a, b;
    a.threads = 1;
    b.threads = 3;
    const RunResult ra = run_task(sc, a), rb = run_task(sc, b);
    CHECK(ra.format == "csv");
    CHECK(ra.content == rb.content);
    CHECK(parse_csv(ra.content).rows.size() == 49);

    const auto dir = std::filesystem::temp_directory_path() / "covasym_scenario_test";
    std::filesystem::create_directories(dir);
    RunOptions w;
    w.out = (dir / "scan.csv").string();
    CHECK(run(sc, w) == 0);
    std::ifstream f(*w.out);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == ra.content);
    CHECK(std::filesystem::exists(*w.out + ".meta.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("fail-on-infeasible exit status") {
    const Scenario sc = parse_scenario(R"({"task": "feasible", "group": {"kind": "u1", "weights": [1, -1]},
      "input_state": {"bloch": [0, 0, 0]}, "target_state": {"bloch": [1, 0, 0]}})");
    RunOptions o;
    o.fail_on_infeasible = true;
    const RunResult r = run_task(sc, o);
    CHECK(r.infeasible);
    CHECK(json::parse(r.content)["verdict"] == "Infeasible");
}

TEST_CASE("hashing") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(hex64(0xabcULL) == "0000000000000abc");
}

}
