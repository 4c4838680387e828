#pragma once

#include "covasym/depolarization.hpp"
#include "covasym/interconversion.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace covasym {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OutputSpec {
    std::string path;  // empty: stdout
    std::string format = "json";
};

struct Scenario {
    std::string task;  // hmin, feasible, smoothed, depol-threshold, modes, region-scan, net
    SymmetrySpec group;
    std::optional<SymmetrySpec> output_group;
    std::optional<CMatrix> input_state;
    std::optional<CMatrix> target_state;
    std::optional<CMatrix> reference_state;
    json params = json::object();
    std::optional<uint64_t> seed;
    OutputSpec output;
    std::string hash;  // FNV-1a of the canonical JSON dump

    Representation input_rep() const;
    Representation output_rep() const;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j, const std::string& path);
SymmetrySpec group_from_json(const json& j, const std::string& path);

json to_json(const PhiEvaluation& e);
json to_json(const FeasibilityReport& r);
json to_json(const DepolReport& r);
json to_json(const ModeDecomposition& md, const ItoBasis& basis);
json to_json(const EpsilonNet& net);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string format_number(double v);  // %.12g
std::string to_csv(const CsvTable& t);
CsvTable parse_csv(const std::string& text);
json to_json(const CsvTable& t);

uint64_t fnv1a(const std::string& s);
std::string hex64(uint64_t v);

// Writes to path.tmp then renames over path.
void write_atomic(const std::string& path, const std::string& content);

// Region scans over the xz plane of the Bloch ball, resolution N per axis, row-major in z then x.
CsvTable region_scan(const Scenario& sc, int threads);

struct RunOptions {
    int threads = 1;
    std::optional<uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    bool fail_on_infeasible = false;
};

struct RunResult {
    std::string content;
    std::string format;
    json meta;
    bool infeasible = false;
};

RunResult run_task(const Scenario& sc, const RunOptions& opts);

// Runs the task and writes the artifact (plus `<path>.meta.json`) or prints to stdout.
// Returns the process exit code: 0, or 2 for an Infeasible verdict under fail_on_infeasible.
int run(const Scenario& sc, const RunOptions& opts);

}  // namespace covasym
