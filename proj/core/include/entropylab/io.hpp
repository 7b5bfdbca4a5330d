#pragma once

#include "entropylab/collapse.hpp"
#include "entropylab/conjugate_heat.hpp"
#include "entropylab/functional.hpp"
#include "entropylab/harnack.hpp"
#include "entropylab/minimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace elab {

// Domain from a shorthand or a JSON file:
//   disk:R  ellipse:a,b  rounded_square:s,rho          (polylines with `vertices` vertices)
//   analytic:slab:d[,dim]  analytic:half_plane:a  analytic:grim_reaper_2d
//   analytic:grim_reaper_product:n  analytic:catenoid  analytic:ball:R[,dim]
//   analytic:disk:R  analytic:ellipse:a,b
// A file holds {"type":"polyline","vertices":[[x,y],...]} or
// {"type":"analytic","variant":"slab","params":{"d":1,"dim":2}}. Unknown keys are rejected.
CollapseDomain parse_domain(const std::string& spec, int vertices = 256);
CollapseDomain parse_domain_json(const std::string& text);
// Polyline domains pass through; bounded planar analytic domains are sampled.
Curve domain_curve(const CollapseDomain& domain, int vertices);

// "geometric:r0,r1[,q]" or a comma-separated list.
std::vector<double> parse_radii(const std::string& spec);

// Shortest round-trip decimal for a double ("%.17g").
std::string fmt17(double v);

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t h);
std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary and renames it over the target.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string mesh_json(const TriMesh& mesh);

// JSON-lines: a header object, then one snapshot per line.
std::string trajectory_jsonl(const FlowTrajectory& trajectory);
FlowTrajectory parse_trajectory_jsonl(const std::string& text);

std::string entropy_json(const EntropyReport& report, double tau);
std::string minimizer_json(const MinimizerResult& result, double tau, const ElReport* el = nullptr);

// CSV tables with a header row; floats with 17 significant digits.
std::string harnack_csv(const HarnackReport& report);
std::string scan_csv(const RatioScan& scan);
std::string conservation_csv(const BackwardSolveState& state);

// Whitespace-separated columns with '#' header comments.
std::string harnack_columns(const HarnackReport& report);
std::string scan_columns(const RatioScan& scan);

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::string version;
  double wall_seconds = 0.0;
  std::map<std::string, std::string> input_hashes;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
};
std::string manifest_json(const RunManifest& manifest);

// Binary cache of a backward solve.
void save_state(const std::filesystem::path& path, const BackwardSolveState& state);
BackwardSolveState load_state(const std::filesystem::path& path);

}  // namespace elab
