#include "common.hpp"

#include "entropylab/errors.hpp"
#include "entropylab/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace elab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "entropylab_io_test";
  fs::create_directories(d);
  return d / name;
}

int columns_of_first_data_row(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    int n = 0;
    std::string tok;
    while (row >> tok) ++n;
    return n;
  }
  return 0;
}

}  // namespace

TEST(ParseDomain, Shorthands) {
  const CollapseDomain d = parse_domain("disk:2", 128);
  ASSERT_TRUE(std::holds_alternative<Curve>(d));
  EXPECT_EQ(std::get<Curve>(d).size(), 128);
  EXPECT_NEAR(std::get<Curve>(d).signed_area(), 4.0 * kPi, 0.01);
  const auto slab = std::get<AnalyticDomain>(parse_domain("analytic:slab:1.5,3"));
  EXPECT_DOUBLE_EQ(std::get<Slab>(slab).d, 1.5);
  EXPECT_EQ(std::get<Slab>(slab).dim, 3);
  EXPECT_TRUE(std::holds_alternative<Catenoid3D>(std::get<AnalyticDomain>(parse_domain("analytic:catenoid"))));
  EXPECT_EQ(std::get<GrimReaperProduct>(std::get<AnalyticDomain>(parse_domain("analytic:grim_reaper_product:2"))).n, 2);
  EXPECT_THROW(parse_domain("analytic:torus"), ValidationError);
  EXPECT_THROW(parse_domain("disk:-1"), ValidationError);
  EXPECT_THROW(parse_domain("ellipse:1"), ValidationError);
}

TEST(ParseDomain, JsonFiles) {
  const auto d = parse_domain_json(R"({"type":"analytic","variant":"slab","params":{"d":1,"dim":2}})");
  EXPECT_DOUBLE_EQ(std::get<Slab>(std::get<AnalyticDomain>(d)).d, 1.0);
  // clockwise input is reoriented
  const auto p = parse_domain_json(R"({"type":"polyline","vertices":[[0,0],[0,1],[1,1],[1,0]]})");
  EXPECT_NEAR(std::get<Curve>(p).signed_area(), 1.0, 1e-15);
  EXPECT_THROW(parse_domain_json(R"({"type":"polyline","vertices":[[0,0],[1,1],[1,0],[0,1]]})"), ValidationError);
  EXPECT_THROW(parse_domain_json(R"({"type":"analytic","variant":"slab","params":{"d":1},"extra":1})"),
               ValidationError);
  EXPECT_THROW(parse_domain_json(R"({"type":"analytic","variant":"slab","params":{"width":1}})"), ValidationError);
  EXPECT_THROW(parse_domain_json("not json"), ValidationError);

  const fs::path f = scratch("square.json");
  atomic_write(f, R"({"type":"polyline","vertices":[[0,0],[2,0],[2,2],[0,2]]})");
  EXPECT_NEAR(std::get<Curve>(parse_domain(f.string())).signed_area(), 4.0, 1e-15);
}

TEST(ParseRadii, GeometricAndList) {
  EXPECT_EQ(parse_radii("geometric:4,32"), (std::vector<double>{4, 8, 16, 32}));
  EXPECT_EQ(parse_radii("geometric:1,81,3"), (std::vector<double>{1, 3, 9, 27, 81}));
  EXPECT_EQ(parse_radii("0.5,2,3"), (std::vector<double>{0.5, 2, 3}));
  EXPECT_THROW(parse_radii("geometric:4,2"), ValidationError);
  EXPECT_THROW(parse_radii("1,x"), ValidationError);
  EXPECT_THROW(parse_radii("-1,2"), ValidationError);
}

TEST(Format, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, kPi, -1e-300, 123456789.123456789, 2.0 / 3.0}) EXPECT_EQ(std::stod(fmt17(v)), v);
  EXPECT_EQ(hex64(fnv1a("abc")), hex64(fnv1a("abc")));
  EXPECT_NE(fnv1a("abc"), fnv1a("abd"));
  EXPECT_EQ(hex64(fnv1a("")).size(), 16u);
}

TEST(Trajectory, JsonLinesRoundTrip) {
  const FlowTrajectory tr = run_flow(Curve::ellipse(1.2, 0.8, 64), 0.5, 5);
  const FlowTrajectory back = parse_trajectory_jsonl(trajectory_jsonl(tr));
  ASSERT_EQ(back.size(), tr.size());
  EXPECT_EQ(back.a, tr.a);
  EXPECT_EQ(back.T_est, tr.T_est);
  for (int k = 0; k < tr.size(); ++k) {
    EXPECT_EQ(back[k].t, tr[k].t);
    EXPECT_EQ(back[k].tau, tr[k].tau);
    for (int i = 0; i < tr[k].curve.size(); ++i) EXPECT_EQ(back[k].curve[i], tr[k].curve[i]);
  }
  EXPECT_THROW(parse_trajectory_jsonl("{}\n"), ValidationError);
}

TEST(State, BinaryRoundTrip) {
  const FlowTrajectory tr = analytic_shrinking_disk_trajectory(1.0, {0.0, 0.05, 0.1}, 64);
  const BackwardSolveState st = backward_solve(tr, end_data(tr, 2, 0.15));
  const fs::path f = scratch("state.bin");
  save_state(f, st);
  const BackwardSolveState back = load_state(f);
  ASSERT_EQ(back.size(), st.size());
  EXPECT_EQ(back.reference.tris, st.reference.tris);
  for (int k = 0; k < st.size(); ++k) {
    EXPECT_EQ(back.u[k], st.u[k]);
    EXPECT_EQ(back.mass[k], st.mass[k]);
  }
  EXPECT_EQ(back.mu_end, st.mu_end);
  atomic_write(f, "garbage");
  EXPECT_THROW(load_state(f), std::exception);
}

TEST(Tables, HeadersAndColumns) {
  const RatioScan s = ratio_scan(CollapseDomain{AnalyticDomain{Slab{1.0, 2}}}, {{0, 0, 0}}, {4, 8, 16}, {});
  const std::string csv = scan_csv(s);
  EXPECT_EQ(csv.substr(0, csv.find('\n')).find("ratio") != std::string::npos, true);
  EXPECT_NE(csv.find("c1"), std::string::npos);
  EXPECT_EQ(columns_of_first_data_row(scan_columns(s)), 7);

  const FlowTrajectory tr = analytic_shrinking_disk_trajectory(1.0, {0.0, 0.02, 0.04, 0.06, 0.08}, 64);
  const BackwardSolveState st = backward_solve(tr, end_data(tr, 4, 0.15));
  const HarnackReport rep = rate_identity_check(st);
  const std::string cols = harnack_columns(rep);
  EXPECT_EQ(columns_of_first_data_row(cols), 9);
  EXPECT_NE(cols.find("conjecture_value"), std::string::npos);
  const std::string hc = harnack_csv(rep);
  EXPECT_NE(hc.find("W_beta"), std::string::npos);
  EXPECT_NE(hc.find("tau"), std::string::npos);
  EXPECT_NE(conservation_csv(st).find("mass"), std::string::npos);
}

TEST(Manifest, IsValidJson) {
  RunManifest m;
  m.command = "entropy";
  m.config = {{"tau", "0.5"}, {"domain", "disk:\"1\""}};
  m.version = "0.3.0";
  m.outputs = {"a.csv"};
  const std::string j = manifest_json(m);
  EXPECT_NE(j.find("\"command\""), std::string::npos);
  EXPECT_NE(j.find("disk:\\\"1\\\""), std::string::npos);
}
