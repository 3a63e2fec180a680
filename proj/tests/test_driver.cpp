#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "mhddg/driver.hpp"
#include "mhddg/timeint.hpp"

using namespace mhddg;

namespace {

std::string slurp(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("config parsing applies case defaults and overrides") {
  const RunConfig cfg = parse_config(
      "# comment line\n"
      "case.name = khi\n"
      "scheme.degree = 4   # trailing comment\n"
      "step.cfl = 0.25\n");
  CHECK(cfg.kase == CaseKind::Khi);
  CHECK(cfg.scheme.N == 4);
  CHECK(cfg.step.cfl == 0.25);
  // khi defaults
  CHECK(cfg.scheme.gas.gamma == doctest::Approx(5.0 / 3.0));
  CHECK(cfg.scheme.es_surface);
  CHECK(cfg.t_final == 5.0);
  CHECK_FALSE(cfg.mesh.periodic[1]);

  // defaults are order independent: the case key may come last
  const RunConfig cfg2 = parse_config("scheme.degree = 4\ncase.name = khi\n");
  CHECK(cfg2.scheme.N == 4);
  CHECK(cfg2.t_final == 5.0);
}

TEST_CASE("config serialization round trips") {
  const std::string text =
      "case.name = wave\n"
      "case.wave_family = slow\n"
      "scheme.nodes = lobatto\n"
      "scheme.degree = 3\n"
      "scheme.surface = es\n"
      "mesh.elements = 5 3 2\n"
      "mesh.alpha = 0.0375\n"
      "mesh.geometry_degree = 2\n"
      "step.cfl = 0.4\n";
  const RunConfig a = parse_config(text);
  const std::string sa = serialize_config(a);
  const RunConfig b = parse_config(sa);
  CHECK(serialize_config(b) == sa);
  CHECK(b.wave_family == WaveFamily::Slow);
  CHECK(b.scheme.nodes == NodeKind::Lobatto);
  CHECK(b.mesh.elems == std::array<int, 3>{5, 3, 2});
}

TEST_CASE("config errors carry line numbers and are exhaustive") {
  try {
    parse_config(
        "case.name = blast\n"
        "bogus.key = 1\n"
        "scheme.degree = 0\n"
        "step.cfl = -1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError &e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("bogus.key") != std::string::npos);
    CHECK(msg.find("scheme.degree") != std::string::npos);
    CHECK(msg.find("step.cfl") != std::string::npos);
  }

  // missing section prefix and malformed line
  CHECK_THROWS_AS(parse_config("degree = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
  // bad enum value
  CHECK_THROWS_AS(parse_config("scheme.nodes = chebyshev\n"), ConfigError);
  // research-only variants require the audit flag
  CHECK_THROWS_AS(parse_config("scheme.variant = naive_gauss\n"), ConfigError);
  CHECK_NOTHROW(parse_config("scheme.variant = naive_gauss\nrun.audit = 1\n"));
}

TEST_CASE("random smooth fields are admissible and reproducible") {
  MappingSpec spec;
  spec.alpha = 0.075;
  spec.N_geo = 2;
  spec.elems = {3, 3, 3};
  const CurvMesh mesh = build_mesh(spec, NodeKind::Gauss, 3);
  const GasModel gas;

  const Field a = random_smooth_field(mesh, gas, 42);
  const Field b = random_smooth_field(mesh, gas, 42);
  const Field c = random_smooth_field(mesh, gas, 43);
  REQUIRE(a.data.size() == b.data.size());
  bool identical = true, differs = false;
  for (size_t i = 0; i < a.data.size(); ++i)
    for (int v = 0; v < kNumVars; ++v) {
      identical = identical && (a.data[i][v] == b.data[i][v]);
      differs = differs || (a.data[i][v] != c.data[i][v]);
    }
  CHECK(identical);
  CHECK(differs);
  for (const auto &st : a.data) CHECK(admissible(st, gas));

  // 1D variant
  const Mesh1D m1{5, 0.4};
  SchemeConfig sc;
  const Field f1 = random_smooth_field_1d(m1.K, m1, sc, 7);
  const Field f2 = random_smooth_field_1d(m1.K, m1, sc, 7);
  for (size_t i = 0; i < f1.data.size(); ++i) {
    CHECK(admissible(f1.data[i], sc.gas));
    for (int v = 0; v < kNumVars; ++v) CHECK(f1.data[i][v] == f2.data[i][v]);
  }
}

TEST_CASE("field dumps are byte stable") {
  MappingSpec spec;
  spec.alpha = 0.0;
  spec.N_geo = 1;
  spec.elems = {2, 2, 1};
  const CurvMesh mesh = build_mesh(spec, NodeKind::Gauss, 2);
  SchemeConfig cfg;
  cfg.N = 2;
  const Field u = random_smooth_field(mesh, cfg.gas, 3);

  const std::string p1 = "/tmp/mhddg_dump_a";
  const std::string p2 = "/tmp/mhddg_dump_b";
  emit_fields(u, mesh, cfg, p1);
  emit_fields(u, mesh, cfg, p2);
  CHECK(slurp(p1 + ".grid") == slurp(p2 + ".grid"));
  CHECK(slurp(p1 + ".csv") == slurp(p2 + ".csv"));
  CHECK(slurp(p1 + ".grid").find(build_id()) != std::string::npos);
  for (const std::string &p : {p1, p2}) {
    std::remove((p + ".grid").c_str());
    std::remove((p + ".csv").c_str());
  }
}

TEST_CASE("exit codes are distinct and stable") {
  CHECK(kExitOk == 0);
  CHECK(kExitInadmissible == 2);
  CHECK(kExitAuditViolation == 3);
}

TEST_CASE("short free-stream run completes cleanly") {
  RunConfig cfg = parse_config(
      "case.name = free_stream\n"
      "scheme.degree = 2\n"
      "mesh.elements = 2 2 2\n"
      "case.final_time = 0.05\n");
  cfg.output_dir = "/tmp/mhddg_run_test";
  CHECK(cmd_run(cfg) == kExitOk);
}
