#pragma once

#include <cstdint>
#include <string>

#include "mhddg/cases.hpp"

namespace mhddg {

enum class CaseKind { Manufactured, Blast, Khi, Wave, FreeStream, Random };

// Step-size control: dt = cfl * dx_min / (lambda_max * (2N+1)).
struct StepControl {
  double cfl = 0.5;
  long max_steps = 100000000;
};

struct RunConfig {
  SchemeConfig scheme;  // c_h is recomputed at runtime, not configured
  MappingSpec mesh;
  MetricForm metric_form = MetricForm::Curl;
  CaseKind kase = CaseKind::Blast;
  WaveFamily wave_family = WaveFamily::Alfven;
  double wave_amplitude = 1e-6;
  double t_final = 0.4;
  StepControl step;
  int dump_every = 0;  // steps between field dumps; 0 disables
  bool audit = false;
  int convergence_levels = 4;

  // runtime options (CLI flags, not config keys)
  std::string output_dir = ".";
  int threads = 1;
  std::uint64_t seed = 12345;
};

// Line-based `section.key = value` grammar; '#' comments; unknown keys and
// semantic conflicts rejected with line numbers / exhaustive messages.
RunConfig parse_config(const std::string &text);
std::string serialize_config(const RunConfig &cfg);

// Exit codes shared by the subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInadmissible = 2;
inline constexpr int kExitAuditViolation = 3;

int cmd_run(RunConfig cfg);
int cmd_convergence(RunConfig cfg);
int cmd_convergence_in_time(RunConfig cfg);
int cmd_audit(RunConfig cfg);
int cmd_compare_schemes(RunConfig cfg);

// Seeded smooth admissible field with active B and psi (low-order Fourier
// modes in the primitives); used by the audit paths and tests.
Field random_smooth_field(const CurvMesh &mesh, const GasModel &gas, std::uint64_t seed);
// 1D counterpart on the periodic line [0, K*dx); needs node coordinates only.
Field random_smooth_field_1d(int K, const Mesh1D &mesh, const SchemeConfig &cfg,
                             std::uint64_t seed);

// Legacy-ASCII structured-grid dump (points + one array per variable, one
// block per element) plus a flat CSV alongside; byte-stable given identical
// inputs. Header records node kind, degree, scheme, and the build id.
void emit_fields(const Field &field, const CurvMesh &mesh, const SchemeConfig &cfg,
                 const std::string &path_prefix);

const char *build_id();

}  // namespace mhddg
