#pragma once

// JSON-configured orchestration behind the command-line tool: scenario
// assembly, time-domain runs with CSV artifacts, convergence sweeps across
// degrees and mesh sizes, dense operator spectra, and the projection
// benchmark comparing stored-matrix and matrix-free mass inverses.

#include "wadg/analysis.hpp"
#include "wadg/scenarios.hpp"
#include "wadg/thread_pool.hpp"
#include "wadg/time_integrator.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace wadg {

// Parsed and validated run configuration. Every field has a usable default;
// unknown JSON keys are rejected outright.
struct RunConfig {
  std::string scenario = "harmonic";
  int N = 2;
  double h = 0.25;
  int nx = 0, ny = 0; // both positive: overrides h
  std::string flux;   // "", "central", "penalty", "scaled"
  double tau_v = -1, tau_sigma = -1;   // < 0: keep scenario value
  double gamma_v = -1, gamma_sigma = -1; // scaled-penalty factors, < 0: keep
  double cfl = 1;
  double t_final = -1; // < 0: scenario default
  int quadrature_degree = -1; // -1: 2N+1
  std::string trace_constant = "simplex"; // or "squared"
  bool curvilinear = false; // force the curvilinear code path
  std::uint64_t seed = 12345;
  int threads = 1;
  double snapshot_dt = 0; // 0: snapshots only at t = 0 and t_final
  int grid_nx = 0, grid_ny = 0; // snapshot grid; 0: 100 points per unit
  int energy_every = 1;         // energy log cadence in steps
  bool write_mesh = false;
  double mu = -1; // material override for the incompressible scenario
  double eig_min = -1, eig_max = -1; // random-media eigenvalue range override
  std::vector<int> n_list;      // converge / bench degree sweep
  std::vector<double> h_list;   // converge mesh sweep
  double ref_tol = 0.1;         // relative tolerance against reference tables
  int self_ref_N = 0;           // converge without exact solution: reference
  double self_ref_h = 0;        //   run degree and mesh size
  int max_ndof = 6000;          // dense-assembly size guard
  int bench_elements = 64;
  int bench_reps = 0; // 0: derived from problem size
  std::string out_dir = ".";
  std::string tag; // output file prefix; default: scenario name
};

// Parses and validates a JSON object. Throws config_error on malformed
// text (message carries the parse location), unknown keys, wrong types, or
// out-of-range values.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

// Deterministic single-line JSON rendering of the resolved configuration;
// embedded as a comment in every emitted CSV.
std::string describe_config(const RunConfig& cfg);

// Everything needed to advance one configured scenario.
struct Simulation {
  Scenario sc;
  ReferenceElement re;
  Mesh mesh;
  CoordinateMap coords;
  Geometry geo;
  MaterialField mat;
  double h = 0;       // representative mesh size (x extent / nx)
  double t_final = 0; // resolved final time
  std::unique_ptr<DgOperator> op;
};

struct BuildOverride {
  int N = -1;      // < 0: cfg.N
  double h = -1;   // < 0: cfg mesh spec (nx/ny or h)
  bool homogeneous = false;
};

Simulation build_simulation(const RunConfig& cfg, ThreadPool* pool = nullptr,
                            const BuildOverride& ov = {});

// Point evaluation of modal fields at arbitrary physical locations, used
// for snapshot grids and cross-mesh comparison. Keeps its own copies of the
// basis and coordinate data. Element lookup goes through a bounding-box
// bucket grid; curved elements are resolved with Newton iteration on the
// coordinate map.
class FieldSampler {
 public:
  FieldSampler(const ReferenceElement& re, const Mesh& mesh,
               const CoordinateMap& coords);

  // Reference coordinates of (x, y); false when no element contains it.
  bool locate(double x, double y, int& elem, double& r, double& s) const;
  // All five fields at (x, y); false when the point cannot be placed.
  bool sample(const State& u, double x, double y, double out[kFields]) const;

 private:
  ReferenceElement re_;
  CoordinateMap coords_;
  int K = 0;
  double bx0 = 0, by0 = 0, bdx = 1, bdy = 1; // bucket grid
  int bnx = 1, bny = 1;
  std::vector<std::vector<int>> buckets_;
  std::vector<std::array<double, 6>> tri_; // straight vertex coords
};

// Subcommand bodies. They throw config_error / invalid_input /
// runtime_failure; the CLI maps those to exit codes. The log stream gets
// human-readable progress, the CSV artifacts go to cfg.out_dir.
void cmd_run(const RunConfig& cfg, std::ostream& log);
void cmd_converge(const RunConfig& cfg, std::ostream& log);
void cmd_spectrum(const RunConfig& cfg, std::ostream& log);
void cmd_bench(const RunConfig& cfg, std::ostream& log);
void cmd_scenarios(std::ostream& out);

} // namespace wadg
