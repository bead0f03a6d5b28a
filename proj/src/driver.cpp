#include "wadg/driver.hpp"

#include "wadg/errors.hpp"
#include "wadg/kernels.hpp"
#include "wadg/wadg_ops.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace wadg {

namespace {

using nlohmann::json;

int get_int(const json& v, const std::string& key) {
  if (!v.is_number_integer())
    throw config_error("config: key '" + key + "' must be an integer");
  return v.get<int>();
}

double get_num(const json& v, const std::string& key) {
  if (!v.is_number())
    throw config_error("config: key '" + key + "' must be a number");
  return v.get<double>();
}

bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean())
    throw config_error("config: key '" + key + "' must be a boolean");
  return v.get<bool>();
}

std::string get_str(const json& v, const std::string& key) {
  if (!v.is_string())
    throw config_error("config: key '" + key + "' must be a string");
  return v.get<std::string>();
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw config_error("config: " + msg);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

FluxMode flux_from_name(const std::string& name) {
  if (name == "central") return FluxMode::central;
  if (name == "penalty") return FluxMode::penalty;
  if (name == "scaled") return FluxMode::scaled;
  throw config_error("config: flux must be central, penalty, or scaled");
}

const char* flux_name(FluxMode m) {
  switch (m) {
    case FluxMode::central: return "central";
    case FluxMode::penalty: return "penalty";
    default: return "scaled";
  }
}

std::string run_tag(const RunConfig& cfg) {
  return cfg.tag.empty() ? cfg.scenario : cfg.tag;
}

std::ofstream open_csv(const RunConfig& cfg, const std::string& suffix,
                       std::string* path_out = nullptr) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / (run_tag(cfg) + suffix);
  std::ofstream os(path);
  if (!os) throw runtime_failure("cannot write " + path.string());
  os << "# config " << describe_config(cfg) << "\n";
  if (path_out) *path_out = path.string();
  return os;
}

double wall_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Counter-based generator so benchmark inputs are reproducible.
std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& s) {
  return static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
}

// Random symmetric positive definite 3x3 with eigenvalues in [emin, emax],
// packed as (11, 12, 13, 22, 23, 33).
void random_spd3(std::uint64_t& s, double emin, double emax, double out[6]) {
  double d[3], q[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (double& v : d) v = emin + (emax - emin) * uniform01(s);
  const int plane[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (const auto& p : plane) {
    const double th = 2 * 3.14159265358979323846 * uniform01(s);
    const double c = std::cos(th), sn = std::sin(th);
    for (int r = 0; r < 3; ++r) {
      const double a = q[r][p[0]], b = q[r][p[1]];
      q[r][p[0]] = c * a - sn * b;
      q[r][p[1]] = sn * a + c * b;
    }
  }
  auto entry = [&](int r, int c) {
    return q[r][0] * d[0] * q[c][0] + q[r][1] * d[1] * q[c][1] +
           q[r][2] * d[2] * q[c][2];
  };
  out[0] = entry(0, 0);
  out[1] = entry(0, 1);
  out[2] = entry(0, 2);
  out[3] = entry(1, 1);
  out[4] = entry(1, 2);
  out[5] = entry(2, 2);
}

} // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config: top level must be an object");

  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "scenario") c.scenario = get_str(v, key);
    else if (key == "N") c.N = get_int(v, key);
    else if (key == "h") c.h = get_num(v, key);
    else if (key == "nx") c.nx = get_int(v, key);
    else if (key == "ny") c.ny = get_int(v, key);
    else if (key == "flux") c.flux = get_str(v, key);
    else if (key == "tau_v") c.tau_v = get_num(v, key);
    else if (key == "tau_sigma") c.tau_sigma = get_num(v, key);
    else if (key == "gamma_v") c.gamma_v = get_num(v, key);
    else if (key == "gamma_sigma") c.gamma_sigma = get_num(v, key);
    else if (key == "cfl") c.cfl = get_num(v, key);
    else if (key == "t_final") c.t_final = get_num(v, key);
    else if (key == "quadrature_degree") c.quadrature_degree = get_int(v, key);
    else if (key == "trace_constant") c.trace_constant = get_str(v, key);
    else if (key == "curvilinear") c.curvilinear = get_bool(v, key);
    else if (key == "seed") {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw config_error("config: key 'seed' must be a nonnegative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "threads") c.threads = get_int(v, key);
    else if (key == "snapshot_dt") c.snapshot_dt = get_num(v, key);
    else if (key == "grid_nx") c.grid_nx = get_int(v, key);
    else if (key == "grid_ny") c.grid_ny = get_int(v, key);
    else if (key == "energy_every") c.energy_every = get_int(v, key);
    else if (key == "write_mesh") c.write_mesh = get_bool(v, key);
    else if (key == "mu") c.mu = get_num(v, key);
    else if (key == "eig_min") c.eig_min = get_num(v, key);
    else if (key == "eig_max") c.eig_max = get_num(v, key);
    else if (key == "N_list") {
      if (!v.is_array()) throw config_error("config: N_list must be an array");
      for (const auto& e : v) c.n_list.push_back(get_int(e, key));
    } else if (key == "h_list") {
      if (!v.is_array()) throw config_error("config: h_list must be an array");
      for (const auto& e : v) c.h_list.push_back(get_num(e, key));
    } else if (key == "ref_tol") c.ref_tol = get_num(v, key);
    else if (key == "self_reference") {
      if (!v.is_object())
        throw config_error("config: self_reference must be an object");
      for (const auto& [k2, v2] : v.items()) {
        if (k2 == "N") c.self_ref_N = get_int(v2, k2);
        else if (k2 == "h") c.self_ref_h = get_num(v2, k2);
        else throw config_error("config: unknown key 'self_reference." + k2 + "'");
      }
    } else if (key == "max_ndof") c.max_ndof = get_int(v, key);
    else if (key == "bench_elements") c.bench_elements = get_int(v, key);
    else if (key == "bench_reps") c.bench_reps = get_int(v, key);
    else if (key == "out_dir") c.out_dir = get_str(v, key);
    else if (key == "tag") c.tag = get_str(v, key);
    else throw config_error("config: unknown key '" + key + "'");
  }

  const auto names = scenario_names();
  check(std::find(names.begin(), names.end(), c.scenario) != names.end(),
        "unknown scenario '" + c.scenario + "'");
  check(c.N >= 1 && c.N <= kMaxDegree, "N must be in [1, 7]");
  check(c.h > 0, "h must be positive");
  check(c.nx >= 0 && c.ny >= 0, "nx and ny must be nonnegative");
  check((c.nx > 0) == (c.ny > 0), "nx and ny must be given together");
  if (!c.flux.empty()) flux_from_name(c.flux);
  check(c.cfl > 0, "cfl must be positive");
  check(c.quadrature_degree == -1 || c.quadrature_degree >= 1,
        "quadrature_degree must be -1 or >= 1");
  check(c.trace_constant == "simplex" || c.trace_constant == "squared",
        "trace_constant must be simplex or squared");
  check(c.threads >= 1, "threads must be >= 1");
  check(c.snapshot_dt >= 0, "snapshot_dt must be nonnegative");
  check(c.grid_nx >= 0 && c.grid_ny >= 0, "snapshot grid must be nonnegative");
  check(c.energy_every >= 1, "energy_every must be >= 1");
  check(c.mu < 0 || c.mu > 0, "mu must be positive when given");
  check((c.eig_min < 0) == (c.eig_max < 0),
        "eig_min and eig_max must be given together");
  if (c.eig_min >= 0)
    check(c.eig_min > 0 && c.eig_max >= c.eig_min,
          "need 0 < eig_min <= eig_max");
  for (int n : c.n_list)
    check(n >= 1 && n <= kMaxDegree, "N_list entries must be in [1, 7]");
  for (double hh : c.h_list) check(hh > 0, "h_list entries must be positive");
  check(c.ref_tol > 0, "ref_tol must be positive");
  check((c.self_ref_N > 0) == (c.self_ref_h > 0),
        "self_reference needs both N and h");
  if (c.self_ref_N > 0)
    check(c.self_ref_N <= kMaxDegree, "self_reference.N must be in [1, 7]");
  check(c.max_ndof >= 1, "max_ndof must be >= 1");
  check(c.bench_elements >= 1, "bench_elements must be >= 1");
  check(c.bench_reps >= 0, "bench_reps must be nonnegative");
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("config: cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string describe_config(const RunConfig& c) {
  json j;
  j["scenario"] = c.scenario;
  j["N"] = c.N;
  j["h"] = c.h;
  j["nx"] = c.nx;
  j["ny"] = c.ny;
  j["flux"] = c.flux;
  j["tau_v"] = c.tau_v;
  j["tau_sigma"] = c.tau_sigma;
  j["gamma_v"] = c.gamma_v;
  j["gamma_sigma"] = c.gamma_sigma;
  j["cfl"] = c.cfl;
  j["t_final"] = c.t_final;
  j["quadrature_degree"] = c.quadrature_degree;
  j["trace_constant"] = c.trace_constant;
  j["curvilinear"] = c.curvilinear;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["snapshot_dt"] = c.snapshot_dt;
  j["grid_nx"] = c.grid_nx;
  j["grid_ny"] = c.grid_ny;
  j["energy_every"] = c.energy_every;
  j["write_mesh"] = c.write_mesh;
  j["mu"] = c.mu;
  j["eig_min"] = c.eig_min;
  j["eig_max"] = c.eig_max;
  j["N_list"] = c.n_list;
  j["h_list"] = c.h_list;
  j["ref_tol"] = c.ref_tol;
  j["self_reference"] = {{"N", c.self_ref_N}, {"h", c.self_ref_h}};
  j["max_ndof"] = c.max_ndof;
  j["bench_elements"] = c.bench_elements;
  j["bench_reps"] = c.bench_reps;
  j["out_dir"] = c.out_dir;
  j["tag"] = c.tag;
  return j.dump();
}

Simulation build_simulation(const RunConfig& cfg, ThreadPool* pool,
                            const BuildOverride& ov) {
  Simulation sim;
  sim.sc = (cfg.scenario == "incompressible" && cfg.mu > 0)
               ? incompressible_case(cfg.mu)
               : make_scenario(cfg.scenario);
  Scenario& sc = sim.sc;
  if (sc.random_media.enabled && cfg.eig_min > 0) {
    sc.random_media.eig_min = cfg.eig_min;
    sc.random_media.eig_max = cfg.eig_max;
  }
  if (!cfg.flux.empty()) sc.flux.mode = flux_from_name(cfg.flux);
  if (cfg.tau_v >= 0) sc.flux.tau_v = cfg.tau_v;
  if (cfg.tau_sigma >= 0) sc.flux.tau_sigma = cfg.tau_sigma;
  if (cfg.gamma_v >= 0) sc.flux.gamma_v = cfg.gamma_v;
  if (cfg.gamma_sigma >= 0) sc.flux.gamma_sigma = cfg.gamma_sigma;
  sim.t_final = cfg.t_final >= 0 ? cfg.t_final : sc.t_final;

  const int N = ov.N > 0 ? ov.N : cfg.N;
  sim.re = build_reference_element(N, cfg.quadrature_degree);
  if (ov.h > 0) {
    sim.mesh = scenario_mesh(sc, ov.h);
  } else if (cfg.nx > 0) {
    sim.mesh = uniform_tri_mesh(cfg.nx, cfg.ny, sc.x0, sc.x1, sc.y0, sc.y1,
                                sc.periodic);
  } else {
    sim.mesh = scenario_mesh(sc, cfg.h);
  }
  // Mesh size h = 2x the quad size, matching scenario_mesh and the
  // convention used by the scenario reference tables.
  sim.h = 2 * (sc.x1 - sc.x0) / sim.mesh.nx;
  sim.coords = sc.warped ? warp_lamb_mesh(sim.mesh, sim.re)
                         : affine_coordinates(sim.mesh, sim.re);
  sim.geo = geometric_factors(sim.mesh, sim.re, sim.coords);
  if (cfg.curvilinear) sim.geo.curvilinear = true;
  sim.mat = sc.random_media.enabled
                ? random_spd_field(sim.geo, cfg.seed, sc.random_media.eig_min,
                                   sc.random_media.eig_max)
                : sample_material(sim.geo, sc.material);
  DgOptions opts;
  opts.flux = sc.flux;
  opts.bc = sc.bc;
  opts.source = sc.source;
  opts.homogeneous = ov.homogeneous;
  sim.op = std::make_unique<DgOperator>(sim.re, sim.mesh, sim.coords, sim.geo,
                                        sim.mat, opts, pool);
  return sim;
}

FieldSampler::FieldSampler(const ReferenceElement& re, const Mesh& mesh,
                           const CoordinateMap& coords)
    : re_(re), coords_(coords) {
  K = mesh.K;
  tri_.resize(K);
  for (int k = 0; k < K; ++k) {
    for (int v = 0; v < 3; ++v) {
      tri_[k][2 * v] = mesh.verts[mesh.tris[k][v]][0];
      tri_[k][2 * v + 1] = mesh.verts[mesh.tris[k][v]][1];
    }
  }
  bnx = std::max(1, mesh.nx);
  bny = std::max(1, mesh.ny);
  bx0 = mesh.x0;
  by0 = mesh.y0;
  bdx = (mesh.x1 - mesh.x0) / bnx;
  bdy = (mesh.y1 - mesh.y0) / bny;
  buckets_.assign(static_cast<std::size_t>(bnx) * bny, {});

  // Element bounding boxes from nodal coordinates, padded because a curved
  // edge can bulge past its interpolation nodes.
  const int Np = re_.Np;
  std::vector<double> xn(Np), yn(Np);
  for (int k = 0; k < K; ++k) {
    kernels::gemv(Np, Np, re_.Vnode.data(), &coords_.x[static_cast<std::size_t>(k) * Np],
                  xn.data());
    kernels::gemv(Np, Np, re_.Vnode.data(), &coords_.y[static_cast<std::size_t>(k) * Np],
                  yn.data());
    double xlo = xn[0], xhi = xn[0], ylo = yn[0], yhi = yn[0];
    for (int n = 1; n < Np; ++n) {
      xlo = std::min(xlo, xn[n]);
      xhi = std::max(xhi, xn[n]);
      ylo = std::min(ylo, yn[n]);
      yhi = std::max(yhi, yn[n]);
    }
    const double pad = 0.25 * std::max(xhi - xlo, yhi - ylo) + 1e-12;
    const int i0 = std::clamp(
        static_cast<int>(std::floor((xlo - pad - bx0) / bdx)), 0, bnx - 1);
    const int i1 = std::clamp(
        static_cast<int>(std::floor((xhi + pad - bx0) / bdx)), 0, bnx - 1);
    const int j0 = std::clamp(
        static_cast<int>(std::floor((ylo - pad - by0) / bdy)), 0, bny - 1);
    const int j1 = std::clamp(
        static_cast<int>(std::floor((yhi + pad - by0) / bdy)), 0, bny - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        buckets_[static_cast<std::size_t>(j) * bnx + i].push_back(k);
  }
}

bool FieldSampler::locate(double x, double y, int& elem, double& r,
                          double& s) const {
  const int ix = std::clamp(static_cast<int>(std::floor((x - bx0) / bdx)), 0,
                            bnx - 1);
  const int iy = std::clamp(static_cast<int>(std::floor((y - by0) / bdy)), 0,
                            bny - 1);
  const int Np = re_.Np;
  std::vector<double> row(Np), rowr(Np), rows(Np);
  for (int id : buckets_[static_cast<std::size_t>(iy) * bnx + ix]) {
    const auto& t = tri_[id];
    const double det = (t[2] - t[0]) * (t[5] - t[1]) -
                       (t[4] - t[0]) * (t[3] - t[1]);
    const double l2 =
        ((x - t[0]) * (t[5] - t[1]) - (y - t[1]) * (t[4] - t[0])) / det;
    const double l3 =
        ((y - t[1]) * (t[2] - t[0]) - (x - t[0]) * (t[3] - t[1])) / det;
    const double l1 = 1 - l2 - l3;
    double rr = 2 * l2 - 1, ss = 2 * l3 - 1;
    const bool affine = coords_.affine.empty() || coords_.affine[id];
    if (affine) {
      if (std::min({l1, l2, l3}) < -1e-10) continue;
      elem = id;
      r = rr;
      s = ss;
      return true;
    }
    // Curved element: Newton on the coordinate map from the straight guess.
    rr = std::clamp(rr, -1.0, 1.0);
    ss = std::clamp(ss, -1.0, 1.0);
    const double* cx = &coords_.x[static_cast<std::size_t>(id) * Np];
    const double* cy = &coords_.y[static_cast<std::size_t>(id) * Np];
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
      basis_eval(re_.N, 1, &rr, &ss, row.data());
      basis_grad_eval(re_.N, 1, &rr, &ss, rowr.data(), rows.data());
      double px = 0, py = 0, xr = 0, xs = 0, yr = 0, ys = 0;
      for (int n = 0; n < Np; ++n) {
        px += row[n] * cx[n];
        py += row[n] * cy[n];
        xr += rowr[n] * cx[n];
        xs += rows[n] * cx[n];
        yr += rowr[n] * cy[n];
        ys += rows[n] * cy[n];
      }
      const double fx = px - x, fy = py - y;
      const double jdet = xr * ys - xs * yr;
      const double dr = (ys * fx - xs * fy) / jdet;
      const double ds = (-yr * fx + xr * fy) / jdet;
      rr -= dr;
      ss -= ds;
      if (std::abs(dr) + std::abs(ds) < 1e-14) {
        converged = true;
        break;
      }
    }
    if (!converged) continue;
    const double m1 = -0.5 * (rr + ss), m2 = 0.5 * (1 + rr), m3 = 0.5 * (1 + ss);
    if (std::min({m1, m2, m3}) < -1e-8) continue;
    elem = id;
    r = rr;
    s = ss;
    return true;
  }
  return false;
}

bool FieldSampler::sample(const State& u, double x, double y,
                          double out[kFields]) const {
  if (u.Np != re_.Np || u.K != K)
    throw invalid_input("sampler: state does not match mesh and degree");
  int elem = -1;
  double r = 0, s = 0;
  if (!locate(x, y, elem, r, s)) return false;
  std::vector<double> row(re_.Np);
  basis_eval(re_.N, 1, &r, &s, row.data());
  for (int f = 0; f < kFields; ++f) {
    const double* c = u.field(elem, f);
    double acc = 0;
    for (int n = 0; n < re_.Np; ++n) acc += row[n] * c[n];
    out[f] = acc;
  }
  return true;
}

namespace {

void write_snapshot(const RunConfig& cfg, const Simulation& sim,
                    const FieldSampler& sampler, const State& u, double t,
                    int index) {
  const Scenario& sc = sim.sc;
  const int gx = cfg.grid_nx > 0
                     ? cfg.grid_nx
                     : std::max(2, static_cast<int>(std::lround(
                                       100 * (sc.x1 - sc.x0))));
  const int gy = cfg.grid_ny > 0
                     ? cfg.grid_ny
                     : std::max(2, static_cast<int>(std::lround(
                                       100 * (sc.y1 - sc.y0))));
  char suffix[48];
  std::snprintf(suffix, sizeof suffix, "_snap_%04d.csv", index);
  auto os = open_csv(cfg, suffix);
  os << "# t " << fmt17(t) << "\n";
  os << "x,y,v1,v2,sxx,syy,sxy\n";
  double out[kFields];
  for (int j = 0; j < gy; ++j) {
    const double y = sc.y0 + (j + 0.5) * (sc.y1 - sc.y0) / gy;
    for (int i = 0; i < gx; ++i) {
      const double x = sc.x0 + (i + 0.5) * (sc.x1 - sc.x0) / gx;
      if (!sampler.sample(u, x, y, out))
        throw runtime_failure("snapshot: grid point not inside the mesh");
      os << fmt17(x) << ',' << fmt17(y);
      for (int f = 0; f < kFields; ++f) os << ',' << fmt17(out[f]);
      os << "\n";
    }
  }
}

void write_error_csv(const RunConfig& cfg, const ErrorRecord& rec,
                     const std::string& suffix) {
  auto os = open_csv(cfg, suffix);
  os << "N,h,flux,e_v1,e_v2,e_sxx,e_syy,e_sxy,combined_rel,velocity_rel,"
        "stress_rel,combined_abs\n";
  os << rec.N << ',' << fmt17(rec.h) << ',' << flux_name(rec.flux);
  for (int f = 0; f < kFields; ++f) os << ',' << fmt17(rec.field_error[f]);
  os << ',' << fmt17(rec.combined_rel) << ',' << fmt17(rec.velocity_rel)
     << ',' << fmt17(rec.stress_rel) << ',' << fmt17(rec.combined_abs)
     << "\n";
}

// Runs one configured simulation to its final time, recording energy and
// optional snapshots; returns the final state.
State run_once(const RunConfig& cfg, Simulation& sim, std::ostream& log,
               bool artifacts) {
  State u;
  project_fields(sim.re, sim.geo, initial_condition(sim.sc), u);

  std::unique_ptr<FieldSampler> sampler;
  if (artifacts)
    sampler = std::make_unique<FieldSampler>(sim.re, sim.mesh, sim.coords);

  std::vector<std::array<double, 3>> energy_rows; // step, t, energy
  int snap_index = 0;
  double next_snap = cfg.snapshot_dt;
  const double t_final = sim.t_final;

  if (artifacts) write_snapshot(cfg, sim, *sampler, u, 0.0, snap_index++);

  Observer obs = [&](const StepInfo& info, const State& s) {
    if (info.step == 0 || info.step == info.nsteps ||
        info.step % cfg.energy_every == 0) {
      energy_rows.push_back({static_cast<double>(info.step), info.t,
                             discrete_energy(s, sim.re, sim.geo, sim.mat)});
    }
    if (artifacts && cfg.snapshot_dt > 0) {
      while (next_snap < t_final - 1e-12 && info.t >= next_snap - 1e-12) {
        write_snapshot(cfg, sim, *sampler, s, info.t, snap_index++);
        next_snap += cfg.snapshot_dt;
      }
    }
  };

  TimeConfig tc;
  tc.cfl = cfg.cfl;
  tc.t_final = t_final;
  tc.trace_constant = cfg.trace_constant == "squared"
                          ? TraceConstant::squared
                          : TraceConstant::simplex;
  const auto t0 = std::chrono::steady_clock::now();
  const IntegrateResult ir = integrate(*sim.op, u, tc, obs);
  const double wall = wall_seconds(t0);
  log << "run " << sim.sc.name << " N=" << sim.re.N << " K=" << sim.mesh.K
      << " h=" << sim.h << " dt=" << ir.dt << " nsteps=" << ir.nsteps
      << " wall=" << wall << "s\n";

  if (artifacts) {
    write_snapshot(cfg, sim, *sampler, u, t_final, snap_index++);
    auto os = open_csv(cfg, "_energy.csv");
    os << "step,t,energy\n";
    for (const auto& row : energy_rows)
      os << static_cast<long long>(row[0]) << ',' << fmt17(row[1]) << ','
         << fmt17(row[2]) << "\n";
    if (cfg.write_mesh) {
      namespace fs = std::filesystem;
      const fs::path path =
          fs::path(cfg.out_dir) / (run_tag(cfg) + "_mesh.txt");
      std::ofstream ms(path);
      if (!ms) throw runtime_failure("cannot write " + path.string());
      dump_mesh(sim.mesh, ms);
    }
  }
  return u;
}

} // namespace

void cmd_run(const RunConfig& cfg, std::ostream& log) {
  ThreadPool pool(cfg.threads);
  RunConfig resolved = cfg;
  Simulation sim = build_simulation(cfg, &pool);
  resolved.t_final = sim.t_final;
  State u = run_once(resolved, sim, log, true);
  if (sim.sc.exact) {
    ErrorQuadrature eq = build_error_quadrature(sim.re.N, sim.mesh, sim.coords);
    ErrorRecord rec = l2_error(u, sim.sc.exact, sim.t_final, eq.re, eq.geo,
                               sim.h, sim.sc.flux.mode);
    write_error_csv(resolved, rec, "_error.csv");
    log << "error combined_rel=" << fmt17(rec.combined_rel)
        << " velocity_rel=" << fmt17(rec.velocity_rel)
        << " stress_rel=" << fmt17(rec.stress_rel) << "\n";
  }
}

void cmd_converge(const RunConfig& cfg, std::ostream& log) {
  ThreadPool pool(cfg.threads);
  const std::vector<int> n_list = cfg.n_list.empty()
                                      ? std::vector<int>{cfg.N}
                                      : cfg.n_list;
  std::vector<double> h_list = cfg.h_list.empty() ? std::vector<double>{cfg.h}
                                                  : cfg.h_list;
  std::sort(h_list.begin(), h_list.end(), std::greater<double>());

  // Error target: the scenario's closed form, or a fine self-reference run.
  ExactFn exact = make_scenario(cfg.scenario).exact;
  State ref_state;
  Simulation ref_sim;
  std::unique_ptr<FieldSampler> ref_sampler;
  if (!exact) {
    if (cfg.self_ref_N <= 0)
      throw config_error(
          "converge: scenario has no closed-form solution; give "
          "self_reference {N, h}");
    log << "building self-reference solution\n";
    ref_sim = build_simulation(cfg, &pool,
                               {cfg.self_ref_N, cfg.self_ref_h, false});
    ref_state = run_once(cfg, ref_sim, log, false);
    ref_sampler = std::make_unique<FieldSampler>(ref_sim.re, ref_sim.mesh,
                                                 ref_sim.coords);
    exact = [&ref_state, sampler = ref_sampler.get()](
                double x, double y, double, double out[kFields]) {
      if (!sampler->sample(ref_state, x, y, out))
        throw runtime_failure("converge: reference sample outside the mesh");
    };
  }

  std::vector<ErrorRecord> records;
  for (int N : n_list) {
    for (double h : h_list) {
      Simulation sim = build_simulation(cfg, &pool, {N, h, false});
      State u = run_once(cfg, sim, log, false);
      ErrorQuadrature eq =
          build_error_quadrature(sim.re.N, sim.mesh, sim.coords);
      ErrorRecord rec = l2_error(u, exact, sim.t_final, eq.re, eq.geo, sim.h,
                                 sim.sc.flux.mode);
      records.push_back(rec);
      log << "  N=" << N << " h=" << fmt17(sim.h)
          << " error=" << fmt17(rec.combined_rel) << "\n";
    }
  }

  std::vector<RateSeries> rates;
  if (h_list.size() >= 2) rates = convergence_rates(records);

  const Scenario table_src = make_scenario(cfg.scenario);
  auto os = open_csv(cfg, "_converge.csv");
  os << "N,h,error,velocity_error,stress_error,pairwise_rate,fitted_rate,"
        "reference,ratio,within_tol\n";
  std::size_t idx = 0;
  for (int N : n_list) {
    const RateSeries* series = nullptr;
    for (const auto& s : rates)
      if (s.N == N) series = &s;
    for (std::size_t ih = 0; ih < h_list.size(); ++ih, ++idx) {
      const ErrorRecord& rec = records[idx];
      os << N << ',' << fmt17(rec.h) << ',' << fmt17(rec.combined_rel) << ','
         << fmt17(rec.velocity_rel) << ',' << fmt17(rec.stress_rel) << ',';
      if (series && ih > 0) os << fmt17(series->pairwise[ih - 1]);
      os << ',';
      if (series) os << fmt17(series->fitted);
      os << ',';
      // Nearest tabulated reference for this degree, if close in h.
      const RefError* ref = nullptr;
      for (const auto& e : table_src.reference) {
        if (e.N != N) continue;
        const double q = rec.h / e.h;
        if (q > 0.7 && q < 1.43 &&
            (!ref || std::abs(std::log(q)) <
                         std::abs(std::log(rec.h / ref->h))))
          ref = &e;
      }
      if (ref) {
        const double ratio = rec.combined_rel / ref->error;
        os << fmt17(ref->error) << ',' << fmt17(ratio) << ','
           << (std::abs(ratio - 1) <= cfg.ref_tol ? 1 : 0);
      } else {
        os << ",,";
      }
      os << "\n";
    }
    if (series)
      log << "N=" << N << " fitted rate " << fmt17(series->fitted) << "\n";
  }
}

void cmd_spectrum(const RunConfig& cfg, std::ostream& log) {
  ThreadPool pool(cfg.threads);
  Simulation sim = build_simulation(cfg, &pool, {-1, -1, true});
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::MatrixXd A = assemble_operator(*sim.op, cfg.max_ndof);
  const SpectrumRecord rec = spectrum(A);
  const double wall = wall_seconds(t0);
  auto os = open_csv(cfg, "_spectrum.csv");
  os << "# ndof " << A.rows() << "\n";
  os << "# abscissa " << fmt17(rec.abscissa) << "\n";
  os << "# radius " << fmt17(rec.radius) << "\n";
  os << "# abscissa_over_radius "
     << fmt17(rec.radius > 0 ? rec.abscissa / rec.radius : 0.0) << "\n";
  os << "re,im\n";
  for (const auto& z : rec.eigenvalues)
    os << fmt17(z.real()) << ',' << fmt17(z.imag()) << "\n";
  log << "spectrum " << sim.sc.name << " N=" << sim.re.N
      << " ndof=" << A.rows() << " abscissa=" << fmt17(rec.abscissa)
      << " radius=" << fmt17(rec.radius) << " wall=" << wall << "s\n";
}

void cmd_bench(const RunConfig& cfg, std::ostream& log) {
  std::vector<int> n_list = cfg.n_list;
  if (n_list.empty())
    for (int n = 1; n <= kMaxDegree; ++n) n_list.push_back(n);
  const int K = cfg.bench_elements;

  auto os = open_csv(cfg, "_bench.csv");
  os << "N,Np,Nq,dense_ns_per_element,wadg_ns_per_element,"
        "dense_bytes_per_element,wadg_bytes_per_element,max_abs_diff\n";

  for (int N : n_list) {
    const ReferenceElement re = build_reference_element(N);
    const int Np = re.Np, Nq = re.Nq, dim = 3 * Np;
    std::uint64_t rng = cfg.seed * 0x9e3779b97f4a7c15ull + N;

    // Per-element SPD weights at quadrature points and random inputs.
    std::vector<std::array<std::vector<double>, 6>> weights(K);
    std::vector<double> x(static_cast<std::size_t>(K) * dim);
    for (int k = 0; k < K; ++k) {
      for (auto& p : weights[k]) p.resize(Nq);
      double c[6];
      for (int q = 0; q < Nq; ++q) {
        random_spd3(rng, 0.5, 2.0, c);
        for (int e = 0; e < 6; ++e) weights[k][e][q] = c[e];
      }
    }
    for (auto& v : x) v = 2 * uniform01(rng) - 1;

    // Dense path: the same weight-adjusted application assembled column by
    // column into one (3Np)^2 matrix per element.
    WadgWork work;
    work.resize(Np, Nq);
    std::vector<double> dense(static_cast<std::size_t>(K) * dim * dim);
    std::vector<double> unit(dim), col(dim);
    for (int k = 0; k < K; ++k) {
      std::array<const double*, 6> wq;
      for (int e = 0; e < 6; ++e) wq[e] = weights[k][e].data();
      double* D = &dense[static_cast<std::size_t>(k) * dim * dim];
      for (int j = 0; j < dim; ++j) {
        std::fill(unit.begin(), unit.end(), 0.0);
        unit[j] = 1.0;
        wadg_apply_inverse_sym3(re, wq, unit.data(), col.data(), nullptr,
                                work);
        for (int i = 0; i < dim; ++i) D[static_cast<std::size_t>(i) * dim + j] = col[i];
      }
    }

    // Agreement before timing.
    std::vector<double> yd(static_cast<std::size_t>(K) * dim),
        yw(static_cast<std::size_t>(K) * dim);
    for (int k = 0; k < K; ++k) {
      std::array<const double*, 6> wq;
      for (int e = 0; e < 6; ++e) wq[e] = weights[k][e].data();
      kernels::gemv(dim, dim, &dense[static_cast<std::size_t>(k) * dim * dim],
                    &x[static_cast<std::size_t>(k) * dim],
                    &yd[static_cast<std::size_t>(k) * dim]);
      wadg_apply_inverse_sym3(re, wq, &x[static_cast<std::size_t>(k) * dim],
                              &yw[static_cast<std::size_t>(k) * dim], nullptr,
                              work);
    }
    double diff = 0;
    for (std::size_t i = 0; i < yd.size(); ++i)
      diff = std::max(diff, std::abs(yd[i] - yw[i]));
    if (!(diff <= 1e-10))
      throw runtime_failure(
          "bench: stored-matrix and matrix-free results disagree");

    const int reps =
        cfg.bench_reps > 0
            ? cfg.bench_reps
            : std::clamp(static_cast<int>(5e7 / (static_cast<double>(K) *
                                                 dim * dim)),
                         3, 2000);
    double sink = 0;
    const auto td0 = std::chrono::steady_clock::now();
    for (int rep = 0; rep < reps; ++rep)
      for (int k = 0; k < K; ++k)
        kernels::gemv(dim, dim,
                      &dense[static_cast<std::size_t>(k) * dim * dim],
                      &x[static_cast<std::size_t>(k) * dim],
                      &yd[static_cast<std::size_t>(k) * dim]);
    sink += yd[0];
    const double dense_ns =
        wall_seconds(td0) * 1e9 / (static_cast<double>(reps) * K);
    const auto tw0 = std::chrono::steady_clock::now();
    for (int rep = 0; rep < reps; ++rep)
      for (int k = 0; k < K; ++k) {
        std::array<const double*, 6> wq;
        for (int e = 0; e < 6; ++e) wq[e] = weights[k][e].data();
        wadg_apply_inverse_sym3(re, wq, &x[static_cast<std::size_t>(k) * dim],
                                &yw[static_cast<std::size_t>(k) * dim],
                                nullptr, work);
      }
    sink += yw[0];
    const double wadg_ns =
        wall_seconds(tw0) * 1e9 / (static_cast<double>(reps) * K);
    // Keep the timed results observable so the loops cannot be elided.
    volatile double guard = sink;
    (void)guard;

    const std::size_t dense_bytes = static_cast<std::size_t>(dim) * dim * 8;
    const std::size_t wadg_bytes = static_cast<std::size_t>(Nq) * 6 * 8;
    os << N << ',' << Np << ',' << Nq << ',' << fmt17(dense_ns) << ','
       << fmt17(wadg_ns) << ',' << dense_bytes << ',' << wadg_bytes << ','
       << fmt17(diff) << "\n";
    log << "bench N=" << N << " dense=" << dense_ns << "ns"
        << " wadg=" << wadg_ns << "ns"
        << " dense_bytes=" << dense_bytes << " wadg_bytes=" << wadg_bytes
        << " diff=" << fmt17(diff) << "\n";
  }
}

void cmd_scenarios(std::ostream& out) {
  for (const auto& name : scenario_names()) {
    const Scenario sc = make_scenario(name);
    out << name << ": " << sc.summary << " [" << sc.x0 << "," << sc.x1
        << "]x[" << sc.y0 << "," << sc.y1 << "] t_final=" << sc.t_final
        << (sc.exact ? " (closed form)" : "") << "\n";
  }
}

} // namespace wadg
