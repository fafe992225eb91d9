// Copyright 2026 The epp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "epp/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "epp/quantum.hpp"
#include "epp/random.hpp"
#include "epp/synthesis.hpp"

namespace epp {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out + "\"";
}

std::string hamiltonian_convention(const HamiltonianSpec& h) {
  if (h.type == "ising") return "ising_all_ordered_pairs_with_diagonal";
  return h.type;
}

SdpOptions sdp_options(const Tolerances& tol) {
  SdpOptions o;
  o.lmi.gap_tol = tol.sdp_gap;
  o.lmi.feas_tol = tol.sdp_gap;
  return o;
}

json tolerances_json(const Tolerances& t) {
  return {{"rank_tol", t.rank_tol},
          {"cluster_tol", t.cluster_tol},
          {"max_eig_tol", t.max_eig_tol},
          {"sdp_gap", t.sdp_gap}};
}

Tolerances tolerances_from_json(const json& j) {
  Tolerances t;
  t.rank_tol = j.value("rank_tol", t.rank_tol);
  t.cluster_tol = j.value("cluster_tol", t.cluster_tol);
  t.max_eig_tol = j.value("max_eig_tol", t.max_eig_tol);
  t.sdp_gap = j.value("sdp_gap", t.sdp_gap);
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Monte-Carlo

MonteCarloReport monte_carlo_validate(const ComplexOperator& choi,
                                      const MonteCarloSetup& setup,
                                      std::size_t samples, std::uint64_t seed) {
  MonteCarloReport rep;
  rep.samples = samples;
  if (samples == 0) {
    rep.probability = rep.probability_se = kNaN;
    rep.numerator = rep.numerator_se = kNaN;
    rep.fidelity = rep.fidelity_se = kNaN;
    return rep;
  }
  const int d = setup.d;
  const int n = setup.n;
  const int dr = setup.battery_state ? static_cast<int>(setup.battery_state->dim()) : 1;
  std::vector<int> dims;
  if (setup.battery_state) dims.push_back(dr);
  for (int k = 0; k < n; ++k) dims.push_back(d);
  const SubsystemSpace space(dims);
  const Eigen::Index dim = space.total();
  if (choi.dim() != dim * dim) {
    throw DimensionError("monte_carlo_validate: Choi dimension does not match setup");
  }
  const Eigen::Index tail = dim / (dr * d);
  const Matrix id_d = Matrix::Identity(d, d);

  // Sums are shifted by the first sample so that nearly constant estimators
  // keep full precision over long runs.
  CounterRng rng(seed);
  double k_num = 0.0, k_den = 0.0;
  double s_num = 0.0, s_den = 0.0, s_nn = 0.0, s_dd = 0.0, s_nd = 0.0;
  for (std::size_t t = 0; t < samples; ++t) {
    const Vector psi = haar_random_vector(d, rng);
    const Matrix proj = psi * psi.adjoint();
    const Matrix noisy = setup.gamma * proj + (1.0 - setup.gamma) / d * id_d;
    Matrix rho = setup.battery_state ? setup.battery_state->matrix()
                                     : Matrix::Identity(1, 1);
    for (int k = 0; k < n; ++k) rho = kron(ComplexOperator(rho), ComplexOperator(noisy)).matrix();
    const auto out = apply_channel_via_choi(choi, space, ComplexOperator(rho, space));
    const Matrix obs = kron(ComplexOperator(Matrix::Identity(dr, dr)),
                            kron(ComplexOperator(proj),
                                 ComplexOperator(Matrix::Identity(tail, tail))))
                           .matrix();
    const double den = out.trace().real();
    const double num = (obs.transpose().cwiseProduct(out.matrix())).sum().real();
    if (t == 0) {
      k_num = num;
      k_den = den;
    }
    const double x = num - k_num;
    const double y = den - k_den;
    s_num += x;
    s_den += y;
    s_nn += x * x;
    s_dd += y * y;
    s_nd += x * y;
  }
  const double count = static_cast<double>(samples);
  const double dx = s_num / count;
  const double dy = s_den / count;
  const double mn = k_num + dx;
  const double md = k_den + dy;
  const double denom = samples > 1 ? count - 1.0 : 1.0;
  const double var_n = std::max(0.0, (s_nn - count * dx * dx) / denom);
  const double var_d = std::max(0.0, (s_dd - count * dy * dy) / denom);
  const double cov = (s_nd - count * dx * dy) / denom;
  rep.numerator = mn;
  rep.numerator_se = std::sqrt(var_n / count);
  rep.probability = md;
  rep.probability_se = std::sqrt(var_d / count);
  rep.fidelity = mn / md;
  const double r = rep.fidelity;
  const double var_r = (var_n - 2.0 * r * cov + r * r * var_d) / (md * md);
  rep.fidelity_se = std::sqrt(std::max(0.0, var_r) / count);
  return rep;
}

// ---------------------------------------------------------------------------
// Sweep

bool SweepRecord::green() const {
  if (status != "ok" || !certified || !nogo_agree) return false;
  if (has_synthesis &&
      !(complement_cptp_residual <= 1e-9 && complement_epo_residual <= 1e-9 &&
        dilation_choi_residual <= 1e-8 && dilation_unitarity_residual <= 1e-8 &&
        dilation_commutator_residual <= 1e-8)) {
    return false;
  }
  if (has_battery && !battery_certified) return false;
  return true;
}

bool SweepResult::all_green() const {
  for (const auto& r : records) {
    if (!r.green()) return false;
  }
  return true;
}

SweepRecord run_point(const SweepConfig& config, int n, double gamma,
                      std::uint64_t point_index) {
  const auto t0 = std::chrono::steady_clock::now();
  SweepRecord rec;
  rec.gamma = gamma;
  rec.n = n;
  rec.tolerances = config.tolerances;
  rec.seed = config.seed;
  const auto& tol = config.tolerances;
  const auto opts = sdp_options(tol);
  try {
    const auto h = config.hamiltonian.build(config.d, n);
    PurificationProblem problem(config.d, n, gamma, h, tol.cluster_tol);
    const auto s = structural_operators(problem, tol);
    rec.F_max = s.F_max;
    rec.baseline = s.baseline;
    rec.rank_Pm = s.rank_Pm;
    rec.rank_C = s.support_rank;
    rec.degeneracies = problem.energy().degeneracy_pattern();

    const auto sol = solve_max_success(s, opts);
    rec.p_max = sol.p_max;
    rec.dual_bound = sol.dual_bound;
    rec.sdp_gap = sol.gap;
    rec.certified = sol.certified;
    rec.residuals = sol.residuals;
    rec.sdp_iterations = sol.iterations;
    rec.nogo = !sol.purification_exists;
    rec.nogo_agree = sol.nogo.agree;
    rec.nogo_operator_residual =
        sol.nogo.literal_form ? sol.nogo.operator_residual : sol.nogo.sigma_residual;
    rec.choi_star = sol.choi_star;
    rec.dual_y = sol.dual_y;

    if (config.synthesis) {
      const auto& es = problem.energy();
      const auto total = sol.choi_star + complement_choi(sol.choi_star, es);
      const auto validity = check_choi(total, n);
      rec.complement_cptp_residual =
          std::max(validity.trout_deficit, std::max(0.0, -validity.psd_min_eig));
      rec.complement_epo_residual = is_energy_preserving(total, es).sandwich_residual;
      const auto spec = build_dilation(sol.choi_star, es, tol.rank_tol);
      const auto rep = verify_dilation(spec, sol.choi_star);
      rec.dilation_env_dim = spec.env_dim;
      rec.dilation_choi_residual = rep.choi_residual;
      rec.dilation_unitarity_residual = rep.unitarity_residual;
      rec.dilation_commutator_residual = rep.commutator_residual;
      rec.has_synthesis = true;
    }

    if (config.battery) {
      const auto& b = *config.battery;
      BatteryProblem bp(config.d, n, gamma, b.phi(),
                        spectral_decompose(b.joint_hamiltonian(h), tol.cluster_tol));
      const auto br = solve_battery(bp, tol, opts);
      rec.battery_F_max = br.F_max;
      rec.battery_p_max = br.p_max;
      rec.battery_gap = br.sdp.gap;
      rec.battery_certified = br.sdp.certified;
      rec.has_battery = true;
    }

    if (config.monte_carlo_samples > 0) {
      const std::uint64_t stream = CounterRng(config.seed).split(point_index).next_u64();
      rec.monte_carlo = monte_carlo_validate(sol.choi_star, {config.d, n, gamma, {}},
                                             config.monte_carlo_samples, stream);
    }
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.error = e.what();
  }
  rec.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  struct Task {
    int n;
    double gamma;
  };
  std::vector<Task> tasks;
  for (int n : config.n_values) {
    for (double g : config.gamma_grid) tasks.push_back({n, g});
  }
  SweepResult result;
  result.config = config;
  result.records.resize(tasks.size());

  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(tasks.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      result.records[k] = run_point(config, tasks[k].n, tasks[k].gamma, k);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return result;
}

std::vector<std::string> csv_columns() {
  return {"gamma", "n", "status", "F_max", "baseline", "p_max", "dual_bound",
          "sdp_gap", "certified", "nogo", "nogo_agree", "nogo_operator_residual",
          "rank_Pm", "rank_C", "degeneracies", "psd_min_eig", "trout_violation",
          "subspace_residual", "energy_residual", "sdp_iterations",
          "complement_cptp_residual", "complement_epo_residual", "dilation_env_dim",
          "dilation_choi_residual", "dilation_unitarity_residual",
          "dilation_commutator_residual", "battery_F_max", "battery_p_max",
          "battery_gap", "battery_certified", "mc_samples", "mc_fidelity",
          "mc_fidelity_se", "mc_probability", "mc_probability_se", "rank_tol",
          "cluster_tol", "max_eig_tol", "sdp_gap_tol", "seed",
          "hamiltonian_convention", "tensor_order", "green", "error",
          "wall_time_ms"};
}

void write_csv(std::ostream& os, const std::vector<SweepRecord>& records,
               const std::string& convention) {
  os << kCsvVersionLine << '\n';
  const auto cols = csv_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << '\n';
  for (const auto& r : records) {
    const bool ok = r.status == "ok";
    auto num = [&](double v) { return ok ? fmt(v) : std::string(); };
    auto flag = [](bool b) { return std::string(b ? "1" : "0"); };
    std::vector<std::string> f = {
        fmt(r.gamma), std::to_string(r.n), r.status, num(r.F_max), num(r.baseline),
        num(r.p_max), num(r.dual_bound), num(r.sdp_gap), flag(r.certified),
        flag(r.nogo), flag(r.nogo_agree), num(r.nogo_operator_residual),
        std::to_string(r.rank_Pm), std::to_string(r.rank_C), r.degeneracies,
        num(r.residuals.psd_min_eig), num(r.residuals.trout_violation),
        num(r.residuals.subspace_residual), num(r.residuals.energy_residual),
        std::to_string(r.sdp_iterations)};
    if (r.has_synthesis) {
      f.insert(f.end(), {fmt(r.complement_cptp_residual), fmt(r.complement_epo_residual),
                         std::to_string(r.dilation_env_dim),
                         fmt(r.dilation_choi_residual),
                         fmt(r.dilation_unitarity_residual),
                         fmt(r.dilation_commutator_residual)});
    } else {
      f.insert(f.end(), 6, std::string());
    }
    if (r.has_battery) {
      f.insert(f.end(), {fmt(r.battery_F_max), fmt(r.battery_p_max), fmt(r.battery_gap),
                         flag(r.battery_certified)});
    } else {
      f.insert(f.end(), 4, std::string());
    }
    const auto& mc = r.monte_carlo;
    if (mc.samples > 0) {
      f.insert(f.end(), {std::to_string(mc.samples), fmt(mc.fidelity), fmt(mc.fidelity_se),
                         fmt(mc.probability), fmt(mc.probability_se)});
    } else {
      f.insert(f.end(), {"0", "", "", "", ""});
    }
    f.insert(f.end(), {fmt(r.tolerances.rank_tol), fmt(r.tolerances.cluster_tol),
                       fmt(r.tolerances.max_eig_tol), fmt(r.tolerances.sdp_gap),
                       std::to_string(r.seed), convention,
                       "in1..inN;out1..outN", flag(r.green()), csv_escape(r.error),
                       fmt(r.wall_time_ms)});
    for (std::size_t k = 0; k < f.size(); ++k) os << (k ? "," : "") << f[k];
    os << '\n';
  }
}

json sweep_sidecar(const SweepResult& result) {
  json recs = json::array();
  for (const auto& r : result.records) {
    json j = {{"gamma", r.gamma},
              {"n", r.n},
              {"status", r.status},
              {"green", r.green()},
              {"wall_time_ms", r.wall_time_ms}};
    if (r.status == "ok") {
      j["F_max"] = r.F_max;
      j["baseline"] = r.baseline;
      j["p_max"] = r.p_max;
      j["sdp_gap"] = r.sdp_gap;
      j["nogo"] = r.nogo;
      j["rank_Pm"] = r.rank_Pm;
      j["degeneracies"] = r.degeneracies;
    } else {
      j["error"] = r.error;
    }
    recs.push_back(std::move(j));
  }
  return {{"format", "epp-sweep-v1"},
          {"config", result.config.to_json()},
          {"conventions",
           {{"hamiltonian", hamiltonian_convention(result.config.hamiltonian)},
            {"tensor_order", kTensorOrder},
            {"choi", "sum_ij |i><j| (x) L(|i><j|), input first"},
            {"battery_order", "[r_in, s_in..., r_out, s_out...]"}}},
          {"all_green", result.all_green()},
          {"records", recs}};
}

std::string write_sweep_outputs(const SweepResult& result) {
  const auto& c = result.config;
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  const fs::path csv = dir / (c.output_name + ".csv");
  {
    std::ofstream os(csv);
    if (!os) throw Error("cannot write '" + csv.string() + "'");
    write_csv(os, result.records, hamiltonian_convention(c.hamiltonian));
  }
  json side = sweep_sidecar(result);
  if (c.emit_protocols) {
    const fs::path pdir = dir / "protocols";
    fs::create_directories(pdir);
    json files = json::array();
    for (std::size_t k = 0; k < result.records.size(); ++k) {
      const auto& r = result.records[k];
      if (r.status != "ok") continue;
      ProtocolFile p;
      p.d = c.d;
      p.n = r.n;
      p.gamma = r.gamma;
      p.hamiltonian = c.hamiltonian.build(c.d, r.n);
      p.choi = r.choi_star;
      p.dual_y = r.dual_y;
      p.F_max = r.F_max;
      p.p_max = r.p_max;
      p.tolerances = c.tolerances;
      char name[96];
      std::snprintf(name, sizeof(name), "%s_n%d_%03zu.json", c.output_name.c_str(),
                    r.n, k);
      save_protocol(p, (pdir / name).string());
      files.push_back((fs::path("protocols") / name).string());
    }
    side["protocol_files"] = files;
  }
  const fs::path js = dir / (c.output_name + ".json");
  std::ofstream os(js);
  if (!os) throw Error("cannot write '" + js.string() + "'");
  os << side.dump(2) << '\n';
  return csv.string();
}

// ---------------------------------------------------------------------------
// Protocol files

json ProtocolFile::to_json() const {
  json j = {{"format", "epp-protocol-v1"},
            {"d", d},
            {"n", n},
            {"gamma", gamma},
            {"system_dims", hamiltonian.space().dims()},
            {"hamiltonian", matrix_to_json(hamiltonian.matrix())},
            {"choi", matrix_to_json(choi.matrix())},
            {"dual_y", matrix_to_json(dual_y)},
            {"F_max", F_max},
            {"p_max", p_max},
            {"tolerances", tolerances_json(tolerances)}};
  if (battery_state && joint_hamiltonian) {
    j["battery"] = {{"state", matrix_to_json(battery_state->matrix())},
                    {"joint_hamiltonian", matrix_to_json(joint_hamiltonian->matrix())}};
  }
  return j;
}

ProtocolFile ProtocolFile::from_json(const json& j) {
  if (j.value("format", std::string()) != "epp-protocol-v1") {
    throw Error("protocol file: unknown format");
  }
  ProtocolFile p;
  p.d = j.at("d").get<int>();
  p.n = j.at("n").get<int>();
  p.gamma = j.at("gamma").get<double>();
  const SubsystemSpace space(j.at("system_dims").get<std::vector<int>>());
  p.hamiltonian = ComplexOperator(matrix_from_json(j.at("hamiltonian")), space);
  p.dual_y = matrix_from_json(j.at("dual_y"));
  p.F_max = j.at("F_max").get<double>();
  p.p_max = j.at("p_max").get<double>();
  if (j.contains("tolerances")) p.tolerances = tolerances_from_json(j["tolerances"]);
  Matrix choi = matrix_from_json(j.at("choi"));
  if (j.contains("battery")) {
    const Matrix phi = matrix_from_json(j["battery"].at("state"));
    const int dr = static_cast<int>(phi.rows());
    p.battery_state = ComplexOperator(phi, SubsystemSpace({dr}));
    const auto joint = SubsystemSpace({dr}).concat(space);
    p.joint_hamiltonian =
        ComplexOperator(matrix_from_json(j["battery"].at("joint_hamiltonian")), joint);
    p.choi = ComplexOperator(std::move(choi), joint.concat(joint));
  } else {
    p.choi = ComplexOperator(std::move(choi), space.concat(space));
  }
  return p;
}

void save_protocol(const ProtocolFile& p, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path + "'");
  os << p.to_json().dump() << '\n';
}

ProtocolFile load_protocol(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return ProtocolFile::from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError("protocol file '" + path + "': " + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("protocol file '" + path + "': " + e.what());
  }
}

StructuralOperators protocol_structural(const ProtocolFile& p) {
  const auto& tol = p.tolerances;
  if (p.battery_state && p.joint_hamiltonian) {
    BatteryProblem bp(p.d, p.n, p.gamma, *p.battery_state,
                      spectral_decompose(*p.joint_hamiltonian, tol.cluster_tol));
    return battery_structural(bp, tol);
  }
  PurificationProblem problem(p.d, p.n, p.gamma, p.hamiltonian, tol.cluster_tol);
  return structural_operators(problem, tol);
}

VerifyReport verify_protocol(const ProtocolFile& p, std::size_t samples,
                             std::uint64_t seed) {
  VerifyReport rep;
  const auto s = protocol_structural(p);
  rep.metrics = protocol_metrics(p.choi, s);
  SdpSolution sol;
  sol.choi_star = p.choi;
  sol.dual_y = p.dual_y;
  rep.certificate = dual_certificate_check(sol, s, sdp_options(p.tolerances));
  rep.fidelity_deviation = std::abs(rep.metrics.fidelity - p.F_max);
  rep.probability_deviation = std::abs(rep.metrics.probability - p.p_max);
  MonteCarloSetup setup{p.d, p.n, p.gamma, p.battery_state};
  rep.monte_carlo = monte_carlo_validate(p.choi, setup, samples, seed);
  if (samples > 0) {
    const auto& mc = rep.monte_carlo;
    rep.monte_carlo_consistent =
        std::abs(mc.fidelity - rep.metrics.fidelity) <= 3.0 * mc.fidelity_se + 1e-12 &&
        std::abs(mc.probability - rep.metrics.probability) <=
            3.0 * mc.probability_se + 1e-12;
  }
  rep.passed = rep.certificate.passed && rep.fidelity_deviation <= 1e-8 &&
               rep.probability_deviation <= 1e-6 && rep.monte_carlo_consistent;
  return rep;
}

}  // namespace epp
