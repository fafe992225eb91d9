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

// epp: sweeps, single-point solves, protocol verification and dilations.
//
//   epp sweep  [--config f] [--seed s] [--samples k] [--emit-protocols]
//              [--battery f] [--out dir]
//   epp solve  --gamma g [--n n] [--config f] [--battery f] [--out dir]
//   epp verify <protocol.json> [--samples k] [--seed s]
//   epp dilate (--protocol f | --gamma g [--n n] [--config f]) [--out dir]
//
// Exit status: 0 all green, 1 a certificate or check failed, 2 bad input.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "epp/battery.hpp"
#include "epp/config.hpp"
#include "epp/experiments.hpp"
#include "epp/purification.hpp"
#include "epp/sdp.hpp"
#include "epp/synthesis.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitGreen = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  bool emit_protocols = false;
  std::string battery;
  std::string out;
  std::optional<double> cluster_tol;
  std::optional<int> threads;
};

struct PointFlags {
  int n = 2;
  double gamma = 0.0;
  std::string protocol;
};

epp::SweepConfig resolve_config(const CommonFlags& f) {
  epp::SweepConfig c =
      f.config.empty() ? epp::default_sweep_config() : epp::load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.samples) c.monte_carlo_samples = *f.samples;
  if (f.emit_protocols) c.emit_protocols = true;
  if (!f.battery.empty()) c.battery = epp::load_battery_spec(f.battery);
  if (!f.out.empty()) c.output_dir = f.out;
  if (f.cluster_tol) c.tolerances.cluster_tol = *f.cluster_tol;
  if (f.threads) c.threads = *f.threads;
  c.validate();
  return c;
}

void add_common(CLI::App* app, CommonFlags& f, bool sweep_flags) {
  app->add_option("--config", f.config, "TOML or JSON config file");
  app->add_option("--battery", f.battery, "battery config file (TOML or JSON)");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--cluster-tol", f.cluster_tol, "relative energy clustering tolerance");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--samples", f.samples, "Monte-Carlo samples per point");
  if (sweep_flags) {
    app->add_flag("--emit-protocols", f.emit_protocols, "write one protocol file per point");
    app->add_option("--threads", f.threads, "worker threads (0: all cores)");
  }
}

std::string point_tag(int n, double gamma) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "n%d_g%.6f", n, gamma);
  return buf;
}

fs::path output_dir(const std::string& out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  return dir;
}

int cmd_sweep(const CommonFlags& f) {
  const auto config = resolve_config(f);
  const auto result = epp::run_sweep(config);
  const auto csv = epp::write_sweep_outputs(result);
  std::size_t green = 0;
  for (const auto& r : result.records) {
    if (r.green()) ++green;
    std::printf("n=%d gamma=%-8.4f F_max=%.10f p_max=%.10f gap=%.2e %s%s%s\n", r.n,
                r.gamma, r.F_max, r.p_max, r.sdp_gap, r.green() ? "green" : "RED",
                r.error.empty() ? "" : "  ", r.error.c_str());
  }
  std::printf("%zu/%zu points green; wrote %s\n", green, result.records.size(),
              csv.c_str());
  return result.all_green() ? kExitGreen : kExitFailure;
}

int cmd_solve(const CommonFlags& f, const PointFlags& pf) {
  const auto config = resolve_config(f);
  const auto& tol = config.tolerances;
  epp::SdpOptions opts;
  opts.lmi.gap_tol = tol.sdp_gap;
  opts.lmi.feas_tol = tol.sdp_gap;

  const auto h = config.hamiltonian.build(config.d, pf.n);
  epp::ProtocolFile proto;
  proto.d = config.d;
  proto.n = pf.n;
  proto.gamma = pf.gamma;
  proto.hamiltonian = h;
  proto.tolerances = tol;

  bool ok = true;
  if (config.battery) {
    const auto& b = *config.battery;
    const auto joint = b.joint_hamiltonian(h);
    epp::BatteryProblem bp(config.d, pf.n, pf.gamma, b.phi(),
                           epp::spectral_decompose(joint, tol.cluster_tol));
    const auto br = epp::solve_battery(bp, tol, opts);
    std::printf("battery d_r=%d  F_max=%.12f  p_max=%.12f  gap=%.3e  certified=%s\n",
                bp.battery_dim(), br.F_max, br.p_max, br.sdp.gap,
                br.sdp.certified ? "yes" : "no");
    ok = br.sdp.certified;
    proto.choi = br.sdp.choi_star;
    proto.dual_y = br.sdp.dual_y;
    proto.F_max = br.F_max;
    proto.p_max = br.p_max;
    proto.battery_state = b.phi();
    proto.joint_hamiltonian = joint;
  } else {
    auto rec = epp::run_point(config, pf.n, pf.gamma, 0);
    if (rec.status != "ok") {
      std::fprintf(stderr, "error: %s\n", rec.error.c_str());
      return kExitFailure;
    }
    std::printf("n=%d gamma=%.6f degeneracies=%s\n", rec.n, rec.gamma,
                rec.degeneracies.c_str());
    std::printf("  F_max     %.12f  (baseline %.12f)\n", rec.F_max, rec.baseline);
    std::printf("  p_max     %.12f  (dual %.12f, gap %.3e, %d iterations)\n", rec.p_max,
                rec.dual_bound, rec.sdp_gap, rec.sdp_iterations);
    std::printf("  rank P_m  %d   rank C %d\n", rec.rank_Pm, rec.rank_C);
    std::printf("  no-go     %s (routes %s)\n", rec.nogo ? "yes" : "no",
                rec.nogo_agree ? "agree" : "DISAGREE");
    if (rec.has_synthesis) {
      std::printf("  dilation  env=%d choi=%.2e unitarity=%.2e commutator=%.2e\n",
                  rec.dilation_env_dim, rec.dilation_choi_residual,
                  rec.dilation_unitarity_residual, rec.dilation_commutator_residual);
    }
    if (rec.monte_carlo.samples > 0) {
      std::printf("  MC        F=%.6f±%.1e p=%.6f±%.1e (%zu samples)\n",
                  rec.monte_carlo.fidelity, rec.monte_carlo.fidelity_se,
                  rec.monte_carlo.probability, rec.monte_carlo.probability_se,
                  rec.monte_carlo.samples);
    }
    ok = rec.green();
    proto.choi = rec.choi_star;
    proto.dual_y = rec.dual_y;
    proto.F_max = rec.F_max;
    proto.p_max = rec.p_max;
  }
  if (!f.out.empty()) {
    const auto path = output_dir(f.out) / ("protocol_" + point_tag(pf.n, pf.gamma) + ".json");
    epp::save_protocol(proto, path.string());
    std::printf("wrote %s\n", path.string().c_str());
  }
  std::printf("%s\n", ok ? "green" : "RED");
  return ok ? kExitGreen : kExitFailure;
}

int cmd_verify(const CommonFlags& f, const PointFlags& pf) {
  const auto proto = epp::load_protocol(pf.protocol);
  const std::size_t samples = f.samples.value_or(100000);
  const std::uint64_t seed = f.seed.value_or(epp::SweepConfig{}.seed);
  const auto rep = epp::verify_protocol(proto, samples, seed);
  std::printf("protocol d=%d n=%d gamma=%.6f%s\n", proto.d, proto.n, proto.gamma,
              proto.battery_state ? " (battery)" : "");
  std::printf("  fidelity     %.12f  (recorded %.12f, dev %.2e)\n", rep.metrics.fidelity,
              proto.F_max, rep.fidelity_deviation);
  std::printf("  probability  %.12f  (recorded %.12f, dev %.2e)\n",
              rep.metrics.probability, proto.p_max, rep.probability_deviation);
  std::printf("  certificate  primal %.12f dual %.12f gap %.2e: %s%s%s\n",
              rep.certificate.primal_value, rep.certificate.dual_value,
              rep.certificate.gap, rep.certificate.passed ? "pass" : "FAIL",
              rep.certificate.message.empty() ? "" : " ",
              rep.certificate.message.c_str());
  if (samples > 0) {
    const auto& mc = rep.monte_carlo;
    std::printf("  Monte-Carlo  F=%.6f±%.1e p=%.6f±%.1e over %zu samples: %s\n",
                mc.fidelity, mc.fidelity_se, mc.probability, mc.probability_se,
                mc.samples, rep.monte_carlo_consistent ? "consistent" : "INCONSISTENT");
  }
  std::printf("%s\n", rep.passed ? "green" : "RED");
  return rep.passed ? kExitGreen : kExitFailure;
}

int cmd_dilate(const CommonFlags& f, const PointFlags& pf) {
  epp::ComplexOperator choi;
  epp::ComplexOperator h;
  double cluster_tol = epp::Tolerances{}.cluster_tol;
  double rank_tol = epp::Tolerances{}.rank_tol;
  std::string tag;
  if (!pf.protocol.empty()) {
    const auto proto = epp::load_protocol(pf.protocol);
    if (proto.battery_state) {
      throw epp::ConfigError("dilate: battery protocols are not supported");
    }
    choi = proto.choi;
    h = proto.hamiltonian;
    cluster_tol = proto.tolerances.cluster_tol;
    rank_tol = proto.tolerances.rank_tol;
    tag = point_tag(proto.n, proto.gamma);
  } else {
    auto config = resolve_config(f);
    config.synthesis = false;
    config.battery.reset();
    config.monte_carlo_samples = 0;
    const auto rec = epp::run_point(config, pf.n, pf.gamma, 0);
    if (rec.status != "ok") {
      std::fprintf(stderr, "error: %s\n", rec.error.c_str());
      return kExitFailure;
    }
    choi = rec.choi_star;
    h = config.hamiltonian.build(config.d, pf.n);
    cluster_tol = config.tolerances.cluster_tol;
    rank_tol = config.tolerances.rank_tol;
    tag = point_tag(pf.n, pf.gamma);
  }
  const auto es = epp::spectral_decompose(h, cluster_tol);
  const auto spec = epp::build_dilation(choi, es, rank_tol);
  const auto rep = epp::verify_dilation(spec, choi);
  const auto path = output_dir(f.out) / ("dilation_" + tag + ".json");
  {
    std::ofstream os(path);
    if (!os) throw epp::Error("cannot write '" + path.string() + "'");
    os << epp::dilation_to_json(spec).dump() << '\n';
  }
  std::printf("dilation env=%d system=%d\n", spec.env_dim, spec.system_dim());
  std::printf("  choi %.2e  unitarity %.2e  commutator %.2e  isometry %.2e\n",
              rep.choi_residual, rep.unitarity_residual, rep.commutator_residual,
              rep.isometry_residual);
  std::printf("wrote %s\n%s\n", path.string().c_str(), rep.passed() ? "green" : "RED");
  return rep.passed() ? kExitGreen : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-preserving purification: optimal protocols and certificates"};
  app.require_subcommand(1);

  CommonFlags sweep_f, solve_f, verify_f, dilate_f;
  PointFlags solve_p, verify_p, dilate_p;

  auto* sweep = app.add_subcommand("sweep", "run the configured (n, gamma) sweep");
  add_common(sweep, sweep_f, true);

  auto* solve = app.add_subcommand("solve", "solve a single (n, gamma) point");
  add_common(solve, solve_f, false);
  solve->add_option("--n", solve_p.n, "number of noisy copies")->check(CLI::Range(1, 4));
  solve->add_option("--gamma", solve_p.gamma, "depolarizing visibility in (0, 1]")
      ->required();

  auto* verify = app.add_subcommand("verify", "re-check a saved protocol file");
  verify->add_option("protocol", verify_p.protocol, "protocol JSON")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("--seed", verify_f.seed, "Monte-Carlo seed");
  verify->add_option("--samples", verify_f.samples, "Monte-Carlo samples (default 1e5)");

  auto* dilate = app.add_subcommand("dilate", "emit a unitary dilation as JSON");
  add_common(dilate, dilate_f, false);
  auto* from_file = dilate->add_option("--protocol", dilate_p.protocol, "protocol JSON")
                        ->check(CLI::ExistingFile);
  dilate->add_option("--n", dilate_p.n, "number of noisy copies")->check(CLI::Range(1, 4));
  dilate->add_option("--gamma", dilate_p.gamma, "depolarizing visibility in (0, 1]")
      ->excludes(from_file);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitGreen : kExitConfig;
  }

  try {
    if (*sweep) return cmd_sweep(sweep_f);
    if (*solve) return cmd_solve(solve_f, solve_p);
    if (*verify) return cmd_verify(verify_f, verify_p);
    if (*dilate) {
      if (dilate_p.protocol.empty() && dilate->count("--gamma") == 0) {
        throw epp::ConfigError("dilate: give --protocol or --gamma");
      }
      return cmd_dilate(dilate_f, dilate_p);
    }
  } catch (const epp::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitConfig;
}
