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

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "epp/battery.hpp"
#include "epp/config.hpp"
#include "epp/purification.hpp"
#include "epp/sdp.hpp"

namespace epp {

inline constexpr const char* kCsvVersionLine = "# epp sweep v1";
inline constexpr const char* kTensorOrder = "[in_1..in_n, out_1..out_n]";

// ---------------------------------------------------------------------------
// Monte-Carlo

/// Haar-average estimates. fidelity is the ratio of the numerator and
/// probability means; its standard error comes from the delta method.
struct MonteCarloReport {
  std::size_t samples = 0;
  double probability = 0.0;     // mean of Tr Λ(ρ_ψ)
  double probability_se = 0.0;
  double numerator = 0.0;       // mean of Tr[(ψ ⊗ I) Λ(ρ_ψ)]
  double numerator_se = 0.0;
  double fidelity = 0.0;
  double fidelity_se = 0.0;
};

/// Input model: ρ_ψ = φ ⊗ N(ψ)^{⊗n} (φ omitted when absent) and the
/// observable I_R ⊗ ψ ⊗ I on the output.
struct MonteCarloSetup {
  int d = 2;
  int n = 2;
  double gamma = 1.0;
  std::optional<ComplexOperator> battery_state;
};

/// Zero samples yields NaN estimates.
MonteCarloReport monte_carlo_validate(const ComplexOperator& choi,
                                      const MonteCarloSetup& setup,
                                      std::size_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Sweep

struct SweepRecord {
  double gamma = 0.0;
  int n = 0;
  std::string status = "ok";
  std::string error;

  double F_max = 0.0;
  double baseline = 0.0;
  double p_max = 0.0;
  double dual_bound = 0.0;
  double sdp_gap = 0.0;
  bool nogo = false;
  bool nogo_agree = false;
  double nogo_operator_residual = 0.0;
  int rank_Pm = 0;
  int rank_C = 0;
  std::string degeneracies;
  bool certified = false;
  SdpResiduals residuals;
  int sdp_iterations = 0;

  bool has_synthesis = false;
  double complement_cptp_residual = 0.0;
  double complement_epo_residual = 0.0;
  int dilation_env_dim = 0;
  double dilation_choi_residual = 0.0;
  double dilation_unitarity_residual = 0.0;
  double dilation_commutator_residual = 0.0;

  bool has_battery = false;
  double battery_F_max = 0.0;
  double battery_p_max = 0.0;
  double battery_gap = 0.0;
  bool battery_certified = false;

  MonteCarloReport monte_carlo;

  Tolerances tolerances;
  std::uint64_t seed = 0;
  double wall_time_ms = 0.0;

  ComplexOperator choi_star;  // kept for --emit-protocols
  Matrix dual_y;

  /// Certificates, no-go agreement and every enabled check passed.
  bool green() const;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRecord> records;
  bool all_green() const;
};

/// Evaluates one (γ, n) point. Never throws; failures land in the record.
SweepRecord run_point(const SweepConfig& config, int n, double gamma,
                      std::uint64_t point_index);

/// Every (n, γ) point, in a worker pool. Records are ordered n-major then by γ
/// independent of scheduling.
SweepResult run_sweep(const SweepConfig& config);

/// Fixed, versioned header (first line is kCsvVersionLine).
void write_csv(std::ostream& os, const std::vector<SweepRecord>& records,
               const std::string& convention = "unspecified");
std::vector<std::string> csv_columns();
nlohmann::json sweep_sidecar(const SweepResult& result);
/// Writes <dir>/<name>.csv, <dir>/<name>.json and, when requested, one
/// protocol file per point under <dir>/protocols/. Returns the CSV path.
std::string write_sweep_outputs(const SweepResult& result);

// ---------------------------------------------------------------------------
// Protocol files

struct ProtocolFile {
  int d = 2;
  int n = 2;
  double gamma = 1.0;
  ComplexOperator hamiltonian;  // on the copies
  ComplexOperator choi;
  Matrix dual_y;
  double F_max = 0.0;
  double p_max = 0.0;
  std::optional<ComplexOperator> battery_state;
  std::optional<ComplexOperator> joint_hamiltonian;
  Tolerances tolerances;

  nlohmann::json to_json() const;
  static ProtocolFile from_json(const nlohmann::json& j);
};

void save_protocol(const ProtocolFile& p, const std::string& path);
/// Throws ConfigError on unreadable or malformed files.
ProtocolFile load_protocol(const std::string& path);

/// Rebuilds (A, C) for the protocol's problem, batteryless or not.
StructuralOperators protocol_structural(const ProtocolFile& p);

struct VerifyReport {
  ProtocolMetrics metrics;
  CertificateReport certificate;
  MonteCarloReport monte_carlo;
  double fidelity_deviation = 0.0;     // |metrics.fidelity − F_max|
  double probability_deviation = 0.0;  // |metrics.probability − p_max|
  bool monte_carlo_consistent = true;  // within 3 standard errors
  bool passed = false;
};

VerifyReport verify_protocol(const ProtocolFile& p, std::size_t samples,
                             std::uint64_t seed);

}  // namespace epp
