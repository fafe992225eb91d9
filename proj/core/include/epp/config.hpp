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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "epp/operator.hpp"
#include "epp/purification.hpp"

namespace epp {

/// Malformed or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Hamiltonian recipe. For "ising" the number of sites follows n; "dense" and
/// "pauli" fix the dimension and must match d^n; "additive" sums a local d×d
/// term over the copies; "identity" is H = I.
struct HamiltonianSpec {
  std::string type = "ising";
  double J = -0.5;
  double h = -0.3;
  nlohmann::json payload;  // matrix / terms / local, depending on type

  /// H on n copies of C^d.
  ComplexOperator build(int d, int n) const;
  nlohmann::json to_json() const;
  static HamiltonianSpec from_json(const nlohmann::json& j);
};

/// Battery attachment. The joint Hamiltonian is either H_R ⊗ I + I ⊗ H with
/// an explicit battery term ("additive", default H_R = 0) or a full matrix /
/// Pauli list over battery + copies ("dense", "pauli").
struct BatterySpec {
  int dim = 2;
  nlohmann::json state = "maximally_mixed";
  std::string hamiltonian_type = "additive";
  nlohmann::json hamiltonian_payload;

  ComplexOperator phi() const;
  ComplexOperator joint_hamiltonian(const ComplexOperator& h_system) const;
  nlohmann::json to_json() const;
  static BatterySpec from_json(const nlohmann::json& j);
};

struct SweepConfig {
  int d = 2;
  std::vector<int> n_values{2, 3};
  std::vector<double> gamma_grid;
  HamiltonianSpec hamiltonian;
  Tolerances tolerances;
  std::uint64_t seed = 20240611;
  bool synthesis = true;
  std::size_t monte_carlo_samples = 0;
  std::optional<BatterySpec> battery;
  bool emit_protocols = false;
  std::string output_dir = "results";
  std::string output_name = "sweep";
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
  nlohmann::json to_json() const;
  static SweepConfig from_json(const nlohmann::json& j);
};

/// `points` evenly spaced values from start to stop inclusive.
std::vector<double> linear_grid(double start, double stop, int points);

/// Complex matrix from rows of numbers or [re, im] pairs.
Matrix dense_matrix_from_json(const nlohmann::json& rows);
nlohmann::json dense_matrix_to_json(const Matrix& m);

/// Parses a config file; ".toml" selects the TOML reader, anything else JSON.
SweepConfig load_config(const std::string& path);
/// Parses a battery config file (same formats).
BatterySpec load_battery_spec(const std::string& path);
nlohmann::json read_structured_file(const std::string& path);

/// Config used when no file is given.
SweepConfig default_sweep_config();

}  // namespace epp
