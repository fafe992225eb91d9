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

#include "epp/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "epp/battery.hpp"
#include "epp/energy.hpp"
#include "epp/toml_lite.hpp"

namespace epp {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

std::vector<PauliTerm> pauli_terms(const json& terms) {
  if (!terms.is_array() || terms.empty()) {
    throw ConfigError("pauli Hamiltonian needs a non-empty 'terms' array");
  }
  std::vector<PauliTerm> out;
  try {
    for (const auto& t : terms) {
      out.push_back({t.at("coeff").get<double>(), t.at("ops").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("pauli term: ") + e.what());
  }
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

Matrix dense_matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw ConfigError("matrix must be a list of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw ConfigError("matrix must be square");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2) {
        m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ConfigError("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

json dense_matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back({m(r, c).real(), m(r, c).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> linear_grid(double start, double stop, int points) {
  if (points < 1) throw ConfigError("gamma grid needs at least one point");
  std::vector<double> g;
  if (points == 1) return {start};
  for (int k = 0; k < points; ++k) {
    g.push_back(start + (stop - start) * k / (points - 1));
  }
  g.back() = stop;
  return g;
}

ComplexOperator HamiltonianSpec::build(int d, int n) const {
  const auto space = SubsystemSpace::uniform(d, n);
  if (type == "ising") {
    if (d != 2) throw ConfigError("the Ising Hamiltonian needs d = 2");
    return ising_all_to_all(n, J, h);
  }
  if (type == "identity") return ComplexOperator::identity(space);
  if (type == "dense" || type == "pauli") {
    const json* spec = &payload;
    if (payload.is_object() && payload.contains("by_n")) {
      const auto key = std::to_string(n);
      if (!payload["by_n"].contains(key)) {
        throw ConfigError("no Hamiltonian given for n = " + key);
      }
      spec = &payload["by_n"][key];
    }
    Matrix m = type == "dense" ? dense_matrix_from_json(*spec)
                               : pauli_hamiltonian(pauli_terms(*spec)).matrix();
    if (m.rows() != space.total()) {
      throw ConfigError("Hamiltonian dimension " + std::to_string(m.rows()) +
                        " does not match d^n = " + std::to_string(space.total()));
    }
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
      throw ConfigError("Hamiltonian is not Hermitian");
    }
    return {std::move(m), space};
  }
  if (type == "additive") {
    const Matrix local = dense_matrix_from_json(payload);
    if (local.rows() != d) throw ConfigError("local term must be d × d");
    auto total = ComplexOperator::zero(space);
    for (int site = 0; site < n; ++site) {
      std::vector<ComplexOperator> f;
      for (int k = 0; k < n; ++k) {
        f.push_back(k == site ? ComplexOperator(local)
                              : ComplexOperator::identity(SubsystemSpace({d})));
      }
      total += kron(f);
    }
    return {total.matrix(), space};
  }
  throw ConfigError("unknown Hamiltonian type '" + type + "'");
}

json HamiltonianSpec::to_json() const {
  json j = {{"type", type}};
  if (type == "ising") {
    j["J"] = J;
    j["h"] = h;
    j["convention"] = "J*sum_{i,j=1..N} Z_i Z_j + h*sum_i X_i, ordered pairs incl. i=j, N=n";
  } else if (type == "dense") {
    j["matrix"] = payload;
  } else if (type == "pauli") {
    j["terms"] = payload;
  } else if (type == "additive") {
    j["local"] = payload;
  }
  return j;
}

HamiltonianSpec HamiltonianSpec::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("hamiltonian must be a table");
  HamiltonianSpec s;
  s.type = j.value("type", std::string("ising"));
  if (s.type == "ising") {
    reject_unknown(j, {"type", "J", "h", "convention"}, "hamiltonian");
    s.J = j.value("J", -0.5);
    s.h = j.value("h", -0.3);
  } else if (s.type == "identity") {
    reject_unknown(j, {"type"}, "hamiltonian");
  } else if (s.type == "dense") {
    reject_unknown(j, {"type", "matrix", "by_n"}, "hamiltonian");
    s.payload = j.contains("by_n") ? json{{"by_n", j["by_n"]}} : j.at("matrix");
  } else if (s.type == "pauli") {
    reject_unknown(j, {"type", "terms", "by_n"}, "hamiltonian");
    s.payload = j.contains("by_n") ? json{{"by_n", j["by_n"]}} : j.at("terms");
  } else if (s.type == "additive") {
    reject_unknown(j, {"type", "local"}, "hamiltonian");
    s.payload = j.at("local");
  } else {
    throw ConfigError("unknown Hamiltonian type '" + s.type + "'");
  }
  return s;
}

ComplexOperator BatterySpec::phi() const {
  const SubsystemSpace space({dim});
  if (state.is_string()) {
    if (state.get<std::string>() != "maximally_mixed") {
      throw ConfigError("battery state must be \"maximally_mixed\" or a matrix");
    }
    return ComplexOperator::identity(space) * Complex(1.0 / dim);
  }
  if (state.is_object() && state.contains("thermal_beta")) {
    const Matrix hr = hamiltonian_payload.is_object() &&
                              hamiltonian_payload.contains("battery")
                          ? dense_matrix_from_json(hamiltonian_payload["battery"])
                          : Matrix::Zero(dim, dim);
    return thermal_state(ComplexOperator(hr, space),
                         state["thermal_beta"].get<double>());
  }
  Matrix m = dense_matrix_from_json(state);
  if (m.rows() != dim) throw ConfigError("battery state must be dim × dim");
  return {std::move(m), space};
}

ComplexOperator BatterySpec::joint_hamiltonian(const ComplexOperator& h_system) const {
  const auto space = SubsystemSpace({dim}).concat(h_system.space());
  if (hamiltonian_type == "additive") {
    Matrix hr = Matrix::Zero(dim, dim);
    if (hamiltonian_payload.is_object() && hamiltonian_payload.contains("battery")) {
      hr = dense_matrix_from_json(hamiltonian_payload["battery"]);
    }
    if (hr.rows() != dim) throw ConfigError("battery Hamiltonian must be dim × dim");
    auto h = additive_hamiltonian(ComplexOperator(hr, SubsystemSpace({dim})), h_system);
    return {h.matrix(), space};
  }
  Matrix m;
  if (hamiltonian_type == "dense") {
    m = dense_matrix_from_json(hamiltonian_payload.at("matrix"));
  } else if (hamiltonian_type == "pauli") {
    m = pauli_hamiltonian(pauli_terms(hamiltonian_payload.at("terms"))).matrix();
  } else {
    throw ConfigError("unknown battery Hamiltonian type '" + hamiltonian_type + "'");
  }
  if (m.rows() != space.total()) {
    throw ConfigError("joint Hamiltonian dimension does not match battery ⊗ copies");
  }
  return {std::move(m), space};
}

json BatterySpec::to_json() const {
  json h = hamiltonian_payload.is_null() ? json::object() : hamiltonian_payload;
  h["type"] = hamiltonian_type;
  return {{"dim", dim}, {"state", state}, {"hamiltonian", h}};
}

BatterySpec BatterySpec::from_json(const json& j) {
  reject_unknown(j, {"dim", "state", "hamiltonian"}, "battery");
  BatterySpec b;
  b.dim = j.value("dim", 2);
  if (b.dim < 1) throw ConfigError("battery dim must be positive");
  if (j.contains("state")) b.state = j["state"];
  if (j.contains("hamiltonian")) {
    const auto& h = j["hamiltonian"];
    b.hamiltonian_type = h.value("type", std::string("additive"));
    b.hamiltonian_payload = h;
    b.hamiltonian_payload.erase("type");
  }
  return b;
}

void SweepConfig::validate() const {
  if (d < 2) throw ConfigError("d must be at least 2");
  if (n_values.empty()) throw ConfigError("n_values is empty");
  for (int n : n_values) {
    if (n < 1 || n > 4) throw ConfigError("n values must lie in {1, 2, 3, 4}");
  }
  if (gamma_grid.empty()) throw ConfigError("gamma_grid is empty");
  for (double g : gamma_grid) {
    if (!(g > 0.0 && g <= 1.0)) throw ConfigError("gamma values must lie in (0, 1]");
  }
  if (!(tolerances.rank_tol > 0 && tolerances.cluster_tol > 0 &&
        tolerances.max_eig_tol > 0 && tolerances.sdp_gap > 0)) {
    throw ConfigError("tolerances must be positive");
  }
  if (threads < 0) throw ConfigError("threads must be non-negative");
  try {
    for (int n : n_values) {
      const auto h = hamiltonian.build(d, n);
      if (battery) {
        const auto phi = battery->phi();
        if (min_eigenvalue(hermitian_part(phi)) <= tolerances.rank_tol) {
          throw ConfigError("battery state must have full rank");
        }
        battery->joint_hamiltonian(h);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

json SweepConfig::to_json() const {
  json j = {{"d", d},
            {"n_values", n_values},
            {"gamma_grid", gamma_grid},
            {"hamiltonian", hamiltonian.to_json()},
            {"tolerances",
             {{"rank_tol", tolerances.rank_tol},
              {"cluster_tol", tolerances.cluster_tol},
              {"max_eig_tol", tolerances.max_eig_tol},
              {"sdp_gap", tolerances.sdp_gap}}},
            {"seed", seed},
            {"synthesis", synthesis},
            {"monte_carlo_samples", monte_carlo_samples},
            {"emit_protocols", emit_protocols},
            {"output", {{"dir", output_dir}, {"name", output_name}}},
            {"threads", threads}};
  if (battery) j["battery"] = battery->to_json();
  return j;
}

SweepConfig SweepConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a table");
  reject_unknown(j,
                 {"d", "n_values", "gamma_grid", "hamiltonian", "tolerances", "seed",
                  "synthesis", "monte_carlo_samples", "battery", "emit_protocols",
                  "output", "threads"},
                 "config");
  SweepConfig c;
  try {
    c.d = j.value("d", 2);
    if (j.contains("n_values")) c.n_values = j["n_values"].get<std::vector<int>>();
    if (j.contains("gamma_grid")) {
      const auto& g = j["gamma_grid"];
      if (g.is_array()) {
        c.gamma_grid = g.get<std::vector<double>>();
      } else {
        reject_unknown(g, {"start", "stop", "points"}, "gamma_grid");
        c.gamma_grid = linear_grid(g.at("start").get<double>(),
                                   g.at("stop").get<double>(),
                                   g.at("points").get<int>());
      }
    } else {
      c.gamma_grid = linear_grid(0.05, 1.0, 20);
    }
    if (j.contains("hamiltonian")) c.hamiltonian = HamiltonianSpec::from_json(j["hamiltonian"]);
    if (j.contains("tolerances")) {
      const auto& t = j["tolerances"];
      reject_unknown(t, {"rank_tol", "cluster_tol", "max_eig_tol", "sdp_gap"},
                     "tolerances");
      c.tolerances.rank_tol = t.value("rank_tol", c.tolerances.rank_tol);
      c.tolerances.cluster_tol = t.value("cluster_tol", c.tolerances.cluster_tol);
      c.tolerances.max_eig_tol = t.value("max_eig_tol", c.tolerances.max_eig_tol);
      c.tolerances.sdp_gap = t.value("sdp_gap", c.tolerances.sdp_gap);
    }
    if (j.contains("seed")) {
      const auto& s = j["seed"];
      if (!s.is_number_integer() || s.get<std::int64_t>() < 0) {
        throw ConfigError("seed must be a non-negative integer");
      }
      c.seed = s.get<std::uint64_t>();
    }
    c.synthesis = j.value("synthesis", c.synthesis);
    c.monte_carlo_samples = j.value("monte_carlo_samples", std::size_t{0});
    c.emit_protocols = j.value("emit_protocols", false);
    if (j.contains("battery") && !j["battery"].is_null()) {
      c.battery = BatterySpec::from_json(j["battery"]);
    }
    if (j.contains("output")) {
      const auto& o = j["output"];
      reject_unknown(o, {"dir", "name"}, "output");
      c.output_dir = o.value("dir", c.output_dir);
      c.output_name = o.value("name", c.output_name);
    }
    c.threads = j.value("threads", 0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

json read_structured_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    if (ends_with(path, ".toml")) return parse_toml_subset(text);
    return json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("'" + path + "': " + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

SweepConfig load_config(const std::string& path) {
  return SweepConfig::from_json(read_structured_file(path));
}

BatterySpec load_battery_spec(const std::string& path) {
  auto j = read_structured_file(path);
  if (j.contains("battery")) j = j["battery"];
  try {
    return BatterySpec::from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("battery: ") + e.what());
  }
}

SweepConfig default_sweep_config() {
  SweepConfig c;
  c.gamma_grid = linear_grid(0.05, 1.0, 20);
  return c;
}

}  // namespace epp
