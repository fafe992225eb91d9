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

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "epp/battery.hpp"
#include "epp/config.hpp"
#include "epp/energy.hpp"
#include "epp/toml_lite.hpp"

namespace epp {
namespace {

using nlohmann::json;

std::string source_path(const std::string& rel) {
  return std::string(EPP_SOURCE_DIR) + "/" + rel;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

TEST(Toml, ScalarsArraysAndTables) {
  const auto j = parse_toml_subset(R"(
# comment
a = 1
b = -2.5e-3   # trailing comment
c = "text"
flag = true
arr = [1, 2,
       3,]
inline = { x = 1, y = [0.5, 1.0] }
"quoted key" = 4
big = inf

[outer.inner]
k = 7
)");
  EXPECT_EQ(j["a"], 1);
  EXPECT_DOUBLE_EQ(j["b"].get<double>(), -2.5e-3);
  EXPECT_EQ(j["c"], "text");
  EXPECT_EQ(j["flag"], true);
  EXPECT_EQ(j["arr"], json({1, 2, 3}));
  EXPECT_EQ(j["inline"]["y"][1], 1.0);
  EXPECT_EQ(j["quoted key"], 4);
  EXPECT_TRUE(std::isinf(j["big"].get<double>()));
  EXPECT_EQ(j["outer"]["inner"]["k"], 7);
}

TEST(Toml, ErrorsCarryLineNumbers) {
  EXPECT_NE(error_of([] { parse_toml_subset("a = 1\nb = \n"); }).find("line 2"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_toml_subset("a = 1\n\n\n[[tables]]\n"); }).find("line 4"),
            std::string::npos);
  EXPECT_THROW(parse_toml_subset("a = 1\na = 2\n"), Error);
  EXPECT_THROW(parse_toml_subset("s = \"\"\"multi\"\"\"\n"), Error);
}

TEST(Config, TomlAndJsonDefaultsAgree) {
  const auto a = load_config(source_path("configs/default_sweep.json"));
  const auto b = load_config(source_path("configs/default_sweep.toml"));
  EXPECT_EQ(a.to_json(), b.to_json());
  EXPECT_EQ(a.gamma_grid.size(), 20u);
  EXPECT_DOUBLE_EQ(a.gamma_grid.front(), 0.05);
  EXPECT_DOUBLE_EQ(a.gamma_grid.back(), 1.0);
  EXPECT_EQ(a.n_values, (std::vector<int>{2, 3}));
  EXPECT_EQ(a.hamiltonian.type, "ising");
  EXPECT_DOUBLE_EQ(a.hamiltonian.J, -0.5);
  EXPECT_DOUBLE_EQ(a.hamiltonian.h, -0.3);
  EXPECT_EQ(default_sweep_config().to_json()["hamiltonian"], a.to_json()["hamiltonian"]);
}

TEST(Config, JsonRoundTrip) {
  auto c = load_config(source_path("configs/default_sweep.json"));
  c.monte_carlo_samples = 1000;
  c.seed = 5;
  const auto back = SweepConfig::from_json(json::parse(c.to_json().dump()));
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(Config, RejectsUnknownKeysAndBadRanges) {
  json j = load_config(source_path("configs/default_sweep.json")).to_json();
  auto with = [&](const std::string& key, json v) {
    json k = j;
    k[key] = std::move(v);
    return k;
  };
  EXPECT_THROW(SweepConfig::from_json(with("gama_grid", json::array({0.5}))), ConfigError);
  EXPECT_THROW(SweepConfig::from_json(with("n_values", {2, 5})), ConfigError);
  EXPECT_THROW(SweepConfig::from_json(with("n_values", {0})), ConfigError);
  EXPECT_THROW(SweepConfig::from_json(with("gamma_grid", {0.5, 1.2})), ConfigError);
  EXPECT_THROW(SweepConfig::from_json(with("gamma_grid", {0.0})), ConfigError);
  EXPECT_THROW(SweepConfig::from_json(with("seed", -1)), ConfigError);
  EXPECT_THROW(SweepConfig::from_json(with("d", 1)), ConfigError);
  EXPECT_THROW(SweepConfig::from_json(with("n_values", "two")), ConfigError);
  json tol = j;
  tol["tolerances"]["rank_tol"] = -1.0;
  EXPECT_THROW(SweepConfig::from_json(tol), ConfigError);
  tol = j;
  tol["tolerances"]["rank"] = 1.0;
  EXPECT_THROW(SweepConfig::from_json(tol), ConfigError);
  json ham = j;
  ham["hamiltonian"] = {{"type", "ising"}, {"J", 1.0}, {"g", 2.0}};
  EXPECT_THROW(SweepConfig::from_json(ham), ConfigError);
}

TEST(Config, MissingFileIsConfigError) {
  EXPECT_THROW(load_config("/nonexistent/epp.toml"), ConfigError);
}

TEST(LinearGrid, EndpointsAndSpacing) {
  const auto g = linear_grid(0.05, 1.0, 20);
  ASSERT_EQ(g.size(), 20u);
  EXPECT_DOUBLE_EQ(g[0], 0.05);
  EXPECT_DOUBLE_EQ(g[19], 1.0);
  for (std::size_t k = 1; k < g.size(); ++k) EXPECT_NEAR(g[k] - g[k - 1], 0.05, 1e-15);
  EXPECT_EQ(linear_grid(0.3, 0.9, 1), std::vector<double>{0.3});
  EXPECT_THROW(linear_grid(0.1, 1.0, 0), ConfigError);
}

TEST(HamiltonianSpec, KindsBuildExpectedOperators) {
  const auto ising = HamiltonianSpec::from_json({{"type", "ising"}, {"J", -0.5}, {"h", -0.3}});
  EXPECT_LT((ising.build(2, 3).matrix() - ising_all_to_all(3, -0.5, -0.3).matrix()).norm(),
            1e-15);

  const auto id = HamiltonianSpec::from_json({{"type", "identity"}});
  EXPECT_EQ(id.build(2, 2).matrix(), Matrix::Identity(4, 4));

  const auto pauli = HamiltonianSpec::from_json(
      {{"type", "pauli"}, {"terms", {{{"coeff", 1.0}, {"ops", "ZZ"}}}}});
  const Matrix zz = pauli.build(2, 2).matrix();
  EXPECT_NEAR(zz(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(zz(1, 1).real(), -1.0, 1e-15);
  EXPECT_THROW(HamiltonianSpec::from_json(
                   {{"type", "pauli"}, {"terms", {{{"coeff", 1.0}, {"pauli", "ZZ"}}}}})
                   .build(2, 2),
               ConfigError);

  const auto dense = HamiltonianSpec::from_json(
      {{"type", "dense"}, {"matrix", {{0, json::array({0, -1})}, {json::array({0, 1}), 0}}}});
  const Matrix y = dense.build(2, 1).matrix();
  EXPECT_EQ(y(0, 1), Complex(0, -1));
  EXPECT_THROW(dense.build(2, 2), ConfigError);

  const auto by_n = HamiltonianSpec::from_json(
      {{"type", "dense"}, {"by_n", {{"1", {{1, 0}, {0, 2}}}}}});
  EXPECT_EQ(by_n.build(2, 1).matrix()(1, 1), Complex(2, 0));
  EXPECT_THROW(by_n.build(2, 2), ConfigError);

  const auto add = HamiltonianSpec::from_json({{"type", "additive"}, {"local", {{0, 0}, {0, 1}}}});
  const Matrix h = add.build(2, 2).matrix();
  EXPECT_EQ(h.diagonal().real(), Eigen::Vector4d(0, 1, 1, 2));

  EXPECT_THROW(HamiltonianSpec::from_json({{"type", "heisenberg"}}), ConfigError);
  EXPECT_THROW(HamiltonianSpec::from_json(
                   {{"type", "dense"}, {"matrix", {{0, 1}, {2, 0}}}})
                   .build(2, 1),
               ConfigError);
}

TEST(BatterySpec, QubitTomlGivesThermalStateAndAdditiveJoint) {
  const auto b = load_battery_spec(source_path("configs/battery_qubit.toml"));
  EXPECT_EQ(b.dim, 2);
  Matrix hr = Matrix::Zero(2, 2);
  hr(1, 1) = 1.0;
  const auto phi = b.phi();
  EXPECT_LT((phi.matrix() - thermal_state(ComplexOperator(hr), 1.0).matrix()).norm(), 1e-14);
  const auto hs = ising_all_to_all(2, -0.5, -0.3);
  const auto joint = b.joint_hamiltonian(hs);
  EXPECT_EQ(joint.space().dims(), (std::vector<int>{2, 2, 2}));
  EXPECT_LT((joint.matrix() - additive_hamiltonian(ComplexOperator(hr), hs).matrix()).norm(),
            1e-14);
}

TEST(BatterySpec, RejectsMalformedEntries) {
  EXPECT_THROW(BatterySpec::from_json({{"dim", 2}, {"colour", "red"}}), ConfigError);
  EXPECT_THROW(BatterySpec::from_json({{"dim", 0}}), ConfigError);
  auto b = BatterySpec::from_json({{"dim", 2}, {"state", "pure"}});
  EXPECT_THROW(b.phi(), ConfigError);
  b = BatterySpec::from_json({{"dim", 3}});
  EXPECT_NEAR(b.phi().matrix()(2, 2).real(), 1.0 / 3.0, 1e-15);
  json j = load_config(source_path("configs/default_sweep.json")).to_json();
  j["battery"] = {{"dim", 2}, {"state", {{1, 0}, {0, 0}}}};
  EXPECT_THROW(SweepConfig::from_json(j), ConfigError);
}

TEST(DenseMatrix, JsonRoundTrip) {
  Matrix m(2, 2);
  m << 1, Complex(0, 1), Complex(0, -1), 2;
  EXPECT_EQ(dense_matrix_from_json(dense_matrix_to_json(m)), m);
  EXPECT_THROW(dense_matrix_from_json(json::array({{1, 2}, {3}})), ConfigError);
  EXPECT_THROW(dense_matrix_from_json(json::array({{"a"}})), ConfigError);
}

}  // namespace
}  // namespace epp
