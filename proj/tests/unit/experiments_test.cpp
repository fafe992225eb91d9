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
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "epp/energy.hpp"
#include "epp/experiments.hpp"
#include "epp/quantum.hpp"
#include "oracles.hpp"

namespace epp {
namespace {

namespace fs = std::filesystem;
namespace oracle = testing_oracle;

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream os;
  write_csv(os, r.records, "test");
  return os.str();
}

// Drops the trailing wall-time column from every data row.
std::string without_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) != 0) line = line.substr(0, line.rfind(','));
    out += line + "\n";
  }
  return out;
}

SweepConfig small_config() {
  auto c = default_sweep_config();
  c.n_values = {2};
  c.gamma_grid = {0.2, 0.6, 1.0};
  c.monte_carlo_samples = 2000;
  c.threads = 2;
  return c;
}

TEST(MonteCarlo, ZeroSamplesYieldsNaN) {
  const auto r = monte_carlo_validate(choi_of_identity(SubsystemSpace{2, 2}), {2, 2, 0.5, {}},
                                      0, 1);
  EXPECT_EQ(r.samples, 0u);
  EXPECT_TRUE(std::isnan(r.fidelity));
  EXPECT_TRUE(std::isnan(r.probability));
  EXPECT_TRUE(std::isnan(r.fidelity_se));
}

TEST(MonteCarlo, IdentityChannelGivesBaseline) {
  const auto r = monte_carlo_validate(choi_of_identity(SubsystemSpace{2, 2}), {2, 2, 0.5, {}},
                                      100000, 3);
  EXPECT_NEAR(r.fidelity, 0.75, 3.0 * r.fidelity_se + 1e-12);
  EXPECT_NEAR(r.probability, 1.0, 1e-12);
}

TEST(MonteCarlo, AgreesWithIndependentOracle) {
  const auto es = spectral_decompose(ising_all_to_all(2, -0.5, -0.3));
  CounterRng rng(31);
  const auto g = random_epo_choi(es, rng) * Complex(0.7);
  const auto mc = monte_carlo_validate(g, {2, 2, 0.4, {}}, 40000, 11);
  const auto e = oracle::haar_estimate(g.matrix(), 2, 2, 0.4, 40000, 12);
  const double se_n = std::hypot(mc.numerator_se, e.num_se);
  const double se_d = std::hypot(mc.probability_se, e.den_se);
  EXPECT_NEAR(mc.numerator, e.num, 4.0 * se_n);
  EXPECT_NEAR(mc.probability, e.den, 4.0 * se_d);
  EXPECT_NEAR(mc.fidelity, mc.numerator / mc.probability, 1e-14);
  // Exact Haar values from the structural operators.
  const auto s = structural_operators(
      PurificationProblem(2, 2, 0.4, ising_all_to_all(2, -0.5, -0.3)));
  EXPECT_NEAR(mc.probability, trace_product(g, s.C).real(), 3.0 * mc.probability_se);
  EXPECT_NEAR(mc.numerator, trace_product(g, s.A).real(), 3.0 * mc.numerator_se);
}

TEST(Csv, VersionedHeader) {
  std::ostringstream os;
  write_csv(os, {}, "x");
  std::istringstream in(os.str());
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(first, kCsvVersionLine);
  const auto cols = split(second);
  EXPECT_EQ(cols, csv_columns());
  EXPECT_EQ(cols.front(), "gamma");
  EXPECT_EQ(cols.back(), "wall_time_ms");
  for (const char* c : {"F_max", "p_max", "sdp_gap", "nogo", "certified", "seed",
                        "dilation_commutator_residual", "mc_fidelity", "green"}) {
    EXPECT_NE(std::find(cols.begin(), cols.end(), c), cols.end()) << c;
  }
}

TEST(Sweep, SameSeedIsByteIdenticalWithoutTiming) {
  auto c = small_config();
  const auto a = without_timing(csv_of(run_sweep(c)));
  c.threads = 1;
  const auto b = without_timing(csv_of(run_sweep(c)));
  EXPECT_EQ(a, b);
  c.seed += 1;
  EXPECT_NE(without_timing(csv_of(run_sweep(c))), a);
}

TEST(Sweep, RecordsAreOrderedAndGreen) {
  auto c = small_config();
  c.n_values = {3, 2};
  const auto r = run_sweep(c);
  ASSERT_EQ(r.records.size(), 6u);
  EXPECT_EQ(r.records[0].n, 3);
  EXPECT_EQ(r.records[3].n, 2);
  EXPECT_DOUBLE_EQ(r.records[1].gamma, 0.6);
  EXPECT_TRUE(r.all_green());
  for (const auto& rec : r.records) {
    EXPECT_TRUE(rec.has_synthesis);
    EXPECT_EQ(rec.monte_carlo.samples, 2000u);
  }
}

TEST(Sweep, RunPointRecordsErrorsInsteadOfThrowing) {
  auto c = small_config();
  const auto bad_gamma = run_point(c, 2, 1.5, 0);
  EXPECT_EQ(bad_gamma.status, "error");
  EXPECT_FALSE(bad_gamma.error.empty());
  EXPECT_FALSE(bad_gamma.green());
  c.hamiltonian = HamiltonianSpec::from_json({{"type", "dense"}, {"matrix", {{1, 0}, {0, 2}}}});
  const auto bad_h = run_point(c, 2, 0.5, 0);
  EXPECT_EQ(bad_h.status, "error");
  SweepResult r{c, {bad_h}};
  EXPECT_FALSE(r.all_green());
  EXPECT_NE(csv_of(r).find(",error,"), std::string::npos);
}

TEST(Sweep, InvariantsAndMonotonicityOnFullGrid) {
  auto c = default_sweep_config();
  c.synthesis = false;
  const auto r = run_sweep(c);
  std::map<int, double> last;
  for (const auto& rec : r.records) {
    ASSERT_EQ(rec.status, "ok") << rec.error;
    EXPECT_GE(rec.F_max, rec.baseline - 1e-9);
    EXPECT_LE(rec.F_max, 1.0 + 1e-9);
    EXPECT_GE(rec.p_max, 0.0);
    EXPECT_LE(rec.p_max, 1.0 + 1e-9);
    if (last.count(rec.n)) EXPECT_GE(rec.F_max, last[rec.n] - 1e-12) << rec.gamma;
    last[rec.n] = rec.F_max;
  }
}

TEST(Sweep, GoldenRegression) {
  std::ifstream in(std::string(EPP_TEST_DATA_DIR) + "/golden/default_sweep.csv");
  ASSERT_TRUE(in);
  std::string line;
  std::getline(in, line);  // comment
  std::getline(in, line);
  const auto header = split(line);
  std::vector<std::vector<std::string>> golden;
  while (std::getline(in, line)) golden.push_back(split(line));

  auto c = default_sweep_config();
  c.synthesis = false;
  const auto r = run_sweep(c);
  ASSERT_EQ(r.records.size(), golden.size());
  auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) -
                                    header.begin());
  };
  for (std::size_t k = 0; k < golden.size(); ++k) {
    const auto& g = golden[k];
    const auto& rec = r.records[k];
    EXPECT_EQ(std::stod(g[col("gamma")]), rec.gamma);
    EXPECT_EQ(std::stoi(g[col("n")]), rec.n);
    EXPECT_NEAR(std::stod(g[col("F_max")]), rec.F_max, 1e-9) << k;
    EXPECT_NEAR(std::stod(g[col("baseline")]), rec.baseline, 1e-12) << k;
    EXPECT_NEAR(std::stod(g[col("p_max")]), rec.p_max, 1e-8) << k;
    EXPECT_EQ(g[col("certified")] == "1", rec.certified) << k;
    EXPECT_EQ(g[col("nogo")] == "1", rec.nogo) << k;
    EXPECT_EQ(std::stoi(g[col("rank_Pm")]), rec.rank_Pm) << k;
    EXPECT_EQ(std::stoi(g[col("rank_C")]), rec.rank_C) << k;
    EXPECT_EQ(g[col("degeneracies")], rec.degeneracies) << k;
  }
}

class ProtocolFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("epp_proto_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(ProtocolFiles, SaveLoadVerifyRoundTrip) {
  auto c = small_config();
  c.gamma_grid = {0.5};
  c.emit_protocols = true;
  c.output_dir = dir_.string();
  const auto result = run_sweep(c);
  write_sweep_outputs(result);
  const auto path = dir_ / "protocols" / "sweep_n2_000.json";
  ASSERT_TRUE(fs::exists(path));
  const auto p = load_protocol(path.string());
  EXPECT_EQ(p.n, 2);
  EXPECT_DOUBLE_EQ(p.gamma, 0.5);
  EXPECT_LT((p.choi.matrix() - result.records[0].choi_star.matrix()).norm(), 1e-15);
  const auto rep = verify_protocol(p, 20000, 4);
  EXPECT_TRUE(rep.passed) << rep.certificate.message;
  EXPECT_NEAR(rep.metrics.fidelity, 21.0 / 26.0, 1e-8);
  EXPECT_NEAR(rep.metrics.probability, 0.8125, 1e-6);

  auto tampered = p;
  tampered.F_max += 1e-4;
  EXPECT_FALSE(verify_protocol(tampered, 0, 4).passed);

  const auto side = dir_ / "sweep.json";
  ASSERT_TRUE(fs::exists(side));
  const auto j = nlohmann::json::parse(std::ifstream(side));
  EXPECT_EQ(j.at("protocol_files").size(), 1u);
}

TEST_F(ProtocolFiles, MalformedFilesAreConfigErrors) {
  EXPECT_THROW(load_protocol((dir_ / "missing.json").string()), ConfigError);
  const auto junk = dir_ / "junk.json";
  std::ofstream(junk) << "{\"format\": ";
  EXPECT_THROW(load_protocol(junk.string()), ConfigError);
  std::ofstream(junk) << "{\"d\": 2}";
  EXPECT_THROW(load_protocol(junk.string()), ConfigError);
  std::ofstream(junk) << R"({"format": "epp-protocol-v1", "d": 2, "n": 2, "gamma": 0.5,
    "system_dims": [2, 2], "hamiltonian": {"rows": 2, "cols": 2, "re": [0,0,0,0], "im": [0,0,0,0]}})";
  EXPECT_THROW(load_protocol(junk.string()), ConfigError);
}

TEST(ProtocolJson, BatteryFieldsSurvive) {
  ProtocolFile p;
  p.d = 2;
  p.n = 2;
  p.gamma = 0.5;
  p.hamiltonian = ising_all_to_all(2, -0.5, -0.3);
  p.choi = ComplexOperator::zero(SubsystemSpace{2, 2, 2, 2, 2, 2});
  p.dual_y = Matrix::Identity(4, 4);
  p.battery_state = ComplexOperator::identity(SubsystemSpace{2}) * Complex(0.5);
  p.joint_hamiltonian = ComplexOperator::identity(SubsystemSpace{2, 2, 2});
  const auto back = ProtocolFile::from_json(nlohmann::json::parse(p.to_json().dump()));
  ASSERT_TRUE(back.battery_state.has_value());
  ASSERT_TRUE(back.joint_hamiltonian.has_value());
  EXPECT_EQ(back.battery_state->matrix(), p.battery_state->matrix());
  EXPECT_EQ(back.dual_y, p.dual_y);
  EXPECT_EQ(back.choi.space().dims(), p.choi.space().dims());
}

}  // namespace
}  // namespace epp
