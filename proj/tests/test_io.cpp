#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "survmc/fit.hpp"

using namespace survmc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("survmc_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("csv round trip and parsing errors") {
  TempDir tmp;
  const std::string path = tmp.file("t.csv");
  write_csv(path, {"a", "b"}, {{"1", "x"}, {"2.5", "y,z"}});
  // commas inside cells are not quoted by our writer; rewrite by hand
  write_text(path, "a,b\n1,x\n2.5,\"y,z\"\n");
  const CsvTable t = read_csv(path);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.n_rows() == 2);
  CHECK(t.rows[1][1] == "y,z");
  CHECK(t.number(1, 0) == 2.5);
  CHECK(t.column("b") == 1);
  CHECK(t.has_column("a"));
  CHECK(!t.has_column("c"));
  CHECK_THROWS_AS(t.column("c"), std::runtime_error);
  CHECK_THROWS_AS(t.number(0, 1), std::runtime_error);

  write_text(path, "");
  CHECK_THROWS_AS(read_csv(path), std::runtime_error);
  write_text(path, "a,b\n1\n");
  CHECK_THROWS_AS(read_csv(path), std::runtime_error);
  CHECK_THROWS_AS(read_csv(tmp.file("missing.csv")), std::runtime_error);
}

TEST_CASE("dataset ingestion with delta mapping, factors and standardization") {
  TempDir tmp;
  const std::string path = tmp.file("d.csv");
  write_text(path,
             "time,delta,age,stage\n"
             "0.6,1,77,1\n"
             "1.3,0,53,2\n"
             "2.4,1,45,3\n"
             "5.0,1,57,2\n");
  ColumnBindings b;
  b.time = "time";
  b.censor = "delta";
  b.covariates = {"age"};
  b.standardize = {"age"};
  b.factors = {"stage"};
  const SurvivalDataset data = load_dataset(path, b, Family::Aft);
  REQUIRE(data.n() == 4);
  CHECK(data.observations[0].kind == CensorKind::Exact);
  CHECK(data.observations[0].t == 0.6);
  CHECK(data.observations[1].kind == CensorKind::Right);
  CHECK(data.observations[1].c_lower == 1.3);

  // intercept + age + stage_2 + stage_3
  REQUIRE(data.design.n_cols == 4);
  CHECK(data.design.column_names[0] == "intercept");
  CHECK(data.design.column_names[2] == "stage_2");
  CHECK(data.design(1, 2) == 1.0);  // row 2 has stage 2
  CHECK(data.design(0, 2) == 0.0);  // reference level drops out
  CHECK(data.design(2, 3) == 1.0);

  // standardized age has mean 0 and unit sample variance
  double mean = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < 4; ++i) mean += data.design(i, 1);
  mean /= 4.0;
  for (std::size_t i = 0; i < 4; ++i)
    ss += (data.design(i, 1) - mean) * (data.design(i, 1) - mean);
  CHECK(mean == doctest::Approx(0.0));
  CHECK(ss / 3.0 == doctest::Approx(1.0));
}

TEST_CASE("ingestion errors") {
  TempDir tmp;
  const std::string path = tmp.file("bad.csv");
  write_text(path, "time,delta\n");
  ColumnBindings b;
  b.censor = "delta";
  CHECK_THROWS_AS(load_dataset(path, b, Family::Aft), std::runtime_error);

  write_text(path, "time,delta\n1.0,2\n");
  CHECK_THROWS_AS(load_dataset(path, b, Family::Aft), std::runtime_error);

  write_text(path, "time,delta\nx,1\n");
  CHECK_THROWS_AS(load_dataset(path, b, Family::Aft), std::runtime_error);

  write_text(path, "time,delta\n-1.0,1\n");
  CHECK_THROWS_AS(load_dataset(path, b, Family::Aft), std::invalid_argument);
}

TEST_CASE("frailty groups are assigned by first appearance") {
  TempDir tmp;
  const std::string path = tmp.file("k.csv");
  write_text(path,
             "time,delta,id,x\n"
             "8,1,p1,0.1\n"
             "16,1,p1,0.1\n"
             "23,1,p2,-0.3\n"
             "13,0,p2,-0.3\n");
  ColumnBindings b;
  b.censor = "delta";
  b.group = "id";
  b.covariates = {"x"};
  const SurvivalDataset data = load_dataset(path, b, Family::Frailty);
  CHECK(data.n_groups() == 2);
  CHECK(data.group == std::vector<int>{0, 0, 1, 1});
  CHECK(data.design.n_cols == 2);  // intercept + x
}

TEST_CASE("competing-risks and illness-death ingestion") {
  TempDir tmp;
  const std::string cr = tmp.file("cr.csv");
  write_text(cr, "time,cause,x\n1.0,1,0.2\n2.0,0,0.1\n1.5,2,-0.4\n");
  ColumnBindings bcr;
  bcr.event = "cause";
  bcr.covariates = {"x"};
  const SurvivalDataset dcr = load_dataset(cr, bcr, Family::CompetingRisks);
  CHECK(dcr.observations[0].event_label == 1);
  CHECK(dcr.observations[1].kind == CensorKind::Right);
  CHECK(dcr.observations[2].event_label == 2);

  const std::string id_path = tmp.file("id.csv");
  write_text(id_path,
             "t1,t2,t3,e1,e2,e3,x\n"
             "1.0,1.0,0.5,1,0,1,0.3\n"
             "2.0,2.0,0.0001,0,0,0,-0.2\n");
  ColumnBindings bid;
  bid.t1 = "t1";
  bid.t2 = "t2";
  bid.t3 = "t3";
  bid.e1 = "e1";
  bid.e2 = "e2";
  bid.e3 = "e3";
  bid.covariates = {"x"};
  const SurvivalDataset did = load_dataset(id_path, bid, Family::IllnessDeath);
  REQUIRE(did.multistate.size() == 2);
  CHECK(did.multistate[0].event[2] == 1);
  CHECK(did.observations[0].kind == CensorKind::Exact);
  CHECK(did.observations[0].t == doctest::Approx(1.5));
  CHECK(did.observations[1].kind == CensorKind::Right);
}

TEST_CASE("joint long-format ingestion groups rows per subject") {
  TempDir tmp;
  const std::string path = tmp.file("j.csv");
  write_text(path,
             "id,time,delta,long_time,long_value,trt\n"
             "s1,3.0,1,0.0,2.2,1\n"
             "s1,3.0,1,1.0,2.6,1\n"
             "s2,4.0,0,0.0,1.9,0\n");
  ColumnBindings b;
  b.censor = "delta";
  b.id = "id";
  b.long_time = "long_time";
  b.long_value = "long_value";
  b.covariates = {"trt"};
  const SurvivalDataset data = load_dataset(path, b, Family::Joint);
  REQUIRE(data.n() == 2);
  CHECK(data.longitudinal[0].size() == 2);
  CHECK(data.longitudinal[1].size() == 1);
  CHECK(data.longitudinal[0][1].value == doctest::Approx(2.6));
  CHECK(data.observations[0].kind == CensorKind::Exact);
  CHECK(data.observations[1].kind == CensorKind::Right);
  CHECK(data.design.n_cols == 2);  // intercept + trt
}

TEST_CASE("samples round trip preserves the summary bit-for-bit") {
  PosteriorSamples samples;
  samples.param_names = {"beta[1]", "alpha"};
  std::mt19937_64 rng(17);
  std::normal_distribution<double> norm(0.0, 1.0);
  samples.draws.resize(2);
  for (auto& chain : samples.draws)
    for (int i = 0; i < 50; ++i) chain.push_back({norm(rng), std::exp(norm(rng))});

  TempDir tmp;
  const std::string path = tmp.file("samples.csv");
  write_samples_csv(path, samples);
  const PosteriorSamples loaded = load_samples(path);
  CHECK(loaded.param_names == samples.param_names);
  REQUIRE(loaded.draws == samples.draws);

  const SummaryTable a = summarize(samples);
  const SummaryTable c = summarize(loaded);
  REQUIRE(a.rows.size() == c.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].mean == c.rows[i].mean);
    CHECK(a.rows[i].sd == c.rows[i].sd);
    CHECK(a.rows[i].time_series_se == c.rows[i].time_series_se);
    CHECK(a.rows[i].q2_5 == c.rows[i].q2_5);
    CHECK(a.rows[i].q97_5 == c.rows[i].q97_5);
  }
}

TEST_CASE("fit config parsing and validation") {
  TempDir tmp;
  const std::string data_path = tmp.file("d.csv");
  write_text(data_path, "time,delta,x\n1.0,1,0.5\n2.0,0,-0.5\n");
  const std::string cfg_path = tmp.file("cfg.json");
  write_text(cfg_path, R"({
    "family": "ph",
    "data": "d.csv",
    "bindings": {"time": "time", "censor": "delta", "covariates": ["x"]},
    "partition": {"intervals": 3, "t_max": 2.0},
    "priors": {"lambda[1]": {"kind": "gamma", "shape": 0.5, "rate": 0.5}},
    "chains": {"chains": 2, "burnin": 100, "iter": 400, "thin": 2, "seed": 11},
    "psrf_threshold": 1.2,
    "strict": true
  })");
  const FitConfig cfg = parse_fit_config(cfg_path);
  CHECK(cfg.model.family == Family::PhPiecewise);
  CHECK(cfg.model.partition.n_intervals() == 3);
  CHECK(cfg.chains.n_chains == 2);
  CHECK(cfg.chains.seed == 11);
  CHECK(cfg.psrf_threshold == 1.2);
  CHECK(cfg.strict);
  CHECK(cfg.model.prior_overrides.count("lambda[1]") == 1);
  // relative data path resolves against the config location
  CHECK(fs::path(cfg.data_path).parent_path() == tmp.path);

  const std::string bad = tmp.file("bad.json");
  write_text(bad, R"({"family": "nope", "data": "d.csv"})");
  CHECK_THROWS(parse_fit_config(bad));
  write_text(bad, "{ not json");
  CHECK_THROWS_AS(parse_fit_config(bad), std::runtime_error);
}

TEST_CASE("fit writes artifacts and derive round trips") {
  TempDir tmp;
  const std::string data_path = tmp.file("d.csv");
  std::string csv = "time,delta,x\n";
  std::mt19937_64 rng(23);
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution flip(0.5);
  for (int i = 0; i < 60; ++i) {
    const double x = flip(rng) ? 1.0 : 0.0;
    const double t = expo(rng) / std::exp(0.5 * x);
    csv += std::to_string(t) + "," + (t < 2.0 ? "1" : "0") + "," +
           std::to_string(x) + "\n";
  }
  write_text(data_path, csv);

  const std::string cfg_path = tmp.file("cfg.json");
  write_text(cfg_path, R"({
    "family": "ph",
    "data": "d.csv",
    "bindings": {"time": "time", "censor": "delta", "covariates": ["x"]},
    "partition": {"knots": [0.0, 20.0]},
    "chains": {"chains": 2, "burnin": 200, "iter": 2000, "thin": 2, "seed": 1}
  })");
  const FitConfig cfg = parse_fit_config(cfg_path);
  const std::string out = tmp.file("out");
  const FitResult result = run_fit(cfg, out);
  CHECK(fs::exists(fs::path(out) / "samples.csv"));
  CHECK(fs::exists(fs::path(out) / "summary.csv"));
  CHECK(fs::exists(fs::path(out) / "diagnostics.csv"));
  CHECK(result.samples.n_kept() == 1000);
  CHECK(result.max_psrf > 0.0);

  // identical seeds give identical artifacts
  const std::string out2 = tmp.file("out2");
  run_fit(cfg, out2);
  std::ifstream f1((fs::path(out) / "samples.csv"));
  std::ifstream f2((fs::path(out2) / "samples.csv"));
  const std::string s1((std::istreambuf_iterator<char>(f1)),
                       std::istreambuf_iterator<char>());
  const std::string s2((std::istreambuf_iterator<char>(f2)),
                       std::istreambuf_iterator<char>());
  CHECK(s1 == s2);

  const PosteriorSamples loaded =
      load_samples((fs::path(out) / "samples.csv").string());
  const std::string req_path = tmp.file("req.json");
  write_text(req_path, R"({"quantity": "hazard_ratio", "x1": [1.0], "x2": [0.0]})");
  const DeriveRequest req = parse_derive_request(req_path);
  derive(loaded, cfg, req, out);
  CHECK(fs::exists(fs::path(out) / "contrast.csv"));
  const CsvTable contrast = read_csv((fs::path(out) / "contrast.csv").string());
  REQUIRE(contrast.n_rows() == 1);
  // exp(beta) around exp(0.5), loosely
  CHECK(contrast.number(0, 1) > 0.5);
  CHECK(contrast.number(0, 1) < 5.0);

  // family mismatch is rejected
  write_text(req_path, R"({"quantity": "cif", "x": [0.0], "times": [1.0]})");
  CHECK_THROWS_AS(derive(loaded, cfg, parse_derive_request(req_path), out),
                  std::runtime_error);
}
