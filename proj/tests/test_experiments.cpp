#include "doctest.h"

#include "ratlab/experiments.hpp"
#include "ratlab/io.hpp"

using namespace ratlab;

TEST_CASE("experiment registry and config validation") {
  CHECK(experimentExists("rho2-markov"));
  CHECK(!experimentExists("nonsense"));
  ExperimentConfig bad;
  bad.name = "nonsense";
  CHECK_THROWS_AS(runExperiment(bad), Error);
  ExperimentConfig badkey;
  badkey.name = "abs-x";
  badkey.params["bogus"] = "1";
  CHECK_THROWS_AS(runExperiment(badkey), Error);
}

TEST_CASE("config hash changes with parameters") {
  ExperimentConfig a, b;
  a.name = b.name = "rho2-markov";
  a.params["n_max"] = "8";
  b.params["n_max"] = "12";
  CHECK(a.hash() != b.hash());
  ExperimentConfig c = a;
  CHECK(c.hash() == a.hash());
}

TEST_CASE("reduced rho2-markov run is byte-identical across reruns") {
  ExperimentConfig cfg;
  cfg.name = "rho2-markov";
  cfg.params["n_min"] = "4";
  cfg.params["n_max"] = "8";
  cfg.precision_bits = 256;
  auto r1 = runExperiment(cfg);
  auto r2 = runExperiment(cfg);
  CHECK(r1.summary == r2.summary);
  REQUIRE(r1.tables.size() == r2.tables.size());
  for (size_t i = 0; i < r1.tables.size(); ++i) {
    CHECK(r1.tables[i].first == r2.tables[i].first);
    CHECK(r1.tables[i].second == r2.tables[i].second);
  }
  // the resolved config is embedded in the emitted table
  CHECK(r1.tables[0].second.find("rho2-markov") != std::string::npos);
}

TEST_CASE("reduced abs-x run is byte-identical across reruns") {
  ExperimentConfig cfg;
  cfg.name = "abs-x";
  cfg.params["n_min"] = "4";
  cfg.params["n_max"] = "6";
  cfg.precision_bits = 256;
  auto r1 = runExperiment(cfg);
  auto r2 = runExperiment(cfg);
  CHECK(r1.summary == r2.summary);
  CHECK(r1.tables == r2.tables);
}
