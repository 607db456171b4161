#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "velling/harness.hpp"
#include "velling/svg.hpp"

using namespace velling;

TEST_CASE("random_partition is deterministic and respects bounds") {
  for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
    const ArcPartition a = random_partition(5, 0.1, seed, 1.0);
    const ArcPartition b = random_partition(5, 0.1, seed, 1.0);
    REQUIRE(a.size() == 5);
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a.arcs[k].half_opening == b.arcs[k].half_opening);
      CHECK(a.arcs[k].half_opening >= 0.1);
      CHECK(a.arcs[k].half_opening <= 1.0);
      sum += a.arcs[k].half_opening;
    }
    CHECK(sum == doctest::Approx(kPi).epsilon(1e-12));
    // index 0 carries the longest arc after normalization
    for (std::size_t k = 1; k < a.size(); ++k)
      CHECK(a.arcs[k].half_opening <= a.arcs[0].half_opening + 1e-15);
  }
  CHECK(random_partition(4, 0.1, 7).arcs[0].half_opening !=
        random_partition(4, 0.1, 8).arcs[0].half_opening);
}

TEST_CASE("random_partition rejects infeasible bounds") {
  CHECK_THROWS_AS(random_partition(2, 0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_partition(3, 1.2, 1), std::invalid_argument);  // 3*1.2 > pi
  CHECK_THROWS_AS(random_partition(4, 0.1, 1, 0.2), std::invalid_argument);  // 4*0.2 < pi
  // feasible but measure-zero-thin window: the rejection cap trips
  CHECK_THROWS_AS(random_partition(4, kPi / 4 - 1e-9, 1, kPi / 4 + 1e-9),
                  std::runtime_error);
}

TEST_CASE("suite_checks expands and orders check names") {
  const auto all = suite_checks({"all"});
  REQUIRE(all.size() == 8);
  CHECK(all.front() == "selftest");
  CHECK(std::find(all.begin(), all.end(), "theorem") != all.end());
  CHECK(std::find(all.begin(), all.end(), "comparison") != all.end());
  const auto one = suite_checks({"flux"});
  REQUIRE(one.size() == 1);
  CHECK(one[0] == "flux");
  const auto dedup = suite_checks({"theorem", "theorem", "corollary"});
  CHECK(dedup.size() == 2);
  CHECK(suite_checks({"solver-selftest"}) == std::vector<std::string>{"selftest"});
}

TEST_CASE("config JSON round trip") {
  ExperimentConfig cfg;
  cfg.suites = {"theorem", "corollary"};
  cfg.openings = {{1.2, 0.7, 0.7, kPi - 2.6}};
  RandomSpec rs;
  rs.count = 3;
  rs.min_arcs = 4;
  rs.max_arcs = 6;
  rs.max_opening = 0.9;
  rs.seed = 123;
  cfg.random = rs;
  cfg.solver.n = 5000;
  cfg.solver.h = 1.0 / 64;
  cfg.solver.seed = 77;
  cfg.workers = 2;
  cfg.out_dir = "/tmp/somewhere";
  cfg.render = true;

  const ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
  CHECK(back.suites == cfg.suites);
  REQUIRE(back.openings.size() == 1);
  CHECK(back.openings[0][0] == cfg.openings[0][0]);
  REQUIRE(back.random.has_value());
  CHECK(back.random->count == 3);
  CHECK(back.random->max_opening == 0.9);
  CHECK(back.random->seed == 123);
  CHECK(back.solver.n == 5000);
  CHECK(back.solver.h == cfg.solver.h);
  CHECK(back.solver.seed == 77);
  CHECK(back.workers == 2);
  CHECK(back.out_dir == cfg.out_dir);
  CHECK(back.render == true);
}

TEST_CASE("config validation flags bad input") {
  ExperimentConfig cfg;
  cfg.suites = {"not-a-suite"};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.suites = {"theorem"};
  cfg.solver.h = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.solver.h = 1.0 / 64;
  CHECK_NOTHROW(cfg.validate());
  CHECK_THROWS_AS(ExperimentConfig::from_json("{ nope"), std::exception);
}

TEST_CASE("solver self-test suite passes at modest resolution") {
  ExperimentConfig cfg;
  cfg.suites = {"solver-selftest"};
  cfg.solver.n = 50'000;
  cfg.solver.h = 1.0 / 64;
  const auto rows = run_suite(cfg);
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CAPTURE(r.check);
    CHECK(r.instance_id == -1);
    CHECK(r.error.empty());
    CHECK(r.passed);
  }
  CHECK(all_passed(rows));
}

TEST_CASE("CSV report has the fixed schema and is reproducible") {
  ExperimentConfig cfg;
  cfg.suites = {"corollary"};
  cfg.openings = {{1.2, 0.7, 0.7, kPi - 2.6}, {kPi / 3, kPi / 3, kPi / 3}};
  cfg.solver.n = 20'000;
  const auto rows = run_suite(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].instance_id == 0);
  CHECK(rows[1].instance_id == 1);
  CHECK(rows[1].omega0 == doctest::Approx(1.0 / 3));

  const std::string csv = to_csv(rows);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "instance_id,n_arcs,openings,check,omega0,value,std_error,margin,passed,"
        "seed,runtime_s");

  // identical modulo runtimes on a rerun
  const auto again = run_suite(cfg);
  REQUIRE(again.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(again[i].value == rows[i].value);
    CHECK(again[i].std_error == rows[i].std_error);
    CHECK(again[i].margin == rows[i].margin);
    CHECK(again[i].seed == rows[i].seed);
  }
}

TEST_CASE("worker count does not change results") {
  ExperimentConfig cfg;
  cfg.suites = {"theorem"};
  cfg.openings = {{1.2, 0.7, 0.7, kPi - 2.6}, {1.1, 0.9, 0.6, kPi - 2.6},
                  {1.4, 0.9, kPi - 2.3}};
  cfg.solver.n = 20'000;
  cfg.solver.h = 1.0 / 64;
  const auto serial = run_suite(cfg);
  cfg.workers = 3;
  const auto parallel = run_suite(cfg);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].instance_id == parallel[i].instance_id);
    CHECK(serial[i].value == parallel[i].value);
    CHECK(serial[i].margin == parallel[i].margin);
  }
}

TEST_CASE("random batches derive per-instance partitions from the source seed") {
  ExperimentConfig cfg;
  cfg.suites = {"corollary"};
  RandomSpec rs;
  rs.count = 4;
  rs.min_arcs = 3;
  rs.max_arcs = 5;
  rs.seed = 9;
  cfg.random = rs;
  cfg.solver.n = 10'000;
  const auto rows = run_suite(cfg);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.openings.size() >= 3);
    CHECK(r.openings.size() <= 5);
    CHECK(r.error.empty());
  }
  // distinct instances get distinct partitions
  CHECK(rows[0].openings != rows[1].openings);
  const auto again = run_suite(cfg);
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(rows[i].openings == again[i].openings);
}

TEST_CASE("JSON report carries config and per-row quantities") {
  ExperimentConfig cfg;
  cfg.suites = {"corollary"};
  cfg.openings = {{kPi / 3, kPi / 3, kPi / 3}};
  cfg.solver.n = 10'000;
  const auto rows = run_suite(cfg);
  const std::string text = report_json(cfg, rows);
  CHECK(text.find("\"corollary\"") != std::string::npos);
  CHECK(text.find("side_measure_wos") != std::string::npos);
  CHECK(text.find("\"passed\"") != std::string::npos);
}

TEST_CASE("SVG rendering is deterministic") {
  const ArcPartition p = make_partition({1.2, 0.7, 0.7, kPi - 2.6});
  const auto inst = VellingInstance::make(p, PolarArc::geodesic_graph(p.alpha0()));
  const std::string a = render_svg(inst, nullptr);
  const std::string b = render_svg(inst, nullptr);
  CHECK(a == b);
  CHECK(a.rfind("<svg", 0) == 0);
  CHECK(a.find("</svg>") != std::string::npos);
}
