#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>

#include "logconc/errors.hpp"
#include "logconc/io.hpp"
#include "logconc/pushforward.hpp"
#include "testutil.hpp"

using namespace logconc;

TEST_CASE("seventeen significant digits reproduce doubles exactly") {
  for (double v :
       {1.0 / 3.0, 0.1, -2460.375, 1e-300, 1.7976931348623157e308,
        4.9406564584124654e-324, 0.0, std::sqrt(2.0)}) {
    // strtod, not stod: stod signals subnormal results as out_of_range.
    CHECK(std::strtod(format_g17(v).c_str(), nullptr) == v);
  }
  CHECK(format_g17(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("json string escaping") {
  CHECK(json_escape("plain") == "plain");
  CHECK(json_escape("a\"b") == "a\\\"b");
  CHECK(json_escape("a\\b") == "a\\\\b");
  CHECK(json_escape("a\nb") == "a\\nb");
}

TEST_CASE("measures from json") {
  LogConcaveMeasure g = measure_from_json(R"({"family":"gaussian","dim":2})");
  CHECK(g.family() == Family::Gaussian);
  CHECK(g.dim() == 2);

  LogConcaveMeasure gm = measure_from_json(
      R"({"family":"gaussian","mean":[1,0],"cov":[[2,0],[0,1]]})");
  CHECK(gm.gaussian_mean()[0] == doctest::Approx(1.0));
  CHECK(gm.gaussian_cov()(0, 0) == doctest::Approx(2.0));

  LogConcaveMeasure box = measure_from_json(
      R"({"family":"uniform_box","dim":1,"side":3.4641016151377544})");
  CHECK(box.family() == Family::UniformBox);
  CHECK(box.analytic_cov()(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  LogConcaveMeasure ball = measure_from_json(
      R"({"family":"uniform_ball","dim":2,"radius":1})");
  CHECK(ball.family() == Family::UniformBall);

  LogConcaveMeasure pe = measure_from_json(
      R"({"family":"product_exponential","rates":[1,2]})");
  CHECK(pe.dim() == 2);

  CHECK_THROWS_AS(measure_from_json(R"({"family":"nope","dim":1})"),
                  config_error);
  CHECK_THROWS_AS(measure_from_json(R"({"family":"custom","dim":1})"),
                  config_error);
  CHECK_THROWS_AS(measure_from_json("not json at all"), config_error);
  CHECK_THROWS_AS(measure_from_json(R"({"dim":1})"), config_error);
}

TEST_CASE("density csv round trip") {
  Density1D chi = analytic_density("chi2_1");
  std::stringstream ss;
  write_density_csv(ss, chi);
  Density1D back = read_density_csv(ss);

  CHECK(back.left == chi.left);
  CHECK(back.step == chi.step);
  REQUIRE(back.values.size() == chi.values.size());
  for (std::size_t i = 0; i < chi.values.size(); ++i)
    CHECK(back.values[i] == chi.values[i]);
  CHECK(back.support_lo == chi.support_lo);
  CHECK(back.support_hi == chi.support_hi);
  CHECK(back.head_mass == chi.head_mass);
  CHECK(back.tail_mass == chi.tail_mass);
  CHECK(back.source == chi.source);
  REQUIRE(back.singular_points.size() == chi.singular_points.size());
  for (std::size_t i = 0; i < chi.singular_points.size(); ++i) {
    CHECK(back.singular_points[i] == chi.singular_points[i]);
    CHECK(back.singular_powers[i] == chi.singular_powers[i]);
  }
  // The exact evaluator is a function, not data: it cannot survive.  The
  // reread grid integrates by trapezoid, which overshoots near the root
  // singularity by O(step * first-node value).
  CHECK(!back.exact);
  CHECK(back.mass() == doctest::Approx(chi.mass()).epsilon(5e-3));
}

TEST_CASE("density csv validation") {
  std::stringstream empty("");
  CHECK_THROWS_AS(read_density_csv(empty), config_error);
  std::stringstream garbage("# left: 0\n# step: nofloat\n1,2\n");
  CHECK_THROWS_AS(read_density_csv(garbage), config_error);
}

TEST_CASE("samples csv layout") {
  Eigen::MatrixXd pts(2, 3);
  pts << 1.0, 2.0, 3.0, 4.0, 5.0, 1.0 / 3.0;
  std::stringstream ss;
  write_samples_csv(ss, pts);
  std::string line;
  std::getline(ss, line);  // dim header
  CHECK(line == "# dim: 3");
  std::getline(ss, line);  // count header
  CHECK(line == "# count: 2");
  std::getline(ss, line);
  CHECK(line == format_g17(1.0) + "," + format_g17(2.0) + "," +
                    format_g17(3.0));
  std::getline(ss, line);
  auto pos = line.rfind(',');
  CHECK(std::stod(line.substr(pos + 1)) == 1.0 / 3.0);
}

TEST_CASE("report serialization") {
  InequalityReport rep;
  rep.id = "demo";
  rep.criterion = "a \"quoted\" criterion";
  rep.engine = "quadrature";
  rep.params["f"] = "x1^2";
  rep.series["h"] = {0.5, 1.0 / 3.0};
  rep.scalars["c_hat"] = std::sqrt(2.0);
  rep.constant = 1.25;
  rep.slope = 0.5;
  rep.pass = true;
  rep.warnings.push_back("w1");
  rep.seed = 42;
  rep.samples = 1000;
  rep.runtime_sec = 3.25;

  std::string det = reports_to_json({rep}, true);
  std::string timed = reports_to_json({rep}, false);
  CHECK(det.find("runtime_sec") == std::string::npos);
  CHECK(timed.find("runtime_sec") != std::string::npos);

  auto arr = nlohmann::json::parse(det);
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 1);
  const auto& j = arr[0];
  CHECK(j.at("id") == "demo");
  CHECK(j.at("engine") == "quadrature");
  CHECK(j.at("pass") == true);
  CHECK(j.at("constant").get<double>() == 1.25);
  CHECK(j.at("scalars").at("c_hat").get<double>() == std::sqrt(2.0));
  CHECK(j.at("series").at("h")[1].get<double>() == 1.0 / 3.0);
  CHECK(j.at("params").at("f") == "x1^2");
  CHECK(j.at("warnings")[0] == "w1");
  CHECK(j.at("criterion") == "a \"quoted\" criterion");
  CHECK(j.at("seed").get<std::uint64_t>() == 42);

  auto jt = nlohmann::json::parse(timed);
  CHECK(jt[0].at("runtime_sec").get<double>() == 3.25);
}
