#include <catch2/catch_amalgamated.hpp>

#include <charconv>
#include <cmath>
#include <sstream>
#include <system_error>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfikit/scenario.hpp"

using namespace qfikit;
using namespace qfikit::scenario;
using nlohmann::json;

namespace {

json qubit_doc() {
  return json{{"family",
               {{"kind", "qubit_exponential"},
                {"parameters", {{"gamma0", std::atanh(0.5)}, {"gamma_dot", 1.0}}}}},
              {"theta", 0.0},
              {"method", "eigenbasis"}};
}

json thermal_doc() {
  return json{{"family", {{"kind", "single_mode_gaussian"}, {"estimate", "nbar"}}},
              {"theta", 1.0},
              {"method", "moments"}};
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("parse_scenario: defaults and basic fields") {
  const Scenario s = parse_scenario(qubit_doc());
  REQUIRE(s.theta == 0.0);
  REQUIRE(s.method == "eigenbasis");
  REQUIRE(s.fd_step == 1e-5);
  REQUIRE(s.fock_dim == 80);
  REQUIRE(s.series_order == 40);
  REQUIRE(s.trials == 1);
  REQUIRE(s.outputs == std::vector<std::string>{"qfi", "residuals"});
  REQUIRE_FALSE(s.sweep.has_value());
  REQUIRE(s.family.kind() == families::Kind::QubitExponential);
}

TEST_CASE("parse_scenario: validation failures") {
  SECTION("unknown family kind") {
    json doc = qubit_doc();
    doc["family"]["kind"] = "qutrit";
    REQUIRE_THROWS_AS(parse_scenario(doc), ArgumentError);
  }

  SECTION("unknown method") {
    json doc = qubit_doc();
    doc["method"] = "magic";
    REQUIRE_THROWS_AS(parse_scenario(doc), ArgumentError);
  }

  SECTION("method/representation mismatches") {
    json doc = qubit_doc();
    doc["method"] = "moments";
    REQUIRE_THROWS_AS(parse_scenario(doc), ArgumentError);

    json gauss = thermal_doc();
    gauss["method"] = "eigenbasis";
    REQUIRE_THROWS_AS(parse_scenario(gauss), ArgumentError);

    json tms = json{{"family",
                     {{"kind", "two_mode_squeezed"}, {"parameters", {{"nbar", 0.2}}}}},
                    {"theta", 0.3},
                    {"method", "fock_oracle"}};
    REQUIRE_THROWS_AS(parse_scenario(tms), ArgumentError);
  }

  SECTION("sweep needs at least two points") {
    json doc = thermal_doc();
    doc["sweep"] = {{"from", 0.5}, {"to", 4.0}, {"steps", 1}};
    REQUIRE_THROWS_AS(parse_scenario(doc), ArgumentError);
    doc["sweep"]["steps"] = 2;
    REQUIRE_NOTHROW(parse_scenario(doc));
  }

  SECTION("sweep parameter name is checked") {
    json doc = thermal_doc();
    doc["sweep"] = {{"param", "foo"}, {"from", 0.5}, {"to", 4.0}, {"steps", 3}};
    REQUIRE_THROWS_AS(parse_scenario(doc), ArgumentError);
    doc["sweep"]["param"] = "theta";
    REQUIRE_NOTHROW(parse_scenario(doc));
  }

  SECTION("sweeps do not combine with crosscheck") {
    json doc = thermal_doc();
    doc["method"] = "crosscheck";
    doc["sweep"] = {{"from", 0.5}, {"to", 4.0}, {"steps", 3}};
    REQUIRE_THROWS_AS(parse_scenario(doc), ArgumentError);
  }

  SECTION("schema version must be the published one") {
    json doc = qubit_doc();
    doc["schema_version"] = "2";
    REQUIRE_THROWS_AS(parse_scenario(doc), ArgumentError);
    doc["schema_version"] = "1";
    REQUIRE_NOTHROW(parse_scenario(doc));
  }

  SECTION("numeric knobs are range-checked") {
    json doc = qubit_doc();
    doc["fd_step"] = 0.0;
    REQUIRE_THROWS_AS(parse_scenario(doc), ArgumentError);

    json doc2 = qubit_doc();
    doc2["series_order"] = 61;
    REQUIRE_THROWS_AS(parse_scenario(doc2), ArgumentError);

    json doc3 = qubit_doc();
    doc3["outputs"] = {"qfi", "entropy"};
    REQUIRE_THROWS_AS(parse_scenario(doc3), ArgumentError);
  }
}

TEST_CASE("run_compute: qubit eigenbasis record") {
  Scenario s = parse_scenario(qubit_doc());
  s.outputs = {"qfi", "sld", "residuals", "crb"};
  s.trials = 75;
  const ComputeOutcome out = run_compute(s);
  REQUIRE(out.crosscheck_pass);

  const json& rec = out.record;
  REQUIRE(rec.at("schema_version") == "1");
  REQUIRE(rec.at("theta") == 0.0);
  REQUIRE(rec.at("method") == "eigenbasis");
  REQUIRE(rec.at("qfi").get<double>() == Catch::Approx(0.75).margin(1e-12));
  REQUIRE(rec.at("crb").get<double>() == Catch::Approx(1.0 / (75.0 * 0.75)).epsilon(1e-12));
  REQUIRE(rec.contains("timing_ms"));

  // Finite-dimensional SLD serializes as an [re, im] entry matrix.
  const json& sld = rec.at("sld");
  REQUIRE(sld.is_array());
  REQUIRE(sld.size() == 2);
  REQUIRE(sld[0].size() == 2);
  REQUIRE(sld[0][0].size() == 2);

  const json& res = rec.at("residuals");
  REQUIRE(res.at("defining_eq").get<double>() < 1e-10);
  REQUIRE(res.at("mean_zero").get<double>() < 1e-10);
}

TEST_CASE("run_compute: Gaussian record carries the quadratic SLD") {
  Scenario s = parse_scenario(thermal_doc());
  s.outputs = {"qfi", "sld", "residuals"};
  const ComputeOutcome out = run_compute(s);
  const json& rec = out.record;
  REQUIRE(rec.at("qfi").get<double>() == Catch::Approx(0.5).margin(1e-10));
  REQUIRE(rec.at("sld").contains("phi"));
  REQUIRE(rec.at("sld").contains("zeta"));
  REQUIRE(rec.at("sld").contains("nu"));
  // Phi = 0.25 I for nbar = 1.
  REQUIRE(rec.at("sld").at("phi")[0][0].get<double>() == Catch::Approx(0.25).margin(1e-10));
  REQUIRE(rec.at("residuals").at("gamma_eq").get<double>() < 1e-10);
}

TEST_CASE("result records round-trip bit-identically through text") {
  Scenario s = parse_scenario(qubit_doc());
  const ComputeOutcome out = run_compute(s);
  const std::string text = out.record.dump(2);
  const json parsed = json::parse(text);
  const double a = out.record.at("qfi").get<double>();
  const double b = parsed.at("qfi").get<double>();
  REQUIRE(a == b);  // exact, not approximate

  // format_double emits shortest round-trip forms (from_chars, unlike stod,
  // accepts subnormals without raising a range error).
  for (double v : {0.75, 1.0 / 3.0, 2.7621956910836314, 1e-300, -0.0, 4.9e-324}) {
    const std::string text_v = format_double(v);
    double back = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text_v.data(), text_v.data() + text_v.size(), back);
    REQUIRE(ec == std::errc());
    REQUIRE(ptr == text_v.data() + text_v.size());
    REQUIRE(back == v);
  }
  REQUIRE(format_double(0.75) == "0.75");
  REQUIRE(format_double(2.0) == "2");
}

TEST_CASE("run_compute: crosscheck across all applicable routes") {
  json doc = thermal_doc();
  doc["method"] = "crosscheck";
  const Scenario s = parse_scenario(doc);
  const ComputeOutcome out = run_compute(s);
  REQUIRE(out.crosscheck_pass);

  const json& cc = out.record.at("crosscheck");
  const json& methods = cc.at("methods");
  REQUIRE(methods.contains("moments"));
  REQUIRE(methods.contains("generator"));
  REQUIRE(methods.contains("fock_oracle"));
  for (const auto& [name, value] : methods.items()) {
    REQUIRE(value.get<double>() == Catch::Approx(0.5).margin(1e-5));
  }
  REQUIRE(cc.at("tolerance").get<double>() == 1e-5);
  REQUIRE(cc.at("max_rel_spread").get<double>() < 1e-5);
  REQUIRE(cc.at("pass").get<bool>());
}

TEST_CASE("run_compute: crosscheck on a finite family uses the tight tolerance") {
  json params = json::object();
  params["g0"] = json::array({json::array({json::array({0.4, 0.0}),
                                           json::array({0.1, 0.05})}),
                              json::array({json::array({0.1, -0.05}),
                                           json::array({-0.9, 0.0})})});
  params["g1"] = json::array({json::array({json::array({0.3, 0.0}),
                                           json::array({0.0, 0.2})}),
                              json::array({json::array({0.0, -0.2}),
                                           json::array({-0.3, 0.0})})});
  json doc = json{{"family", {{"kind", "explicit_exponential"}, {"parameters", params}}},
                  {"theta", 0.1},
                  {"method", "crosscheck"},
                  {"fock_dim", 2}};
  const Scenario s = parse_scenario(doc);
  const ComputeOutcome out = run_compute(s);
  const json& cc = out.record.at("crosscheck");
  REQUIRE(cc.at("methods").contains("eigenbasis"));
  REQUIRE(cc.at("methods").contains("series"));
  // The Fock oracle for a two-level family is the family itself; its
  // finite-difference error dominates the 1e-5 budget but not more.
  REQUIRE(cc.at("tolerance").get<double>() == 1e-5);
  REQUIRE(out.crosscheck_pass);
}

TEST_CASE("run_sweep_csv: thermal occupation sweep") {
  json doc = thermal_doc();
  doc.erase("theta");
  doc["sweep"] = {{"from", 0.5}, {"to", 4.0}, {"steps", 8}};
  const Scenario s = parse_scenario(doc);
  const std::string csv = run_sweep_csv(s);
  const std::vector<std::string> lines = split_lines(csv);
  REQUIRE(lines.size() == 9);
  REQUIRE(lines[0] == "theta,qfi,residual_max,method");

  for (int k = 0; k < 8; ++k) {
    const std::string& row = lines[1 + k];
    std::istringstream cells(row);
    std::string theta_s, qfi_s, resid_s, method_s;
    std::getline(cells, theta_s, ',');
    std::getline(cells, qfi_s, ',');
    std::getline(cells, resid_s, ',');
    std::getline(cells, method_s);
    const double theta = 0.5 + 3.5 * k / 7.0;
    REQUIRE(std::stod(theta_s) == Catch::Approx(theta).margin(1e-12));
    REQUIRE(std::stod(qfi_s) ==
            Catch::Approx(1.0 / (theta * (theta + 1.0))).epsilon(1e-6));
    REQUIRE(std::stod(resid_s) < 1e-9);
    REQUIRE(method_s == "moments");
  }
}

TEST_CASE("run_sweep_csv: failing point reports its theta") {
  json doc = json{{"family", {{"kind", "single_mode_gaussian"}, {"estimate", "epsilon"}}},
                  {"method", "moments"},
                  {"sweep", {{"from", -0.5}, {"to", 1.0}, {"steps", 4}}}};
  const Scenario s = parse_scenario(doc);
  REQUIRE_THROWS_WITH(run_sweep_csv(s),
                      Catch::Matchers::ContainsSubstring("sweep point theta="));
  REQUIRE_THROWS_AS(run_sweep_csv(s), DomainError);
}

TEST_CASE("auto method resolves by representation") {
  json doc = qubit_doc();
  doc.erase("method");
  const ComputeOutcome finite = run_compute(parse_scenario(doc));
  REQUIRE(finite.record.at("method") == "eigenbasis");

  json gauss = thermal_doc();
  gauss.erase("method");
  const ComputeOutcome g = run_compute(parse_scenario(gauss));
  REQUIRE(g.record.at("method") == "moments");
}
