#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qfikit/errors.hpp"
#include "qfikit/expstate.hpp"
#include "qfikit/scenario.hpp"

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) {
    throw qfikit::ArgumentError("cannot open output file '" + path + "'");
  }
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SLD / QFI toolkit for exponential-family and Gaussian states"};
  app.require_subcommand(1);

  double fd_step_override = 0.0;
  int fock_dim_override = 0;
  app.add_option("--fd-step", fd_step_override,
                 "Override the scenario finite-difference step")
      ->check(CLI::PositiveNumber);
  app.add_option("--fock-dim", fock_dim_override,
                 "Override the scenario Fock truncation (>= 2)");

  std::string compute_s, compute_o;
  auto* compute =
      app.add_subcommand("compute", "Run a scenario at its theta; emit a JSON record");
  compute->add_option("-s,--scenario", compute_s, "Scenario file")->required();
  compute->add_option("-o,--output", compute_o, "Output file (stdout when omitted)");
  compute->fallthrough();

  std::string sweep_s, sweep_o;
  auto* sweep =
      app.add_subcommand("sweep", "Evaluate the scenario's sweep grid; emit a CSV table");
  sweep->add_option("-s,--scenario", sweep_s, "Scenario file")->required();
  sweep->add_option("-o,--output", sweep_o, "Output file (stdout when omitted)");
  sweep->fallthrough();

  std::string check_s;
  auto* crosscheck = app.add_subcommand(
      "crosscheck", "Run every applicable route at theta and compare the QFIs");
  crosscheck->add_option("-s,--scenario", check_s, "Scenario file")->required();
  crosscheck->fallthrough();

  int coeffs_n = 0;
  auto* coeffs = app.add_subcommand(
      "coeffs", "Print the series coefficients f_0..f_n as exact rationals and decimals");
  coeffs->add_option("--n", coeffs_n, "Highest order (<= 60)")->required();
  coeffs->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto apply_overrides = [&](qfikit::scenario::Scenario& s) {
      if (fd_step_override > 0.0) {
        s.fd_step = fd_step_override;
      }
      if (fock_dim_override != 0) {
        if (fock_dim_override < 2) {
          throw qfikit::ArgumentError("--fock-dim must be at least 2");
        }
        s.fock_dim = fock_dim_override;
      }
    };

    if (*compute) {
      qfikit::scenario::Scenario s = qfikit::scenario::load_scenario(compute_s);
      apply_overrides(s);
      const auto outcome = qfikit::scenario::run_compute(s);
      write_text(compute_o, outcome.record.dump(2) + "\n");
      return outcome.crosscheck_pass ? 0 : 1;
    }
    if (*sweep) {
      qfikit::scenario::Scenario s = qfikit::scenario::load_scenario(sweep_s);
      apply_overrides(s);
      write_text(sweep_o, qfikit::scenario::run_sweep_csv(s));
      return 0;
    }
    if (*crosscheck) {
      qfikit::scenario::Scenario s = qfikit::scenario::load_scenario(check_s);
      apply_overrides(s);
      s.method = "crosscheck";
      const auto outcome = qfikit::scenario::run_compute(s);
      write_text("", outcome.record.dump(2) + "\n");
      return outcome.crosscheck_pass ? 0 : 1;
    }
    // coeffs
    if (coeffs_n < 0 || coeffs_n > 60) {
      throw qfikit::ArgumentError("coeffs: --n must lie in [0, 60]");
    }
    std::ostringstream table;
    for (int k = 0; k <= coeffs_n; ++k) {
      table << k << ' ' << qfikit::expstate::f_coefficient(k) << ' '
            << qfikit::scenario::format_double(qfikit::expstate::f_coefficient_d(k))
            << '\n';
    }
    std::cout << table.str();
    return 0;
  } catch (const qfikit::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const qfikit::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
