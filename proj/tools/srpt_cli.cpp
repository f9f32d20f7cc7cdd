// srpt: command-line driver for the superradiant-transition circuit model.
//
//   srpt classical | linear | meanfield | fluct | ed | validate [options]
//
// Exit codes: 0 success, 1 numerical non-convergence or failed check,
// 2 configuration error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "srpt/commands.hpp"
#include "srpt/config.hpp"
#include "srpt/units.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::vector<std::string> assignments;
  std::string out;
  std::string format;
  int threads = -1;
  long long seed = -1;
  std::string lr0;
  std::string kT;
  std::string N;
  int M = 0;
  int per_mode = -1;
  int total = -1;
  bool full_cosine = false;
  bool no_coupling = false;
  srpt::commands::Extras extras;
};

srpt::config::RunConfig resolve(const Flags& f) {
  using srpt::config::apply;
  srpt::config::RunConfig c;
  if (!f.config_path.empty()) srpt::config::parse_file(c, f.config_path);
  // Command-line values override the file.
  for (const auto& a : f.assignments) srpt::config::apply_assignment(c, a);
  if (!f.lr0.empty()) apply(c, "L_R0_range", f.lr0 + " nH");
  if (!f.kT.empty()) apply(c, "kT_range", f.kT + " GHz");
  if (!f.N.empty()) apply(c, "N", f.N);
  if (f.M > 0) c.M = f.M;
  if (f.per_mode >= 0) c.per_mode_cutoff = f.per_mode;
  if (f.total >= 0) c.total_cutoff = f.total;
  if (f.full_cosine) c.quartic = false;
  if (f.no_coupling) c.coupling = false;
  if (!f.out.empty()) c.out = f.out;
  if (!f.format.empty()) c.format = f.format;
  if (f.threads >= 0) c.threads = static_cast<unsigned>(f.threads);
  if (f.seed >= 0) c.seed = static_cast<std::uint64_t>(f.seed);
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superradiant phase transition in a Josephson-junction circuit: classical, linear, "
               "mean-field, fluctuation and exact-diagonalization analyses"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config_path, "Config file with 'key = value unit' lines")->check(CLI::ExistingFile);
    sub->add_option("--set", f.assignments, "Override one config entry, e.g. --set 'L_J = 0.8 nH'");
    sub->add_option("--out", f.out, "Output file (default stdout)");
    sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", f.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", f.seed, "Seed for randomized start vectors and checks")->check(CLI::NonNegativeNumber);
  };
  auto scan = [&](CLI::App* sub) {
    sub->add_option("--lr0", f.lr0, "L_R0 scan MIN:MAX:POINTS in nH");
  };

  auto* classical = app.add_subcommand("classical", "Constrained inductive energy U/(N E_J) versus 2 pi phi/Phi0");
  common(classical);
  auto* linear = app.add_subcommand("linear", "Linearized circuit quantities and polariton frequencies versus L_R0");
  common(linear);
  scan(linear);
  linear->add_flag("--no-coupling", f.no_coupling, "Set g = 0");
  auto* meanfield = app.add_subcommand("meanfield", "Photonic amplitude over (L_R0, temperature) and the phase boundary");
  common(meanfield);
  scan(meanfield);
  meanfield->add_option("--kT", f.kT, "kB T/h scan MIN:MAX:POINTS in GHz");
  meanfield->add_option("--M", f.M, "Fock dimension per atom")->check(CLI::PositiveNumber);
  meanfield->add_option("--boundary-out", f.extras.boundary_out, "Also write the boundary curve as CSV");
  auto* fluct = app.add_subcommand("fluct", "Renormalized fluctuation spectrum and zero-point shift versus L_R0");
  common(fluct);
  scan(fluct);
  fluct->add_option("--M", f.M, "Fock dimension per atom")->check(CLI::PositiveNumber);
  auto* ed = app.add_subcommand("ed", "Exact diagonalization for finite N");
  common(ed);
  scan(ed);
  ed->add_option("--N", f.N, "Comma-separated atom counts, e.g. 1,2,3");
  ed->add_option("--per-mode", f.per_mode, "Maximum bosons per mode")->check(CLI::NonNegativeNumber);
  ed->add_option("--total", f.total, "Maximum bosons in total")->check(CLI::NonNegativeNumber);
  ed->add_flag("--full-cosine", f.full_cosine, "Use the full cosine atom instead of the quartic truncation");
  ed->add_flag("--no-coupling", f.no_coupling, "Set g = 0");
  ed->add_flag("--compare-meanfield", f.extras.compare_meanfield, "Add thermodynamic-limit comparison columns");
  ed->add_option("--export-matrix", f.extras.export_matrix_dir, "Write each sector Hamiltonian (Matrix Market) here");
  auto* validate = app.add_subcommand("validate", "Run the built-in consistency checks");
  common(validate);
  validate->add_option("--only", f.extras.only, "Run only these checks")->delimiter(',');
  validate->add_option("--inject-fault", f.extras.inject_fault, "Deliberately break one named check");
  validate->add_flag_callback("--list", [] {
    for (const auto& n : srpt::validation::check_names()) std::cout << n << '\n';
    std::exit(0);
  }, "List check names and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto c = resolve(f);
    std::ofstream file;
    if (!c.out.empty()) {
      file.open(c.out);
      if (!file) throw srpt::ConfigError("cannot open " + c.out + " for writing");
    }
    std::ostream& out = c.out.empty() ? std::cout : file;
    namespace cmd = srpt::commands;
    if (classical->parsed()) return cmd::run_classical(c, out, std::cerr);
    if (linear->parsed()) return cmd::run_linear(c, out, std::cerr);
    if (meanfield->parsed()) return cmd::run_meanfield(c, f.extras, out, std::cerr);
    if (fluct->parsed()) return cmd::run_fluct(c, out, std::cerr);
    if (ed->parsed()) return cmd::run_ed(c, f.extras, out, std::cerr);
    if (validate->parsed()) return cmd::run_validate(c, f.extras, out, std::cerr);
  } catch (const srpt::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const srpt::ConvergenceError& e) {
    std::cerr << "did not converge: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
