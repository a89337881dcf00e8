#include "fc/harness.hpp"
#include "fc/selftest.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string noise;
  std::string cases;
  std::optional<int> jobs;
  std::vector<std::string> sets;
};

void add_flags(CLI::App* sub, Flags& f, bool with_case) {
  sub->add_option("--config", f.config, "INI config file")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "noise seed");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--noise", f.noise, "comma separated noise levels");
  if (with_case) sub->add_option("--case", f.cases, "interface case(s): D, N, I or a list");
  sub->add_option("--jobs", f.jobs, "concurrent cells");
  sub->add_option("--set", f.sets, "override, section.key=value")->take_all();
}

fc::ExperimentConfig make_config(const Flags& f) {
  fc::ExperimentConfig c = f.config.empty() ? fc::ExperimentConfig{} : fc::load_config(f.config);
  for (const auto& s : f.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw fc::ConfigError("--set expects section.key=value, got '" + s + "'");
    fc::set_option(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.out = f.out;
  if (!f.noise.empty()) fc::set_option(c, "run.noise", f.noise);
  if (!f.cases.empty()) fc::set_option(c, "cauchy2.case", f.cases);
  if (f.jobs) c.jobs = *f.jobs;
  return c;
}

int report(const fc::RunOutcome& o, const std::string& out) {
  fc::write_table_csv(std::cout, o.table);
  for (const auto& l : o.log) std::cerr << l << "\n";
  std::cerr << "wrote " << out << "/table.csv\n";
  return o.failed_cells ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fcauchy: fractional quasi-reversibility for elliptic Cauchy and free boundary problems"};
  app.require_subcommand(1);
  Flags f;
  auto* syn = app.add_subcommand("synthesize", "write ground truth and noisy data");
  auto* con = app.add_subcommand("continue", "Cauchy problem benchmark (cauchy1)");
  auto* rc = app.add_subcommand("recover-curve", "free boundary recovery (cauchy2)");
  auto* rj = app.add_subcommand("recover-joint", "joint curve and impedance recovery (cauchy3)");
  auto* sw = app.add_subcommand("sweep", "run the configured problem over all noise levels");
  auto* st = app.add_subcommand("selftest", "Mittag-Leffler property suites");
  for (auto* s : {syn, con, rc, rj, sw}) add_flags(s, f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*st) return fc::print_checks(std::cout, fc::lemma_suites()) ? 2 : 0;
    fc::ExperimentConfig c = make_config(f);
    if (*con) c.problem = fc::ProblemKind::cauchy1;
    if (*rc) c.problem = fc::ProblemKind::cauchy2;
    if (*rj) c.problem = fc::ProblemKind::cauchy3;
    fc::validate(c);
    if (*syn) {
      fc::write_synthesis(c, c.out);
      std::cerr << "wrote synthesis to " << c.out << "\n";
      return 0;
    }
    return report(fc::run(c, c.out), c.out);
  } catch (const fc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
