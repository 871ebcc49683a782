#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdsdiag.h"

namespace {

struct CommonFlags {
  std::string respondents, followup, traits, out_dir, config, site;
  std::string seed;
  std::optional<long long> tau, replicates, target;
  std::optional<double> epsilon, threshold;
  std::vector<double> population_sizes;
  bool strict = false, lenient = false;
};

int report_failure(int status) {
  std::fprintf(stderr, "rdsdiag: %s error: %s\n", rds_status_name(status), rds_last_error_message());
  return status;
}

std::string num_text(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void add_input_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--respondents", f.respondents, "respondents CSV");
  cmd->add_option("--followup", f.followup, "follow-up CSV");
  cmd->add_option("--traits", f.traits, "trait specification CSV");
  cmd->add_option("--out-dir", f.out_dir, "output directory");
  cmd->add_option("--config", f.config, "key-value config file; its values override flags");
  cmd->add_option("--site", f.site, "site label");
  cmd->add_option("--target", f.target, "target sample size");
  cmd->add_flag("--strict", f.strict, "reject inconsistent input (default)");
  cmd->add_flag("--lenient", f.lenient, "repair inconsistent input with warnings");
}

void add_analysis_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--tau", f.tau, "convergence window");
  cmd->add_option("--epsilon", f.epsilon, "convergence tolerance");
  cmd->add_option("--replicates", f.replicates, "permutation replicates");
  cmd->add_option("--threshold", f.threshold, "quantile-rank flag threshold");
  cmd->add_option("--population-size", f.population_sizes, "population size scenario (repeatable)")
      ->allow_extra_args(false);
}

// Flags first, then the config file, which overrides them.
int make_pipeline(const CommonFlags& f, const std::string& sections, rds_pipeline** out) {
  if (int s = rds_pipeline_new(out); s != RDS_OK) return s;
  std::vector<std::pair<std::string, std::string>> kv;
  if (!f.respondents.empty()) kv.emplace_back("respondents", f.respondents);
  if (!f.followup.empty()) kv.emplace_back("followup", f.followup);
  if (!f.traits.empty()) kv.emplace_back("traits", f.traits);
  if (!f.out_dir.empty()) kv.emplace_back("out_dir", f.out_dir);
  if (!f.site.empty()) kv.emplace_back("site", f.site);
  if (f.target) kv.emplace_back("target", std::to_string(*f.target));
  if (!f.seed.empty()) kv.emplace_back("seed", f.seed);
  if (f.tau) kv.emplace_back("tau", std::to_string(*f.tau));
  if (f.epsilon) kv.emplace_back("epsilon", num_text(*f.epsilon));
  if (f.replicates) kv.emplace_back("replicates", std::to_string(*f.replicates));
  if (f.threshold) kv.emplace_back("threshold", num_text(*f.threshold));
  if (!f.population_sizes.empty()) {
    std::string list;
    for (double n : f.population_sizes) list += (list.empty() ? "" : ",") + num_text(n);
    kv.emplace_back("population_size", list);
  }
  if (f.lenient) kv.emplace_back("strict", "false");
  if (f.strict) kv.emplace_back("strict", "true");
  kv.emplace_back("sections", sections);
  for (const auto& [k, v] : kv) {
    if (int s = rds_pipeline_set(*out, k.c_str(), v.c_str()); s != RDS_OK) return s;
  }
  if (!f.config.empty()) return rds_pipeline_load_config(*out, f.config.c_str());
  return RDS_OK;
}

int run_pipeline(const CommonFlags& f, const std::string& sections, const std::string& print_section) {
  rds_pipeline* p = nullptr;
  int status = make_pipeline(f, sections, &p);
  if (status == RDS_OK) status = rds_pipeline_run(p);
  if (status != RDS_OK) {
    rds_pipeline_free(p);
    return report_failure(status);
  }
  const auto bundle = nlohmann::json::parse(rds_pipeline_bundle_json(p));
  if (print_section.empty()) {
    std::cout << "wrote " << bundle["manifest"].size() + 1 << " files to " << rds_pipeline_out_dir(p) << "\n";
    std::cout << "flags: " << bundle["flags"].size() << "\n";
    for (const auto& fl : bundle["flags"]) {
      std::cout << "  " << fl["section"].get<std::string>() << " " << fl["label"].get<std::string>() << " "
                << fl["indicator"].get<std::string>() << "\n";
    }
  } else if (bundle["sections"].contains(print_section)) {
    std::cout << bundle["sections"][print_section].dump(2) << "\n";
  }
  rds_pipeline_free(p);
  return RDS_OK;
}

int run_ingest(const CommonFlags& f) {
  rds_pipeline* p = nullptr;
  rds_dataset* ds = nullptr;
  int s = make_pipeline(f, "none", &p);
  if (s == RDS_OK) s = rds_pipeline_load_dataset(p, &ds);
  rds_pipeline_free(p);
  if (s != RDS_OK) return report_failure(s);
  char* report = nullptr;
  s = rds_dataset_validate(ds, &report);
  if (s == RDS_OK && !f.out_dir.empty()) {
    s = rds_dataset_write_repaired(ds, f.out_dir.c_str());
    if (s == RDS_OK) {
      std::ofstream out(f.out_dir + "/validation.json", std::ios::binary);
      out << report;
      if (!out) {
        std::fprintf(stderr, "rdsdiag: io error: cannot write %s/validation.json\n", f.out_dir.c_str());
        s = RDS_ERR_IO;
      }
    } else {
      report_failure(s);
    }
  }
  if (report) std::cout << report;
  rds_string_free(report);
  rds_dataset_free(ds);
  return s;
}

int run_simulate(const std::string& config, const std::string& out_dir, const std::string& seed) {
  std::string text;
  if (!seed.empty()) text += "sim.seed = " + seed + "\n";
  if (!config.empty()) {
    std::ifstream in(config, std::ios::binary);
    if (!in) {
      std::fprintf(stderr, "rdsdiag: config error: cannot open %s\n", config.c_str());
      return RDS_ERR_CONFIG;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    text += buf.str();
  }
  char* summary = nullptr;
  const int s = rds_simulate_to_dir(text.c_str(), out_dir.c_str(), &summary);
  if (s != RDS_OK) return report_failure(s);
  std::cout << summary;
  rds_string_free(summary);
  return RDS_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diagnostics for respondent-driven sampling studies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rds_version()));

  CommonFlags f;
  auto* ingest = app.add_subcommand("ingest", "load, validate and normalise a study dataset");
  add_input_flags(ingest, f);

  struct Analysis {
    const char* name;
    const char* help;
    const char* sections;
    const char* print;
  };
  const std::vector<Analysis> analyses{
      {"estimate", "inverse-degree estimates and the SS/VH comparison", "dataset,estimate", "estimate"},
      {"converge", "convergence verdicts and plots", "convergence", "convergence"},
      {"bottleneck", "bottleneck permutation tests and plots", "bottleneck", "bottleneck"},
      {"behavior", "reciprocation, effectiveness, bias and non-response", "behavior", "behavior"},
      {"degree", "degree validity, reliability and trends", "degree", "degree"},
      {"finitepop", "finite-population indicators", "finitepop,estimate", "finitepop"},
      {"report", "every diagnostic, written as a bundle", "all", ""},
  };
  std::vector<CLI::App*> analysis_cmds;
  for (const auto& a : analyses) {
    auto* cmd = app.add_subcommand(a.name, a.help);
    add_input_flags(cmd, f);
    add_analysis_flags(cmd, f);
    analysis_cmds.push_back(cmd);
  }

  std::string sim_config, sim_out = "simulated", sim_seed;
  auto* simulate = app.add_subcommand("simulate", "simulate a network and an RDS study from a scenario file");
  simulate->add_option("--config", sim_config, "scenario file (network.*, trait.*, sim.* keys)");
  simulate->add_option("--out-dir", sim_out, "output directory");
  simulate->add_option("--seed", sim_seed, "simulation seed; a sim.seed in the file wins");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return RDS_ERR_CONFIG;
  }
  if (f.strict && f.lenient) {
    std::fprintf(stderr, "rdsdiag: config error: --strict and --lenient are exclusive\n");
    return RDS_ERR_CONFIG;
  }

  if (ingest->parsed()) return run_ingest(f);
  if (simulate->parsed()) return run_simulate(sim_config, sim_out, sim_seed);
  for (std::size_t i = 0; i < analyses.size(); ++i) {
    if (analysis_cmds[i]->parsed()) {
      const auto& a = analyses[i];
      return run_pipeline(f, a.sections, a.print);
    }
  }
  return RDS_ERR_CONFIG;
}
