// systocap: capacities of disc cotangent bundles of flat reversible Finsler tori.
//
//   systocap capacity --config norm.json [--samples N] [--seed N]
//                     [--format human|machine] [--minorant-gram gram.json]
//
// Exit status: 0 if every requested certificate passes, 1 if a certificate
// fails, 2 on configuration or computation errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "systocap/cli.hpp"

namespace {

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw systocap::cli::ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double enumeration_cap_from_env() {
  const char* env = std::getenv("SYSTOCAP_ENUM_CAP");
  if (!env || !*env) return systocap::kDefaultEnumerationCap;
  char* end = nullptr;
  const double cap = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(cap >= 1)) {
    throw systocap::cli::ConfigError("SYSTOCAP_ENUM_CAP must be a number >= 1");
  }
  return cap;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace systocap;
  using namespace systocap::cli;

  CLI::App app{"Symplectic capacities of disc cotangent bundles of flat Finsler tori"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::string format = "human";
  std::string gram_path;
  app.add_option("--config", config_path, "Configuration document (JSON, '-' for stdin)")->required();
  app.add_option("--samples", samples, "Sample count for randomized checks");
  app.add_option("--seed", seed, "Seed for randomized checks");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"human", "machine"}));
  app.add_option("--minorant-gram", gram_path, "JSON file with a Riemannian minorant Gram matrix");

  for (const auto& [name, cmd] : command_names()) {
    (void)cmd;
    app.add_subcommand(name, "Run the " + name + " command");
  }

  CLI11_PARSE(app, argc, argv);

  const Command command = *parse_command(app.get_subcommands().front()->get_name());
  const Format fmt = parse_format(format);
  try {
    RunConfig cfg = parse_config(slurp(config_path));
    if (samples) {
      if (*samples < 1) throw ConfigError("--samples must be positive");
      cfg.samples = *samples;
    }
    if (seed) cfg.seed = *seed;
    if (!gram_path.empty()) {
      const Json doc = Json::parse(slurp(gram_path));
      const Matrix g = cli::detail::read_matrix(doc, "minorant_gram");
      cfg.minorant_gram = g;
    }
    RunContext ctx;
    ctx.enumeration_cap = enumeration_cap_from_env();
    const Report rep = run(cfg, command, ctx);
    std::cout << emit_report(rep.body, fmt);
    return rep.passed ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cout << emit_report(error_block("config", e.what()), fmt);
  } catch (const Json::exception& e) {
    std::cout << emit_report(error_block("config", e.what()), fmt);
  } catch (const ResourceError& e) {
    std::cout << emit_report(error_block("resource", e.what()), fmt);
  } catch (const std::exception& e) {
    std::cout << emit_report(error_block("computation", e.what()), fmt);
  }
  return 2;
}
