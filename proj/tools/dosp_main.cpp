#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dosp/config.hpp"
#include "dosp/harness.hpp"

// dosp: simulate distributed online saddle-point mirror descent over
// time-varying networks. Exit codes: 0 success, 1 invariant failure,
// 2 configuration error.

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset_name;
  std::string seeds;
  std::string out_dir;
  std::string variant;
  long long rounds = -1;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "configuration file (JSON)");
  cmd->add_option("--preset", o.preset_name, "named preset configuration");
  cmd->add_option("--seeds", o.seeds, "comma-separated seed list");
  cmd->add_option("--rounds", o.rounds, "number of rounds T");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--variant", o.variant, "single | multi");
  cmd->add_flag("--quiet", o.quiet, "suppress per-check output");
}

dosp::config::RunConfig resolve(const CommonOpts& o) {
  dosp::config::RunConfig c;
  if (!o.config_path.empty() && !o.preset_name.empty())
    throw std::invalid_argument("give either --config or --preset, not both");
  if (!o.config_path.empty())
    c = dosp::config::load_file(o.config_path);
  else if (!o.preset_name.empty())
    c = dosp::config::preset(o.preset_name);
  else
    throw std::invalid_argument("one of --config or --preset is required");
  if (!o.seeds.empty()) {
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos < o.seeds.size()) {
      std::size_t next = o.seeds.find(',', pos);
      if (next == std::string::npos) next = o.seeds.size();
      seeds.push_back(std::stoull(o.seeds.substr(pos, next - pos)));
      pos = next + 1;
    }
    if (seeds.empty()) throw std::invalid_argument("empty --seeds list");
    c.seeds = std::move(seeds);
  }
  if (o.rounds > 0) c.rounds = static_cast<std::size_t>(o.rounds);
  if (!o.out_dir.empty()) c.out_dir = o.out_dir;
  if (!o.variant.empty()) {
    if (o.variant == "single")
      c.variant = dosp::algorithm::Variant::single;
    else if (o.variant == "multi")
      c.variant = dosp::algorithm::Variant::multi;
    else
      throw std::invalid_argument("--variant must be single or multi");
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "distributed online saddle-point mirror descent: simulation harness"};
  app.require_subcommand(1);

  CommonOpts run_opts, verify_opts;
  CLI::App* run_cmd =
      app.add_subcommand("run", "run an experiment and write metrics");
  add_common(run_cmd, run_opts);
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the batch invariant checks");
  add_common(verify_cmd, verify_opts);
  CLI::App* list_cmd = app.add_subcommand("preset-list", "list named presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      for (const std::string& name : dosp::config::preset_names()) {
        dosp::config::RunConfig c = dosp::config::preset(name);
        std::printf("%-20s n=%-3zu d=%zu rounds=%zu variant=%s\n", name.c_str(),
                    c.params.n, c.params.d, c.rounds,
                    c.variant == dosp::algorithm::Variant::single ? "single"
                                                                  : "multi");
      }
      return 0;
    }
    if (run_cmd->parsed()) {
      dosp::config::RunConfig c = resolve(run_opts);
      dosp::harness::ExecuteResult r = dosp::harness::execute(c, run_opts.quiet);
      if (!run_opts.quiet)
        std::printf("%s: wrote %s\n", r.all_pass ? "ok" : "INVARIANT FAILURE",
                    c.out_dir.c_str());
      return r.all_pass ? 0 : 1;
    }
    dosp::config::RunConfig c = resolve(verify_opts);
    dosp::harness::VerifyResult r = dosp::harness::verify(c, verify_opts.quiet);
    if (!verify_opts.quiet)
      std::printf("%s\n", r.all_pass ? "all checks passed" : "CHECK FAILURE");
    return r.all_pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
