// Copyright 2026 The mdvrp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mdvrp/checkpoint.h"
#include "mdvrp/gradcheck.h"
#include "mdvrp/oracle.h"
#include "mdvrp/rollout.h"
#include "mdvrp/trainer.h"

namespace mdvrp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Raised by a subcommand to exit with a specific status after printing.
struct CommandFailure {
  int code;
  std::string message;
};

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::string out;
  int threads = 1;
  std::string format = "text";
};

struct GenOptions {
  int customers = 6;
  int depots = 2;
  std::vector<std::string> variants = {"MDVRP"};
  std::string backhaul_mode = "mixed";
  int count = 10;
};

struct TrainOptions {
  std::string loss = "po";
  double alpha = kDefaultAlpha;
  int epochs = 30;
  int instances_per_epoch = 2000;
  int batch_size = 32;
  int customers = 8;
  int depots = 2;
  double lr = 1e-4;
  double weight_decay = 1e-6;
  std::string sampler = "curriculum";
  std::string variant = "MDVRP";
  std::string backhaul_mode = "mixed";
  bool mixed_batches = false;
  bool multistep_lr = false;
  std::vector<int> milestones = {270, 295};
  double lr_gamma = 0.1;
  int dim = 16;
  int heads = 2;
  int layers = 2;
  int ff_hidden = 64;
  bool no_film = false;
  bool film_identity = false;
  std::string init;
  int checkpoint_every = 0;
};

struct EvalOptions {
  std::string checkpoint;
  std::string instances;
  bool augment8 = false;
  std::string starts = "full";
  std::string reference = "auto";
  std::optional<int> dim, heads, layers, ff_hidden;
};

struct OracleCmdOptions {
  std::string instances;
  std::string method = "both";
  bool nearest_return_bound = false;
};

struct CheckOptions {
  std::string instances;
  bool generated = true;
};

struct GradcheckOptions {
  std::string loss = "both";
  int dim = 8;
  int heads = 2;
  int layers = 2;
  int ff_hidden = 16;
  int customers = 4;
  int depots = 2;
  std::string variant = "MDVRP";
  double step = 1e-4;
  double tolerance = 1e-4;
  std::size_t coords = 256;
};

std::string EnvName(const std::string& flag) {
  std::string name = kEnvPrefix;
  for (char c : flag) name += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

void BindEnvironment(CLI::App& app) {
  for (CLI::Option* opt : app.get_options()) {
    const std::vector<std::string>& names = opt->get_lnames();
    if (names.empty() || names[0] == "help") continue;
    opt->envname(EnvName(names[0]));
  }
  for (CLI::App* sub : app.get_subcommands({})) BindEnvironment(*sub);
}

std::vector<fs::path> ListInstances(const std::string& dir) {
  if (!fs::is_directory(dir)) throw CommandFailure{kExitRuntimeError, "not a directory: " + dir};
  std::vector<fs::path> files;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".mdvrp") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string JoinActions(const std::vector<int>& actions) {
  std::string s;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (i > 0) s += ' ';
    s += std::to_string(actions[i]);
  }
  return s;
}

std::ofstream OpenOutput(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CommandFailure{kExitRuntimeError, "cannot open '" + path.string() + "' for writing"};
  return out;
}

json Summary(const std::string& command) { return json{{"command", command}}; }

json RunGen(const GlobalOptions& g, const GenOptions& o, std::ostream& out) {
  if (g.out.empty()) throw CommandFailure{kExitUsage, "gen: --out directory is required"};
  const BackhaulMode mode = ParseBackhaulMode(o.backhaul_mode);
  std::vector<VariantFlags> variants;
  for (const std::string& token : o.variants) {
    if (token == "all") {
      for (VariantFlags v : AllVariants()) {
        if (v.backhaul) v.backhaul_mode = mode;
        variants.push_back(v);
      }
    } else {
      variants.push_back(ParseVariant(token, mode));
    }
  }
  fs::create_directories(g.out);
  std::vector<std::pair<VariantFlags, int>> jobs;
  for (const VariantFlags& v : variants) {
    for (int i = 0; i < o.count; ++i) jobs.emplace_back(v, i);
  }
  std::vector<std::string> names(jobs.size());
  ParallelFor(static_cast<int>(jobs.size()), g.threads, [&](int k) {
    const auto& [variant, index] = jobs[k];
    const std::uint64_t seed = Rng::Derive(g.seed, {static_cast<std::uint64_t>(index)}).Next();
    const Instance inst = GenerateInstance(o.customers, o.depots, variant, seed);
    char name[128];
    std::snprintf(name, sizeof(name), "%s_n%d_m%d_%04d.mdvrp", variant.Name().c_str(), o.customers, o.depots,
                  index);
    names[k] = name;
    WriteInstanceFile(inst, (fs::path(g.out) / name).string());
  });
  for (const std::string& name : names) out << "wrote " << (fs::path(g.out) / name).string() << '\n';
  json s = Summary("gen");
  s["files"] = names.size();
  s["out"] = g.out;
  return s;
}

json RunTrain(const GlobalOptions& g, const TrainOptions& o, std::ostream& out) {
  TrainConfig c;
  c.policy.dim = o.dim;
  c.policy.heads = o.heads;
  c.policy.layers = o.layers;
  c.policy.ff_hidden = o.ff_hidden;
  c.policy.film = !o.no_film;
  c.film_identity_init = o.film_identity;
  c.loss = ParseLossKind(o.loss);
  c.alpha = o.alpha;
  c.epochs = o.epochs;
  c.instances_per_epoch = o.instances_per_epoch;
  c.batch_size = o.batch_size;
  c.num_customers = o.customers;
  c.num_depots = o.depots;
  c.adam.learning_rate = o.lr;
  c.adam.weight_decay = o.weight_decay;
  c.multistep_lr = o.multistep_lr;
  c.lr_milestones = o.milestones;
  c.lr_gamma = o.lr_gamma;
  c.sampler.kind = ParseSamplerKind(o.sampler);
  c.sampler.backhaul_mode = ParseBackhaulMode(o.backhaul_mode);
  c.sampler.fixed = ParseVariant(o.variant, c.sampler.backhaul_mode);
  c.sampler.mixed = o.mixed_batches;
  c.seed = g.seed;
  c.threads = g.threads;
  c.Validate();

  std::optional<PolicyParams> init;
  if (!o.init.empty()) {
    init = ReadCheckpointFile(o.init, c.policy);
    if (o.film_identity) InitFilmIdentity(*init);
  }
  const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
  fs::create_directories(dir);
  std::ofstream metrics = OpenOutput(dir / "metrics.tsv");
  metrics << kMetricsHeader << '\n';
  out << kMetricsHeader << '\n';
  TrainResult result = Train(c, init ? &*init : nullptr, [&](const EpochMetrics& m, const PolicyParams& p) {
    const std::string line = FormatMetrics(m);
    metrics << line << '\n';
    metrics.flush();
    out << line << '\n';
    if (o.checkpoint_every > 0 && (m.epoch + 1) % o.checkpoint_every == 0) {
      WriteCheckpointFile(p, (dir / ("checkpoint-epoch" + std::to_string(m.epoch + 1) + ".txt")).string());
    }
  });
  const fs::path ckpt = dir / "checkpoint.txt";
  WriteCheckpointFile(result.params, ckpt.string());
  out << "checkpoint " << ckpt.string() << '\n';
  json s = Summary("train");
  s["epochs"] = c.epochs;
  s["loss"] = std::string(ToString(c.loss));
  s["sampler"] = std::string(ToString(c.sampler.kind));
  s["checkpoint"] = ckpt.string();
  s["final_mean_cost"] = result.metrics.empty() ? 0.0 : result.metrics.back().mean_cost;
  return s;
}

json RunEval(const GlobalOptions& g, const EvalOptions& o, std::ostream& out) {
  std::optional<PolicyConfig> expected;
  if (o.dim || o.heads || o.layers || o.ff_hidden) {
    // Read once without expectations to fill in unspecified fields.
    PolicyConfig header = ReadCheckpointFile(o.checkpoint).config();
    if (o.dim) header.dim = *o.dim;
    if (o.heads) header.heads = *o.heads;
    if (o.layers) header.layers = *o.layers;
    if (o.ff_hidden) header.ff_hidden = *o.ff_hidden;
    expected = header;
  }
  PolicyParams params;
  try {
    params = ReadCheckpointFile(o.checkpoint, expected);
  } catch (const ParseError& e) {
    throw CommandFailure{kExitAuditFailure, std::string("checkpoint: ") + e.what()};
  }
  const StartMode starts = o.starts == "train" ? StartMode::kTrain : StartMode::kInference;
  const std::vector<fs::path> files = ListInstances(o.instances);
  struct Row {
    EvalResult eval;
    double reference = 0.0;
    std::string reference_kind;
  };
  std::vector<Row> rows(files.size());
  ParallelFor(static_cast<int>(files.size()), g.threads, [&](int i) {
    const Instance inst = ReadInstanceFile(files[i].string());
    Row& row = rows[i];
    row.eval = EvaluateGreedy(params, inst, starts, o.augment8);
    const bool exhaustive =
        o.reference == "exhaustive" || (o.reference == "auto" && inst.num_customers() <= kMaxExhaustiveCustomers);
    row.reference_kind = exhaustive ? "exhaustive" : "greedy";
    row.reference = exhaustive ? ExhaustiveSolve(inst).cost : GreedySolve(inst).cost;
  });
  std::optional<std::ofstream> dump;
  if (!g.out.empty()) dump = OpenOutput(g.out);
  double cost_sum = 0.0;
  double gap_sum = 0.0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const Row& r = rows[i];
    const double gap = Gap(r.eval.best_cost, r.reference);
    cost_sum += r.eval.best_cost;
    gap_sum += gap;
    out << files[i].filename().string() << "\tcost\t" << FormatDouble(r.eval.best_cost) << "\treference\t"
        << FormatDouble(r.reference) << '\t' << r.reference_kind << "\tgap\t" << FormatDouble(gap)
        << "\ttrajectories\t" << r.eval.num_trajectories << '\n';
    if (dump) {
      *dump << files[i].filename().string() << '\t' << JoinActions(r.eval.best.actions) << '\t'
            << FormatDouble(r.eval.best_cost) << '\n';
    }
  }
  const double count = files.empty() ? 1.0 : static_cast<double>(files.size());
  json s = Summary("eval");
  s["instances"] = files.size();
  s["mean_cost"] = cost_sum / count;
  s["mean_gap"] = gap_sum / count;
  s["augment8"] = o.augment8;
  s["starts"] = o.starts;
  return s;
}

json RunOracle(const GlobalOptions& g, const OracleCmdOptions& o, std::ostream& out) {
  const std::vector<fs::path> files = ListInstances(o.instances);
  const bool run_exhaustive = o.method != "greedy";
  const bool run_greedy = o.method != "exhaustive";
  struct Row {
    OracleResult exhaustive;
    Solution greedy;
  };
  std::vector<Row> rows(files.size());
  OracleOptions options;
  options.nearest_return_bound = o.nearest_return_bound;
  ParallelFor(static_cast<int>(files.size()), g.threads, [&](int i) {
    const Instance inst = ReadInstanceFile(files[i].string());
    if (run_exhaustive) rows[i].exhaustive = ExhaustiveSolve(inst, options);
    if (run_greedy) rows[i].greedy = GreedySolve(inst);
  });
  std::optional<std::ofstream> dump;
  if (!g.out.empty()) dump = OpenOutput(g.out);
  double opt_sum = 0.0;
  double greedy_sum = 0.0;
  double gap_sum = 0.0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string name = files[i].filename().string();
    const Row& r = rows[i];
    out << name;
    if (run_exhaustive) {
      out << "\toptimal\t" << FormatDouble(r.exhaustive.cost) << "\tnodes\t" << r.exhaustive.nodes_expanded;
      opt_sum += r.exhaustive.cost;
      if (dump) *dump << name << "\texhaustive\t" << JoinActions(r.exhaustive.best.actions) << '\t'
                      << FormatDouble(r.exhaustive.cost) << '\n';
    }
    if (run_greedy) {
      out << "\tgreedy\t" << FormatDouble(r.greedy.cost);
      greedy_sum += r.greedy.cost;
      if (dump) *dump << name << "\tgreedy\t" << JoinActions(r.greedy.actions) << '\t' << FormatDouble(r.greedy.cost)
                      << '\n';
    }
    if (run_exhaustive && run_greedy) {
      const double gap = Gap(r.greedy.cost, r.exhaustive.cost);
      gap_sum += gap;
      out << "\tgap\t" << FormatDouble(gap);
    }
    out << '\n';
  }
  const double count = files.empty() ? 1.0 : static_cast<double>(files.size());
  json s = Summary("oracle");
  s["instances"] = files.size();
  if (run_exhaustive) s["mean_optimal"] = opt_sum / count;
  if (run_greedy) s["mean_greedy"] = greedy_sum / count;
  if (run_exhaustive && run_greedy) s["mean_greedy_gap"] = gap_sum / count;
  return s;
}

json RunCheck(const CheckOptions& o, std::ostream& out) {
  const std::vector<fs::path> files = ListInstances(o.instances);
  for (const fs::path& file : files) {
    const std::string name = file.filename().string();
    auto fail = [&](const std::string& property, const std::string& message) {
      out << "FAIL\t" << name << '\t' << property << '\t' << message << '\n';
      throw CommandFailure{kExitAuditFailure, name + ": " + property + ": " + message};
    };
    Instance inst;
    try {
      inst = ReadInstanceFile(file.string());
    } catch (const ParseError& e) {
      fail("parse", e.what());
    }
    if (std::optional<std::string> problem = ValidateInstance(inst, o.generated)) {
      const std::size_t colon = problem->find(':');
      fail(problem->substr(0, colon), colon == std::string::npos ? *problem : problem->substr(colon + 2));
    }
    const std::string text = WriteInstanceToString(inst);
    const Instance again = ReadInstanceFromString(text);
    if (!(again == inst)) fail("round-trip", "re-read instance differs");
    if (WriteInstanceToString(again) != text) fail("round-trip", "re-serialized text differs");
    const Solution greedy = GreedySolve(inst);
    if (FeasibilityVerdict v = CheckFeasible(inst, greedy); !v) fail("greedy-feasibility", v.message);
    out << "ok\t" << name << '\n';
  }
  json s = Summary("check");
  s["instances"] = files.size();
  return s;
}

json RunGradcheckCommand(const GlobalOptions& g, const GradcheckOptions& o, std::ostream& out) {
  GradcheckConfig c;
  c.policy.dim = o.dim;
  c.policy.heads = o.heads;
  c.policy.layers = o.layers;
  c.policy.ff_hidden = o.ff_hidden;
  c.num_customers = o.customers;
  c.num_depots = o.depots;
  c.variant = ParseVariant(o.variant);
  c.step = o.step;
  c.tolerance = o.tolerance;
  c.coordinates = o.coords;
  c.seed = g.seed;
  std::vector<LossKind> losses;
  if (o.loss == "both" || o.loss == "reinforce") losses.push_back(LossKind::kReinforce);
  if (o.loss == "both" || o.loss == "po") losses.push_back(LossKind::kPreference);
  json s = Summary("gradcheck");
  bool passed = true;
  for (LossKind loss : losses) {
    const GradcheckReport r = RunGradcheck(c, loss);
    out << ToString(loss) << "\tmax_relative_error\t" << FormatDouble(r.diff.max_relative_error) << "\tworst\t"
        << r.worst_parameter << "\tanalytic\t" << FormatDouble(r.diff.analytic) << "\tnumeric\t"
        << FormatDouble(r.diff.numeric) << "\tcoordinates\t" << r.diff.coordinates_checked << "\t"
        << (r.diff.passed ? "pass" : "FAIL") << '\n';
    s[std::string(ToString(loss)) + "_max_relative_error"] = r.diff.max_relative_error;
    passed = passed && r.diff.passed;
  }
  s["tolerance"] = o.tolerance;
  if (!passed) {
    throw CommandFailure{kExitAuditFailure, "gradient check exceeded tolerance"};
  }
  return s;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-depot VRP solver: instance generation, training, evaluation and audits", "mdvrp"};
  app.require_subcommand(1);
  // Global flags may follow the subcommand.
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Base random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output directory (gen, train) or dump file (eval, oracle)");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text"}))->capture_default_str();

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate instance files");
  gen_cmd->add_option("-n,--customers", gen.customers)->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("-m,--depots", gen.depots)->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--variant", gen.variants, "Variant tokens, or 'all'")->capture_default_str();
  gen_cmd->add_option("--backhaul-mode", gen.backhaul_mode)
      ->check(CLI::IsMember({"mixed", "strict"}))
      ->capture_default_str();
  gen_cmd->add_option("--count", gen.count)->check(CLI::NonNegativeNumber)->capture_default_str();

  TrainOptions train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a policy");
  train_cmd->add_option("--loss", train.loss)->check(CLI::IsMember({"po", "reinforce"}))->capture_default_str();
  train_cmd->add_option("--alpha", train.alpha)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--epochs", train.epochs)->check(CLI::NonNegativeNumber)->capture_default_str();
  train_cmd->add_option("--instances-per-epoch", train.instances_per_epoch)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--batch-size", train.batch_size)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("-n,--customers", train.customers)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("-m,--depots", train.depots)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--lr", train.lr)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--weight-decay", train.weight_decay)->check(CLI::NonNegativeNumber)->capture_default_str();
  train_cmd->add_option("--sampler", train.sampler)
      ->check(CLI::IsMember({"curriculum", "full", "unified", "standard_cl", "fixed"}))
      ->capture_default_str();
  train_cmd->add_option("--variant", train.variant, "Variant for --sampler fixed")->capture_default_str();
  train_cmd->add_option("--backhaul-mode", train.backhaul_mode)
      ->check(CLI::IsMember({"mixed", "strict"}))
      ->capture_default_str();
  train_cmd->add_flag("--mixed-batches", train.mixed_batches, "Draw a variant per instance");
  train_cmd->add_flag("--multistep-lr", train.multistep_lr, "Decay the learning rate at the milestones");
  train_cmd->add_option("--milestones", train.milestones)->capture_default_str();
  train_cmd->add_option("--lr-gamma", train.lr_gamma)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--dim", train.dim)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--heads", train.heads)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--layers", train.layers)->check(CLI::NonNegativeNumber)->capture_default_str();
  train_cmd->add_option("--ff-hidden", train.ff_hidden)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_flag("--no-film", train.no_film, "Disable constraint conditioning");
  train_cmd->add_flag("--film-identity", train.film_identity, "Initialize the conditioning as an identity");
  train_cmd->add_option("--init", train.init, "Start from this checkpoint");
  train_cmd->add_option("--checkpoint-every", train.checkpoint_every)
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  EvalOptions eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint with multi-start greedy decoding");
  eval_cmd->add_option("--checkpoint", eval.checkpoint)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--instances", eval.instances)->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_flag("--augment8", eval.augment8, "Also decode the 8 dihedral transforms");
  eval_cmd->add_option("--starts", eval.starts)->check(CLI::IsMember({"train", "full"}))->capture_default_str();
  eval_cmd->add_option("--reference", eval.reference)
      ->check(CLI::IsMember({"auto", "exhaustive", "greedy"}))
      ->capture_default_str();
  eval_cmd->add_option("--dim", eval.dim, "Expected embedding size");
  eval_cmd->add_option("--heads", eval.heads, "Expected head count");
  eval_cmd->add_option("--layers", eval.layers, "Expected encoder depth");
  eval_cmd->add_option("--ff-hidden", eval.ff_hidden, "Expected feed-forward width");

  OracleCmdOptions oracle;
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "Solve instances exhaustively and greedily");
  oracle_cmd->add_option("--instances", oracle.instances)->required()->check(CLI::ExistingDirectory);
  oracle_cmd->add_option("--method", oracle.method)
      ->check(CLI::IsMember({"exhaustive", "greedy", "both"}))
      ->capture_default_str();
  oracle_cmd->add_flag("--nearest-return-bound", oracle.nearest_return_bound);

  CheckOptions check;
  CLI::App* check_cmd = app.add_subcommand("check", "Audit instance files");
  check_cmd->add_option("--instances", check.instances)->required()->check(CLI::ExistingDirectory);
  check_cmd->add_flag("!--no-generated", check.generated, "Skip generator-only invariants");

  GradcheckOptions grad;
  CLI::App* grad_cmd = app.add_subcommand("gradcheck", "Compare loss gradients with finite differences");
  grad_cmd->add_option("--loss", grad.loss)->check(CLI::IsMember({"both", "po", "reinforce"}))->capture_default_str();
  grad_cmd->add_option("--dim", grad.dim)->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("--heads", grad.heads)->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("--layers", grad.layers)->check(CLI::NonNegativeNumber)->capture_default_str();
  grad_cmd->add_option("--ff-hidden", grad.ff_hidden)->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("-n,--customers", grad.customers)->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("-m,--depots", grad.depots)->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("--variant", grad.variant)->capture_default_str();
  grad_cmd->add_option("--step", grad.step)->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("--tolerance", grad.tolerance)->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("--coords", grad.coords)->check(CLI::PositiveNumber)->capture_default_str();

  BindEnvironment(app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream e_out;
    const int code = app.exit(e, o, e_out);
    out << o.str();
    err << e_out.str();
    if (code == 0) return kExitOk;
    json s = Summary(app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name());
    s["status"] = "usage";
    s["error"] = e.what();
    out << s.dump() << '\n';
    return kExitUsage;
  }

  std::string command = app.get_subcommands().front()->get_name();
  try {
    json summary;
    if (command == "gen") {
      summary = RunGen(g, gen, out);
    } else if (command == "train") {
      summary = RunTrain(g, train, out);
    } else if (command == "eval") {
      summary = RunEval(g, eval, out);
    } else if (command == "oracle") {
      summary = RunOracle(g, oracle, out);
    } else if (command == "check") {
      summary = RunCheck(check, out);
    } else {
      summary = RunGradcheckCommand(g, grad, out);
    }
    summary["seed"] = g.seed;
    summary["status"] = "ok";
    out << summary.dump() << '\n';
    return kExitOk;
  } catch (const CommandFailure& f) {
    err << "mdvrp " << command << ": " << f.message << '\n';
    json s = Summary(command);
    s["status"] = f.code == kExitUsage ? "usage" : "fail";
    s["error"] = f.message;
    out << s.dump() << '\n';
    return f.code;
  } catch (const std::invalid_argument& e) {
    err << "mdvrp " << command << ": " << e.what() << '\n';
    json s = Summary(command);
    s["status"] = "usage";
    s["error"] = e.what();
    out << s.dump() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "mdvrp " << command << ": " << e.what() << '\n';
    json s = Summary(command);
    s["status"] = "error";
    s["error"] = e.what();
    out << s.dump() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace mdvrp::cli
