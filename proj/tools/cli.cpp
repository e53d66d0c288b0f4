#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "alselect/error.hpp"
#include "alselect/lm_scores.hpp"
#include "alselect/random.hpp"
#include "alselect/report.hpp"
#include "alselect/synthetic.hpp"
#include "alselect/version.hpp"

namespace alselect::cli {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::kConfig, what); }

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) config_error("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_as(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_error("'" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

std::size_t get_count(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    config_error("'" + std::string(key) + "' in " + where + " must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

StrategyConfig parse_strategy(const json& obj, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  reject_unknown_keys(obj, {"kind", "stages", "beta", "name", "diversity"}, where);
  StrategyConfig s;
  if (!obj.contains("kind")) config_error(where + " needs a 'kind'");
  s.kind = parse_strategy_kind(get_as<std::string>(obj, "kind", where));
  if (obj.contains("stages")) {
    if (s.kind != StrategyKind::kCustom) {
      config_error(where + ": 'stages' and kind=" + std::string(to_string(s.kind)) +
                   " are mutually exclusive (stages need kind=custom)");
    }
    if (!obj["stages"].is_array()) config_error(where + ": 'stages' must be an array");
    for (const auto& name : obj["stages"]) {
      if (!name.is_string()) config_error(where + ": stage names must be strings");
      s.stages.push_back(parse_criterion(name.get<std::string>()));
    }
  }
  if (obj.contains("beta")) s.beta = get_as<double>(obj, "beta", where);
  if (obj.contains("name")) s.name = get_as<std::string>(obj, "name", where);
  if (obj.contains("diversity")) {
    const auto& d = obj["diversity"];
    const std::string dw = where + ".diversity";
    if (!d.is_object()) config_error(dw + " must be an object");
    reject_unknown_keys(d, {"weighting", "symmetric_square", "combine", "symmetrize"}, dw);
    if (d.contains("weighting")) s.diversity.weighting = get_as<bool>(d, "weighting", dw);
    if (d.contains("symmetric_square") && d.contains("symmetrize")) {
      config_error(dw + ": give either 'symmetric_square' or 'symmetrize'");
    }
    if (d.contains("symmetric_square")) {
      s.diversity.symmetrize =
          get_as<bool>(d, "symmetric_square", dw) ? Symmetrize::kSquare : Symmetrize::kNone;
    }
    if (d.contains("symmetrize")) {
      const auto v = get_as<std::string>(d, "symmetrize", dw);
      if (v == "square") s.diversity.symmetrize = Symmetrize::kSquare;
      else if (v == "abs") s.diversity.symmetrize = Symmetrize::kAbs;
      else if (v == "none") s.diversity.symmetrize = Symmetrize::kNone;
      else config_error(dw + ": unknown symmetrize '" + v + "'");
    }
    if (d.contains("combine")) {
      const auto v = get_as<std::string>(d, "combine", dw);
      if (v == "editsub") s.diversity.combine = Combine::kEditSub;
      else if (v == "sub") s.diversity.combine = Combine::kSub;
      else if (v == "sum") s.diversity.combine = Combine::kSum;
      else config_error(dw + ": unknown combine '" + v + "'");
    }
  }
  validate(s);
  return s;
}

std::string digest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(buf.str())));
  return hex;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string file_safe(std::string name) {
  for (auto& c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return name;
}

void ensure_parent(const std::filesystem::path& path) {
  if (!path.has_parent_path()) return;
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + path.parent_path().string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kConfig:
    case ErrorCode::kBadStageList: return kExitConfig;
    case ErrorCode::kIo: return kExitIo;
    default: return kExitRuntime;
  }
}

}  // namespace

std::uint64_t env_default_seed() {
  const char* v = std::getenv("ALSELECT_SEED");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const unsigned long long seed = std::strtoull(v, &end, 10);
  return (end && *end == '\0') ? seed : 0;
}

DatasetFormat infer_format(const std::filesystem::path& path) {
  return path.extension() == ".jsonl" ? DatasetFormat::kJsonl : DatasetFormat::kTsv;
}

RunPlan parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                         std::uint64_t default_seed) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("config must be a JSON object");
  reject_unknown_keys(doc,
                      {"dataset", "scores", "strategy", "strategies", "n", "rounds",
                       "test_fraction", "cold_start", "seed", "seeds", "matcher", "traces"},
                      "config");
  RunPlan plan;
  auto& c = plan.base;

  if (!doc.contains("dataset") || !doc["dataset"].is_object()) {
    config_error("config needs a 'dataset' object");
  }
  const auto& ds = doc["dataset"];
  reject_unknown_keys(ds, {"path", "format"}, "dataset");
  if (!ds.contains("path")) config_error("dataset needs a 'path'");
  c.dataset_path = resolve(base_dir, get_as<std::string>(ds, "path", "dataset"));
  c.dataset_format = ds.contains("format")
                         ? parse_dataset_format(get_as<std::string>(ds, "format", "dataset"))
                         : infer_format(c.dataset_path);

  if (doc.contains("scores")) {
    const auto& sc = doc["scores"];
    if (!sc.is_object()) config_error("'scores' must be an object");
    reject_unknown_keys(sc, {"source", "path", "dim", "seed"}, "scores");
    const auto source = sc.contains("source") ? get_as<std::string>(sc, "source", "scores") : "stub";
    if (source == "stub") {
      c.scores.kind = ScoreSource::Kind::kStub;
      if (sc.contains("path")) config_error("scores.path is only valid with source=file");
      if (sc.contains("dim")) c.scores.dim = get_count(sc, "dim", "scores");
      if (sc.contains("seed")) c.scores.seed = get_count(sc, "seed", "scores");
    } else if (source == "file") {
      c.scores.kind = ScoreSource::Kind::kFile;
      if (!sc.contains("path")) config_error("scores with source=file need a 'path'");
      if (sc.contains("dim") || sc.contains("seed")) {
        config_error("scores.dim/seed are only valid with source=stub");
      }
      c.scores.path = resolve(base_dir, get_as<std::string>(sc, "path", "scores"));
    } else {
      config_error("unknown scores.source '" + source + "'");
    }
  }

  if (doc.contains("strategy") == doc.contains("strategies")) {
    config_error("give exactly one of 'strategy' or 'strategies'");
  }
  if (doc.contains("strategy")) {
    plan.strategies.push_back(parse_strategy(doc["strategy"], "strategy"));
  } else {
    if (!doc["strategies"].is_array() || doc["strategies"].empty()) {
      config_error("'strategies' must be a nonempty array");
    }
    std::size_t i = 0;
    std::set<std::string> names;
    for (const auto& s : doc["strategies"]) {
      plan.strategies.push_back(parse_strategy(s, "strategies[" + std::to_string(i++) + "]"));
      if (!names.insert(plan.strategies.back().display_name()).second) {
        config_error("duplicate strategy name '" + plan.strategies.back().display_name() +
                     "'; set distinct 'name' fields");
      }
    }
  }
  c.strategy = plan.strategies.front();

  if (doc.contains("n")) c.n = get_count(doc, "n", "config");
  if (doc.contains("rounds")) c.rounds = get_count(doc, "rounds", "config");
  if (doc.contains("test_fraction")) c.test_fraction = get_as<double>(doc, "test_fraction", "config");
  if (doc.contains("cold_start")) {
    c.cold_start = parse_cold_start(get_as<std::string>(doc, "cold_start", "config"));
  }
  c.seed = doc.contains("seed") ? get_count(doc, "seed", "config") : default_seed;
  if (doc.contains("seeds")) {
    if (!doc["seeds"].is_array() || doc["seeds"].empty()) {
      config_error("'seeds' must be a nonempty array");
    }
    for (const auto& s : doc["seeds"]) {
      if (!s.is_number_integer() || s.get<long long>() < 0) {
        config_error("seeds must be nonnegative integers");
      }
      plan.seeds.push_back(s.get<std::uint64_t>());
    }
  } else {
    plan.seeds.push_back(c.seed);
  }
  if (doc.contains("matcher")) {
    const auto& m = doc["matcher"];
    if (!m.is_object()) config_error("'matcher' must be an object");
    reject_unknown_keys(m, {"learning_rate", "epochs", "l2"}, "matcher");
    if (m.contains("learning_rate")) c.hyper.learning_rate = get_as<double>(m, "learning_rate", "matcher");
    if (m.contains("epochs")) c.hyper.epochs = get_count(m, "epochs", "matcher");
    if (m.contains("l2")) c.hyper.l2 = get_as<double>(m, "l2", "matcher");
  }
  if (doc.contains("traces")) plan.traces = get_as<bool>(doc, "traces", "config");
  validate(c);
  return plan;
}

std::string plan_json(const RunPlan& plan) {
  json j = json::parse(canonical_json(plan.base));
  j.erase("strategy");
  j["strategies"] = json::array();
  for (const auto& s : plan.strategies) {
    ExperimentConfig tmp = plan.base;
    tmp.strategy = s;
    j["strategies"].push_back(json::parse(canonical_json(tmp))["strategy"]);
  }
  j["seeds"] = plan.seeds;
  j["traces"] = plan.traces;
  return j.dump();
}

int cmd_gen_stub_scores(const std::filesystem::path& dataset, std::optional<DatasetFormat> format,
                        const std::filesystem::path& out, std::size_t dim, std::uint64_t seed,
                        std::ostream& err) {
  try {
    const auto data = load_dataset(dataset, format.value_or(infer_format(dataset)));
    const auto table = stub_scores(data, dim, seed);
    ensure_parent(out);
    write_scores(table, out);
    return kExitOk;
  } catch (const Error& e) {
    err << "gen-stub-scores: " << e.what() << '\n';
    return e.code() == ErrorCode::kConfig ? kExitConfig : kExitIo;
  }
}

int cmd_validate_scores(const std::filesystem::path& dataset, std::optional<DatasetFormat> format,
                        const std::filesystem::path& scores, std::ostream& out, std::ostream& err) {
  Dataset data;
  try {
    data = load_dataset(dataset, format.value_or(infer_format(dataset)));
  } catch (const Error& e) {
    err << "validate-scores: cannot load dataset: " << e.what() << '\n';
    return kExitIo;
  }
  try {
    const auto table = load_scores(scores, data);
    out << "ok: " << table.size() << " instances, dim " << table.dim() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "validate-scores: " << e.what() << '\n';
    return e.code() == ErrorCode::kIo ? kExitIo : kExitConfig;
  }
}

int cmd_run(const std::filesystem::path& config, const std::filesystem::path& out_dir,
            const RunOverrides& overrides, std::ostream& out, std::ostream& err) {
  RunPlan plan;
  try {
    std::ifstream in(config, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open config " + config.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    plan = parse_run_config(buf.str(), config.parent_path(), env_default_seed());
    if (overrides.seed) {
      plan.base.seed = *overrides.seed;
      plan.seeds = {*overrides.seed};
    }
    if (overrides.rounds) plan.base.rounds = *overrides.rounds;
    if (overrides.n) plan.base.n = *overrides.n;
    plan.traces = plan.traces || overrides.traces;
    validate(plan.base);
  } catch (const Error& e) {
    err << "run: " << e.what() << '\n';
    return exit_code_for(e);
  }

  try {
    const auto started = std::chrono::steady_clock::now();
    const auto inputs = prepare_inputs(plan.base);
    const auto comparison =
        compare_strategies(inputs, plan.base, plan.strategies, plan.seeds, overrides.jobs);
    const double elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir.string() + ": " + ec.message());

    std::ostringstream csv;
    write_curve_csv(comparison.runs, csv);
    write_text(out_dir / "curve.csv", csv.str());

    std::ostringstream svg;
    write_curve_svg(comparison.curves, svg);
    write_text(out_dir / "curve.svg", svg.str());

    const std::string digest = [&] {
      char hex[17];
      std::snprintf(hex, sizeof hex, "%016llx",
                    static_cast<unsigned long long>(fnv1a64(plan_json(plan))));
      return std::string(hex);
    }();
    write_text(out_dir / "summary.json", summary_json(comparison, digest));

    json manifest;
    manifest["tool"] = "alselect";
    manifest["version"] = std::string(kVersion);
    manifest["timestamp"] = utc_timestamp();
    manifest["config_digest"] = digest;
    manifest["config"] = json::parse(plan_json(plan));
    manifest["inputs"]["dataset"] = {{"path", plan.base.dataset_path.generic_string()},
                                     {"fnv1a64", digest_file(plan.base.dataset_path)}};
    if (plan.base.scores.kind == ScoreSource::Kind::kFile) {
      manifest["inputs"]["scores"] = {{"path", plan.base.scores.path.generic_string()},
                                      {"fnv1a64", digest_file(plan.base.scores.path)}};
    }
    manifest["jobs"] = overrides.jobs;
    manifest["wall_ms"] = elapsed_ms;
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

    if (plan.traces) {
      const auto dir = out_dir / "traces";
      std::filesystem::create_directories(dir, ec);
      if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string());
      for (const auto& run : comparison.runs) {
        std::ostringstream t;
        for (std::size_t r = 0; r < run.traces.size(); ++r) write_trace_jsonl(run.traces[r], r + 1, t);
        write_text(dir / (file_safe(run.strategy) + "-seed" + std::to_string(run.seed) + ".jsonl"),
                   t.str());
      }
    }

    for (const auto& c : comparison.curves) {
      char line[160];
      std::snprintf(line, sizeof line, "%s: final accuracy %.4f +/- %.4f\n", c.strategy.c_str(),
                    c.final_mean, c.final_stdev);
      out << line;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "run: " << e.what() << '\n';
    return e.code() == ErrorCode::kIo ? kExitIo : kExitRuntime;
  } catch (const std::exception& e) {
    err << "run: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_gen_synthetic(const std::filesystem::path& out, std::size_t pairs, std::uint64_t seed,
                      std::ostream& err) {
  try {
    SyntheticSpec spec;
    spec.pairs = pairs;
    spec.seed = seed;
    const auto data = make_synthetic(spec);
    std::ostringstream tsv;
    tsv << "# num_classes=" << data.num_classes() << '\n';
    for (const auto& p : data.pairs()) {
      tsv << join(p.tokens_a) << '\t' << join(p.tokens_b) << '\t' << *p.label << '\n';
    }
    write_text(out, tsv.str());
    return kExitOk;
  } catch (const Error& e) {
    err << "gen-synthetic: " << e.what() << '\n';
    return e.code() == ErrorCode::kConfig ? kExitConfig : kExitIo;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"alselect: pool-based active learning for sentence matching"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::uint64_t default_seed = env_default_seed();

  std::string gen_dataset, gen_out, gen_format;
  std::size_t gen_dim = kDefaultStubDim;
  std::uint64_t gen_seed = default_seed;
  auto* gen = app.add_subcommand("gen-stub-scores", "Write a stub score file for a dataset");
  gen->add_option("--dataset", gen_dataset, "Dataset file (tsv or jsonl)")->required();
  gen->add_option("--out", gen_out, "Output score file")->required();
  gen->add_option("--dim", gen_dim, "Embedding dimension")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Embedding hash seed (default: $ALSELECT_SEED or 0)");
  gen->add_option("--format", gen_format, "Dataset format: tsv|jsonl (default: by extension)");

  std::string val_dataset, val_scores, val_format;
  auto* val = app.add_subcommand("validate-scores", "Check a score file against a dataset");
  val->add_option("--dataset", val_dataset, "Dataset file")->required();
  val->add_option("--scores", val_scores, "Score file")->required();
  val->add_option("--format", val_format, "Dataset format: tsv|jsonl");

  std::string run_config, run_out;
  std::uint64_t run_seed = 0;
  std::size_t run_rounds = 0, run_n = 0;
  RunOverrides overrides;
  auto* run = app.add_subcommand("run", "Run active-learning experiments from a JSON config");
  run->add_option("--config", run_config, "Experiment config (JSON)")->required();
  run->add_option("--out", run_out, "Output directory")->required();
  auto* seed_opt = run->add_option("--seed", run_seed, "Override the seed (single run seed)");
  auto* rounds_opt = run->add_option("--rounds", run_rounds, "Override the number of rounds");
  auto* n_opt = run->add_option("--n", run_n, "Override the per-round budget");
  run->add_option("--jobs", overrides.jobs, "Parallel (strategy, seed) runs")->capture_default_str();
  run->add_flag("--traces", overrides.traces, "Write per-round selection traces");

  std::string syn_out;
  std::size_t syn_pairs = 2500;
  std::uint64_t syn_seed = default_seed;
  auto* syn = app.add_subcommand("gen-synthetic", "Write a synthetic two-class pair corpus (TSV)");
  syn->add_option("--out", syn_out, "Output TSV")->required();
  syn->add_option("--pairs", syn_pairs, "Number of pairs")->capture_default_str();
  syn->add_option("--seed", syn_seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  auto parse_format = [](const std::string& f) -> std::optional<DatasetFormat> {
    if (f.empty()) return std::nullopt;
    return parse_dataset_format(f);
  };

  try {
    if (gen->parsed()) {
      return cmd_gen_stub_scores(gen_dataset, parse_format(gen_format), gen_out, gen_dim, gen_seed,
                                 std::cerr);
    }
    if (val->parsed()) {
      return cmd_validate_scores(val_dataset, parse_format(val_format), val_scores, std::cout,
                                 std::cerr);
    }
    if (run->parsed()) {
      if (seed_opt->count()) overrides.seed = run_seed;
      if (rounds_opt->count()) overrides.rounds = run_rounds;
      if (n_opt->count()) overrides.n = run_n;
      return cmd_run(run_config, run_out, overrides, std::cout, std::cerr);
    }
    if (syn->parsed()) return cmd_gen_synthetic(syn_out, syn_pairs, syn_seed, std::cerr);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitConfig;
}

}  // namespace alselect::cli
