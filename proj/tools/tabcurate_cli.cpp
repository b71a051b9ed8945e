// Command-line driver. Artifacts live under <out>/<dataset>/<n_train>/<seed>/.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tabcurate/baselines.hpp"
#include "tabcurate/curator.hpp"
#include "tabcurate/dataset.hpp"
#include "tabcurate/error.hpp"
#include "tabcurate/evaluation.hpp"
#include "tabcurate/experiments.hpp"
#include "tabcurate/llm_client.hpp"
#include "tabcurate/mock.hpp"
#include "tabcurate/prompt.hpp"
#include "tabcurate/schema.hpp"
#include "tabcurate/splits.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tabcurate;

namespace {

struct Options {
  std::string schema_path;
  std::string data_path;
  std::string name;
  std::size_t n_train = 20;
  std::string seeds = "10";
  std::string out = "runs";
  std::size_t jobs = 1;
  bool impute = false;

  std::string generator = "llm";
  std::size_t n_target = 1000;
  bool no_context = false;
  std::string transcript;
  std::string provider_path;
  std::string template_path;
  std::string mock_spec_path;

  std::string method = "smote";
  std::size_t k_neighbors = 5;

  std::string backbone = "boosted_trees";
  std::size_t checkpoints = 100;
  double tau_conf = 0.2;
  double tau_al_fraction = 0.75;
  double subsample = CuratorConfig{}.subsample;

  std::vector<std::string> models;
  std::vector<std::string> sources;

  std::size_t bias_test = 2000;
  std::string bias_out;
};

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  const auto range = text.find("..");
  try {
    if (range != std::string::npos) {
      const auto lo = std::stoull(text.substr(0, range));
      const auto hi = std::stoull(text.substr(range + 2));
      if (hi < lo) throw Error(Errc::invalid_argument, "empty seed range " + text);
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else if (text.find(',') != std::string::npos) {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) seeds.push_back(std::stoull(item));
    } else {
      const auto count = std::stoull(text);
      for (std::uint64_t s = 0; s < count; ++s) seeds.push_back(s);
    }
  } catch (const std::logic_error&) {
    throw Error(Errc::invalid_argument, "cannot parse seeds '" + text + "'");
  }
  if (seeds.empty()) throw Error(Errc::invalid_argument, "no seeds selected");
  return seeds;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open " + path.string(), path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::io, path.string() + ": " + e.what(), path.string());
  }
}

void write_json(const fs::path& path, const json& doc) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot write " + path.string(), path.string());
  out << doc.dump(2) << '\n';
}

std::string dataset_name(const Options& o) {
  if (!o.name.empty()) return o.name;
  if (!o.schema_path.empty()) return fs::path(o.schema_path).stem().string();
  throw Error(Errc::invalid_argument, "--name or --schema is required");
}

fs::path dataset_root(const Options& o) { return fs::path(o.out) / dataset_name(o); }
fs::path seed_dir(const Options& o, std::uint64_t seed) {
  return dataset_root(o) / std::to_string(o.n_train) / std::to_string(seed);
}

/// --schema if given, else the copy stored by `split`.
TabularSchema resolve_schema(const Options& o) {
  if (!o.schema_path.empty()) return load_schema(o.schema_path);
  const auto stored = dataset_root(o) / "schema.json";
  if (fs::exists(stored)) return load_schema(stored);
  throw Error(Errc::invalid_argument, "no schema: pass --schema or run split first");
}

Dataset read_stage(const fs::path& dir, const std::string& stage, const TabularSchema& schema, Role role) {
  const auto path = dir / (stage + ".csv");
  if (!fs::exists(path)) throw Error(Errc::io, "missing artifact " + path.string(), path.string());
  IngestOptions opts;
  opts.role = role;
  return ingest_csv(path, schema, opts).data;
}

CuratorConfig curator_config(const Options& o) {
  CuratorConfig c;
  c.backbone = parse_backbone(o.backbone);
  c.n_checkpoints = o.checkpoints;
  c.tau_conf = o.tau_conf;
  c.tau_al_fraction = o.tau_al_fraction;
  c.subsample = o.subsample;
  c.validate();
  return c;
}

std::vector<DownstreamKind> model_kinds(const Options& o) {
  if (o.models.empty()) return all_downstream_kinds();
  std::vector<DownstreamKind> kinds;
  for (const auto& m : o.models) kinds.push_back(parse_kind(m));
  return kinds;
}

/// Runs fn(seed) for every seed on up to `jobs` threads; log lines are printed
/// in seed order once all work is done. The first error is rethrown.
template <typename Fn>
void for_each_seed(const std::vector<std::uint64_t>& seeds, std::size_t jobs, Fn fn) {
  std::vector<std::string> logs(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        logs[i] = fn(seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!logs[i].empty()) std::cout << logs[i] << '\n';
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void cmd_split(const Options& o) {
  if (o.schema_path.empty() || o.data_path.empty()) {
    throw Error(Errc::invalid_argument, "split needs --schema and --data");
  }
  const auto schema = load_schema(o.schema_path);
  IngestOptions opts;
  opts.impute = o.impute;
  const auto ingest = ingest_csv(fs::path(o.data_path), schema, opts);
  write_json(dataset_root(o) / "schema.json", schema_to_json(schema));
  std::cout << "read " << ingest.report.rows_read << " rows, kept " << ingest.data.size() << " (dropped "
            << ingest.report.dropped_bad_label << " bad label, " << ingest.report.dropped_bad_feature
            << " bad feature, imputed " << ingest.report.imputed_cells << " cells)\n";
  for_each_seed(parse_seeds(o.seeds), o.jobs, [&](std::uint64_t seed) {
    const auto split = make_splits(ingest.data, o.n_train, seed);
    const auto dir = seed_dir(o, seed);
    fs::create_directories(dir);
    write_csv(dir / "train.csv", split.train);
    write_csv(dir / "oracle.csv", split.oracle);
    write_csv(dir / "test.csv", split.test);
    return "seed " + std::to_string(seed) + ": train " + std::to_string(split.train.size()) + ", oracle " +
           std::to_string(split.oracle.size()) + ", test " + std::to_string(split.test.size());
  });
}

ProviderConfig provider_config(const Options& o) {
  if (o.provider_path.empty()) return {};
  return provider_from_json(read_json(o.provider_path));
}

std::string run_llm(const Options& o, const TabularSchema& schema, const Dataset& train, const fs::path& dir,
                    std::uint64_t seed) {
  const auto provider = provider_config(o);
  const auto tmpl = o.template_path.empty() ? std::string(kDefaultPromptTemplate) : load_prompt_template(o.template_path);
  const auto prompt = build_prompt(schema, train, o.n_target, !o.no_context, tmpl);
  std::ofstream(dir / "prompt.txt", std::ios::binary) << prompt.system_text << "\n\n" << prompt.render();

  GenerationResult result;
  bool partial = false;
  try {
    if (o.transcript.empty()) {
      result = generate_synthetic(prompt, schema, train, provider, o.n_target);
    } else {
      auto transport = CannedTransport::from_file(o.transcript);
      result = generate_synthetic(prompt, schema, train, provider, transport, o.n_target);
    }
  } catch (const BudgetExhausted& e) {
    result = e.partial();
    partial = true;
  }
  write_csv(dir / "synthetic.csv", result.data);
  json meta = {{"generator", "llm"},
               {"model", provider.model_name},
               {"temperature", provider.temperature},
               {"include_context", !o.no_context},
               {"n_target", o.n_target},
               {"rows", result.data.size()},
               {"calls", result.calls},
               {"retries_used", result.retries_used},
               {"budget_exhausted", partial},
               {"seed", seed},
               {"parse", result.report.to_json()}};
  write_json(dir / "generation.json", meta);
  return "seed " + std::to_string(seed) + ": " + std::to_string(result.data.size()) + " rows from " +
         std::to_string(result.calls) + " calls" + (partial ? " (budget exhausted)" : "");
}

Dataset run_baseline(const std::string& method, const Options& o, const Dataset& train, std::uint64_t seed) {
  if (method == "smote") {
    SmoteConfig c;
    c.k_neighbors = o.k_neighbors;
    c.n_target = o.n_target;
    c.seed = seed;
    return smote_generate(train, c);
  }
  if (method == "kde") {
    KdeConfig c;
    c.n_target = o.n_target;
    c.seed = seed;
    return kde_generate(train, c);
  }
  throw Error(Errc::invalid_argument, "unknown baseline '" + method + "' (smote|kde)", method);
}

void cmd_generate(const Options& o) {
  const auto seeds = parse_seeds(o.seeds);
  if (o.generator == "mock") {
    if (o.mock_spec_path.empty()) throw Error(Errc::invalid_argument, "mock generator needs --mock-spec");
    const auto spec = mock_spec_from_json(read_json(o.mock_spec_path));
    for_each_seed(seeds, o.jobs, [&](std::uint64_t seed) {
      const auto dir = seed_dir(o, seed);
      auto data = mock_sample(spec, o.n_target, mock_draws(seed).synthetic);
      fs::create_directories(dir);
      write_csv(dir / "synthetic.csv", data);
      std::size_t flipped = 0;
      for (const auto& r : data.rows()) flipped += r.was_flipped ? 1 : 0;
      write_json(dir / "generation.json",
                 {{"generator", "mock"}, {"rows", data.size()}, {"flipped", flipped}, {"seed", seed}});
      return "seed " + std::to_string(seed) + ": " + std::to_string(data.size()) + " mock rows";
    });
    return;
  }
  const auto schema = resolve_schema(o);
  for_each_seed(seeds, o.jobs, [&](std::uint64_t seed) -> std::string {
    const auto dir = seed_dir(o, seed);
    const auto train = read_stage(dir, "train", schema, Role::train);
    if (o.generator == "llm") return run_llm(o, schema, train, dir, seed);
    auto data = run_baseline(o.generator, o, train, seed);
    write_csv(dir / "synthetic.csv", data);
    write_json(dir / "generation.json", {{"generator", o.generator}, {"rows", data.size()}, {"seed", seed}});
    return "seed " + std::to_string(seed) + ": " + std::to_string(data.size()) + " " + o.generator + " rows";
  });
}

void cmd_baseline(const Options& o) {
  const auto schema = resolve_schema(o);
  for_each_seed(parse_seeds(o.seeds), o.jobs, [&](std::uint64_t seed) {
    const auto dir = seed_dir(o, seed);
    const auto train = read_stage(dir, "train", schema, Role::train);
    const auto data = run_baseline(o.method, o, train, seed);
    write_csv(dir / (o.method + ".csv"), data);
    return "seed " + std::to_string(seed) + ": " + std::to_string(data.size()) + " " + o.method + " rows";
  });
}

void cmd_curate(const Options& o) {
  const auto schema = resolve_schema(o);
  const auto config = curator_config(o);
  for_each_seed(parse_seeds(o.seeds), o.jobs, [&](std::uint64_t seed) {
    const auto dir = seed_dir(o, seed);
    const auto train = read_stage(dir, "train", schema, Role::train);
    const auto syn = read_stage(dir, "synthetic", schema, Role::synthetic);
    const auto outcome = curate(syn, fit_checkpoints(train, config, seed), config);
    write_csv(dir / "curated.csv", outcome.curated);
    write_csv(dir / "discarded.csv", outcome.discarded);
    write_json(dir / "curation.json", outcome_to_json(outcome));
    char line[160];
    std::snprintf(line, sizeof line, "seed %llu: kept %zu, discarded %zu (hardness %.3f, tau_al %.4f)",
                  static_cast<unsigned long long>(seed), outcome.curated.size(), outcome.discarded.size(),
                  outcome.hardness, outcome.thresholds.tau_al);
    return std::string(line);
  });
}

const std::vector<std::string> kDefaultSources = {"train", "synthetic", "curated", "smote", "kde"};

void cmd_evaluate(const Options& o) {
  const auto schema = resolve_schema(o);
  const auto kinds = model_kinds(o);
  const auto& sources = o.sources.empty() ? kDefaultSources : o.sources;
  for_each_seed(parse_seeds(o.seeds), o.jobs, [&](std::uint64_t seed) {
    const auto dir = seed_dir(o, seed);
    const auto test = read_stage(dir, "test", schema, Role::test);
    std::string log = "seed " + std::to_string(seed) + ":";
    for (const auto& source : sources) {
      if (!fs::exists(dir / (source + ".csv"))) {
        if (!o.sources.empty()) throw Error(Errc::io, "missing artifact " + (dir / (source + ".csv")).string());
        continue;
      }
      const auto data = read_stage(dir, source, schema, Role::synthetic);
      const auto report = tstr(data, test, kinds, seed, source);
      write_json(dir / ("eval_" + source + ".json"), report.to_json());
      char part[96];
      std::snprintf(part, sizeof part, " %s=%.4f", source.c_str(), report.mean_auc);
      log += part;
    }
    return log;
  });
}

void cmd_report(const Options& o) {
  const auto seeds = parse_seeds(o.seeds);
  const auto name = dataset_name(o);
  std::map<std::string, std::map<std::string, std::vector<double>>> auc;  // source -> model -> per seed
  std::vector<double> hardness;
  std::ostringstream flat;
  write_eval_csv_header(flat);
  for (auto seed : seeds) {
    const auto dir = seed_dir(o, seed);
    if (!fs::exists(dir)) throw Error(Errc::io, "missing run directory " + dir.string(), dir.string());
    for (const auto& entry : fs::directory_iterator(dir)) {
      const auto file = entry.path().filename().string();
      if (file.rfind("eval_", 0) != 0 || entry.path().extension() != ".json") continue;
      const auto report = EvalReport::from_json(read_json(entry.path()));
      write_eval_csv_rows(flat, report, name, o.n_train);
      for (const auto& [kind, value] : report.per_model_auc) auc[report.source_tag][kind_name(kind)].push_back(value);
      auc[report.source_tag]["mean"].push_back(report.mean_auc);
    }
    if (fs::exists(dir / "curation.json")) hardness.push_back(read_json(dir / "curation.json").at("hardness"));
  }
  if (auc.empty()) throw Error(Errc::io, "no evaluation reports found; run evaluate first");

  json summary = {{"dataset", name}, {"n_train", o.n_train}, {"seeds", seeds}, {"sources", json::object()}};
  std::printf("%-12s %-22s %8s %8s %3s\n", "source", "model", "mean", "stderr", "n");
  for (const auto& [source, per_model] : auc) {
    for (const auto& [model, values] : per_model) {
      const auto s = summarize(values);
      summary["sources"][source][model] = {{"mean", s.mean}, {"stderr", s.stderr_}, {"n", s.n}};
      std::printf("%-12s %-22s %8.4f %8.4f %3zu\n", source.c_str(), model.c_str(), s.mean, s.stderr_, s.n);
    }
  }
  if (!hardness.empty()) {
    const auto s = summarize(hardness);
    summary["hardness"] = {{"mean", s.mean}, {"stderr", s.stderr_}, {"n", s.n}};
    std::printf("hardness %.4f +/- %.4f over %zu seeds\n", s.mean, s.stderr_, s.n);
  }
  const auto root = dataset_root(o) / std::to_string(o.n_train);
  write_json(root / "summary.json", summary);
  std::ofstream(root / "results.csv", std::ios::binary) << flat.str();
}

void cmd_bias_demo(const Options& o) {
  BiasExperimentConfig config;
  config.n_train = o.n_train;
  config.n_synthetic = o.n_target;
  config.n_test = o.bias_test;
  config.curator = curator_config(o);
  const auto seeds = parse_seeds(o.seeds);
  std::vector<BiasSeedResult> results(seeds.size());
  std::mutex mutex;
  for_each_seed(seeds, o.jobs, [&](std::uint64_t seed) {
    auto r = run_bias_seed(config, seed);
    const std::lock_guard lock(mutex);
    results[static_cast<std::size_t>(std::find(seeds.begin(), seeds.end(), seed) - seeds.begin())] = r;
    return std::string();
  });

  json doc = {{"seeds", seeds}, {"rows", json::array()}};
  std::printf("%-20s %10s %8s %8s\n", "training data", "accuracy", "d(Y=1)", "d(Y=0)");
  for (std::size_t s : {bias_synthetic, bias_train, bias_curated}) {
    std::vector<double> acc, d1, d0;
    for (const auto& r : results) {
      acc.push_back(r.accuracy[s]);
      d1.push_back(r.delta_y1[s]);
      d0.push_back(r.delta_y0[s]);
    }
    const auto a = summarize(acc), x = summarize(d1), y = summarize(d0);
    std::printf("%-20s %9.1f%% %8.2f %8.2f\n", bias_source_name(s), 100.0 * a.mean, x.mean, y.mean);
    doc["rows"].push_back({{"source", bias_source_name(s)},
                           {"accuracy", a.mean},
                           {"accuracy_stderr", a.stderr_},
                           {"delta_y1", x.mean},
                           {"delta_y0", y.mean}});
  }
  std::vector<double> h;
  for (const auto& r : results) h.push_back(r.hardness);
  doc["hardness"] = summarize(h).mean;
  std::printf("mean discarded fraction %.3f\n", summarize(h).mean);
  if (!o.bias_out.empty()) write_json(fs::path(o.bias_out) / "bias_demo.json", doc);
}

void add_common(CLI::App* cmd, Options& o, bool needs_data = false) {
  cmd->add_option("--schema", o.schema_path, "Schema JSON");
  if (needs_data) cmd->add_option("--data", o.data_path, "Source CSV")->required();
  cmd->add_option("--name", o.name, "Dataset name (default: schema file stem)");
  cmd->add_option("--n-train", o.n_train, "Training rows per split")->capture_default_str();
  cmd->add_option("--seeds", o.seeds, "Seed count N (0..N-1), list a,b,c or range a..b")->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--jobs", o.jobs, "Seeds processed in parallel")->capture_default_str();
}

void add_curator(CLI::App* cmd, Options& o) {
  cmd->add_option("--backbone", o.backbone, "boosted_trees | sgd_linear")->capture_default_str();
  cmd->add_option("--checkpoints", o.checkpoints, "Checkpoints E")->capture_default_str();
  cmd->add_option("--tau-conf", o.tau_conf, "Confidence threshold")->capture_default_str();
  cmd->add_option("--tau-al-fraction", o.tau_al_fraction, "Aleatoric threshold fraction of the range")
      ->capture_default_str();
  cmd->add_option("--subsample", o.subsample, "Row fraction per boosting round")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curated LLM-based tabular data augmentation"};
  app.require_subcommand(1);
  Options o;

  auto* split = app.add_subcommand("split", "Class-balanced train / oracle / test splits");
  add_common(split, o, true);
  split->add_flag("--impute", o.impute, "Impute missing cells instead of dropping rows");

  auto* generate = app.add_subcommand("generate", "Generate synthetic rows into synthetic.csv");
  add_common(generate, o);
  generate->add_option("--generator", o.generator, "llm | mock | smote | kde")->capture_default_str();
  generate->add_option("--n-target", o.n_target, "Rows to generate")->capture_default_str();
  generate->add_flag("--no-context", o.no_context, "Drop background and feature descriptions from the prompt");
  generate->add_option("--transcript", o.transcript, "Canned LLM responses (JSON list) instead of live calls");
  generate->add_option("--provider", o.provider_path, "Provider settings JSON");
  generate->add_option("--template", o.template_path, "Prompt template file");
  generate->add_option("--mock-spec", o.mock_spec_path, "Mock mixture JSON for --generator mock");
  generate->add_option("--k-neighbors", o.k_neighbors, "SMOTE neighbours")->capture_default_str();

  auto* baseline = app.add_subcommand("baseline", "SMOTE or KDE rows into <method>.csv");
  add_common(baseline, o);
  baseline->add_option("--method", o.method, "smote | kde")->capture_default_str();
  baseline->add_option("--n-target", o.n_target, "Rows to generate")->capture_default_str();
  baseline->add_option("--k-neighbors", o.k_neighbors, "SMOTE neighbours")->capture_default_str();

  auto* curate_cmd = app.add_subcommand("curate", "Split synthetic.csv into curated.csv and discarded.csv");
  add_common(curate_cmd, o);
  add_curator(curate_cmd, o);

  auto* evaluate = app.add_subcommand("evaluate", "Train on each source, score AUC on test.csv");
  add_common(evaluate, o);
  evaluate->add_option("--models", o.models, "Downstream models (default: all four)");
  evaluate->add_option("--sources", o.sources, "Stages to evaluate (default: every one present)");

  auto* report = app.add_subcommand("report", "Aggregate evaluations into mean +/- stderr tables");
  add_common(report, o);

  auto* bias = app.add_subcommand("bias-demo", "Synthetic bias experiment: biased vs train vs curated");
  bias->add_option("--seeds", o.seeds, "Seed count N, list or range")->capture_default_str();
  bias->add_option("--n-train", o.n_train, "Clean training rows")->capture_default_str();
  bias->add_option("--n-target", o.n_target, "Biased synthetic rows")->capture_default_str();
  bias->add_option("--n-test", o.bias_test, "Clean test rows")->capture_default_str();
  bias->add_option("--out", o.bias_out, "Write bias_demo.json into this directory");
  bias->add_option("--jobs", o.jobs, "Seeds processed in parallel")->capture_default_str();
  add_curator(bias, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (split->parsed()) cmd_split(o);
    if (generate->parsed()) cmd_generate(o);
    if (baseline->parsed()) cmd_baseline(o);
    if (curate_cmd->parsed()) cmd_curate(o);
    if (evaluate->parsed()) cmd_evaluate(o);
    if (report->parsed()) cmd_report(o);
    if (bias->parsed()) cmd_bias_demo(o);
  } catch (const Error& e) {
    std::cerr << json{{"error", errc_name(e.code())}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
    return 3;
  }
  return 0;
}
