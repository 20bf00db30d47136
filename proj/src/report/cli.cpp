#include "sockaudit/report/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sockaudit/annotation/kappa.hpp"
#include "sockaudit/annotation/labels.hpp"
#include "sockaudit/classifier/evaluation.hpp"
#include "sockaudit/classifier/features.hpp"
#include "sockaudit/core/errors.hpp"
#include "sockaudit/core/run_log.hpp"
#include "sockaudit/report/plots.hpp"
#include "sockaudit/report/study_config.hpp"
#include "sockaudit/report/tables.hpp"
#include "sockaudit/scenario/study.hpp"

namespace sockaudit::report {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string output;
  std::string config;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw Error("failed writing '" + path.string() + "'");
}

StudyConfig study_config(const Globals& g) {
  StudyConfig c = g.config.empty() ? StudyConfig{} : load_study_config(g.config);
  if (g.seed) c.master_seed = *g.seed;
  if (g.workers) c.workers = std::max<std::size_t>(1, *g.workers);
  return c;
}

// Creates the directory and proves it is writable before anything else is
// produced, so a failure leaves no partial output behind.
void prepare_output(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  const auto probe = dir / ".sockaudit-probe";
  {
    std::ofstream f(probe);
    if (!f) throw ConfigError("output directory '" + dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
}

int cmd_run(const Globals& g, std::ostream& out, std::ostream& err) {
  if (g.output.empty()) throw ConfigError("run needs --output");
  const auto config = study_config(g);
  const fs::path dir = g.output;
  prepare_output(dir);
  fs::create_directories(dir / "runs");

  auto catalog = std::make_shared<const platform::Catalog>(platform::generate_catalog(config.catalog));
  auto platform = std::make_shared<const platform::SimulatedPlatform>(catalog, config.personalization);
  auto topics = scenario::simulator_study_topics(*catalog, config.parameters, config.master_seed);
  if (!config.topics.empty()) {
    std::erase_if(topics, [&](const auto& t) {
      return std::find(config.topics.begin(), config.topics.end(), t.topic.topic_id) ==
             config.topics.end();
    });
  }
  const auto plan =
      scenario::plan_study(topics, config.parameters, config.master_seed, config.time_mode);
  scenario::StudyOptions options;
  options.workers = config.workers;
  options.record_dir = dir / "runs";
  const auto records = scenario::run_study(plan, scenario::simulator_factory(platform), options);

  catalog->export_jsonl(dir / "catalog.jsonl");
  platform::ground_truth_labels(*catalog).save(dir / "labels.tsv");
  write_file(dir / "config.json", canonical_json(config) + "\n");

  json runs = json::array();
  std::size_t failed = 0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& r = records[i];
    json entry{{"run_id", r.run_id},
               {"topic_id", r.topic_id},
               {"agent_seed", plan[i].config.agent_seed},
               {"session_seed", plan[i].session_seed},
               {"status", std::string(to_string(r.status))},
               {"path", "runs/" + r.run_id + ".jsonl"}};
    if (r.status != RunStatus::kCompleted) {
      ++failed;
      entry["failure_reason"] = r.failure_reason;
      err << "run " << r.run_id << " failed: " << r.failure_reason << '\n';
    }
    runs.push_back(std::move(entry));
  }
  json manifest{{"study_id", config.study_id},
                {"config_digest", config_digest(config)},
                {"master_seed", config.master_seed},
                {"preset", config.preset},
                {"runs", runs},
                {"outputs",
                 {{"catalog", "catalog.jsonl"},
                  {"labels", "labels.tsv"},
                  {"config", "config.json"},
                  {"runs", "runs"}}}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  out << records.size() << " runs, " << failed << " failed; manifest at "
      << (dir / "manifest.json").string() << '\n';
  return failed == 0 ? kExitOk : kExitRunFailures;
}

struct EvaluateArgs {
  std::string records, labels, report;
  bool plots = false;
};

int cmd_evaluate(const Globals& g, EvaluateArgs a, std::ostream& out, std::ostream& err) {
  if (!g.output.empty()) {
    if (a.records.empty()) a.records = (fs::path(g.output) / "runs").string();
    if (a.labels.empty()) a.labels = (fs::path(g.output) / "labels.tsv").string();
    if (a.report.empty()) a.report = (fs::path(g.output) / "report").string();
  }
  if (a.records.empty() || a.labels.empty() || a.report.empty()) {
    throw ConfigError("evaluate needs --records, --labels and --report (or --output)");
  }
  const auto config = study_config(g);
  const auto& settings = config.evaluation;
  if (!fs::is_directory(a.records)) throw ConfigError("no records directory '" + a.records + "'");
  const auto records = read_run_directory(a.records);
  if (records.empty()) throw ConfigError("no run records in '" + a.records + "'");
  const auto labels = annotation::LabelStore::load(a.labels).resolve(settings.resolution);

  const auto& extraction = settings.hypotheses.extraction;
  const auto coverage = stats::label_coverage(records, labels, extraction);
  if (coverage.unlabeled_fraction() > settings.max_unlabeled_fraction) {
    err << "error: " << coverage.unlabeled << " of " << coverage.items
        << " scored items have no label (limit "
        << format_number(settings.max_unlabeled_fraction * 100.0, 1) << "%); most frequent:\n";
    for (std::size_t i = 0; i < coverage.missing.size() && i < 10; ++i) {
      err << "  " << coverage.missing[i].first << '\t' << coverage.missing[i].second << '\n';
    }
    return kExitConfigError;
  }

  prepare_output(a.report);
  const fs::path dir = a.report;
  const auto verdicts = stats::evaluate_hypotheses(records, labels, settings.hypotheses);
  write_file(dir / "verdicts.tsv", verdicts_tsv(verdicts));
  write_file(dir / "diff_to_linear.tsv", diff_to_linear_tsv(verdicts));
  long boundary = 0;
  for (const auto& r : records) {
    if (r.status == RunStatus::kCompleted) boundary = static_cast<long>(r.parameters.n_prom);
  }
  for (auto m : stats::kModalities) {
    const std::string name(stats::to_string(m));
    const auto ex = stats::extract_comparison_points(records, m, labels, extraction);
    if (ex.tally.unlabeled + ex.tally.discarded > 0) {
      err << "warning: " << name << ": skipped " << ex.tally.unlabeled << " unlabeled and "
          << ex.tally.discarded << " discarded items\n";
    }
    write_file(dir / ("comparison_" + name + ".tsv"), comparison_table_tsv(m, ex, verdicts));
    const auto series = series_rows(records, m, labels, extraction);
    write_file(dir / ("series_" + name + ".tsv"), series_tsv(series));
    const auto shares = proportion_rows(records, m, labels, extraction);
    write_file(dir / ("proportions_" + name + ".tsv"), proportions_tsv(shares));
    if (a.plots) {
      write_file(dir / ("series_" + name + ".svg"),
                 series_svg(series, "Mean score, " + name, boundary));
      write_file(dir / ("proportions_" + name + ".svg"),
                 proportions_svg(shares, "overall", "Stance shares, " + name, boundary));
    }
  }
  std::size_t supported = 0;
  for (const auto& v : verdicts) supported += v.verdict == stats::Verdict::kSupported ? 1 : 0;
  out << records.size() << " runs evaluated, " << verdicts.size() << " verdicts (" << supported
      << " supported); report in " << dir.string() << '\n';
  return kExitOk;
}

struct ClassifyArgs {
  std::string model, catalog, labels, records, annotator = "classifier";
};

int cmd_classify(const Globals&, const ClassifyArgs& a, std::ostream& out, std::ostream& err) {
  const auto model = classifier::ClassifierModel::load(a.model);
  const auto catalog = platform::Catalog::import_jsonl(a.catalog);
  std::optional<std::set<VideoId>> wanted;
  if (!a.records.empty()) {
    wanted.emplace();
    for (const auto& r : read_run_directory(a.records)) {
      for (const auto& s : r.snapshots) {
        for (const auto& item : s.items) wanted->insert(item.video_id);
      }
    }
  }
  std::uint64_t ts = 1;
  if (fs::exists(a.labels)) ts = annotation::LabelStore::load(a.labels).next_timestamp();
  classifier::FeatureConfig features;
  features.dims_per_channel = model.input_size() / classifier::kChannelCount;
  std::vector<annotation::LabelRecord> predicted;
  std::vector<VideoId> skipped;
  for (const auto& e : catalog.entries()) {
    if (wanted && !wanted->count(e.video.video_id)) continue;
    try {
      const auto x = classifier::featurize(e.video, e.comments, features);
      const auto p = classifier::predict(model, x);
      annotation::LabelRecord r;
      r.video_id = e.video.video_id;
      r.code = code_for_stance(p.stance);
      r.annotator_id = a.annotator;
      r.source = annotation::LabelSource::kPredicted;
      r.confidence = p.confidence;
      r.timestamp = ts++;
      predicted.push_back(std::move(r));
    } catch (const Unfeaturizable&) {
      skipped.push_back(e.video.video_id);
    }
  }
  annotation::LabelStore::append(a.labels, predicted);
  for (const auto& id : skipped) err << "unfeaturizable, skipped: " << id << '\n';
  out << predicted.size() << " predicted labels appended to " << a.labels << '\n';
  return kExitOk;
}

struct TrainArgs {
  std::string catalog, labels, model, setup = "three_class", report;
  std::size_t folds = 0;
  std::size_t epochs = classifier::TrainingOptions{}.epochs;
};

int cmd_train(const Globals& g, const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const auto catalog = platform::Catalog::import_jsonl(a.catalog);
  const auto store =
      a.labels.empty() ? platform::ground_truth_labels(catalog) : annotation::LabelStore::load(a.labels);
  const auto labels = store.resolve();
  const auto setup = [&] {
    try {
      return classifier::class_setup_from_string(a.setup);
    } catch (const ParseError& e) {
      throw ConfigError(std::string("--setup: ") + e.what());
    }
  }();
  std::vector<classifier::LabeledExample> corpus;
  for (const auto& e : catalog.entries()) {
    const auto it = labels.find(e.video.video_id);
    if (it == labels.end() || !it->second) continue;
    try {
      corpus.push_back({e.video.video_id, classifier::featurize(e.video, e.comments), *it->second});
    } catch (const Unfeaturizable&) {
      err << "unfeaturizable, skipped: " << e.video.video_id << '\n';
    }
  }
  classifier::TrainingOptions options;
  options.epochs = a.epochs;
  const std::uint64_t seed = g.seed.value_or(1);
  if (a.folds > 0) {
    const auto report = classifier::cross_validate(corpus, setup, a.folds, seed, options);
    const auto metrics = classifier::metrics_table(report);
    const auto confusion = classifier::confusion_table(report);
    if (!a.report.empty()) {
      prepare_output(a.report);
      write_file(fs::path(a.report) / "metrics.tsv", metrics);
      write_file(fs::path(a.report) / "confusion.tsv", confusion);
    } else {
      out << metrics << '\n' << confusion;
    }
  }
  if (!a.model.empty()) {
    classifier::train(corpus, setup, seed, options).save(a.model);
    out << "model trained on " << corpus.size() << " videos written to " << a.model << '\n';
  }
  return kExitOk;
}

struct KappaArgs {
  std::string labels, a, b, level = "code";
};

int cmd_kappa(const KappaArgs& k, std::ostream& out) {
  const auto store = annotation::LabelStore::load(k.labels);
  annotation::KappaLevel level;
  if (k.level == "code") {
    level = annotation::KappaLevel::kCode;
  } else if (k.level == "stance") {
    level = annotation::KappaLevel::kStance;
  } else {
    throw ConfigError("--level must be \"code\" or \"stance\"");
  }
  const auto [codes_a, codes_b] = annotation::paired_codes(store, k.a, k.b);
  const auto matrix = annotation::build_agreement(codes_a, codes_b, level);
  out << annotation::to_json(annotation::summarize_kappa(matrix, level)) << '\n';
  return kExitOk;
}

struct CompareArgs {
  std::string records_a, labels_a, records_b, labels_b, queries, point = "E1", out;
};

int cmd_compare(const Globals& g, const CompareArgs& c, std::ostream& out) {
  const auto config = study_config(g);
  const auto ra = read_run_directory(c.records_a);
  const auto rb = read_run_directory(c.records_b);
  const auto la = annotation::LabelStore::load(c.labels_a).resolve(config.evaluation.resolution);
  const auto lb = annotation::LabelStore::load(c.labels_b).resolve(config.evaluation.resolution);
  std::vector<std::string> queries;
  if (!c.queries.empty()) {
    std::stringstream ss(c.queries);
    for (std::string q; std::getline(ss, q, ',');) {
      if (!q.empty()) queries.push_back(q);
    }
  } else {
    auto collect = [](const std::vector<RunRecord>& rs) {
      std::set<std::string> qs;
      for (const auto& r : rs) {
        for (const auto& s : r.snapshots) {
          if (s.query) qs.insert(*s.query);
        }
      }
      return qs;
    };
    const auto qa = collect(ra);
    const auto qb = collect(rb);
    std::set_intersection(qa.begin(), qa.end(), qb.begin(), qb.end(), std::back_inserter(queries));
  }
  stats::CompareConfig cc;
  cc.alpha = config.evaluation.hypotheses.alpha;
  cc.extraction = config.evaluation.hypotheses.extraction;
  cc.method = config.evaluation.hypotheses.method;
  if (c.point == "S1") {
    cc.point = stats::Point::kS1;
  } else if (c.point == "E1") {
    cc.point = stats::Point::kE1;
  } else if (c.point == "E2") {
    cc.point = stats::Point::kE2;
  } else {
    throw ConfigError("--point must be S1, E1 or E2");
  }
  const auto report = stats::compare_studies(ra, la, rb, lb, queries, cc);
  const auto text = comparison_report_tsv(report);
  if (c.out.empty()) {
    out << text;
  } else {
    write_file(c.out, text);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sock-puppet audits of a simulated recommender platform", "sockaudit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed (run) or training seed (train)");
  app.add_option("--workers", g.workers, "Concurrent runs");
  app.add_option("--output", g.output, "Study output directory");
  app.add_option("--config", g.config, "Study config file (JSON with comments)");

  auto* run = app.add_subcommand("run", "Run a study against the simulator");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score runs and evaluate the hypotheses");
  evaluate->add_option("--records", ev.records, "Directory of run logs");
  evaluate->add_option("--labels", ev.labels, "Label table");
  evaluate->add_option("--report", ev.report, "Report directory");
  evaluate->add_flag("--plots", ev.plots, "Also write SVG plots");

  ClassifyArgs cl;
  auto* classify = app.add_subcommand("classify", "Predict labels for catalog videos");
  classify->add_option("--model", cl.model, "Trained model")->required();
  classify->add_option("--catalog", cl.catalog, "Catalog export")->required();
  classify->add_option("--labels", cl.labels, "Label table to append to")->required();
  classify->add_option("--records", cl.records, "Only videos seen in these run logs");
  classify->add_option("--annotator", cl.annotator, "Annotator id of the predictions");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train or cross-validate the classifier");
  train->add_option("--catalog", tr.catalog, "Catalog export")->required();
  train->add_option("--labels", tr.labels, "Label table (default: catalog ground truth)");
  train->add_option("--model", tr.model, "Write the trained model here");
  train->add_option("--setup", tr.setup, "binary_no_neutral, binary_with_neutral or three_class");
  train->add_option("--folds", tr.folds, "Cross-validation folds (0 skips)");
  train->add_option("--epochs", tr.epochs, "Training epochs");
  train->add_option("--report", tr.report, "Directory for cross-validation tables");

  KappaArgs ka;
  auto* kappa = app.add_subcommand("kappa", "Inter-annotator agreement");
  kappa->add_option("--labels", ka.labels, "Label table")->required();
  kappa->add_option("--annotator-a", ka.a, "First annotator")->required();
  kappa->add_option("--annotator-b", ka.b, "Second annotator")->required();
  kappa->add_option("--level", ka.level, "code or stance");

  CompareArgs co;
  auto* compare = app.add_subcommand("compare", "Compare two studies");
  compare->add_option("--records-a", co.records_a, "Run logs of study A")->required();
  compare->add_option("--labels-a", co.labels_a, "Labels of study A")->required();
  compare->add_option("--records-b", co.records_b, "Run logs of study B")->required();
  compare->add_option("--labels-b", co.labels_b, "Labels of study B")->required();
  compare->add_option("--queries", co.queries, "Comma-separated shared queries");
  compare->add_option("--point", co.point, "S1, E1 or E2");
  compare->add_option("--out", co.out, "Write the table here instead of stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << "run with --help for usage\n";
    return kExitConfigError;
  }

  try {
    if (*run) return cmd_run(g, out, err);
    if (*evaluate) return cmd_evaluate(g, ev, out, err);
    if (*classify) return cmd_classify(g, cl, out, err);
    if (*train) return cmd_train(g, tr, out, err);
    if (*kappa) return cmd_kappa(ka, out);
    if (*compare) return cmd_compare(g, co, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace sockaudit::report
