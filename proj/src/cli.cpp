#include "phonoparse/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "phonoparse/codebook.hpp"
#include "phonoparse/io.hpp"
#include "phonoparse/parser.hpp"
#include "phonoparse/quantize.hpp"
#include "phonoparse/synthgen.hpp"
#include "phonoparse/types.hpp"

namespace phonoparse::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitUsageError = 2;

// The context sweep of the standard experiment table, used when --context
// is not given to eval / cross-eval.
const std::vector<std::size_t> kDefaultContextSweep = {0, 1, 2, 4, 6};

Task parse_task_flag(const std::string& value) {
  const auto task = task_from_string(value);
  if (!task) throw Error("unknown task '" + value + "'");
  return *task;
}

BoundaryPolicy parse_policy_flag(const std::string& value) {
  const auto policy = boundary_policy_from_string(value);
  if (!policy) throw Error("--boundary-policy expects 'clamp' or 'skip'");
  return *policy;
}

// Parse-time flag validators, so bad flag values are usage errors (exit 2)
// rather than data errors.

const CLI::Validator kTaskValidator(
    [](std::string& v) {
      return task_from_string(v) ? std::string{} : "unknown task '" + v + "'";
    },
    "{cv,stress,accent}");

const CLI::Validator kPolicyValidator(
    [](std::string& v) {
      return boundary_policy_from_string(v) ? std::string{} : "expected 'clamp' or 'skip'";
    },
    "{clamp,skip}");

const CLI::Validator kOverlapValidator(
    [](std::string& v) {
      return template_overlap_from_string(v) ? std::string{}
                                             : "expected 'disjoint' or 'shared'";
    },
    "{disjoint,shared}");

const CLI::Validator kLinkValidator(
    [](std::string& v) { return task_link_from_string(v) ? std::string{} : "unknown link mode"; },
    "{none,accent-equals-stress,accent-complements-stress}");

const CLI::Validator kMetricValidator(
    [](std::string& v) -> std::string {
      try {
        (void)Metric::parse(v);
        return {};
      } catch (const Error& e) {
        return e.what();
      }
    },
    "METRIC");

const CLI::Validator kMetricListValidator(
    [](std::string& v) -> std::string {
      try {
        std::stringstream ss(v);
        std::string item;
        bool any = false;
        while (std::getline(ss, item, ',')) {
          if (item.empty()) continue;
          if (item != "all") (void)Metric::parse(item);
          any = true;
        }
        return any ? std::string{} : "lists no metrics";
      } catch (const Error& e) {
        return e.what();
      }
    },
    "METRIC[,METRIC...]");

const CLI::Validator kThresholdValidator(
    [](std::string& v) -> std::string {
      try {
        const double x = std::stod(v);
        return x > 0.0 && x < 1.0 ? std::string{} : "must lie strictly inside (0,1)";
      } catch (...) {
        return "not a number";
      }
    },
    "(0,1)");

const CLI::Validator kHalfOpenProbValidator(
    [](std::string& v) -> std::string {
      try {
        const double x = std::stod(v);
        return x >= 0.0 && x < 0.5 ? std::string{} : "must lie in [0, 0.5)";
      } catch (...) {
        return "not a number";
      }
    },
    "[0,0.5)");

std::vector<Metric> parse_metric_list(const std::string& value) {
  std::vector<Metric> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "all") {
      for (const MetricKind kind : kAllMetricKinds) out.push_back(Metric::of(kind));
    } else if (!item.empty()) {
      out.push_back(Metric::parse(item));
    }
  }
  if (out.empty()) throw Error("--metric lists no metrics");
  return out;
}

struct LoadedCorpus {
  PosteriorSequence sequence;
  std::vector<SegmentAnnotation> annotations;
};

LoadedCorpus load_corpus(const std::string& prefix) {
  LoadedCorpus c;
  c.sequence = io::read_posteriors(std::filesystem::path(prefix + ".post"));
  c.annotations =
      io::read_labels(std::filesystem::path(prefix + ".segs"), c.sequence.num_frames());
  return c;
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

void print_eval_table(std::ostream& out, const std::vector<EvalReport>& reports,
                      const std::vector<Metric>& metrics,
                      const std::vector<std::size_t>& contexts, Task task,
                      const std::optional<Task>& books_task) {
  out << "Accuracy (%) of linguistic parsing, task=" << task_name(task);
  if (books_task) out << " using " << task_name(*books_task) << " codebooks";
  out << "\n";
  out << std::left << std::setw(34) << "Metric / Context";
  for (const std::size_t c : contexts) out << std::right << std::setw(9) << c;
  out << "\n";
  auto find_report = [&](const Metric& m, std::size_t c) -> const EvalReport& {
    for (const auto& r : reports) {
      if (r.metric == m && r.context == c) return r;
    }
    throw Error("missing report entry");
  };
  for (const auto& m : metrics) {
    out << std::left << std::setw(34) << (m.to_string() + " (segment)");
    for (const std::size_t c : contexts) {
      out << std::right << std::setw(9) << percent(find_report(m, c).segment_accuracy_mean);
    }
    out << "\n";
    out << std::left << std::setw(34) << (m.to_string() + " (frame)");
    for (const std::size_t c : contexts) {
      out << std::right << std::setw(9) << percent(find_report(m, c).frame_accuracy_mean);
    }
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// Subcommand configs
// ---------------------------------------------------------------------------

struct GenArgs {
  std::string out;
  std::size_t k = 15;
  std::size_t templates_per_class = 5;
  double noise = 0.0;
  double softness = 0.1;
  std::size_t segments = 100;
  std::size_t frames_min = 3;
  std::size_t frames_max = 8;
  std::uint64_t seed = 0;
  std::string overlap = "disjoint";
  std::string link = "none";
};

int run_gen(const GenArgs& args) {
  SynthConfig cfg;
  cfg.k = args.k;
  cfg.templates_per_class = SynthConfig::uniform_templates(args.templates_per_class);
  cfg.noise_flip_prob = args.noise;
  cfg.softness = args.softness;
  cfg.segments = args.segments;
  cfg.frames_per_segment_min = args.frames_min;
  cfg.frames_per_segment_max = args.frames_max;
  cfg.seed = args.seed;
  const auto overlap = template_overlap_from_string(args.overlap);
  if (!overlap) throw Error("--overlap expects 'disjoint' or 'shared'");
  cfg.overlap = *overlap;
  const auto link = task_link_from_string(args.link);
  if (!link) {
    throw Error("--link expects 'none', 'accent-equals-stress' or 'accent-complements-stress'");
  }
  cfg.link = *link;

  const SynthCorpus corpus = generate(cfg);
  io::write_posteriors(corpus.sequence, std::filesystem::path(args.out + ".post"));
  io::write_labels(corpus.annotations, std::filesystem::path(args.out + ".segs"));
  std::cout << "wrote " << args.out << ".post (" << corpus.sequence.num_frames() << " frames, K="
            << corpus.sequence.k() << ") and " << args.out << ".segs ("
            << corpus.annotations.size() << " segments)\n";
  return kExitOk;
}

struct BuildArgs {
  std::string in;
  std::string out;
  std::string task;
  std::size_t context = 0;
  double threshold = 0.5;
  std::string policy = "clamp";
};

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

int run_build(const BuildArgs& args) {
  const Task task = parse_task_flag(args.task);
  QuantizeConfig qcfg{args.threshold, args.context, parse_policy_flag(args.policy)};
  const LoadedCorpus corpus = load_corpus(args.in);
  const auto patterns = quantize_sequence(corpus.sequence, qcfg);
  const CodebookPair books = build_codebooks(patterns, corpus.annotations, task);
  for (const ClassId c : {ClassId::A, ClassId::B}) {
    const Codebook& book = books.book(c);
    const std::string path =
        args.out + "." + lowercase(class_long_label(task, c)) + ".cbk";
    io::write_codebook(book, std::filesystem::path(path));
    std::cout << "wrote " << path << " (" << book.size() << " unique patterns, "
              << book.total_count() << " occurrences)\n";
  }
  return kExitOk;
}

struct ParseArgs {
  std::string in;
  std::string book_a;
  std::string book_b;
  std::string metric = "innerproduct";
  std::optional<std::size_t> context;
  double threshold = 0.5;
  std::string policy = "clamp";
  std::string out;  // empty: stdout
};

int run_parse(const ParseArgs& args) {
  Codebook first = io::read_codebook(std::filesystem::path(args.book_a));
  Codebook second = io::read_codebook(std::filesystem::path(args.book_b));
  if (first.task() != second.task()) throw Error("codebooks belong to different tasks");
  if (first.class_id() == second.class_id()) {
    throw Error("codebooks represent the same class; need one per class");
  }
  if (first.class_id() == ClassId::B) std::swap(first, second);
  const Task task = first.task();
  CodebookPair books{task, std::move(first), std::move(second)};
  if (args.context && *args.context != books.class_a.context()) {
    throw Error("--context " + std::to_string(*args.context) +
                " differs from the codebooks' context " +
                std::to_string(books.class_a.context()));
  }

  QuantizeConfig qcfg{args.threshold, books.class_a.context(), parse_policy_flag(args.policy)};
  ParseConfig cfg;
  cfg.task = task;
  cfg.metric = Metric::parse(args.metric);
  cfg.quantize = qcfg;

  const LoadedCorpus corpus = load_corpus(args.in);
  const auto results = parse_utterance(corpus.sequence, corpus.annotations, books, cfg);

  std::ostringstream text;
  for (const auto& r : results) {
    std::string label;
    switch (r.decision) {
      case ClassDecision::ClassA: label = class_long_label(task, ClassId::A); break;
      case ClassDecision::ClassB: label = class_long_label(task, ClassId::B); break;
      case ClassDecision::Unlabeled: label = "unlabeled"; break;
    }
    text << r.segment.start << ' ' << r.segment.end << ' ' << label << " votes=" << r.votes_a
         << '/' << r.votes_b << '/' << r.votes_unlabeled << "\n";
  }
  if (args.out.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw Error("cannot open " + args.out + " for writing");
    out << text.str();
    if (!out.flush()) throw Error("failed writing " + args.out);
  }
  return kExitOk;
}

struct EvalArgs {
  std::string in;
  std::string task;
  std::string metric = "innerproduct";
  std::optional<std::size_t> context;
  double threshold = 0.5;
  std::string policy = "clamp";
  std::size_t folds = 5;
  std::size_t fold_length = 1000;
  std::uint64_t seed = 0;
  bool holdout = false;
  std::string report;
  std::string books_task;  // cross-eval only
};

int run_eval(const EvalArgs& args, bool cross) {
  const Task task = parse_task_flag(args.task);
  std::optional<Task> books_task;
  if (cross) {
    if (!args.books_task.empty()) {
      books_task = parse_task_flag(args.books_task);
    } else if (task == Task::Stress) {
      books_task = Task::Accent;
    } else if (task == Task::Accent) {
      books_task = Task::Stress;
    } else {
      throw Error("cross-eval with --task cv needs an explicit --books-task");
    }
  }
  const std::vector<Metric> metrics = parse_metric_list(args.metric);
  const std::vector<std::size_t> contexts =
      args.context ? std::vector<std::size_t>{*args.context} : kDefaultContextSweep;

  LoadedCorpus loaded = load_corpus(args.in);
  Corpus corpus;
  corpus.push_back({std::move(loaded.sequence), std::move(loaded.annotations)});

  std::vector<EvalReport> reports;
  for (const auto& metric : metrics) {
    for (const std::size_t context : contexts) {
      ParseConfig cfg;
      cfg.task = task;
      cfg.metric = metric;
      cfg.quantize = QuantizeConfig{args.threshold, context, parse_policy_flag(args.policy)};
      cfg.cross_task_books = books_task;
      reports.push_back(
          cross ? cross_evaluate(corpus, cfg, args.folds, args.fold_length, args.seed,
                                 args.holdout)
                : evaluate(corpus, cfg, args.folds, args.fold_length, args.seed, args.holdout));
    }
  }

  print_eval_table(std::cout, reports, metrics, contexts, task, books_task);

  if (!args.report.empty()) {
    nlohmann::json config;
    config["command"] = cross ? "cross-eval" : "eval";
    config["input"] = args.in;
    config["task"] = std::string(task_name(task));
    if (books_task) config["books_task"] = std::string(task_name(*books_task));
    config["metrics"] = nlohmann::json::array();
    for (const auto& m : metrics) config["metrics"].push_back(m.to_string());
    config["contexts"] = contexts;
    config["threshold"] = args.threshold;
    config["boundary_policy"] = args.policy;
    config["folds"] = args.folds;
    config["fold_length"] = args.fold_length;
    config["seed"] = args.seed;
    config["holdout"] = args.holdout;
    io::write_reports(reports, config, std::filesystem::path(args.report));
    std::cout << "wrote " << args.report << "\n";
  }
  return kExitOk;
}

struct StatsArgs {
  std::string in;
  std::size_t context = 0;
  double threshold = 0.5;
  std::string policy = "clamp";
};

int run_stats(const StatsArgs& args) {
  const PosteriorSequence seq = io::read_posteriors(std::filesystem::path(args.in + ".post"));
  QuantizeConfig qcfg{args.threshold, args.context, parse_policy_flag(args.policy)};
  const auto with_context = quantize_sequence(seq, qcfg);
  std::vector<BinaryPattern> patterns;
  for (const auto& p : with_context) {
    if (p) patterns.push_back(*p);
  }
  if (patterns.empty()) throw Error("no patterns to analyze (all anchors skipped)");
  const std::size_t width = seq.k() * (args.context + 1);
  const SparsityStats stats = sparsity_stats(patterns, width);
  std::cout << "patterns: " << stats.total_count << "\n";
  std::cout << "unique patterns: " << stats.unique_count << "\n";
  std::cout << "width: " << width << " bits\n";
  std::cout << "ratio of total: " << io::format_double(stats.ratio_of_total) << "\n";
  if (stats.possible_overflow) {
    std::cout << "ratio of possible: 0 (2^width overflows; log10 = "
              << io::format_double(stats.log10_ratio_of_possible) << ")\n";
  } else {
    std::cout << "ratio of possible: " << io::format_double(stats.ratio_of_possible)
              << " (log10 = " << io::format_double(stats.log10_ratio_of_possible) << ")\n";
  }
  return kExitOk;
}

void add_quantize_flags(CLI::App* cmd, std::size_t* context, double* threshold,
                        std::string* policy) {
  if (context) cmd->add_option("--context", *context, "Right-context size");
  cmd->add_option("--threshold", *threshold, "Binarization threshold, strictly inside (0,1)")
      ->check(kThresholdValidator);
  cmd->add_option("--boundary-policy", *policy, "End-of-utterance handling: clamp or skip")
      ->check(kPolicyValidator);
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Binary structured-sparsity pattern matching over phonological posteriors"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic posterior corpus");
  gen_cmd->add_option("--out", gen.out, "Output prefix (.post and .segs)")->required();
  gen_cmd->add_option("--k", gen.k, "Phonological classes per frame");
  gen_cmd->add_option("--templates-per-class", gen.templates_per_class,
                      "Templates per class for every task");
  gen_cmd->add_option("--noise", gen.noise, "Per-bit flip probability, in [0, 0.5)")
      ->check(kHalfOpenProbValidator);
  gen_cmd->add_option("--softness", gen.softness, "Posterior softening, in [0, 0.5)")
      ->check(kHalfOpenProbValidator);
  gen_cmd->add_option("--segments", gen.segments, "Number of segments");
  gen_cmd->add_option("--frames-min", gen.frames_min, "Minimum frames per segment");
  gen_cmd->add_option("--frames-max", gen.frames_max, "Maximum frames per segment");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");
  gen_cmd->add_option("--overlap", gen.overlap, "Template overlap: disjoint or shared")
      ->check(kOverlapValidator);
  gen_cmd
      ->add_option("--link", gen.link,
                   "Stress/accent coupling: none, accent-equals-stress, "
                   "accent-complements-stress")
      ->check(kLinkValidator);

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Build the two codebooks of a task");
  build_cmd->add_option("--in", build.in, "Input prefix (.post and .segs)")->required();
  build_cmd->add_option("--out", build.out, "Output prefix for the .cbk files")->required();
  build_cmd->add_option("--task", build.task, "Task: cv, stress or accent")
      ->required()
      ->check(kTaskValidator);
  add_quantize_flags(build_cmd, &build.context, &build.threshold, &build.policy);

  ParseArgs parse;
  auto* parse_cmd = app.add_subcommand("parse", "Classify segments against a codebook pair");
  parse_cmd->add_option("--in", parse.in, "Input prefix (.post and .segs)")->required();
  parse_cmd->add_option("--book-a", parse.book_a, "Codebook file of one class")->required();
  parse_cmd->add_option("--book-b", parse.book_b, "Codebook file of the other class")->required();
  parse_cmd->add_option("--metric", parse.metric, "Similarity metric name[:max|:min]")
      ->check(kMetricValidator);
  parse_cmd->add_option("--context", parse.context,
                        "Right-context size; must match the codebooks when given");
  parse_cmd->add_option("--out", parse.out, "Write decisions to this file instead of stdout");
  add_quantize_flags(parse_cmd, nullptr, &parse.threshold, &parse.policy);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Fold-based evaluation of a task");
  EvalArgs cross;
  auto* cross_cmd =
      app.add_subcommand("cross-eval", "Evaluate a task using another task's codebooks");
  for (const auto& [cmd, args] : {std::pair{eval_cmd, &eval}, std::pair{cross_cmd, &cross}}) {
    cmd->add_option("--in", args->in, "Input prefix (.post and .segs)")->required();
    cmd->add_option("--task", args->task, "Task: cv, stress or accent")
        ->required()
        ->check(kTaskValidator);
    cmd->add_option("--metric", args->metric,
                    "Metric name[:max|:min]; comma-separated list or 'all'")
        ->check(kMetricListValidator);
    cmd->add_option("--context", args->context,
                    "Right-context size (omit to sweep 0,1,2,4,6)");
    cmd->add_option("--threshold", args->threshold,
                    "Binarization threshold, strictly inside (0,1)")
        ->check(kThresholdValidator);
    cmd->add_option("--boundary-policy", args->policy,
                    "End-of-utterance handling: clamp or skip")
        ->check(kPolicyValidator);
    cmd->add_option("--folds", args->folds, "Number of folds");
    cmd->add_option("--fold-length", args->fold_length, "Consecutive segments per fold");
    cmd->add_option("--seed", args->seed, "RNG seed");
    cmd->add_flag("--holdout", args->holdout,
                  "Build codebooks on one window and score the following one");
    cmd->add_option("--report", args->report, "Write a JSON report to this path");
  }
  cross_cmd->add_option("--books-task", cross.books_task,
                        "Task whose labels build the codebooks (default: the "
                        "other of stress/accent)")
      ->check(kTaskValidator);

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Binary sparsity statistics of a corpus");
  stats_cmd->add_option("--in", stats.in, "Input prefix (.post)")->required();
  add_quantize_flags(stats_cmd, &stats.context, &stats.threshold, &stats.policy);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsageError;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gen);
    if (build_cmd->parsed()) return run_build(build);
    if (parse_cmd->parsed()) return run_parse(parse);
    if (eval_cmd->parsed()) return run_eval(eval, false);
    if (cross_cmd->parsed()) return run_eval(cross, true);
    if (stats_cmd->parsed()) return run_stats(stats);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitOk;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("phonoparse");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& s : full) argv.push_back(s.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace phonoparse::cli
