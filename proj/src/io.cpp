#include "phonoparse/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace phonoparse::io {

namespace {

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& message) {
  throw Error(source + ":" + std::to_string(line) + ": " + message);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const std::size_t next = line.find(' ', pos);
    if (next == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    if (next > pos) out.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

/// Pulls significant lines (skipping blanks and '#' comments) with their
/// 1-based line numbers; tolerates a trailing '\r'.
class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  bool next(std::string& line, std::size_t& number) {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_number_;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      if (raw.empty()) continue;
      if (raw[0] == '#') continue;
      if (raw.find_first_not_of(' ') == std::string::npos) continue;
      line = raw;
      number = line_number_;
      return true;
    }
    return false;
  }

  std::size_t line_number() const { return line_number_; }
  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_number_ = 0;
};

double parse_double(std::string_view token, const std::string& source, std::size_t line,
                    const std::string& what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    fail(source, line, "malformed " + what + " '" + std::string(token) + "'");
  }
  return value;
}

std::int64_t parse_int(std::string_view token, const std::string& source, std::size_t line,
                       const std::string& what) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    fail(source, line, "malformed " + what + " '" + std::string(token) + "'");
  }
  return value;
}

/// Splits "key=value"; returns false when '=' is absent.
bool split_assignment(std::string_view field, std::string_view& key, std::string_view& value) {
  const std::size_t eq = field.find('=');
  if (eq == std::string_view::npos) return false;
  key = field.substr(0, eq);
  value = field.substr(eq + 1);
  return true;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: keep LF endings everywhere
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw Error("failed to format a double");
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Posterior files
// ---------------------------------------------------------------------------

PosteriorSequence read_posteriors(std::istream& in, const std::string& source_name) {
  LineReader reader(in, source_name);
  std::string line;
  std::size_t lineno = 0;

  if (!reader.next(line, lineno)) {
    fail(source_name, reader.line_number() + 1, "empty file, expected 'PHONOPOST 1'");
  }
  {
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0] != "PHONOPOST") {
      fail(source_name, lineno, "bad magic, expected 'PHONOPOST'");
    }
    if (fields.size() != 2 || fields[1] != "1") {
      fail(source_name, lineno, "unsupported posterior file version, expected 'PHONOPOST 1'");
    }
  }

  if (!reader.next(line, lineno)) {
    fail(source_name, reader.line_number() + 1, "truncated file, expected 'K=<int> N=<int>'");
  }
  std::int64_t k = 0;
  std::int64_t n = 0;
  {
    const auto fields = split_fields(line);
    std::string_view key;
    std::string_view value;
    if (fields.size() != 2 || !split_assignment(fields[0], key, value) || key != "K") {
      fail(source_name, lineno, "expected 'K=<int> N=<int>'");
    }
    k = parse_int(value, source_name, lineno, "K");
    if (!split_assignment(fields[1], key, value) || key != "N") {
      fail(source_name, lineno, "expected 'K=<int> N=<int>'");
    }
    n = parse_int(value, source_name, lineno, "N");
    if (k < 1) fail(source_name, lineno, "K must be positive");
    if (n < 1) fail(source_name, lineno, "N must be positive");
  }

  PosteriorSequence seq;
  seq.frames.reserve(static_cast<std::size_t>(n));

  bool saw_classes = false;
  bool saw_rate = false;
  while (seq.frames.size() < static_cast<std::size_t>(n)) {
    if (!reader.next(line, lineno)) {
      fail(source_name, reader.line_number() + 1,
           "truncated file: expected N=" + std::to_string(n) + " data rows, found " +
               std::to_string(seq.frames.size()));
    }
    std::string_view key;
    std::string_view value;
    if (seq.frames.empty() && split_assignment(split_fields(line)[0], key, value) &&
        (key == "classes" || key == "frame_rate_hz")) {
      const auto fields = split_fields(line);
      if (fields.size() != 1) {
        fail(source_name, lineno, "metadata lines take no extra fields");
      }
      if (key == "classes") {
        if (saw_classes) fail(source_name, lineno, "duplicate classes line");
        saw_classes = true;
        std::string names(value);
        std::size_t pos = 0;
        while (true) {
          const std::size_t comma = names.find(',', pos);
          const std::string name = names.substr(pos, comma - pos);
          if (name.empty()) fail(source_name, lineno, "empty class name");
          seq.class_names.push_back(name);
          if (comma == std::string::npos) break;
          pos = comma + 1;
        }
        if (seq.class_names.size() != static_cast<std::size_t>(k)) {
          fail(source_name, lineno,
               "classes line lists " + std::to_string(seq.class_names.size()) + " names, K=" +
                   std::to_string(k));
        }
      } else {
        if (saw_rate) fail(source_name, lineno, "duplicate frame_rate_hz line");
        saw_rate = true;
        const double rate = parse_double(value, source_name, lineno, "frame_rate_hz");
        if (!(rate > 0.0) || !std::isfinite(rate)) {
          fail(source_name, lineno, "frame_rate_hz must be a positive real");
        }
        seq.frame_rate_hz = rate;
      }
      continue;
    }

    const auto fields = split_fields(line);
    if (fields.size() != static_cast<std::size_t>(k)) {
      fail(source_name, lineno,
           "ragged K: row has " + std::to_string(fields.size()) + " values, K=" +
               std::to_string(k));
    }
    PosteriorFrame frame;
    frame.probs.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const double v = parse_double(fields[c], source_name, lineno, "posterior value");
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        fail(source_name, lineno,
             "value out of [0,1] at class " + std::to_string(c) + ": '" + std::string(fields[c]) +
                 "'");
      }
      frame.probs.push_back(v);
    }
    seq.frames.push_back(std::move(frame));
  }

  if (reader.next(line, lineno)) {
    fail(source_name, lineno, "expected end of file after N=" + std::to_string(n) + " data rows");
  }
  return seq;
}

PosteriorSequence read_posteriors(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_posteriors(in, path.string());
}

void write_posteriors(const PosteriorSequence& seq, std::ostream& out) {
  require_valid(seq);
  out << "PHONOPOST 1\n";
  out << "K=" << seq.k() << " N=" << seq.num_frames() << "\n";
  if (!seq.class_names.empty()) {
    out << "classes=";
    for (std::size_t i = 0; i < seq.class_names.size(); ++i) {
      if (i) out << ',';
      out << seq.class_names[i];
    }
    out << "\n";
  }
  if (seq.frame_rate_hz) {
    out << "frame_rate_hz=" << format_double(*seq.frame_rate_hz) << "\n";
  }
  for (const auto& frame : seq.frames) {
    for (std::size_t c = 0; c < frame.probs.size(); ++c) {
      if (c) out << ' ';
      out << format_double(frame.probs[c]);
    }
    out << "\n";
  }
}

void write_posteriors(const PosteriorSequence& seq, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_posteriors(seq, out);
  finish_output(out, path);
}

// ---------------------------------------------------------------------------
// Label files
// ---------------------------------------------------------------------------

std::vector<SegmentAnnotation> read_labels(std::istream& in, const std::string& source_name,
                                           std::optional<std::size_t> n_frames) {
  LineReader reader(in, source_name);
  std::string line;
  std::size_t lineno = 0;

  // Group labels by range so one annotation carries all tiers of a segment.
  std::map<std::pair<std::int64_t, std::int64_t>, SegmentAnnotation> by_range;
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> range_line;

  while (reader.next(line, lineno)) {
    const auto fields = split_fields(line);
    if (fields.size() < 3) {
      fail(source_name, lineno, "expected '<start> <end> <task>=<label>'");
    }
    const std::int64_t start = parse_int(fields[0], source_name, lineno, "start index");
    const std::int64_t end = parse_int(fields[1], source_name, lineno, "end index");
    if (start < 0) fail(source_name, lineno, "negative start index");
    if (start >= end) {
      fail(source_name, lineno,
           "reversed or empty range [" + std::to_string(start) + ", " + std::to_string(end) + ")");
    }
    if (n_frames && end > static_cast<std::int64_t>(*n_frames)) {
      fail(source_name, lineno,
           "end " + std::to_string(end) + " exceeds N=" + std::to_string(*n_frames));
    }
    auto& ann = by_range[{start, end}];
    ann.start = start;
    ann.end = end;
    range_line[{start, end}] = lineno;
    for (std::size_t f = 2; f < fields.size(); ++f) {
      std::string_view key;
      std::string_view value;
      if (!split_assignment(fields[f], key, value)) {
        fail(source_name, lineno, "expected '<task>=<label>', got '" + std::string(fields[f]) + "'");
      }
      const auto task = task_from_string(key);
      if (!task) fail(source_name, lineno, "unknown task '" + std::string(key) + "'");
      const auto label = class_from_string(*task, value);
      if (!label) {
        fail(source_name, lineno,
             "unknown label '" + std::string(value) + "' for task " + std::string(key));
      }
      if (ann.labels.count(*task)) {
        fail(source_name, lineno,
             "duplicate label for task " + std::string(key) + " on range [" +
                 std::to_string(start) + ", " + std::to_string(end) + ")");
      }
      ann.labels[*task] = *label;
    }
  }

  std::vector<SegmentAnnotation> out;
  out.reserve(by_range.size());
  for (auto& [range, ann] : by_range) out.push_back(std::move(ann));

  // std::map ordering already sorts by (start, end); check tier overlap.
  for (const Task t : kAllTasks) {
    const SegmentAnnotation* prev = nullptr;
    for (const auto& ann : out) {
      if (!ann.has_label(t)) continue;
      if (prev && ann.start < prev->end) {
        fail(source_name, range_line[{ann.start, ann.end}],
             "task " + std::string(task_name(t)) + ": segment [" + std::to_string(ann.start) +
                 ", " + std::to_string(ann.end) + ") overlaps [" + std::to_string(prev->start) +
                 ", " + std::to_string(prev->end) + ")");
      }
      prev = &ann;
    }
  }
  return out;
}

std::vector<SegmentAnnotation> read_labels(const std::filesystem::path& path,
                                           std::optional<std::size_t> n_frames) {
  auto in = open_input(path);
  return read_labels(in, path.string(), n_frames);
}

void write_labels(std::span<const SegmentAnnotation> annotations, std::ostream& out) {
  require_valid(annotations, std::nullopt);
  std::vector<const SegmentAnnotation*> sorted;
  sorted.reserve(annotations.size());
  for (const auto& a : annotations) sorted.push_back(&a);
  std::sort(sorted.begin(), sorted.end(), [](const auto* x, const auto* y) {
    return std::pair(x->start, x->end) < std::pair(y->start, y->end);
  });
  for (const auto* ann : sorted) {
    for (const Task t : kAllTasks) {
      if (!ann->has_label(t)) continue;
      out << ann->start << ' ' << ann->end << ' ' << task_name(t) << '='
          << class_short_label(t, ann->label(t)) << "\n";
    }
  }
}

void write_labels(std::span<const SegmentAnnotation> annotations,
                  const std::filesystem::path& path) {
  auto out = open_output(path);
  write_labels(annotations, out);
  finish_output(out, path);
}

// ---------------------------------------------------------------------------
// Codebook files
// ---------------------------------------------------------------------------

namespace {
constexpr std::string_view kBitOrder = "anchor-first-right-context";
}

Codebook read_codebook(std::istream& in, const std::string& source_name) {
  LineReader reader(in, source_name);
  std::string line;
  std::size_t lineno = 0;

  if (!reader.next(line, lineno)) {
    fail(source_name, reader.line_number() + 1, "empty file, expected 'PHONOCBK 1'");
  }
  {
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0] != "PHONOCBK") {
      fail(source_name, lineno, "bad magic, expected 'PHONOCBK'");
    }
    if (fields.size() != 2 || fields[1] != "1") {
      fail(source_name, lineno, "unsupported codebook file version, expected 'PHONOCBK 1'");
    }
  }

  if (!reader.next(line, lineno)) {
    fail(source_name, reader.line_number() + 1, "truncated file, expected codebook header");
  }
  const auto fields = split_fields(line);
  const char* expected[] = {"K", "context", "task", "class", "order"};
  if (fields.size() != 5) {
    fail(source_name, lineno,
         "expected 'K=<int> context=<int> task=<task> class=<label> order=" +
             std::string(kBitOrder) + "'");
  }
  std::string values[5];
  for (std::size_t i = 0; i < 5; ++i) {
    std::string_view key;
    std::string_view value;
    if (!split_assignment(fields[i], key, value) || key != expected[i]) {
      fail(source_name, lineno,
           "expected header field '" + std::string(expected[i]) + "=', got '" +
               std::string(fields[i]) + "'");
    }
    values[i] = std::string(value);
  }
  const std::int64_t k = parse_int(values[0], source_name, lineno, "K");
  const std::int64_t context = parse_int(values[1], source_name, lineno, "context");
  if (k < 1) fail(source_name, lineno, "K must be positive");
  if (context < 0) fail(source_name, lineno, "context must be non-negative");
  const auto task = task_from_string(values[2]);
  if (!task) fail(source_name, lineno, "unknown task '" + values[2] + "'");
  const auto class_id = class_from_string(*task, values[3]);
  if (!class_id) {
    fail(source_name, lineno, "unknown class '" + values[3] + "' for task " + values[2]);
  }
  if (values[4] != kBitOrder) {
    fail(source_name, lineno, "unsupported bit order '" + values[4] + "', expected '" +
                                  std::string(kBitOrder) + "'");
  }

  Codebook book(*task, *class_id, static_cast<std::size_t>(k), static_cast<std::size_t>(context));
  while (reader.next(line, lineno)) {
    const auto entry = split_fields(line);
    if (entry.size() != 2) {
      fail(source_name, lineno, "expected '<bitstring> <count>'");
    }
    if (entry[0].size() != book.width()) {
      fail(source_name, lineno,
           "bitstring length " + std::to_string(entry[0].size()) + " differs from width " +
               std::to_string(book.width()));
    }
    BinaryPattern pattern;
    try {
      pattern = BinaryPattern::from_bits(entry[0], book.context());
    } catch (const Error& e) {
      fail(source_name, lineno, e.what());
    }
    if (book.contains(pattern)) {
      fail(source_name, lineno, "duplicate bitstring '" + std::string(entry[0]) + "'");
    }
    const std::int64_t count = parse_int(entry[1], source_name, lineno, "count");
    if (count < 1) fail(source_name, lineno, "count must be >= 1");
    book.insert(pattern, static_cast<std::uint64_t>(count));
  }
  return book;
}

Codebook read_codebook(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_codebook(in, path.string());
}

void write_codebook(const Codebook& book, std::ostream& out) {
  out << "PHONOCBK 1\n";
  out << "K=" << book.k() << " context=" << book.context() << " task=" << task_name(book.task())
      << " class=" << class_long_label(book.task(), book.class_id()) << " order=" << kBitOrder
      << "\n";
  for (const auto& [pattern, count] : book.sorted_entries()) {
    out << pattern.to_bitstring() << ' ' << count << "\n";
  }
}

void write_codebook(const Codebook& book, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_codebook(book, out);
  finish_output(out, path);
}

// ---------------------------------------------------------------------------
// Evaluation reports
// ---------------------------------------------------------------------------

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["task"] = std::string(task_name(report.task));
  j["metric"] = report.metric.to_string();
  j["context"] = report.context;
  j["threshold"] = report.threshold;
  j["boundary_policy"] = std::string(boundary_policy_name(report.boundary_policy));
  if (report.cross_task_books) {
    j["cross_task_books"] = std::string(task_name(*report.cross_task_books));
  }
  j["folds"] = report.folds;
  j["fold_length"] = report.fold_length;
  j["seed"] = report.seed;
  j["holdout"] = report.holdout;
  j["segment_accuracy_mean"] = report.segment_accuracy_mean;
  j["frame_accuracy_mean"] = report.frame_accuracy_mean;
  j["per_fold"] = nlohmann::json::array();
  for (std::size_t i = 0; i < report.per_fold.size(); ++i) {
    const auto& fr = report.per_fold[i];
    nlohmann::json fj;
    fj["fold"] = i;
    fj["start_segment"] = fr.start_segment;
    fj["segments"] = fr.segments;
    fj["correct_segments"] = fr.correct_segments;
    fj["unlabeled_segments"] = fr.unlabeled_segments;
    fj["frames"] = fr.frames;
    fj["correct_frames"] = fr.correct_frames;
    fj["segment_accuracy"] = fr.segment_accuracy;
    fj["frame_accuracy"] = fr.frame_accuracy;
    j["per_fold"].push_back(std::move(fj));
  }
  return j;
}

void write_reports(std::span<const EvalReport> reports, const nlohmann::json& run_config,
                   const std::filesystem::path& path) {
  nlohmann::json j;
  j["config"] = run_config;
  j["results"] = nlohmann::json::array();
  for (const auto& report : reports) j["results"].push_back(report_to_json(report));
  auto out = open_output(path);
  out << j.dump(2) << "\n";
  finish_output(out, path);
}

}  // namespace phonoparse::io
