#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "phonoparse/codebook.hpp"
#include "phonoparse/parser.hpp"
#include "phonoparse/types.hpp"

namespace phonoparse::io {

/// Shortest decimal form that round-trips the exact double value.
std::string format_double(double value);

// All formats are line oriented, UTF-8, LF line endings, single-space field
// separators. Lines starting with '#' and blank lines are skipped on read;
// writers never emit them. Writers are canonical: writing the same object
// twice yields byte-identical files.

// Posterior files (.post):
//   PHONOPOST 1
//   K=<int> N=<int>
//   classes=<name,...>        (optional, exactly K comma-separated names)
//   frame_rate_hz=<real>      (optional, positive)
//   <p1> <p2> ... <pK>        (N rows, each value in [0,1])
PosteriorSequence read_posteriors(std::istream& in, const std::string& source_name);
PosteriorSequence read_posteriors(const std::filesystem::path& path);
void write_posteriors(const PosteriorSequence& seq, std::ostream& out);
void write_posteriors(const PosteriorSequence& seq, const std::filesystem::path& path);

// Label files (.segs): one line per segment label,
//   <start> <end> <task>=<label>
// with start inclusive and end exclusive. Lines sharing the same [start, end)
// range merge into one annotation carrying all their task labels. Labels per
// task: cv=C|V, stress=1|0, accent=1|0 (long names accepted on read).
std::vector<SegmentAnnotation> read_labels(std::istream& in, const std::string& source_name,
                                           std::optional<std::size_t> n_frames = std::nullopt);
std::vector<SegmentAnnotation> read_labels(const std::filesystem::path& path,
                                           std::optional<std::size_t> n_frames = std::nullopt);
void write_labels(std::span<const SegmentAnnotation> annotations, std::ostream& out);
void write_labels(std::span<const SegmentAnnotation> annotations,
                  const std::filesystem::path& path);

// Codebook files (.cbk):
//   PHONOCBK 1
//   K=<int> context=<int> task=<task> class=<label> order=anchor-first-right-context
//   <bitstring> <count>       (one line per entry; leftmost character = bit 0)
// Entries are written in lexicographic bitstring order.
Codebook read_codebook(std::istream& in, const std::string& source_name);
Codebook read_codebook(const std::filesystem::path& path);
void write_codebook(const Codebook& book, std::ostream& out);
void write_codebook(const Codebook& book, const std::filesystem::path& path);

// Evaluation reports serialize to JSON with sorted keys and shortest
// round-trip numerals, so identical runs yield byte-identical files.
nlohmann::json report_to_json(const EvalReport& report);
void write_reports(std::span<const EvalReport> reports, const nlohmann::json& run_config,
                   const std::filesystem::path& path);

}  // namespace phonoparse::io
