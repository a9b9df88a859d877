#pragma once

// File formats: dataset CSV, prior-network lists, the results bundle, and
// the TSV / DOT network exports. Every file written here starts with one
// header line of the form
//   # bggm <version> <kind> seed=<seed> config=<16 hex digits>

#include "bggm/inference.hpp"
#include "bggm/model.hpp"
#include "bggm/sampler.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bggm {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kResultsVersion = 1;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view text);

struct FileHeader {
  std::string kind;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;

  std::string line() const;
  /// Throws ValidationError if the line is not a bggm header.
  static FileHeader parse(std::string_view line);
};

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

struct CsvOptions {
  std::string label_column = "label";
  std::string class1 = "class1";
  std::string class2 = "class2";
  std::string unknown = "?";
};

/// Header row of column names, one sample per row. Lines starting with '#'
/// before the header are skipped. Errors name the 1-based line and column.
Dataset read_csv(std::istream& in, const CsvOptions& opt = {});
Dataset read_csv_file(const std::filesystem::path& path, const CsvOptions& opt = {});
/// Writes the header line, then the CSV with the label column last.
void write_csv(std::ostream& out, const Dataset& d, const FileHeader& header, const CsvOptions& opt = {});

/// Whitespace-separated "protein_i protein_j evidence [scope]" lines;
/// evidence in {important, unimportant, none}, scope in {class1, class2, both}.
/// Blank lines and '#' comments are skipped.
PriorNetwork read_prior_network(std::istream& in);
PriorNetwork read_prior_network_file(const std::filesystem::path& path);

/// Everything `fit` persists. `networks` and `predict` read it back.
struct FitRecord {
  ChainConfig config;
  AcceptanceStats acceptance;
  std::size_t invariant_violations = 0;
  PosteriorSummary summary;
  /// Retained selection draws, one string per draw and class: the upper
  /// triangle (row-major, i < j) as '0' / '1'.
  std::array<std::vector<std::string>, 2> a_draws;
  /// Retained unknown-label draws, one string per draw of '1' / '2'.
  std::vector<std::string> z_draws;
};

FitRecord make_fit_record(const ChainSamples& samples, const PosteriorSummary& summary);

/// Header line followed by one JSON document carrying "version".
void write_results(std::ostream& out, const FitRecord& rec, const FileHeader& header);
/// Throws ValidationError on a wrong header, version or schema.
FitRecord read_results(std::istream& in, FileHeader* header = nullptr);

/// Edge list with columns protein_i, protein_j, ppi, sign, partial_corr,
/// weight, carrier (carrier is "-" except for differential calls).
void write_network_tsv(std::ostream& out, const NetworkCall& call, const std::vector<std::string>& names,
                       const FileHeader& header);

/// Pen widths scale linearly with edge weight between these bounds.
inline constexpr double kPenWidthMin = 0.5;
inline constexpr double kPenWidthMax = 5.0;

/// Undirected DOT graph. Class and conserved networks color edges green
/// (positive partial correlation) or red (negative); differential networks
/// color orange (carried by class 1) or blue (class 2).
void write_network_dot(std::ostream& out, const NetworkCall& call, const std::vector<std::string>& names,
                       const FileHeader& header);

std::string_view edge_color(const NetworkCall& call, const CalledEdge& e);
double pen_width(double weight);

struct DotEdge {
  std::string from;
  std::string to;
  std::string color;
  double penwidth = 0.0;
};

/// Reads back the edge statements written by write_network_dot.
std::vector<DotEdge> parse_dot_edges(std::istream& in);

}  // namespace bggm
