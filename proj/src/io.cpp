#include "bggm/io.hpp"

#include "bggm/error.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <sstream>

namespace bggm {

using detail::json;

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string FileHeader::line() const {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
  return "# bggm " + std::string(kToolVersion) + " " + kind + " seed=" + std::to_string(seed) + " config=" + hash;
}

FileHeader FileHeader::parse(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::string hash_mark, tool, version, kind, seed, config;
  in >> hash_mark >> tool >> version >> kind >> seed >> config;
  if (hash_mark != "#" || tool != "bggm" || seed.rfind("seed=", 0) != 0 || config.rfind("config=", 0) != 0) {
    throw ValidationError("not a bggm header line: '" + std::string(line) + "'");
  }
  FileHeader h;
  h.kind = kind;
  try {
    h.seed = std::stoull(seed.substr(5));
    h.config_hash = std::stoull(config.substr(7), nullptr, 16);
  } catch (const std::exception&) {
    throw ValidationError("malformed bggm header line: '" + std::string(line) + "'");
  }
  return h;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur.push_back('"');
        ++k;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) throw ValidationError("csv line " + std::to_string(line_no) + ": unterminated quote");
  out.push_back(std::move(cur));
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  return out + "\"";
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

Dataset read_csv(std::istream& in, const CsvOptions& opt) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || trim(line).empty()) continue;
    for (auto& f : split_csv_line(line, line_no)) header.push_back(trim(f));
    break;
  }
  if (header.empty()) throw ValidationError("csv: no header row");

  std::ptrdiff_t label_col = -1;
  Dataset d;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == opt.label_column) {
      if (label_col >= 0) throw ValidationError("csv: label column '" + opt.label_column + "' appears twice");
      label_col = static_cast<std::ptrdiff_t>(c);
    } else {
      d.names.push_back(header[c]);
    }
  }
  if (label_col < 0) throw ValidationError("csv: no label column named '" + opt.label_column + "'");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line, line_no);
    if (fields.size() != header.size()) {
      throw ValidationError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                            " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> values;
    values.reserve(d.names.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string cell = trim(fields[c]);
      if (static_cast<std::ptrdiff_t>(c) == label_col) {
        if (cell == opt.class1) d.labels.push_back(ClassLabel::class1);
        else if (cell == opt.class2) d.labels.push_back(ClassLabel::class2);
        else if (cell == opt.unknown) d.labels.push_back(ClassLabel::unknown);
        else {
          throw ValidationError("csv line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                ": unknown class label '" + cell + "'");
        }
        continue;
      }
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ValidationError("csv line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) + " ('" +
                              header[c] + "'): not a finite number: '" + cell + "'");
      }
      values.push_back(v);
    }
    rows.push_back(std::move(values));
  }

  d.y.resize(static_cast<Index>(rows.size()), static_cast<Index>(d.names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) d.y(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  d.validate(false);
  return d;
}

Dataset read_csv_file(const std::filesystem::path& path, const CsvOptions& opt) {
  auto in = open_input(path);
  return read_csv(in, opt);
}

void write_csv(std::ostream& out, const Dataset& d, const FileHeader& header, const CsvOptions& opt) {
  out << header.line() << '\n';
  for (const auto& name : d.names) out << csv_field(name) << ',';
  out << csv_field(opt.label_column) << '\n';
  for (Index r = 0; r < d.n(); ++r) {
    for (Index c = 0; c < d.p(); ++c) out << format_double(d.y(r, c)) << ',';
    const ClassLabel l = d.labels[static_cast<std::size_t>(r)];
    out << csv_field(l == ClassLabel::class1 ? opt.class1 : l == ClassLabel::class2 ? opt.class2 : opt.unknown) << '\n';
  }
}

PriorNetwork read_prior_network(std::istream& in) {
  PriorNetwork net;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream fields(t);
    std::vector<std::string> cols;
    for (std::string f; fields >> f;) cols.push_back(f);
    if (cols.size() != 3 && cols.size() != 4) {
      throw ValidationError("prior network line " + std::to_string(line_no) + ": expected 3 or 4 columns");
    }
    PriorEdge e;
    e.protein_i = cols[0];
    e.protein_j = cols[1];
    if (cols[2] == "important") e.evidence = Evidence::important;
    else if (cols[2] == "unimportant") e.evidence = Evidence::unimportant;
    else if (cols[2] == "none") e.evidence = Evidence::none;
    else throw ValidationError("prior network line " + std::to_string(line_no) + ": unknown evidence '" + cols[2] + "'");
    if (cols.size() == 4) {
      if (cols[3] == "class1") e.scope = EdgeScope::class1;
      else if (cols[3] == "class2") e.scope = EdgeScope::class2;
      else if (cols[3] == "both") e.scope = EdgeScope::both;
      else throw ValidationError("prior network line " + std::to_string(line_no) + ": unknown scope '" + cols[3] + "'");
    }
    net.edges.push_back(std::move(e));
  }
  return net;
}

PriorNetwork read_prior_network_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_prior_network(in);
}

FitRecord make_fit_record(const ChainSamples& samples, const PosteriorSummary& summary) {
  FitRecord rec;
  rec.config = samples.config;
  rec.acceptance = samples.acceptance;
  rec.invariant_violations = samples.invariant_violations;
  rec.summary = summary;
  for (const Draw& d : samples.draws) {
    for (std::size_t k = 0; k < 2; ++k) {
      std::string bits;
      for (Index i = 0; i < d.a[k].rows(); ++i)
        for (Index j = i + 1; j < d.a[k].cols(); ++j) bits.push_back(d.a[k](i, j) == 1.0 ? '1' : '0');
      rec.a_draws[k].push_back(std::move(bits));
    }
    std::string z;
    for (ClassLabel l : d.z_u) z.push_back(l == ClassLabel::class1 ? '1' : '2');
    rec.z_draws.push_back(std::move(z));
  }
  return rec;
}

namespace {

json counter_json(const UpdateCounter& c) {
  return {{"attempted", c.attempted}, {"accepted", c.accepted}, {"infeasible", c.infeasible}};
}

UpdateCounter counter_from(const json& j) {
  UpdateCounter c;
  c.attempted = j.at("attempted").get<std::uint64_t>();
  c.accepted = j.at("accepted").get<std::uint64_t>();
  c.infeasible = j.at("infeasible").get<std::uint64_t>();
  return c;
}

}  // namespace

void write_results(std::ostream& out, const FitRecord& rec, const FileHeader& header) {
  const PosteriorSummary& s = rec.summary;
  const ChainConfig& c = rec.config;
  json j;
  j["version"] = kResultsVersion;
  j["tool_version"] = std::string(kToolVersion);
  j["config"] = {{"iterations", c.iterations},
                 {"burn_in", c.burn_in},
                 {"thin", c.thin},
                 {"seed", c.seed},
                 {"r_proposal", c.r_proposal == RProposal::random_walk ? "random-walk" : "prior-uniform"},
                 {"r_step", c.r_step},
                 {"refine_active_edges", c.refine_active_edges},
                 {"s_proposal_sd", c.s_proposal_sd}};
  j["acceptance"] = {{"edge", counter_json(rec.acceptance.edge)},
                     {"s", counter_json(rec.acceptance.s)},
                     {"refine", counter_json(rec.acceptance.refine)}};
  j["invariant_violations"] = rec.invariant_violations;
  json unknown = json::array();
  for (Index r : s.unknown_rows) unknown.push_back(r);
  j["summary"] = {{"names", s.names},
                  {"n_draws", s.n_draws},
                  {"unknown_rows", unknown},
                  {"ppi", {detail::to_json(s.ppi[0]), detail::to_json(s.ppi[1])}},
                  {"ppi_diff", detail::to_json(s.ppi_diff)},
                  {"ppi_common", detail::to_json(s.ppi_common)},
                  {"mean_partial_corr",
                   {detail::to_json(s.mean_partial_corr[0]), detail::to_json(s.mean_partial_corr[1])}},
                  {"class1_probability", detail::to_json(s.class1_probability)},
                  {"bma_omega", {detail::to_json(s.bma_omega[0]), detail::to_json(s.bma_omega[1])}}};
  j["draws"] = {{"a1", rec.a_draws[0]}, {"a2", rec.a_draws[1]}, {"z", rec.z_draws}};
  out << header.line() << '\n' << j.dump(1) << '\n';
}

FitRecord read_results(std::istream& in, FileHeader* header) {
  std::string first;
  if (!std::getline(in, first)) throw ValidationError("results: empty file");
  const FileHeader h = FileHeader::parse(first);
  if (h.kind != "results") throw ValidationError("results: header names kind '" + h.kind + "'");
  if (header) *header = h;
  FitRecord rec;
  try {
    const json j = json::parse(in);
    const int version = j.at("version").get<int>();
    if (version != kResultsVersion) throw ValidationError("results: unsupported version " + std::to_string(version));
    const json& c = j.at("config");
    rec.config.iterations = c.at("iterations").get<std::size_t>();
    rec.config.burn_in = c.at("burn_in").get<std::size_t>();
    rec.config.thin = c.at("thin").get<std::size_t>();
    rec.config.seed = c.at("seed").get<std::uint64_t>();
    rec.config.r_proposal = c.at("r_proposal").get<std::string>() == "random-walk" ? RProposal::random_walk
                                                                                   : RProposal::prior_uniform;
    rec.config.r_step = c.at("r_step").get<double>();
    rec.config.refine_active_edges = c.at("refine_active_edges").get<bool>();
    rec.config.s_proposal_sd = c.at("s_proposal_sd").get<double>();
    const json& a = j.at("acceptance");
    rec.acceptance.edge = counter_from(a.at("edge"));
    rec.acceptance.s = counter_from(a.at("s"));
    rec.acceptance.refine = counter_from(a.at("refine"));
    rec.invariant_violations = j.at("invariant_violations").get<std::size_t>();

    const json& s = j.at("summary");
    PosteriorSummary& out = rec.summary;
    out.names = s.at("names").get<std::vector<std::string>>();
    out.n_draws = s.at("n_draws").get<std::size_t>();
    for (const auto& r : s.at("unknown_rows")) out.unknown_rows.push_back(r.get<Index>());
    for (std::size_t k = 0; k < 2; ++k) {
      out.ppi[k] = detail::matrix_from_json(s.at("ppi").at(k));
      out.mean_partial_corr[k] = detail::matrix_from_json(s.at("mean_partial_corr").at(k));
      out.bma_omega[k] = detail::matrix_from_json(s.at("bma_omega").at(k));
    }
    out.ppi_diff = detail::matrix_from_json(s.at("ppi_diff"));
    out.ppi_common = detail::matrix_from_json(s.at("ppi_common"));
    out.class1_probability = detail::vector_from_json(s.at("class1_probability"));

    const json& d = j.at("draws");
    rec.a_draws[0] = d.at("a1").get<std::vector<std::string>>();
    rec.a_draws[1] = d.at("a2").get<std::vector<std::string>>();
    rec.z_draws = d.at("z").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("results: malformed body: ") + e.what());
  }
  const Index p = static_cast<Index>(rec.summary.names.size());
  const PosteriorSummary& s = rec.summary;
  bool ok = s.ppi_diff.rows() == p && s.ppi_diff.cols() == p && s.ppi_common.rows() == p;
  for (std::size_t k = 0; k < 2; ++k) {
    ok = ok && s.ppi[k].rows() == p && s.ppi[k].cols() == p && s.mean_partial_corr[k].rows() == p &&
         s.bma_omega[k].rows() == p;
  }
  ok = ok && static_cast<std::size_t>(s.class1_probability.size()) == s.unknown_rows.size();
  if (!ok) throw ValidationError("results: summary dimensions disagree with the protein list");
  return rec;
}

std::string_view edge_color(const NetworkCall& call, const CalledEdge& e) {
  if (call.kind == NetworkKind::differential) return e.carrier == ClassLabel::class2 ? "blue" : "orange";
  return e.sign == EdgeSign::positive ? "green" : "red";
}

double pen_width(double weight) {
  const double w = std::clamp(weight, 0.0, 1.0);
  return kPenWidthMin + w * (kPenWidthMax - kPenWidthMin);
}

namespace {

void write_call_comment(std::ostream& out, std::string_view lead, const NetworkCall& call) {
  out << lead << " network=" << to_string(call.kind) << " alpha=" << format_double(call.alpha)
      << " threshold=" << format_double(call.threshold) << " edges=" << call.edges.size();
  if (call.edges.empty()) out << " (threshold above 1: no edge qualifies)";
  out << '\n';
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    out.push_back(ch);
  }
  return out + "\"";
}

}  // namespace

void write_network_tsv(std::ostream& out, const NetworkCall& call, const std::vector<std::string>& names,
                       const FileHeader& header) {
  out << header.line() << '\n';
  write_call_comment(out, "#", call);
  out << "protein_i\tprotein_j\tppi\tsign\tpartial_corr\tweight\tcarrier\n";
  for (const CalledEdge& e : call.edges) {
    out << names.at(static_cast<std::size_t>(e.i)) << '\t' << names.at(static_cast<std::size_t>(e.j)) << '\t'
        << format_double(e.ppi) << '\t' << to_string(e.sign) << '\t' << format_double(e.partial_corr) << '\t'
        << format_double(e.weight) << '\t' << (e.carrier ? to_string(*e.carrier) : std::string_view("-")) << '\n';
  }
}

void write_network_dot(std::ostream& out, const NetworkCall& call, const std::vector<std::string>& names,
                       const FileHeader& header) {
  out << header.line() << '\n';
  out << "graph " << to_string(call.kind) << " {\n";
  write_call_comment(out, "  //", call);
  out << "  node [shape=ellipse];\n";
  for (const auto& n : names) out << "  " << dot_quote(n) << ";\n";
  char width[32];
  for (const CalledEdge& e : call.edges) {
    std::snprintf(width, sizeof width, "%.3f", pen_width(e.weight));
    out << "  " << dot_quote(names.at(static_cast<std::size_t>(e.i))) << " -- "
        << dot_quote(names.at(static_cast<std::size_t>(e.j))) << " [color=" << edge_color(call, e)
        << ", penwidth=" << width << "];\n";
  }
  out << "}\n";
}

std::vector<DotEdge> parse_dot_edges(std::istream& in) {
  static const std::regex edge_re(R"re(^\s*"((?:[^"\\]|\\.)*)"\s*--\s*"((?:[^"\\]|\\.)*)"\s*\[color=(\w+),\s*penwidth=([0-9.]+)\];\s*$)re");
  auto unquote = [](const std::string& s) {
    std::string out;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] == '\\' && k + 1 < s.size()) ++k;
      out.push_back(s[k]);
    }
    return out;
  };
  std::vector<DotEdge> edges;
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (!std::regex_match(line, m, edge_re)) continue;
    edges.push_back({unquote(m[1].str()), unquote(m[2].str()), m[3].str(), std::stod(m[4].str())});
  }
  return edges;
}

}  // namespace bggm
