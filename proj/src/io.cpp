#include "sequencer/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "sequencer/error.hpp"
#include "sequencer/version.hpp"

namespace sequencer {

namespace {

std::ifstream open_input(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path));
  return in;
}

std::ofstream open_output(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path));
  return out;
}

bool parse_double(std::string_view token, double& value) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view tok = comma == std::string_view::npos
                               ? line.substr(start)
                               : line.substr(start, comma - start);
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r'))
      tok.remove_suffix(1);
    tokens.push_back(tok);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return tokens;
}

}  // namespace

Matrix read_csv_matrix(const std::string& path) {
  auto in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto tokens = split_csv_line(line);
    std::vector<double> row(tokens.size());
    bool ok = true;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (!parse_double(tokens[i], row[i])) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      // A non-numeric first line is a header; anywhere else it is an error.
      if (first_content_line) {
        first_content_line = false;
        continue;
      }
      throw InputError(fmt::format("{}:{}: non-numeric value", path, line_no));
    }
    first_content_line = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError(fmt::format("{}:{}: expected {} columns, got {}", path, line_no,
                                   rows.front().size(), row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(fmt::format("'{}' contains no data", path));

  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

void write_csv_matrix(const std::string& path, const Matrix& m) {
  auto out = open_output(path);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << fmt::format("{:.17g}", m(r, c));
    }
    out << '\n';
  }
  if (!out) throw InputError(fmt::format("write to '{}' failed", path));
}

namespace {

int pgm_next_int(std::istream& in, const std::string& path) {
  // Skips whitespace and '#' comments.
  while (true) {
    const int c = in.peek();
    if (c == EOF) throw InputError(fmt::format("'{}': truncated PGM header", path));
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
      continue;
    }
    break;
  }
  int value = 0;
  if (!(in >> value)) throw InputError(fmt::format("'{}': malformed PGM header", path));
  return value;
}

}  // namespace

Matrix read_pgm(const std::string& path) {
  auto in = open_input(path, std::ios::in | std::ios::binary);
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P5" && magic != "P2")
    throw InputError(fmt::format("'{}' is not an 8-bit PGM (expected P5 or P2)", path));

  const int width = pgm_next_int(in, path);
  const int height = pgm_next_int(in, path);
  const int maxval = pgm_next_int(in, path);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255)
    throw InputError(fmt::format("'{}': unsupported PGM dimensions or depth", path));

  Matrix m(static_cast<std::size_t>(height), static_cast<std::size_t>(width));
  if (magic == "P5") {
    in.get();  // single whitespace after maxval
    std::vector<unsigned char> buf(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size())
      throw InputError(fmt::format("'{}': truncated PGM payload", path));
    for (std::size_t i = 0; i < buf.size(); ++i) m.data()[i] = buf[i];
  } else {
    for (auto& v : m.data()) {
      int value = 0;
      if (!(in >> value)) throw InputError(fmt::format("'{}': truncated PGM payload", path));
      v = value;
    }
  }
  return m;
}

void write_pgm(const std::string& path, const Matrix& m) {
  if (m.empty()) throw InputError("cannot write an empty image");
  double lo = m.data()[0], hi = m.data()[0];
  for (double v : m.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;

  auto out = open_output(path, std::ios::out | std::ios::binary);
  out << "P5\n" << m.cols() << ' ' << m.rows() << "\n255\n";
  std::vector<unsigned char> buf;
  buf.reserve(m.data().size());
  for (double v : m.data())
    buf.push_back(static_cast<unsigned char>(std::lround((v - lo) / span * 255.0)));
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw InputError(fmt::format("write to '{}' failed", path));
}

void write_ordering(const std::string& path, const std::vector<int>& ordering) {
  auto out = open_output(path);
  for (int v : ordering) out << v << '\n';
  if (!out) throw InputError(fmt::format("write to '{}' failed", path));
}

Matrix reorder_rows(const Matrix& m, const std::vector<int>& ordering) {
  if (ordering.size() != m.rows()) throw InputError("ordering length does not match rows");
  Matrix out(m.rows(), m.cols());
  for (std::size_t s = 0; s < ordering.size(); ++s) {
    const auto src = m.row(static_cast<std::size_t>(ordering[s]));
    std::copy(src.begin(), src.end(), out.row(s).begin());
  }
  return out;
}

nlohmann::json result_to_json(const SequencerResult& result) {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["version"] = kVersion;
  j["n_obj"] = result.n_obj;
  j["n_pix"] = result.n_pix;
  j["config"] = {
      {"metrics", result.metric_names},
      {"max_depth", result.max_depth ? nlohmann::json(*result.max_depth) : nlohmann::json()},
      {"offset_mode", result.offset_mode},
  };
  j["grid_scales"] = result.grid_scales;
  j["start_node"] = result.start_node;
  j["ordering"] = result.ordering;
  j["eta_combined"] = result.eta_combined;

  nlohmann::json eta_klm = nlohmann::json::object();
  nlohmann::json eta_kl = nlohmann::json::object();
  nlohmann::json mean_distance = nlohmann::json::object();
  nlohmann::json diagnostics = nlohmann::json::object();
  bool any_diagnostics = false;
  for (const auto& entry : result.scales) {
    const std::string kl_key = fmt::format("{}/{}", entry.metric, entry.scale);
    eta_kl[kl_key] = entry.eta;
    mean_distance[kl_key] = entry.mean_distance;
    for (std::size_t m = 0; m < entry.eta_per_segment.size(); ++m)
      eta_klm[fmt::format("{}/{}", kl_key, m)] = entry.eta_per_segment[m];
    if (entry.ordering) {
      diagnostics[kl_key] = *entry.ordering;
      any_diagnostics = true;
    }
  }
  j["eta_klm"] = std::move(eta_klm);
  j["eta_kl"] = std::move(eta_kl);
  j["mean_distance_kl"] = std::move(mean_distance);
  if (any_diagnostics) j["orderings_kl"] = std::move(diagnostics);

  nlohmann::json tree = nlohmann::json::array();
  for (const auto& e : result.tree_edges) tree.push_back({e.u, e.v, e.w});
  j["tree_edges"] = std::move(tree);
  return j;
}

SequencerResult result_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<int>() != kReportSchema)
      throw InputError(fmt::format("unsupported report schema {}", j["schema"].get<int>()));

    SequencerResult result;
    result.n_obj = j.at("n_obj").get<std::size_t>();
    result.n_pix = j.at("n_pix").get<std::size_t>();
    const auto& config = j.at("config");
    result.metric_names = config.at("metrics").get<std::vector<std::string>>();
    if (!config.at("max_depth").is_null()) result.max_depth = config["max_depth"].get<int>();
    result.offset_mode = config.at("offset_mode").get<bool>();
    result.grid_scales = j.at("grid_scales").get<std::vector<int>>();
    result.start_node = j.at("start_node").get<int>();
    result.ordering = j.at("ordering").get<std::vector<int>>();
    result.eta_combined = j.at("eta_combined").get<double>();

    const auto& eta_kl = j.at("eta_kl");
    const auto& eta_klm = j.at("eta_klm");
    const auto& mean_distance = j.at("mean_distance_kl");
    for (const auto& metric : result.metric_names) {
      for (int l : result.grid_scales) {
        ScaleEntry entry;
        entry.metric = metric;
        entry.scale = l;
        const std::string kl_key = fmt::format("{}/{}", metric, l);
        entry.eta = eta_kl.at(kl_key).get<double>();
        entry.mean_distance = mean_distance.at(kl_key).get<double>();
        for (std::size_t m = 0;; ++m) {
          const std::string klm_key = fmt::format("{}/{}", kl_key, m);
          if (!eta_klm.contains(klm_key)) break;
          entry.eta_per_segment.push_back(eta_klm[klm_key].get<double>());
        }
        if (j.contains("orderings_kl") && j["orderings_kl"].contains(kl_key))
          entry.ordering = j["orderings_kl"][kl_key].get<std::vector<int>>();
        result.scales.push_back(std::move(entry));
      }
    }

    for (const auto& e : j.at("tree_edges"))
      result.tree_edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("malformed result JSON: {}", e.what()));
  }
}

std::vector<std::pair<int, double>> rank_map(const SequencerResult& result) {
  const std::size_t n = result.ordering.size();
  std::vector<std::pair<int, double>> map;
  map.reserve(n);
  for (std::size_t s = 0; s < n; ++s)
    map.emplace_back(result.ordering[s],
                     n > 1 ? static_cast<double>(s) / static_cast<double>(n - 1) : 0.0);
  return map;
}

void write_rank_map(const std::string& path, const SequencerResult& result) {
  auto out = open_output(path);
  out << "object,scalar\n";
  for (const auto& [id, scalar] : rank_map(result))
    out << id << ',' << fmt::format("{:.17g}", scalar) << '\n';
  if (!out) throw InputError(fmt::format("write to '{}' failed", path));
}

std::string format_scale_report(const SequencerResult& result, std::size_t top_k) {
  for (const auto& entry : result.scales)
    if (!entry.ordering)
      throw InputError("result carries no per-(metric, scale) diagnostics; rerun with "
                       "diagnostics enabled");

  std::vector<const ScaleEntry*> entries;
  entries.reserve(result.scales.size());
  for (const auto& entry : result.scales) entries.push_back(&entry);
  std::stable_sort(entries.begin(), entries.end(),
                   [](const ScaleEntry* a, const ScaleEntry* b) { return a->eta > b->eta; });
  if (top_k < entries.size()) entries.resize(top_k);

  std::ostringstream out;
  for (const auto* entry : entries) {
    out << fmt::format("{}/{} eta={:.6g} ordering=", entry->metric, entry->scale, entry->eta);
    for (std::size_t s = 0; s < entry->ordering->size(); ++s) {
      if (s) out << ' ';
      out << (*entry->ordering)[s];
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json read_json(const std::string& path) {
  auto in = open_input(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("'{}': {}", path, e.what()));
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw InputError(fmt::format("write to '{}' failed", path));
}

}  // namespace sequencer
