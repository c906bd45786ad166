#include "treexplain/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace treexplain {

using nlohmann::json;

namespace {

template <typename T>
std::vector<T> ReadArray(const json& tree, const char* key, std::size_t t) {
  auto it = tree.find(key);
  if (it == tree.end() || !it->is_array()) {
    throw Error(ErrorKind::kMalformed,
                "Malformed: tree " + std::to_string(t) + ": missing array '" + key + "'");
  }
  std::vector<T> out;
  out.reserve(it->size());
  for (std::size_t j = 0; j < it->size(); ++j) {
    const json& v = (*it)[j];
    if constexpr (std::is_same_v<T, int>) {
      if (!v.is_number_integer()) {
        throw Error(ErrorKind::kMalformed, "Malformed: tree " + std::to_string(t) + " node " +
                                               std::to_string(j) + ": '" + key +
                                               "' entry is not an integer");
      }
      out.push_back(v.get<int>());
    } else {
      if (!v.is_number()) {
        throw Error(ErrorKind::kMalformed, "Malformed: tree " + std::to_string(t) + " node " +
                                               std::to_string(j) + ": '" + key +
                                               "' entry is not a number");
      }
      out.push_back(v.get<double>());
    }
  }
  return out;
}

}  // namespace

TreeEnsemble parse_ensemble(std::string_view document, int max_depth) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kMalformed, std::string("Malformed: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::kMalformed, "Malformed: top level must be an object");

  double base_score = 0.0;
  if (auto it = doc.find("base_score"); it != doc.end()) {
    if (!it->is_number()) throw Error(ErrorKind::kMalformed, "Malformed: base_score must be a number");
    base_score = it->get<double>();
  }
  auto nf = doc.find("num_features");
  if (nf == doc.end() || !nf->is_number_integer() || nf->get<long long>() < 0) {
    throw Error(ErrorKind::kMalformed, "Malformed: num_features must be a nonnegative integer");
  }
  std::vector<std::string> names;
  if (auto it = doc.find("feature_names"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorKind::kMalformed, "Malformed: feature_names must be an array");
    for (const auto& n : *it) {
      if (!n.is_string()) throw Error(ErrorKind::kMalformed, "Malformed: feature name is not a string");
      names.push_back(n.get<std::string>());
    }
  }
  auto trees_it = doc.find("trees");
  if (trees_it == doc.end() || !trees_it->is_array()) {
    throw Error(ErrorKind::kMalformed, "Malformed: missing 'trees' array");
  }
  std::vector<Tree> trees;
  trees.reserve(trees_it->size());
  for (std::size_t t = 0; t < trees_it->size(); ++t) {
    const json& jt = (*trees_it)[t];
    if (!jt.is_object()) {
      throw Error(ErrorKind::kMalformed, "Malformed: tree " + std::to_string(t) + " is not an object");
    }
    Tree tree;
    tree.values = ReadArray<double>(jt, "values", t);
    tree.left = ReadArray<int>(jt, "left", t);
    tree.right = ReadArray<int>(jt, "right", t);
    tree.thresholds = ReadArray<double>(jt, "thresholds", t);
    tree.features = ReadArray<int>(jt, "features", t);
    tree.covers = ReadArray<double>(jt, "covers", t);
    trees.push_back(std::move(tree));
  }
  return TreeEnsemble(std::move(trees), base_score, nf->get<int>(), std::move(names), max_depth);
}

TreeEnsemble load_ensemble(const std::filesystem::path& path, int max_depth) {
  return parse_ensemble(read_text_file(path), max_depth);
}

std::string ensemble_to_json(const TreeEnsemble& ensemble) {
  json doc;
  doc["base_score"] = ensemble.base_score();
  doc["num_features"] = ensemble.num_features();
  if (ensemble.feature_names().empty()) {
    doc["feature_names"] = nullptr;
  } else {
    doc["feature_names"] = ensemble.feature_names();
  }
  doc["trees"] = json::array();
  for (const auto& tree : ensemble.trees()) {
    doc["trees"].push_back({{"values", tree.values},
                            {"left", tree.left},
                            {"right", tree.right},
                            {"thresholds", tree.thresholds},
                            {"features", tree.features},
                            {"covers", tree.covers}});
  }
  return doc.dump(1) + "\n";
}

namespace {

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double ParseCell(std::string_view text, std::size_t line_no, std::size_t col) {
  text = Trim(text);
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw Error(ErrorKind::kMalformed, "Malformed: CSV line " + std::to_string(line_no) +
                                           " column " + std::to_string(col) +
                                           ": not a finite number: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

Dataset parse_csv_dataset(std::string_view text) {
  std::vector<std::string> header;
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (Trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto cells = SplitCsvLine(line);
    if (!have_header) {
      for (auto& c : cells) header.emplace_back(Trim(c));
      have_header = true;
      continue;
    }
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::kMalformed, "Malformed: CSV line " + std::to_string(line_no) +
                                             " has " + std::to_string(cells.size()) +
                                             " cells, header has " + std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) values.push_back(ParseCell(cells[c], line_no, c));
    ++rows;
    if (end == text.size()) break;
  }
  if (!have_header) throw Error(ErrorKind::kMalformed, "Malformed: CSV has no header row");
  const std::size_t cols = header.size();
  return Dataset(rows, cols, std::move(values), std::move(header));
}

Dataset load_csv_dataset(const std::filesystem::path& path) {
  return parse_csv_dataset(read_text_file(path));
}

std::string dataset_to_csv(const Dataset& data) {
  std::ostringstream os;
  for (std::size_t c = 0; c < data.cols(); ++c) {
    if (c) os << ',';
    os << (data.column_names().empty() ? "f" + std::to_string(c) : data.column_names()[c]);
  }
  os << '\n';
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.cols(); ++c) {
      if (c) os << ',';
      os << format_double(data.at(r, c));
    }
    os << '\n';
  }
  return os.str();
}

SplitColumn split_column(const Dataset& data, const std::string& name) {
  const auto& names = data.column_names();
  std::size_t idx = names.size();
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (names[c] == name) idx = c;
  }
  if (idx == names.size()) {
    throw Error(ErrorKind::kInvalidArgument, "column '" + name + "' not found in dataset");
  }
  std::vector<std::string> kept_names;
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c != idx) kept_names.push_back(names[c]);
  }
  SplitColumn out;
  std::vector<double> values;
  values.reserve(data.rows() * (data.cols() - 1));
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.cols(); ++c) {
      if (c == idx) {
        out.column.push_back(data.at(r, c));
      } else {
        values.push_back(data.at(r, c));
      }
    }
  }
  out.features = Dataset(data.rows(), data.cols() - 1, std::move(values), std::move(kept_names));
  return out;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "failed writing '" + path.string() + "'");
}

}  // namespace treexplain
