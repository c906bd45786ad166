#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "treexplain/tree_model.hpp"

namespace treexplain {

// Model dump JSON:
//   {"base_score": num, "num_features": int, "feature_names": [str] | null,
//    "trees": [{"values": [...], "left": [...], "right": [...],
//               "thresholds": [...], "features": [...], "covers": [...]}]}
// Parallel arrays, index 0 is the root, -1 marks leaves. Ties go left.
TreeEnsemble parse_ensemble(std::string_view document, int max_depth = kDefaultMaxDepth);
TreeEnsemble load_ensemble(const std::filesystem::path& path, int max_depth = kDefaultMaxDepth);
std::string ensemble_to_json(const TreeEnsemble& ensemble);

// CSV with a header row and numeric cells.
Dataset parse_csv_dataset(std::string_view text);
Dataset load_csv_dataset(const std::filesystem::path& path);
std::string dataset_to_csv(const Dataset& data);

// Splits one column (by name) out of a dataset, e.g. a label column.
struct SplitColumn {
  Dataset features;
  std::vector<double> column;
};
SplitColumn split_column(const Dataset& data, const std::string& name);

// Shortest decimal that parses back to the same double.
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace treexplain
