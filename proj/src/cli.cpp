#include "treexplain/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "treexplain/baselines.hpp"
#include "treexplain/batch.hpp"
#include "treexplain/clustering.hpp"
#include "treexplain/harness.hpp"
#include "treexplain/io.hpp"
#include "treexplain/oracle.hpp"
#include "treexplain/plot_export.hpp"
#include "treexplain/synthetic.hpp"
#include "treexplain/treeshap.hpp"

namespace treexplain {
namespace {

using nlohmann::json;

struct Inputs {
  std::string model;
  std::string data;
  std::string label;
  unsigned threads = 0;
};

struct Loaded {
  TreeEnsemble ensemble;
  Dataset data;
  std::vector<double> labels;
};

void AddInputs(CLI::App* cmd, Inputs& in, bool needs_data = true) {
  cmd->add_option("--model", in.model, "Model dump (JSON)")->required();
  auto* data = cmd->add_option("--data", in.data, "Input rows (CSV with header)");
  if (needs_data) data->required();
  cmd->add_option("--label", in.label, "Name of a label column to split off the data");
  cmd->add_option("--threads", in.threads, "Worker threads (0 = all cores)");
}

Loaded Load(const Inputs& in) {
  TreeEnsemble ensemble = load_ensemble(in.model);
  Dataset data;
  std::vector<double> labels;
  if (!in.data.empty()) {
    data = load_csv_dataset(in.data);
    if (!in.label.empty()) {
      auto split = split_column(data, in.label);
      data = std::move(split.features);
      labels = std::move(split.column);
    }
    if (data.cols() != static_cast<std::size_t>(ensemble.num_features())) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "data '" + in.data + "' has " + std::to_string(data.cols()) +
                      " feature columns, model expects " + std::to_string(ensemble.num_features()));
    }
  }
  return {std::move(ensemble), std::move(data), std::move(labels)};
}

void Emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

int ResolveFeature(const TreeEnsemble& ensemble, const std::string& token) {
  const auto& names = ensemble.feature_names();
  for (std::size_t f = 0; f < names.size(); ++f) {
    if (names[f] == token) return static_cast<int>(f);
  }
  int index = -1;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), index);
  if (ec != std::errc() || ptr != token.data() + token.size() || index < 0 ||
      index >= ensemble.num_features()) {
    throw Error(ErrorKind::kInvalidArgument, "unknown feature '" + token + "'");
  }
  return index;
}

std::vector<std::string> Labels(const TreeEnsemble& ensemble) {
  std::vector<std::string> out;
  for (int f = 0; f < ensemble.num_features(); ++f) out.push_back(ensemble.feature_label(f));
  return out;
}

// JSON numbers are written with the shortest round-trip representation.
std::string AttributionsJson(const std::vector<Attribution>& rows) {
  json doc = json::array();
  for (const auto& a : rows) doc.push_back({{"phi0", a.phi0}, {"phi", a.phi}, {"output", a.output}});
  return doc.dump() + "\n";
}

std::string AttributionsCsv(const std::vector<Attribution>& rows, const std::vector<std::string>& labels) {
  std::ostringstream os;
  for (const auto& l : labels) os << l << ',';
  os << "phi0,output\n";
  for (const auto& a : rows) {
    for (double v : a.phi) os << format_double(v) << ',';
    os << format_double(a.phi0) << ',' << format_double(a.output) << '\n';
  }
  return os.str();
}

std::string InteractionsJson(const std::vector<InteractionMatrix>& rows) {
  json doc = json::array();
  for (const auto& m : rows) {
    json matrix = json::array();
    for (int i = 0; i < m.num_features; ++i) {
      json line = json::array();
      for (int j = 0; j < m.num_features; ++j) line.push_back(m.at(i, j));
      matrix.push_back(std::move(line));
    }
    doc.push_back({{"phi0", m.phi0}, {"interactions", std::move(matrix)}});
  }
  return doc.dump() + "\n";
}

std::string InteractionsCsv(const std::vector<InteractionMatrix>& rows,
                            const std::vector<std::string>& labels) {
  std::ostringstream os;
  os << "row,feature_i,feature_j,value\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int i = 0; i < rows[r].num_features; ++i) {
      for (int j = 0; j < rows[r].num_features; ++j) {
        os << r << ',' << labels[static_cast<std::size_t>(i)] << ','
           << labels[static_cast<std::size_t>(j)] << ',' << format_double(rows[r].at(i, j)) << '\n';
      }
    }
  }
  return os.str();
}

std::vector<Attribution> ExplainRows(const Loaded& in, AttributionMethod method, unsigned threads) {
  return batch_explain(in.ensemble, in.data, method, threads);
}

std::string FixtureExpectations() {
  const auto a = fixture_model_a();
  const auto b = fixture_model_b();
  const std::vector<double> yes{1.0, 1.0};
  const auto data = fixture_dataset(25);
  json doc;
  doc["input"] = {{"Fever", 1}, {"Cough", 1}};
  for (const auto& [name, model] : {std::pair<const char*, const TreeEnsemble*>{"model_a", &a},
                                    std::pair<const char*, const TreeEnsemble*>{"model_b", &b}}) {
    const auto labels = predict_batch(*model, data);
    json entry;
    entry["expected_value"] = expected_value(*model);
    entry["output"] = predict(*model, yes);
    entry["treeshap"] = brute_shap(*model, yes).phi;
    entry["saabas"] = saabas(*model, yes).phi;
    entry["gain"] = gain_importance(*model);
    entry["split_count"] = split_count_importance(*model);
    entry["mean_abs_shap"] = mean_abs_shap(*model, data).mean;
    entry["permutation"] = permutation_importance(*model, data, labels);
    doc[name] = std::move(entry);
  }
  doc["feature_order"] = {"Fever", "Cough"};
  return doc.dump(1) + "\n";
}

std::string DatasetWithLabels(const Dataset& data, const std::vector<double>& labels) {
  std::vector<std::string> names = data.column_names();
  names.push_back("label");
  std::vector<double> values;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto row = data.row(r);
    values.insert(values.end(), row.begin(), row.end());
    values.push_back(labels[r]);
  }
  return dataset_to_csv(Dataset(data.rows(), data.cols() + 1, std::move(values), std::move(names)));
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTooManyFeatures: return kExitTooManyFeatures;
    case ErrorKind::kIo: return kExitIo;
    case ErrorKind::kMalformed:
    case ErrorKind::kIndexOutOfRange:
    case ErrorKind::kCoverMismatch:
    case ErrorKind::kLeafInconsistency:
    case ErrorKind::kDepthExceeded: return kExitInvalidModel;
    case ErrorKind::kInvalidArgument: return kExitUsage;
    default: return kExitFailure;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact SHAP values and interaction values for tree ensembles", "treexplain"};
  app.require_subcommand(1);

  // explain
  Inputs explain_in;
  std::string explain_method = "treeshap";
  std::string explain_out;
  std::string explain_format = "json";
  auto* explain = app.add_subcommand("explain", "Per-row feature attributions");
  AddInputs(explain, explain_in);
  explain->add_option("--method", explain_method, "treeshap | saabas | brute")
      ->check(CLI::IsMember({"treeshap", "saabas", "brute"}));
  explain->add_option("--out", explain_out, "Output path (default stdout)");
  explain->add_option("--format", explain_format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  // interactions
  Inputs inter_in;
  std::string inter_out;
  std::string inter_format = "json";
  auto* interactions = app.add_subcommand("interactions", "Per-row SHAP interaction matrices");
  AddInputs(interactions, inter_in);
  interactions->add_option("--out", inter_out, "Output path (default stdout)");
  interactions->add_option("--format", inter_format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  // global-importance
  Inputs global_in;
  std::string global_method = "mean-abs-shap";
  std::string global_out;
  std::uint64_t global_seed = 0;
  int global_repeats = 10;
  auto* global = app.add_subcommand("global-importance", "Dataset-level feature importance");
  AddInputs(global, global_in, false);
  global->add_option("--method", global_method, "gain | split | permutation | mean-abs-shap")
      ->check(CLI::IsMember({"gain", "split", "permutation", "mean-abs-shap"}));
  global->add_option("--seed", global_seed, "Permutation seed");
  global->add_option("--repeats", global_repeats, "Permutation repeats");
  global->add_option("--out", global_out, "Output path (default stdout)");

  // perturb
  Inputs perturb_in;
  std::string perturb_method = "treeshap";
  std::string perturb_out;
  std::uint64_t perturb_seed = 0;
  auto* perturb = app.add_subcommand("perturb", "Cumulative output change when perturbing the most negative feature");
  AddInputs(perturb, perturb_in);
  perturb->add_option("--method", perturb_method, "treeshap | saabas | brute | gain | split | permutation | mean-abs-shap");
  perturb->add_option("--seed", perturb_seed, "Donor-row seed");
  perturb->add_option("--out", perturb_out, "Output path (default stdout)");

  // cluster
  Inputs cluster_in;
  std::string cluster_method = "treeshap";
  std::string cluster_linkage = "ward";
  std::string cluster_dir;
  auto* cluster = app.add_subcommand("cluster", "Supervised clustering of attributions");
  AddInputs(cluster, cluster_in);
  cluster->add_option("--method", cluster_method, "treeshap | saabas | both")
      ->check(CLI::IsMember({"treeshap", "saabas", "both"}));
  cluster->add_option("--linkage", cluster_linkage, "ward | complete | average")
      ->check(CLI::IsMember({"ward", "complete", "average"}));
  cluster->add_option("--out-dir", cluster_dir, "Write merges.csv, order.csv, r2.csv here");

  // summary
  Inputs summary_in;
  std::string summary_out;
  bool summary_drop = false;
  auto* summary = app.add_subcommand("summary", "Summary-plot records");
  AddInputs(summary, summary_in);
  summary->add_option("--out", summary_out, "Output path (default stdout)");
  summary->add_flag("--drop-unused", summary_drop, "Skip features with all-zero attributions");

  // dependence
  Inputs dep_in;
  std::string dep_feature;
  std::string dep_color;
  std::string dep_out;
  std::size_t dep_sample = kDefaultColorSample;
  auto* dependence = app.add_subcommand("dependence", "Dependence-plot records");
  AddInputs(dependence, dep_in);
  dependence->add_option("--feature", dep_feature, "Feature name or index")->required();
  dependence->add_option("--color-feature", dep_color, "Color feature (default: strongest interaction)");
  dependence->add_option("--sample", dep_sample, "Rows used to pick the color feature");
  dependence->add_option("--out", dep_out, "Output path (default stdout)");

  // interaction-dependence
  Inputs idep_in;
  std::string idep_feature;
  std::string idep_other;
  std::string idep_main_out;
  std::string idep_inter_out;
  auto* idep = app.add_subcommand("interaction-dependence", "Main-effect and interaction records");
  AddInputs(idep, idep_in);
  idep->add_option("--feature", idep_feature, "Feature name or index")->required();
  idep->add_option("--with", idep_other, "Interacting feature name or index")->required();
  idep->add_option("--main-out", idep_main_out, "Main-effect CSV path");
  idep->add_option("--interaction-out", idep_inter_out, "Interaction CSV path");

  // verify
  VerifyConfig verify_cfg;
  auto* verify = app.add_subcommand("verify", "Compare the fast algorithms with the enumeration oracle");
  verify->add_option("--seed", verify_cfg.seed, "Random seed");
  verify->add_option("--trials", verify_cfg.trials, "Number of random models")->check(CLI::NonNegativeNumber);
  verify->add_option("--max-features", verify_cfg.max_features, "Largest M")->check(CLI::PositiveNumber);
  verify->add_option("--max-depth", verify_cfg.max_depth, "Largest tree depth")->check(CLI::PositiveNumber);
  verify->add_option("--max-trees", verify_cfg.max_trees, "Largest tree count")->check(CLI::PositiveNumber);
  verify->add_option("--corrupt-weight", verify_cfg.weight_perturbation)->group("");

  // bench
  BenchConfig bench_cfg;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "Time one explanation across a size sweep");
  bench->add_option("--trees", bench_cfg.tree_counts, "Tree counts")->delimiter(',');
  bench->add_option("--depths", bench_cfg.depths, "Tree depths")->delimiter(',');
  bench->add_option("--features", bench_cfg.features, "Feature counts (default: equal to depth)")->delimiter(',');
  bench->add_option("--repeats", bench_cfg.repeats, "Timed runs per configuration");
  bench->add_option("--brute-max", bench_cfg.brute_max_features, "Largest used-feature count timed with brute force");
  bench->add_option("--seed", bench_cfg.seed, "Random seed");
  bench->add_option("--out", bench_out, "Output path (default stdout)");

  // fixtures
  std::string fixtures_dir;
  auto* fixtures = app.add_subcommand("fixtures", "Write the two AND-tree example models");
  fixtures->add_option("--out-dir", fixtures_dir, "Destination directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (explain->parsed()) {
      const Loaded in = Load(explain_in);
      const auto rows = ExplainRows(in, parse_attribution_method(explain_method), explain_in.threads);
      Emit(explain_out,
           explain_format == "csv" ? AttributionsCsv(rows, Labels(in.ensemble)) : AttributionsJson(rows),
           out);
    } else if (interactions->parsed()) {
      const Loaded in = Load(inter_in);
      const auto rows = batch_interactions(in.ensemble, in.data, inter_in.threads);
      Emit(inter_out,
           inter_format == "csv" ? InteractionsCsv(rows, Labels(in.ensemble)) : InteractionsJson(rows),
           out);
    } else if (global->parsed()) {
      const Loaded in = Load(global_in);
      const auto method = parse_attribution_method(global_method);
      std::vector<double> importance;
      if (method == AttributionMethod::kGain) {
        importance = gain_importance(in.ensemble);
      } else if (method == AttributionMethod::kSplitCount) {
        importance = split_count_importance(in.ensemble);
      } else {
        if (in.data.empty()) throw Error(ErrorKind::kEmptyData, "EmptyData: --data is required for " + global_method);
        if (method == AttributionMethod::kPermutation) {
          std::vector<double> labels = in.labels;
          if (labels.empty()) labels = predict_batch(in.ensemble, in.data);
          importance = permutation_importance(in.ensemble, in.data, labels, {global_repeats, global_seed});
        } else {
          importance = mean_abs_shap(batch_explain(in.ensemble, in.data, AttributionMethod::kTreeShap,
                                                   global_in.threads),
                                     in.ensemble.num_features())
                           .mean;
        }
      }
      std::vector<std::size_t> rank(importance.size());
      const auto order = rank_features(importance);
      for (std::size_t k = 0; k < order.size(); ++k) rank[static_cast<std::size_t>(order[k])] = k;
      std::ostringstream os;
      os << "feature,value,rank\n";
      for (int f = 0; f < in.ensemble.num_features(); ++f) {
        const auto u = static_cast<std::size_t>(f);
        os << in.ensemble.feature_label(f) << ',' << format_double(importance[u]) << ',' << rank[u] << '\n';
      }
      Emit(global_out, os.str(), out);
    } else if (perturb->parsed()) {
      const Loaded in = Load(perturb_in);
      PerturbationOptions options{perturb_seed, in.labels};
      const auto curve = perturbation_experiment(in.ensemble, in.data,
                                                 parse_attribution_method(perturb_method), options);
      std::ostringstream os;
      os << "row,cumulative\n";
      for (std::size_t r = 0; r < curve.size(); ++r) os << r << ',' << format_double(curve[r]) << '\n';
      Emit(perturb_out, os.str(), out);
    } else if (cluster->parsed()) {
      const Loaded in = Load(cluster_in);
      std::vector<AttributionMethod> methods;
      if (cluster_method == "both") {
        methods = {AttributionMethod::kTreeShap, AttributionMethod::kSaabas};
      } else {
        methods = {parse_attribution_method(cluster_method)};
      }
      const auto results = compare_supervised_clusterings(in.ensemble, in.data, methods,
                                                          parse_linkage(cluster_linkage), cluster_in.threads);
      std::ostringstream merges, order, r2;
      merges << "method,step,first,second,height,size\n";
      order << "method,position,row\n";
      r2 << "method,groups,r2,zero_variance\n";
      for (const auto& res : results) {
        const auto name = attribution_method_name(res.method);
        for (std::size_t k = 0; k < res.tree.merges.size(); ++k) {
          const auto& m = res.tree.merges[k];
          merges << name << ',' << k << ',' << m.first << ',' << m.second << ','
                 << format_double(m.height) << ',' << m.size << '\n';
        }
        const auto leaves = leaf_order(res.tree);
        for (std::size_t k = 0; k < leaves.size(); ++k) order << name << ',' << k << ',' << leaves[k] << '\n';
        for (const auto& p : res.curve.points) {
          r2 << name << ',' << p.groups << ',' << format_double(p.r2) << ','
             << (res.curve.zero_variance ? 1 : 0) << '\n';
        }
        err << name << ": mean R2 over cuts " << format_double(res.area)
            << (res.curve.zero_variance ? " (zero-variance outputs)" : "") << '\n';
      }
      if (cluster_dir.empty()) {
        out << merges.str() << '\n' << order.str() << '\n' << r2.str();
      } else {
        std::filesystem::create_directories(cluster_dir);
        write_text_file(std::filesystem::path(cluster_dir) / "merges.csv", merges.str());
        write_text_file(std::filesystem::path(cluster_dir) / "order.csv", order.str());
        write_text_file(std::filesystem::path(cluster_dir) / "r2.csv", r2.str());
      }
    } else if (summary->parsed()) {
      const Loaded in = Load(summary_in);
      const auto attributions = to_matrix(batch_explain(in.ensemble, in.data, AttributionMethod::kTreeShap,
                                                        summary_in.threads));
      const auto records = summary_plot_data(attributions, in.data, {summary_drop});
      Emit(summary_out, summary_csv(records, Labels(in.ensemble)), out);
    } else if (dependence->parsed()) {
      const Loaded in = Load(dep_in);
      const int feature = ResolveFeature(in.ensemble, dep_feature);
      const auto attributions = to_matrix(batch_explain(in.ensemble, in.data, AttributionMethod::kTreeShap,
                                                        dep_in.threads));
      std::optional<int> color;
      std::vector<InteractionMatrix> inter;
      if (!dep_color.empty()) {
        color = ResolveFeature(in.ensemble, dep_color);
      } else {
        const std::size_t rows = std::min(dep_sample, in.data.rows());
        std::vector<double> head(in.data.values().begin(),
                                 in.data.values().begin() + static_cast<std::ptrdiff_t>(rows * in.data.cols()));
        inter = batch_interactions(in.ensemble, Dataset(rows, in.data.cols(), std::move(head)), dep_in.threads);
        if (inter.empty()) throw Error(ErrorKind::kEmptyData, "EmptyData: no rows to select a color feature");
        color = select_color_feature(feature, inter, dep_sample);
      }
      const auto plot = dependence_plot_data(feature, color, attributions, in.data);
      err << "color feature: " << in.ensemble.feature_label(plot.color_feature) << '\n';
      Emit(dep_out, dependence_csv(plot), out);
    } else if (idep->parsed()) {
      const Loaded in = Load(idep_in);
      const int feature = ResolveFeature(in.ensemble, idep_feature);
      const int other = ResolveFeature(in.ensemble, idep_other);
      const auto inter = batch_interactions(in.ensemble, in.data, idep_in.threads);
      const auto sets = interaction_dependence_data(feature, other, in.data, inter);
      if (idep_main_out.empty() && idep_inter_out.empty()) {
        out << main_effect_csv(sets.main_effects) << '\n' << interaction_csv(sets.interactions);
      } else {
        Emit(idep_main_out, main_effect_csv(sets.main_effects), out);
        Emit(idep_inter_out, interaction_csv(sets.interactions), out);
      }
    } else if (verify->parsed()) {
      if (verify_cfg.trials == 0) err << "warning: no trials\n";
      const auto report = run_verification(verify_cfg);
      out << "trials " << report.trials << '\n'
          << "max_shap_error " << format_double(report.max_shap_error) << '\n'
          << "max_interaction_error " << format_double(report.max_interaction_error) << '\n'
          << "max_asymmetry " << format_double(report.max_asymmetry) << '\n'
          << "max_row_sum_error " << format_double(report.max_row_sum_error) << '\n'
          << "max_local_accuracy_error " << format_double(report.max_local_accuracy_error) << '\n'
          << "result " << (report.passed ? "PASS" : "FAIL") << '\n';
      return report.passed ? kExitOk : kExitFailure;
    } else if (bench->parsed()) {
      const auto rows = run_benchmark(bench_cfg);
      std::ostringstream os;
      os << "method,trees,depth,features,used_features,seconds\n";
      for (const auto& r : rows) {
        os << r.method << ',' << r.trees << ',' << r.depth << ',' << r.features << ','
           << r.used_features << ',' << format_double(r.seconds) << '\n';
      }
      Emit(bench_out, os.str(), out);
    } else if (fixtures->parsed()) {
      const std::filesystem::path dir(fixtures_dir);
      std::filesystem::create_directories(dir);
      const auto a = fixture_model_a();
      const auto b = fixture_model_b();
      const auto data = fixture_dataset(25);
      write_text_file(dir / "model_a.json", ensemble_to_json(a));
      write_text_file(dir / "model_b.json", ensemble_to_json(b));
      write_text_file(dir / "data_a.csv", DatasetWithLabels(data, predict_batch(a, data)));
      write_text_file(dir / "data_b.csv", DatasetWithLabels(data, predict_batch(b, data)));
      write_text_file(dir / "yes_yes.csv", "Fever,Cough\n1,1\n");
      write_text_file(dir / "expectations.json", FixtureExpectations());
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return ExitCodeFor(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace treexplain
