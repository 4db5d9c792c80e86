#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sequencer/approx.hpp"
#include "sequencer/error.hpp"
#include "sequencer/fom.hpp"
#include "sequencer/io.hpp"
#include "sequencer/outliers.hpp"
#include "sequencer/pipeline.hpp"
#include "sequencer/synth.hpp"
#include "sequencer/version.hpp"

namespace fs = std::filesystem;
using namespace sequencer;

namespace {

// Exit codes by error class.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;
constexpr int kExitDegenerate = 4;

unsigned threads_from_env() {
  const char* env = std::getenv("SEQ_THREADS");
  if (!env || !*env) return 0;
  const long value = std::strtol(env, nullptr, 10);
  return value > 0 ? static_cast<unsigned>(value) : 0;
}

ObjectSet load_input(const std::string& path, std::string format) {
  if (format.empty()) {
    const auto ext = fs::path(path).extension().string();
    format = (ext == ".pgm" || ext == ".PGM") ? "pgm" : "csv";
  }
  if (format == "csv") return load_object_set(read_csv_matrix(path));
  if (format == "pgm") return load_object_set(read_pgm(path));
  throw ConfigError(fmt::format("unknown input format '{}'", format));
}

struct RunOptions {
  std::string input;
  std::string format;
  std::vector<std::string> metrics{"L2", "KL", "EMD", "energy"};
  std::optional<int> max_depth;
  bool offset_mode = false;
  bool diagnostics = false;
  std::uint64_t seed = 0;
  std::string out_prefix = "seq_out";
  bool render = false;
  bool emit_rank_map = false;
  bool emit_tree = false;
  // approximate mode
  bool approx = false;
  std::size_t subset_size = 0;
  double anchor_fraction = 0.2;
  std::size_t batch_size = 0;
};

int cmd_run(const RunOptions& opt) {
  PipelineConfig config;
  config.metrics.clear();
  for (const auto& name : opt.metrics) config.metrics.push_back(metric_from_name(name));
  config.max_depth = opt.max_depth;
  config.offset_mode = opt.offset_mode;
  config.collect_diagnostics = opt.diagnostics;
  config.threads = threads_from_env();

  const ObjectSet objects = load_input(opt.input, opt.format);

  SequencerResult result;
  if (opt.approx) {
    ApproxConfig approx;
    approx.subset_size = opt.subset_size ? opt.subset_size : objects.n_obj();
    approx.anchor_fraction = opt.anchor_fraction;
    approx.batch_size = opt.batch_size;
    approx.seed = opt.seed;
    result = run_approx(objects, approx, config);
  } else {
    result = run(objects, config);
  }

  write_ordering(opt.out_prefix + ".order.txt", result.ordering);

  auto report = result_to_json(result);
  report["config"]["seed"] = opt.seed;
  report["config"]["approx"] = opt.approx;
  write_json(opt.out_prefix + ".report.json", report);

  const Matrix ordered = reorder_rows(objects.values, result.ordering);
  write_csv_matrix(opt.out_prefix + ".ordered.csv", ordered);

  if (opt.render) write_pgm(opt.out_prefix + ".render.pgm", ordered);
  if (opt.emit_rank_map) write_rank_map(opt.out_prefix + ".rankmap.csv", result);
  if (opt.emit_tree) {
    std::ofstream out(opt.out_prefix + ".tree.txt");
    SpanningTree tree(static_cast<int>(result.n_obj), result.tree_edges);
    out << format_edge_list(tree);
  }

  std::cout << fmt::format("sequenced {} objects; eta_combined = {:.4g}; start node {}\n",
                           result.n_obj, result.eta_combined, result.start_node);
  return kExitOk;
}

int cmd_synth_pulses(const PulseDatasetSpec& spec, const std::string& out,
                     const std::string& truth) {
  const PulseDataset data = generate_pulse_dataset(spec);
  write_csv_matrix(out, data.objects.values);
  std::ofstream tout(truth);
  if (!tout) throw InputError(fmt::format("cannot write '{}'", truth));
  tout << "row,true_rank\n";
  for (std::size_t r = 0; r < data.true_rank.size(); ++r)
    tout << r << ',' << data.true_rank[r] << '\n';
  std::cout << fmt::format("wrote {}x{} pulse dataset to {}\n", data.objects.n_obj(),
                           data.objects.n_pix(), out);
  return kExitOk;
}

int cmd_synth_shuffle(const std::string& image, std::uint64_t seed, const std::string& out,
                      const std::string& perm_path) {
  const ObjectSet input = load_object_set(read_pgm(image));
  const ShuffledRows shuffled = shuffle_rows(input, seed);
  write_pgm(out, shuffled.objects.values);
  std::ofstream pout(perm_path);
  if (!pout) throw InputError(fmt::format("cannot write '{}'", perm_path));
  pout << "row,source_row\n";
  for (std::size_t r = 0; r < shuffled.permutation.size(); ++r)
    pout << r << ',' << shuffled.permutation[r] << '\n';
  std::cout << fmt::format("shuffled {} rows of {}\n", shuffled.permutation.size(), image);
  return kExitOk;
}

int cmd_fom(const std::string& dir, const std::string& report_path) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw InputError(fmt::format("'{}' is not a directory", dir));
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError(fmt::format("no candidate CSV files in '{}'", dir));

  std::vector<EmbeddingCandidate> candidates;
  for (const auto& file : files) {
    EmbeddingCandidate candidate;
    candidate.points = read_csv_matrix(file.string());
    fs::path label_file = file;
    label_file.replace_extension(".label");
    if (fs::exists(label_file)) {
      std::ifstream in(label_file);
      std::getline(in, candidate.params_label);
    }
    if (candidate.params_label.empty()) candidate.params_label = file.stem().string();
    candidates.push_back(std::move(candidate));
  }

  const SelectionResult selection = select_best(candidates);

  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["version"] = kVersion;
  j["best"] = selection.best_label;
  j["ranking"] = nlohmann::json::array();
  for (const auto& r : selection.ranking) {
    j["ranking"].push_back({{"label", r.label},
                            {"eta", r.fom.eta},
                            {"eta_normalized", r.fom.eta_normalized},
                            {"n", r.fom.n},
                            {"clustering_warning", r.fom.clustering_warning}});
    if (r.fom.clustering_warning)
      std::cerr << fmt::format(
          "warning: '{}' shows strong clustering; elongation may not reflect sequence "
          "quality\n",
          r.label);
  }
  write_json(report_path, j);
  std::cout << fmt::format("best candidate: {} (eta' = {:.4g})\n", selection.best_label,
                           selection.best.eta_normalized);
  return kExitOk;
}

int cmd_insert(const std::string& result_path, const std::string& input,
               const std::string& format, const std::string& object_path,
               const std::string& out) {
  const SequencerResult result = result_from_json(read_json(result_path));
  const ObjectSet objects = load_input(input, format);
  const Matrix object_rows = read_csv_matrix(object_path);
  if (object_rows.rows() != 1)
    throw InputError(fmt::format("'{}' must contain exactly one row, got {}", object_path,
                                 object_rows.rows()));

  PipelineConfig config;
  config.metrics.clear();
  for (const auto& name : result.metric_names) config.metrics.push_back(metric_from_name(name));
  config.max_depth = result.max_depth;
  config.offset_mode = result.offset_mode;
  config.threads = threads_from_env();

  const auto updated = insert_object(result, objects, object_rows.row(0), config);
  write_ordering(out, updated);

  for (std::size_t s = 0; s < updated.size(); ++s) {
    if (updated[s] == static_cast<int>(objects.n_obj())) {
      std::cout << fmt::format("inserted new object at sequence position {} of {}\n", s,
                               updated.size());
      break;
    }
  }
  return kExitOk;
}

int cmd_outliers(const std::string& input, int window, double threshold,
                 const std::string& report_path, const std::string& residual_out) {
  const ObjectSet ordered = load_object_set(read_csv_matrix(input));
  const ObjectSet smoothed = smooth_along_sequence(ordered, window);
  const ResidualReport report = compute_residuals(ordered, smoothed);
  const auto flagged = flag_outliers(report, threshold);

  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["version"] = kVersion;
  j["window"] = window;
  j["threshold"] = threshold;
  j["scores"] = report.object_score;
  j["flagged"] = nlohmann::json::array();
  for (int idx : flagged)
    j["flagged"].push_back(
        {{"index", idx}, {"score", report.object_score[static_cast<std::size_t>(idx)]}});
  j["end_position_score_correlation"] = end_position_score_correlation(report);
  write_json(report_path, j);

  if (!residual_out.empty()) write_csv_matrix(residual_out, report.residual);

  std::cout << fmt::format("flagged {} of {} objects at threshold {}\n", flagged.size(),
                           ordered.n_obj(), threshold);
  return kExitOk;
}

int cmd_report(const std::string& result_path, std::size_t top_k) {
  const SequencerResult result = result_from_json(read_json(result_path));
  std::cout << format_scale_report(result, top_k);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orders a collection of 1-D objects along their main continuous trend by "
               "measuring the elongation of minimum spanning trees over multi-metric, "
               "multi-scale distance matrices."};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run_cmd = app.add_subcommand("run", "Sequence a dataset");
  run_cmd->add_option("--input", run_opt.input, "Input file (CSV rows or PGM image)")
      ->required();
  run_cmd->add_option("--format", run_opt.format, "Input format: csv or pgm (default: by extension)");
  run_cmd->add_option("--metrics", run_opt.metrics,
                      "Subset of metrics: L2 KL EMD energy")
      ->delimiter(',');
  int max_depth_flag = -1;
  run_cmd->add_option("--max-depth", max_depth_flag, "Override the deepest scale");
  run_cmd->add_flag("--offset-mode", run_opt.offset_mode,
                    "Shift each segment row by its minimum before normalizing");
  run_cmd->add_flag("--diagnostics", run_opt.diagnostics,
                    "Keep per metric/scale orderings in the report");
  run_cmd->add_option("--seed", run_opt.seed, "Seed for the approximate mode");
  run_cmd->add_option("--out-prefix", run_opt.out_prefix,
                      "Prefix for .order.txt, .report.json and .ordered.csv");
  run_cmd->add_flag("--render", run_opt.render, "Also write a PGM rendering of the ordered data");
  run_cmd->add_flag("--rank-map", run_opt.emit_rank_map,
                    "Also write per-object colorbar scalars");
  run_cmd->add_flag("--tree-out", run_opt.emit_tree, "Also write the final tree edge list");
  run_cmd->add_flag("--approx", run_opt.approx, "Subset-then-populate mode for large datasets");
  run_cmd->add_option("--subset-size", run_opt.subset_size, "Skeleton subset size (approx mode)");
  run_cmd->add_option("--anchor-fraction", run_opt.anchor_fraction,
                      "Fraction of the sequence used as anchors (approx mode)");
  run_cmd->add_option("--batch-size", run_opt.batch_size,
                      "Objects placed per iteration (approx mode; 0 = auto)");

  auto* synth_cmd = app.add_subcommand("synth", "Generate validation datasets");
  synth_cmd->require_subcommand(1);
  PulseDatasetSpec pulse_spec;
  std::string synth_out = "pulses.csv", synth_truth = "truth.csv";
  auto* pulses_cmd = synth_cmd->add_subcommand("pulses", "Drifting-pulse dataset");
  pulses_cmd->add_option("--seed", pulse_spec.seed, "RNG seed");
  pulses_cmd->add_option("--n-obj", pulse_spec.n_obj, "Number of objects");
  pulses_cmd->add_option("--n-pix", pulse_spec.n_pix, "Pixels per object");
  pulses_cmd->add_option("--n-pulses", pulse_spec.n_pulses, "Pulses per object");
  pulses_cmd->add_option("--pulse-sigma", pulse_spec.pulse_sigma, "Pulse width in pixels");
  pulses_cmd->add_option("--background-amplitude", pulse_spec.background_amplitude,
                         "Background std relative to pulse height");
  pulses_cmd->add_option("--corr-length", pulse_spec.background_corr_length,
                         "Background correlation length in pixels");
  pulses_cmd->add_option("--nugget", pulse_spec.background_nugget,
                         "White component of the background");
  pulses_cmd->add_option("--baseline", pulse_spec.baseline,
                         "Constant offset keeping the data positive");
  pulses_cmd->add_option("--out", synth_out, "Output CSV");
  pulses_cmd->add_option("--truth", synth_truth, "Ground-truth rank CSV");

  std::string shuffle_image, shuffle_out = "shuffled.pgm", shuffle_perm = "perm.csv";
  std::uint64_t shuffle_seed = 0;
  auto* shuffle_cmd = synth_cmd->add_subcommand("shuffle", "Shuffle image rows");
  shuffle_cmd->add_option("--image", shuffle_image, "Input PGM image")->required();
  shuffle_cmd->add_option("--seed", shuffle_seed, "RNG seed");
  shuffle_cmd->add_option("--out", shuffle_out, "Shuffled PGM");
  shuffle_cmd->add_option("--perm", shuffle_perm, "Permutation CSV");

  std::string fom_dir, fom_report = "fom.json";
  auto* fom_cmd = app.add_subcommand("fom", "Score candidate embeddings by normalized elongation");
  fom_cmd->add_option("--candidates", fom_dir, "Directory of candidate CSV files")->required();
  fom_cmd->add_option("--report", fom_report, "Output JSON");

  std::string insert_result, insert_input, insert_format, insert_object_path,
      insert_out = "updated_order.txt";
  auto* insert_cmd = app.add_subcommand("insert", "Insert a new object into a finished sequence");
  insert_cmd->add_option("--result", insert_result, "Result JSON from a run")->required();
  insert_cmd->add_option("--input", insert_input, "Original dataset")->required();
  insert_cmd->add_option("--format", insert_format, "Input format: csv or pgm");
  insert_cmd->add_option("--object", insert_object_path, "Single-row CSV with the new object")
      ->required();
  insert_cmd->add_option("--out", insert_out, "Updated ordering output");

  std::string outlier_input, outlier_report = "outliers.json", outlier_residuals;
  int outlier_window = 9;
  double outlier_threshold = 5.0;
  auto* outliers_cmd = app.add_subcommand("outliers", "Flag objects deviating from the trend");
  outliers_cmd->add_option("--input", outlier_input, "Ordered dataset CSV")->required();
  outliers_cmd->add_option("--window", outlier_window, "Running-median window (odd)");
  outliers_cmd->add_option("--threshold", outlier_threshold, "Flag above this multiple of the median score");
  outliers_cmd->add_option("--report", outlier_report, "Output JSON");
  outliers_cmd->add_option("--residuals-out", outlier_residuals, "Optional residual matrix CSV");

  std::string report_result;
  std::size_t report_top_k = 10;
  auto* report_cmd = app.add_subcommand("report", "List (metric, scale) pairs by elongation");
  report_cmd->add_option("--result", report_result, "Result JSON with diagnostics")->required();
  report_cmd->add_option("--top-k", report_top_k, "Entries to list");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      if (max_depth_flag >= 0) run_opt.max_depth = max_depth_flag;
      return cmd_run(run_opt);
    }
    if (*pulses_cmd) return cmd_synth_pulses(pulse_spec, synth_out, synth_truth);
    if (*shuffle_cmd) return cmd_synth_shuffle(shuffle_image, shuffle_seed, shuffle_out, shuffle_perm);
    if (*fom_cmd) return cmd_fom(fom_dir, fom_report);
    if (*insert_cmd)
      return cmd_insert(insert_result, insert_input, insert_format, insert_object_path, insert_out);
    if (*outliers_cmd)
      return cmd_outliers(outlier_input, outlier_window, outlier_threshold, outlier_report,
                          outlier_residuals);
    if (*report_cmd) return cmd_report(report_result, report_top_k);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DegenerateError& e) {
    std::cerr << "degenerate data: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
