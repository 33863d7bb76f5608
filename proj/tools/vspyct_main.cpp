#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vspyct/eval.hpp"
#include "vspyct/model_io.hpp"
#include "vspyct/predictor.hpp"
#include "vspyct/synth.hpp"
#include "vspyct/tree.hpp"

namespace {

using namespace vspyct;

struct ConfigFlags {
  TreeConfig config;
  std::string tau = "auto";
  std::string noise_floor = "auto";
  std::string kernel = "rbf";
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--max-depth", flags.config.max_depth, "Maximum tree depth");
  cmd->add_option("--min-samples-split", flags.config.min_samples_split,
                  "Minimum rows needed to attempt a split");
  cmd->add_option("--vi-epochs", flags.config.vi_epochs,
                  "Optimization epochs per split posterior");
  cmd->add_option("--learning-rate", flags.config.learning_rate,
                  "Adam learning rate for split posteriors");
  cmd->add_option("--mc-samples", flags.config.mc_samples,
                  "Monte Carlo routing samples per prediction");
  cmd->add_option("--tau", flags.tau, "Support threshold: 'auto' or a positive value");
  cmd->add_option("--temperature", flags.config.temperature,
                  "Gate transition temperature");
  cmd->add_option("--noise-floor", flags.noise_floor,
                  "In-support variance: 'auto' or a positive value");
  cmd->add_option("--kernel", flags.kernel, "Kernel family: rbf or lin-rbf");
  cmd->add_option("--gp-iters", flags.config.gp_iters,
                  "Marginal-likelihood optimization iterations per leaf");
  cmd->add_option("--gp-learning-rate", flags.config.gp_learning_rate,
                  "Adam learning rate for GP hyperparameters");
  cmd->add_option("--min-leaf-gp", flags.config.min_leaf_gp,
                  "Minimum leaf size to fit a GP");
  cmd->add_option("--cov-reg", flags.config.cov_reg,
                  "Support covariance regularization scale");
  cmd->add_option("--seed", flags.config.seed, "Random seed");
  cmd->add_option("--threads", flags.config.threads,
                  "Worker threads (0 = all cores)");
}

double parse_positive(const std::string& text, const std::string& flag) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw InvalidInput(flag + ": expected 'auto' or a number, got '" + text + "'");
  }
  if (pos != text.size())
    throw InvalidInput(flag + ": expected 'auto' or a number, got '" + text + "'");
  return value;
}

TreeConfig resolve_config(const ConfigFlags& flags) {
  TreeConfig config = flags.config;
  if (flags.tau == "auto") {
    config.tau.reset();
  } else {
    config.tau = parse_positive(flags.tau, "--tau");
  }
  if (flags.noise_floor == "auto") {
    config.noise_floor.reset();
  } else {
    config.noise_floor = parse_positive(flags.noise_floor, "--noise-floor");
  }
  config.kernel_family = kernel_family_from_name(flags.kernel);
  config.validate();
  return config;
}

/// Columns for prediction: exact name match in model order when possible,
/// else a pure positional match when the width already agrees.
Eigen::MatrixXd align_features(const FeatureTable& table, const Tree& tree) {
  const auto& wanted = tree.feature_names;
  std::vector<int> positions;
  positions.reserve(wanted.size());
  bool all_found = true;
  for (const auto& name : wanted) {
    bool found = false;
    for (std::size_t c = 0; c < table.names.size(); ++c) {
      if (table.names[c] == name) {
        positions.push_back(static_cast<int>(c));
        found = true;
        break;
      }
    }
    if (!found) {
      all_found = false;
      break;
    }
  }
  if (all_found && !wanted.empty()) {
    Eigen::MatrixXd out(table.values.rows(), static_cast<Eigen::Index>(positions.size()));
    for (std::size_t j = 0; j < positions.size(); ++j)
      out.col(static_cast<Eigen::Index>(j)) = table.values.col(positions[j]);
    return out;
  }
  if (table.values.cols() == tree.num_features()) return table.values;
  throw InvalidInput("input CSV columns do not match the model: expected the " +
                     std::to_string(tree.num_features()) +
                     " training feature columns");
}

int cmd_train(const std::string& data_path, const std::string& target,
              const std::string& out_path, const ConfigFlags& flags) {
  const TreeConfig config = resolve_config(flags);
  const Dataset dataset = load_csv(data_path, target);
  const auto start = std::chrono::steady_clock::now();
  const Tree tree = fit_tree(dataset, config);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  save_model(tree, out_path);
  std::printf("model: %s\n", out_path.c_str());
  std::printf("rows: %d  features: %d\n", dataset.rows(), dataset.cols());
  std::printf("depth: %d  leaves: %zu  leaves_with_gp: %d\n", tree.depth(),
              tree.leaves.size(), tree.leaves_with_gp());
  std::printf("tau: %s  noise_floor: %s\n",
              format_double(tree.leaves.front().tau).c_str(),
              format_double(tree.leaves.front().noise_floor).c_str());
  std::printf("fit_seconds: %.3f\n", seconds);
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, int mc_samples, std::uint64_t seed,
                int threads, bool baseline) {
  const Tree tree = load_model(model_path);
  const FeatureTable table = load_feature_csv(data_path);
  const Eigen::MatrixXd features = align_features(table, tree);
  const int samples = mc_samples > 0 ? mc_samples : tree.config.mc_samples;
  const auto preds =
      predict_batch(tree, features, samples, seed, threads, baseline);

  std::ofstream out(out_path);
  if (!out) throw InvalidInput("cannot open output file '" + out_path + "'");
  out << "mean,variance,std,functional_component,routing_component,"
         "mean_gate_weight\n";
  for (const auto& p : preds) {
    out << format_double(p.mean) << ',' << format_double(p.variance) << ','
        << format_double(std::sqrt(p.variance)) << ','
        << format_double(p.functional_component) << ','
        << format_double(p.routing_component) << ','
        << format_double(p.mean_gate_weight) << '\n';
  }
  std::printf("predictions: %s (%zu rows, %s arm, M=%d)\n", out_path.c_str(),
              preds.size(), baseline ? "baseline" : "gp", samples);
  return 0;
}

int cmd_benchmark(const std::string& data_path, const std::string& target,
                  int folds, std::uint64_t cv_seed, const std::string& out_json,
                  const std::string& out_csv, const ConfigFlags& flags) {
  const TreeConfig config = resolve_config(flags);
  const Dataset dataset = load_csv(data_path, target);
  const CvReport report = cross_validate(dataset, config, folds, cv_seed);
  write_cv_report_json(report, out_json);
  write_cv_report_csv(report, out_csv);
  std::printf("dataset: %s  folds: %d\n", report.dataset_name.c_str(), folds);
  std::printf("gp_nrmse: %.4f +- %.4f\n", report.gp_nrmse_mean,
              report.gp_nrmse_std);
  std::printf("baseline_nrmse: %.4f +- %.4f\n", report.baseline_nrmse_mean,
              report.baseline_nrmse_std);
  for (const FoldScore& s : report.fold_scores) {
    std::printf("fold %d: kernel=%s gp_nrmse=%.4f baseline_nrmse=%.4f\n",
                s.fold, kernel_family_name(s.selected_kernel).c_str(),
                s.gp_nrmse, s.baseline_nrmse);
  }
  std::printf("reports: %s %s\n", out_json.c_str(), out_csv.c_str());
  return 0;
}

int cmd_experiment_extrapolation(int n_train, int n_test,
                                 const std::vector<std::uint64_t>& seeds,
                                 const std::string& out_json,
                                 const std::string& out_csv,
                                 const ConfigFlags& flags) {
  const TreeConfig config = resolve_config(flags);
  const ExperimentReport report =
      run_extrapolation_experiment(config, n_train, n_test, seeds);
  write_experiment_report_json(report, out_json);
  write_experiment_report_csv(report, out_csv);
  for (const RegimeSummary& s : report.summary) {
    std::printf("%-13s gp_rmse=%.4f+-%.4f baseline_rmse=%.4f+-%.4f "
                "gp_sigma2=%.4f\n",
                s.regime.c_str(), s.gp_rmse_mean, s.gp_rmse_std,
                s.baseline_rmse_mean, s.baseline_rmse_std, s.gp_sigma2_mean);
  }
  std::printf("reports: %s %s\n", out_json.c_str(), out_csv.c_str());
  return 0;
}

int cmd_experiment_tau_sweep(const std::string& data_path,
                             const std::string& target,
                             const std::vector<double>& taus, int folds,
                             const std::vector<std::uint64_t>& seeds,
                             const std::string& out_json,
                             const std::string& out_csv,
                             const ConfigFlags& flags) {
  const TreeConfig config = resolve_config(flags);
  const Dataset dataset = data_path.empty()
                              ? make_linear3d(1000, 1)
                              : load_csv(data_path, target);
  const SweepReport report = run_tau_sweep(dataset, config, taus, folds, seeds);
  write_sweep_report_json(report, out_json);
  write_sweep_report_csv(report, out_csv);
  for (const SweepEntry& e : report.entries) {
    std::printf("tau=%-12s rmse=%.4f mean_sigma2=%.6f mean_gate=%.4f%s\n",
                format_double(e.tau).c_str(), e.rmse_mean, e.mean_sigma2,
                e.mean_gate_weight, e.is_auto ? " (auto)" : "");
  }
  std::printf("baseline_rmse=%.4f baseline_sigma2=%.6f\n",
              report.baseline_rmse_mean, report.baseline_mean_sigma2);
  std::printf("uncertainty_non_increasing: %s\n",
              report.uncertainty_non_increasing ? "yes" : "no");
  std::printf("reports: %s %s\n", out_json.c_str(), out_csv.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian oblique regression tree with GP leaves and "
               "support-gated extrapolation"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Fit a tree and write a model file");
  std::string train_data, train_target, train_out = "model.json";
  ConfigFlags train_flags;
  train->add_option("--data", train_data, "Training CSV")->required();
  train->add_option("--target", train_target,
                    "Target column name (default: last column)");
  train->add_option("--out", train_out, "Model output path");
  add_config_flags(train, train_flags);

  // predict
  auto* predict = app.add_subcommand("predict", "Score a CSV with a model file");
  std::string pred_model, pred_data, pred_out = "predictions.csv";
  int pred_mc = 0;
  std::uint64_t pred_seed = 0;
  int pred_threads = 0;
  bool pred_baseline = false;
  predict->add_option("--model", pred_model, "Model JSON path")->required();
  predict->add_option("--data", pred_data, "Input CSV (features only, or with extra columns by name)")->required();
  predict->add_option("--out", pred_out, "Predictions CSV path");
  predict->add_option("--mc-samples", pred_mc,
                      "Routing samples (default: model setting)");
  predict->add_option("--seed", pred_seed, "Routing seed");
  predict->add_option("--threads", pred_threads, "Worker threads (0 = all cores)");
  predict->add_flag("--baseline", pred_baseline,
                    "Prototype-only predictions (gate forced closed)");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "k-fold cross-validation report");
  std::string bench_data, bench_target;
  std::string bench_json = "cv_report.json", bench_csv = "cv_report.csv";
  int bench_folds = 10;
  std::uint64_t bench_seed = 0;
  ConfigFlags bench_flags;
  bench->add_option("--data", bench_data, "Dataset CSV")->required();
  bench->add_option("--target", bench_target,
                    "Target column name (default: last column)");
  bench->add_option("--folds", bench_folds, "Number of folds");
  bench->add_option("--cv-seed", bench_seed, "Shuffle/prediction seed");
  bench->add_option("--out-json", bench_json, "JSON report path");
  bench->add_option("--out-csv", bench_csv, "CSV report path");
  add_config_flags(bench, bench_flags);

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Canned studies");
  auto* extrap = experiment->add_subcommand(
      "extrapolation", "Linear-law train box vs. shifted test boxes");
  int ex_n_train = 1000, ex_n_test = 500;
  std::vector<std::uint64_t> ex_seeds = {1, 2, 3, 4, 5};
  std::string ex_json = "extrapolation.json", ex_csv = "extrapolation.csv";
  ConfigFlags ex_flags;
  extrap->add_option("--n-train", ex_n_train, "Training rows per seed");
  extrap->add_option("--n-test", ex_n_test, "Test rows per regime");
  extrap->add_option("--seeds", ex_seeds, "Seeds (one run each)");
  extrap->add_option("--out-json", ex_json, "JSON report path");
  extrap->add_option("--out-csv", ex_csv, "CSV report path");
  add_config_flags(extrap, ex_flags);

  auto* sweep = experiment->add_subcommand(
      "tau-sweep", "Support-threshold sensitivity sweep");
  std::string sw_data, sw_target;
  std::vector<double> sw_taus = {0.5, 2.0, 4.5, 6.0, 10.0, 1e12};
  int sw_folds = 5;
  std::vector<std::uint64_t> sw_seeds = {1};
  std::string sw_json = "tau_sweep.json", sw_csv = "tau_sweep.csv";
  ConfigFlags sw_flags;
  sweep->add_option("--data", sw_data,
                    "Dataset CSV (default: built-in 3-feature linear data)");
  sweep->add_option("--target", sw_target,
                    "Target column name (default: last column)");
  sweep->add_option("--taus", sw_taus, "Threshold grid");
  sweep->add_option("--folds", sw_folds, "Number of folds");
  sweep->add_option("--seeds", sw_seeds, "Fold-shuffle seeds");
  sweep->add_option("--out-json", sw_json, "JSON report path");
  sweep->add_option("--out-csv", sw_csv, "CSV report path");
  add_config_flags(sweep, sw_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train)
      return cmd_train(train_data, train_target, train_out, train_flags);
    if (*predict)
      return cmd_predict(pred_model, pred_data, pred_out, pred_mc, pred_seed,
                         pred_threads, pred_baseline);
    if (*bench)
      return cmd_benchmark(bench_data, bench_target, bench_folds, bench_seed,
                           bench_json, bench_csv, bench_flags);
    if (*experiment) {
      if (*extrap)
        return cmd_experiment_extrapolation(ex_n_train, ex_n_test, ex_seeds,
                                            ex_json, ex_csv, ex_flags);
      if (*sweep)
        return cmd_experiment_tau_sweep(sw_data, sw_target, sw_taus, sw_folds,
                                        sw_seeds, sw_json, sw_csv, sw_flags);
      std::cerr << "experiment: choose 'extrapolation' or 'tau-sweep'\n";
      return 2;
    }
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
