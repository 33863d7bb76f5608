#include "vspyct/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "vspyct/model_io.hpp"
#include "vspyct/synth.hpp"
#include "vspyct/tree.hpp"

namespace vspyct {

namespace {

using nlohmann::json;

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<double> means_of(const std::vector<PredictiveDistribution>& p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i].mean;
  return out;
}

double mean_sigma2_of(const std::vector<PredictiveDistribution>& p) {
  double s = 0.0;
  for (const auto& d : p) s += d.variance;
  return s / static_cast<double>(p.size());
}

double mean_sigma_of(const std::vector<PredictiveDistribution>& p) {
  double s = 0.0;
  for (const auto& d : p) s += std::sqrt(d.variance);
  return s / static_cast<double>(p.size());
}

double mean_gate_of(const std::vector<PredictiveDistribution>& p) {
  double s = 0.0;
  for (const auto& d : p) s += d.mean_gate_weight;
  return s / static_cast<double>(p.size());
}

double max_mean_of(const std::vector<PredictiveDistribution>& p) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& d : p) m = std::max(m, d.mean);
  return m;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

double mse(const std::vector<double>& predictions,
           const std::vector<double>& targets) {
  const double r = rmse(predictions, targets);
  return r * r;
}

void require_csv_open(const std::ofstream& out, const std::string& path) {
  if (!out) throw InvalidInput("cannot open report file for writing: " + path);
}

}  // namespace

double rmse(const std::vector<double>& predictions,
            const std::vector<double>& targets) {
  if (predictions.empty() || predictions.size() != targets.size())
    throw InvalidInput("rmse: prediction/target lengths must match and be >= 1");
  double ss = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - targets[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(predictions.size()));
}

double nrmse(const std::vector<double>& predictions,
             const std::vector<double>& targets, double y_max) {
  if (y_max == 0.0) throw InvalidInput("nrmse: y_max must be nonzero");
  return 100.0 * rmse(predictions, targets) / y_max;
}

std::vector<std::vector<int>> make_folds(int n, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidInput("make_folds: k must be >= 2");
  if (n < k) throw InvalidInput("make_folds: fewer rows than folds");
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform() * static_cast<double>(i + 1));
    std::swap(order[i], order[std::min(j, i)]);
  }
  std::vector<std::vector<int>> folds(k);
  const int base = n / k;
  const int extra = n % k;
  int pos = 0;
  for (int f = 0; f < k; ++f) {
    const int size = base + (f < extra ? 1 : 0);
    folds[f].assign(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  return folds;
}

std::uint64_t fold_prediction_seed(std::uint64_t seed, int fold) {
  return mix_seed(mix_seed(seed, 0x70f5u), static_cast<std::uint64_t>(fold));
}

CvReport cross_validate(const Dataset& dataset, const TreeConfig& config,
                        int k, std::uint64_t seed) {
  dataset.validate();
  config.validate();
  if (k < 2) throw InvalidInput("cross_validate: k must be >= 2");
  if (dataset.rows() < k)
    throw InvalidInput("cross_validate: dataset has fewer rows than folds");
  const double y_max = dataset.target.maxCoeff();
  if (y_max == 0.0)
    throw InvalidInput("cross_validate: maximum target is zero, NRMSE undefined");

  CvReport report;
  report.dataset_name = dataset.name;
  report.folds = k;
  report.seed = seed;
  report.config = config;
  report.y_max = y_max;

  const auto folds = make_folds(dataset.rows(), k, seed);
  std::vector<char> in_test(dataset.rows(), 0);

  for (int f = 0; f < k; ++f) {
    const auto start = std::chrono::steady_clock::now();
    std::fill(in_test.begin(), in_test.end(), 0);
    for (int idx : folds[f]) in_test[idx] = 1;
    std::vector<int> train_idx;
    train_idx.reserve(dataset.rows() - static_cast<int>(folds[f].size()));
    for (int i = 0; i < dataset.rows(); ++i)
      if (!in_test[i]) train_idx.push_back(i);

    const Dataset train = dataset.subset(train_idx);
    const Dataset test = dataset.subset(folds[f]);
    const std::vector<double> targets = to_vector(test.target);

    TreeConfig cfg_rbf = config;
    cfg_rbf.kernel_family = KernelFamily::kRbf;
    TreeConfig cfg_lin = config;
    cfg_lin.kernel_family = KernelFamily::kLinearPlusRbf;

    const Tree tree_rbf = fit_tree(train, cfg_rbf);
    const Tree tree_lin = fit_tree(train, cfg_lin);
    const std::uint64_t pred_seed = fold_prediction_seed(seed, f);

    const auto preds_rbf = predict_batch(tree_rbf, test.features,
                                         config.mc_samples, pred_seed,
                                         config.threads);
    const auto preds_lin = predict_batch(tree_lin, test.features,
                                         config.mc_samples, pred_seed,
                                         config.threads);

    FoldScore score;
    score.fold = f;
    score.train_rows = train.rows();
    score.test_rows = test.rows();
    score.test_indices = folds[f];
    score.mse_rbf = mse(means_of(preds_rbf), targets);
    score.mse_lin_rbf = mse(means_of(preds_lin), targets);
    score.selected_kernel = score.mse_rbf <= score.mse_lin_rbf
                                ? KernelFamily::kRbf
                                : KernelFamily::kLinearPlusRbf;
    const bool rbf_won = score.selected_kernel == KernelFamily::kRbf;
    const Tree& tree = rbf_won ? tree_rbf : tree_lin;
    const auto& preds = rbf_won ? preds_rbf : preds_lin;

    const auto base = predict_batch(tree, test.features, config.mc_samples,
                                    pred_seed, config.threads, true);

    score.gp_rmse = rmse(means_of(preds), targets);
    score.gp_nrmse = nrmse(means_of(preds), targets, y_max);
    score.baseline_rmse = rmse(means_of(base), targets);
    score.baseline_nrmse = nrmse(means_of(base), targets, y_max);
    score.gp_mean_sigma2 = mean_sigma2_of(preds);
    score.baseline_mean_sigma2 = mean_sigma2_of(base);
    score.gp_mean_gate_weight = mean_gate_of(preds);
    score.tau = tree.leaves.front().tau;
    score.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    report.fold_scores.push_back(std::move(score));
  }

  std::vector<double> gp_nrmses, base_nrmses, gp_rmses, base_rmses, gp_s2, base_s2;
  for (const FoldScore& s : report.fold_scores) {
    gp_nrmses.push_back(s.gp_nrmse);
    base_nrmses.push_back(s.baseline_nrmse);
    gp_rmses.push_back(s.gp_rmse);
    base_rmses.push_back(s.baseline_rmse);
    gp_s2.push_back(s.gp_mean_sigma2);
    base_s2.push_back(s.baseline_mean_sigma2);
  }
  report.gp_nrmse_mean = mean_of(gp_nrmses);
  report.gp_nrmse_std = sample_std(gp_nrmses);
  report.baseline_nrmse_mean = mean_of(base_nrmses);
  report.baseline_nrmse_std = sample_std(base_nrmses);
  report.gp_rmse_mean = mean_of(gp_rmses);
  report.baseline_rmse_mean = mean_of(base_rmses);
  report.gp_mean_sigma2 = mean_of(gp_s2);
  report.baseline_mean_sigma2 = mean_of(base_s2);
  return report;
}

ExperimentReport run_extrapolation_experiment(
    const TreeConfig& config, int n_train, int n_test,
    const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty())
    throw InvalidInput("run_extrapolation_experiment: seeds list is empty");
  if (n_train < 2 || n_test < 1)
    throw InvalidInput("run_extrapolation_experiment: need n_train >= 2, n_test >= 1");

  struct Regime {
    const char* name;
    double lo, hi;
  };
  const Regime regimes[] = {{"interpolation", 0.0, 1.0},
                            {"mild", 0.8, 1.5},
                            {"strong", 1.3, 2.0}};

  ExperimentReport report;
  report.n_train = n_train;
  report.n_test = n_test;
  report.seeds = seeds;
  report.config = config;
  report.config.kernel_family = KernelFamily::kLinearPlusRbf;

  for (std::uint64_t seed : seeds) {
    TreeConfig cfg = report.config;
    cfg.seed = seed;
    const Dataset train = make_linear3d(n_train, seed);
    const Tree tree = fit_tree(train, cfg);
    const double max_train_target = train.target.maxCoeff();

    for (int ri = 0; ri < 3; ++ri) {
      const Regime& regime = regimes[ri];
      const Dataset test =
          make_linear3d_box(n_test, regime.lo, regime.hi,
                            mix_seed(seed, 100 + static_cast<std::uint64_t>(ri)));
      const std::uint64_t pred_seed =
          mix_seed(seed, 200 + static_cast<std::uint64_t>(ri));
      const std::vector<double> targets = to_vector(test.target);

      const auto gp_preds = predict_batch(tree, test.features, cfg.mc_samples,
                                          pred_seed, cfg.threads, false);
      const auto base_preds = predict_batch(tree, test.features, cfg.mc_samples,
                                            pred_seed, cfg.threads, true);

      RegimeRow row;
      row.regime = regime.name;
      row.lo = regime.lo;
      row.hi = regime.hi;
      row.seed = seed;
      row.max_train_target = max_train_target;
      row.gp = {rmse(means_of(gp_preds), targets), mean_sigma2_of(gp_preds),
                mean_gate_of(gp_preds), max_mean_of(gp_preds)};
      row.baseline = {rmse(means_of(base_preds), targets),
                      mean_sigma2_of(base_preds), mean_gate_of(base_preds),
                      max_mean_of(base_preds)};
      report.rows.push_back(std::move(row));
    }
  }

  for (int ri = 0; ri < 3; ++ri) {
    const Regime& regime = regimes[ri];
    std::vector<double> gp_r, base_r, gp_s2, base_s2;
    for (const RegimeRow& row : report.rows) {
      if (row.regime != regime.name) continue;
      gp_r.push_back(row.gp.rmse);
      base_r.push_back(row.baseline.rmse);
      gp_s2.push_back(row.gp.mean_sigma2);
      base_s2.push_back(row.baseline.mean_sigma2);
    }
    RegimeSummary s;
    s.regime = regime.name;
    s.lo = regime.lo;
    s.hi = regime.hi;
    s.gp_rmse_mean = mean_of(gp_r);
    s.gp_rmse_std = sample_std(gp_r);
    s.baseline_rmse_mean = mean_of(base_r);
    s.baseline_rmse_std = sample_std(base_r);
    s.gp_sigma2_mean = mean_of(gp_s2);
    s.gp_sigma2_std = sample_std(gp_s2);
    s.baseline_sigma2_mean = mean_of(base_s2);
    s.baseline_sigma2_std = sample_std(base_s2);
    report.summary.push_back(std::move(s));
  }
  return report;
}

SweepReport run_tau_sweep(const Dataset& dataset, const TreeConfig& config,
                          const std::vector<double>& tau_grid, int k,
                          const std::vector<std::uint64_t>& seeds) {
  if (tau_grid.empty()) throw InvalidInput("run_tau_sweep: tau grid is empty");
  if (seeds.empty()) throw InvalidInput("run_tau_sweep: seeds list is empty");
  for (double tau : tau_grid)
    if (!(tau > 0.0)) throw InvalidInput("run_tau_sweep: grid taus must be > 0");
  dataset.validate();
  config.validate();
  if (k < 2) throw InvalidInput("run_tau_sweep: k must be >= 2");
  if (dataset.rows() < k)
    throw InvalidInput("run_tau_sweep: dataset has fewer rows than folds");
  const double y_max = dataset.target.maxCoeff();
  if (y_max == 0.0)
    throw InvalidInput("run_tau_sweep: maximum target is zero, NRMSE undefined");

  std::vector<double> grid = tau_grid;
  std::sort(grid.begin(), grid.end());
  const std::size_t g = grid.size();

  SweepReport report;
  report.dataset_name = dataset.name;
  report.folds = k;
  report.seeds = seeds;
  report.config = config;

  // Accumulators per entry; index g is the auto entry.
  std::vector<std::vector<double>> acc_rmse(g + 1), acc_nrmse(g + 1),
      acc_s2(g + 1), acc_s(g + 1), acc_gate(g + 1);
  std::vector<double> auto_taus, base_rmses, base_s2s;
  std::vector<char> in_test(dataset.rows(), 0);

  for (std::uint64_t seed : seeds) {
    const auto folds = make_folds(dataset.rows(), k, seed);
    for (int f = 0; f < k; ++f) {
      std::fill(in_test.begin(), in_test.end(), 0);
      for (int idx : folds[f]) in_test[idx] = 1;
      std::vector<int> train_idx;
      for (int i = 0; i < dataset.rows(); ++i)
        if (!in_test[i]) train_idx.push_back(i);

      const Dataset train = dataset.subset(train_idx);
      const Dataset test = dataset.subset(folds[f]);
      const std::vector<double> targets = to_vector(test.target);
      const std::uint64_t pred_seed = fold_prediction_seed(seed, f);

      TreeConfig cfg_rbf = config;
      cfg_rbf.tau.reset();
      cfg_rbf.kernel_family = KernelFamily::kRbf;
      TreeConfig cfg_lin = cfg_rbf;
      cfg_lin.kernel_family = KernelFamily::kLinearPlusRbf;

      const Tree tree_rbf = fit_tree(train, cfg_rbf);
      const Tree tree_lin = fit_tree(train, cfg_lin);
      const auto preds_rbf = predict_batch(tree_rbf, test.features,
                                           config.mc_samples, pred_seed,
                                           config.threads);
      const auto preds_lin = predict_batch(tree_lin, test.features,
                                           config.mc_samples, pred_seed,
                                           config.threads);
      const bool rbf_won = mse(means_of(preds_rbf), targets) <=
                           mse(means_of(preds_lin), targets);
      const Tree& tree = rbf_won ? tree_rbf : tree_lin;
      const auto& auto_preds = rbf_won ? preds_rbf : preds_lin;
      const double auto_tau = tree.leaves.front().tau;
      auto_taus.push_back(auto_tau);

      const auto base = predict_batch(tree, test.features, config.mc_samples,
                                      pred_seed, config.threads, true);
      base_rmses.push_back(rmse(means_of(base), targets));
      base_s2s.push_back(mean_sigma2_of(base));

      auto record = [&](std::size_t entry, bool is_auto, double tau,
                        const std::vector<PredictiveDistribution>& preds) {
        SweepRow row;
        row.seed = seed;
        row.fold = f;
        row.is_auto = is_auto;
        row.tau = tau;
        row.rmse = rmse(means_of(preds), targets);
        row.nrmse = nrmse(means_of(preds), targets, y_max);
        row.mean_sigma2 = mean_sigma2_of(preds);
        row.mean_sigma = mean_sigma_of(preds);
        row.mean_gate_weight = mean_gate_of(preds);
        acc_rmse[entry].push_back(row.rmse);
        acc_nrmse[entry].push_back(row.nrmse);
        acc_s2[entry].push_back(row.mean_sigma2);
        acc_s[entry].push_back(row.mean_sigma);
        acc_gate[entry].push_back(row.mean_gate_weight);
        report.rows.push_back(std::move(row));
      };

      for (std::size_t gi = 0; gi < g; ++gi) {
        const Tree rethresholded = with_tau(tree, grid[gi]);
        const auto preds = predict_batch(rethresholded, test.features,
                                         config.mc_samples, pred_seed,
                                         config.threads);
        record(gi, false, grid[gi], preds);
      }
      record(g, true, auto_tau, auto_preds);
    }
  }

  for (std::size_t gi = 0; gi <= g; ++gi) {
    SweepEntry entry;
    entry.is_auto = gi == g;
    entry.tau = entry.is_auto ? mean_of(auto_taus) : grid[gi];
    entry.rmse_mean = mean_of(acc_rmse[gi]);
    entry.nrmse_mean = mean_of(acc_nrmse[gi]);
    entry.mean_sigma2 = mean_of(acc_s2[gi]);
    entry.mean_sigma = mean_of(acc_s[gi]);
    entry.mean_gate_weight = mean_of(acc_gate[gi]);
    report.entries.push_back(entry);
  }
  report.baseline_rmse_mean = mean_of(base_rmses);
  report.baseline_mean_sigma2 = mean_of(base_s2s);
  report.auto_tau_mean = mean_of(auto_taus);

  report.uncertainty_non_increasing = true;
  for (std::size_t gi = 0; gi + 1 < g; ++gi) {
    if (report.entries[gi + 1].mean_sigma2 >
        report.entries[gi].mean_sigma2 + 1e-12) {
      report.uncertainty_non_increasing = false;
      break;
    }
  }
  return report;
}

namespace {

json fold_to_json(const FoldScore& s) {
  return json{{"fold", s.fold},
              {"train_rows", s.train_rows},
              {"test_rows", s.test_rows},
              {"selected_kernel", kernel_family_name(s.selected_kernel)},
              {"mse_rbf", s.mse_rbf},
              {"mse_lin_rbf", s.mse_lin_rbf},
              {"gp_rmse", s.gp_rmse},
              {"gp_nrmse", s.gp_nrmse},
              {"baseline_rmse", s.baseline_rmse},
              {"baseline_nrmse", s.baseline_nrmse},
              {"gp_mean_sigma2", s.gp_mean_sigma2},
              {"baseline_mean_sigma2", s.baseline_mean_sigma2},
              {"gp_mean_gate_weight", s.gp_mean_gate_weight},
              {"tau", s.tau},
              {"wall_seconds", s.wall_seconds},
              {"test_indices", s.test_indices}};
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open report file for writing: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace

void write_cv_report_json(const CvReport& report, const std::string& path) {
  json j;
  j["dataset"] = report.dataset_name;
  j["folds"] = report.folds;
  j["seed"] = report.seed;
  j["config"] = config_to_json(report.config);
  j["y_max"] = report.y_max;
  j["test_set_informed_selection"] = report.test_set_informed_selection;
  json folds = json::array();
  for (const FoldScore& s : report.fold_scores) folds.push_back(fold_to_json(s));
  j["fold_scores"] = std::move(folds);
  j["gp_nrmse_mean"] = report.gp_nrmse_mean;
  j["gp_nrmse_std"] = report.gp_nrmse_std;
  j["baseline_nrmse_mean"] = report.baseline_nrmse_mean;
  j["baseline_nrmse_std"] = report.baseline_nrmse_std;
  j["gp_rmse_mean"] = report.gp_rmse_mean;
  j["baseline_rmse_mean"] = report.baseline_rmse_mean;
  j["gp_mean_sigma2"] = report.gp_mean_sigma2;
  j["baseline_mean_sigma2"] = report.baseline_mean_sigma2;
  write_json_file(j, path);
}

void write_cv_report_csv(const CvReport& report, const std::string& path) {
  std::ofstream out(path);
  require_csv_open(out, path);
  out << "fold,selected_kernel,metric,value\n";
  for (const FoldScore& s : report.fold_scores) {
    const std::string prefix = std::to_string(s.fold) + "," +
                               kernel_family_name(s.selected_kernel) + ",";
    const std::pair<const char*, double> metrics[] = {
        {"mse_rbf", s.mse_rbf},
        {"mse_lin_rbf", s.mse_lin_rbf},
        {"gp_rmse", s.gp_rmse},
        {"gp_nrmse", s.gp_nrmse},
        {"baseline_rmse", s.baseline_rmse},
        {"baseline_nrmse", s.baseline_nrmse},
        {"gp_mean_sigma2", s.gp_mean_sigma2},
        {"baseline_mean_sigma2", s.baseline_mean_sigma2},
        {"gp_mean_gate_weight", s.gp_mean_gate_weight},
        {"tau", s.tau},
        {"wall_seconds", s.wall_seconds}};
    for (const auto& [name, value] : metrics)
      out << prefix << name << "," << format_double(value) << "\n";
  }
}

void write_experiment_report_json(const ExperimentReport& report,
                                  const std::string& path) {
  json j;
  j["n_train"] = report.n_train;
  j["n_test"] = report.n_test;
  j["seeds"] = report.seeds;
  j["config"] = config_to_json(report.config);
  json rows = json::array();
  for (const RegimeRow& row : report.rows) {
    rows.push_back(
        json{{"regime", row.regime},
             {"lo", row.lo},
             {"hi", row.hi},
             {"seed", row.seed},
             {"max_train_target", row.max_train_target},
             {"gp",
              {{"rmse", row.gp.rmse},
               {"mean_sigma2", row.gp.mean_sigma2},
               {"mean_gate_weight", row.gp.mean_gate_weight},
               {"max_prediction", row.gp.max_prediction}}},
             {"baseline",
              {{"rmse", row.baseline.rmse},
               {"mean_sigma2", row.baseline.mean_sigma2},
               {"mean_gate_weight", row.baseline.mean_gate_weight},
               {"max_prediction", row.baseline.max_prediction}}}});
  }
  j["rows"] = std::move(rows);
  json summary = json::array();
  for (const RegimeSummary& s : report.summary) {
    summary.push_back(json{{"regime", s.regime},
                           {"lo", s.lo},
                           {"hi", s.hi},
                           {"gp_rmse_mean", s.gp_rmse_mean},
                           {"gp_rmse_std", s.gp_rmse_std},
                           {"baseline_rmse_mean", s.baseline_rmse_mean},
                           {"baseline_rmse_std", s.baseline_rmse_std},
                           {"gp_sigma2_mean", s.gp_sigma2_mean},
                           {"gp_sigma2_std", s.gp_sigma2_std},
                           {"baseline_sigma2_mean", s.baseline_sigma2_mean},
                           {"baseline_sigma2_std", s.baseline_sigma2_std}});
  }
  j["summary"] = std::move(summary);
  write_json_file(j, path);
}

void write_experiment_report_csv(const ExperimentReport& report,
                                 const std::string& path) {
  std::ofstream out(path);
  require_csv_open(out, path);
  out << "regime,lo,hi,seed,arm,metric,value\n";
  for (const RegimeRow& row : report.rows) {
    const auto emit = [&](const char* arm, const ArmMetrics& m) {
      const std::string prefix = row.regime + "," + format_double(row.lo) + "," +
                                 format_double(row.hi) + "," +
                                 std::to_string(row.seed) + "," + arm + ",";
      out << prefix << "rmse," << format_double(m.rmse) << "\n";
      out << prefix << "mean_sigma2," << format_double(m.mean_sigma2) << "\n";
      out << prefix << "mean_gate_weight," << format_double(m.mean_gate_weight)
          << "\n";
      out << prefix << "max_prediction," << format_double(m.max_prediction)
          << "\n";
      out << prefix << "max_train_target," << format_double(row.max_train_target)
          << "\n";
    };
    emit("gp", row.gp);
    emit("baseline", row.baseline);
  }
}

void write_sweep_report_json(const SweepReport& report, const std::string& path) {
  json j;
  j["dataset"] = report.dataset_name;
  j["folds"] = report.folds;
  j["seeds"] = report.seeds;
  j["config"] = config_to_json(report.config);
  json rows = json::array();
  for (const SweepRow& row : report.rows) {
    rows.push_back(json{{"seed", row.seed},
                        {"fold", row.fold},
                        {"is_auto", row.is_auto},
                        {"tau", row.tau},
                        {"rmse", row.rmse},
                        {"nrmse", row.nrmse},
                        {"mean_sigma2", row.mean_sigma2},
                        {"mean_sigma", row.mean_sigma},
                        {"mean_gate_weight", row.mean_gate_weight}});
  }
  j["rows"] = std::move(rows);
  json entries = json::array();
  for (const SweepEntry& e : report.entries) {
    entries.push_back(json{{"is_auto", e.is_auto},
                           {"tau", e.tau},
                           {"rmse_mean", e.rmse_mean},
                           {"nrmse_mean", e.nrmse_mean},
                           {"mean_sigma2", e.mean_sigma2},
                           {"mean_sigma", e.mean_sigma},
                           {"mean_gate_weight", e.mean_gate_weight}});
  }
  j["entries"] = std::move(entries);
  j["baseline_rmse_mean"] = report.baseline_rmse_mean;
  j["baseline_mean_sigma2"] = report.baseline_mean_sigma2;
  j["auto_tau_mean"] = report.auto_tau_mean;
  j["uncertainty_non_increasing"] = report.uncertainty_non_increasing;
  write_json_file(j, path);
}

void write_sweep_report_csv(const SweepReport& report, const std::string& path) {
  std::ofstream out(path);
  require_csv_open(out, path);
  out << "seed,fold,tau_label,tau,metric,value\n";
  for (const SweepRow& row : report.rows) {
    const std::string prefix = std::to_string(row.seed) + "," +
                               std::to_string(row.fold) + "," +
                               (row.is_auto ? "auto" : "fixed") + "," +
                               format_double(row.tau) + ",";
    const std::pair<const char*, double> metrics[] = {
        {"rmse", row.rmse},
        {"nrmse", row.nrmse},
        {"mean_sigma2", row.mean_sigma2},
        {"mean_sigma", row.mean_sigma},
        {"mean_gate_weight", row.mean_gate_weight}};
    for (const auto& [name, value] : metrics)
      out << prefix << name << "," << format_double(value) << "\n";
  }
}

}  // namespace vspyct
