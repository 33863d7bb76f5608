#include "vspyct/model_io.hpp"

#include <fstream>

#include "vspyct/gp.hpp"

namespace vspyct {

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vec_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    rows.push_back(vec_to_json(m.row(i).transpose()));
  return rows;
}

Eigen::MatrixXd mat_from_json(const json& j) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols)
      throw InvalidInput("model file: ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

json gp_to_json(const GpLeafModel& gp) {
  json j;
  j["family"] = kernel_family_name(gp.params.family);
  j["log_lengthscale"] = gp.params.log_lengthscale;
  j["log_signal_var"] = gp.params.log_signal_var;
  j["log_linear_var"] = gp.params.log_linear_var;
  j["log_noise_var"] = gp.params.log_noise_var;
  j["prior_mean"] = gp.params.prior_mean;
  j["x_train"] = mat_to_json(gp.x_train);
  j["y_train"] = vec_to_json(gp.y_train);
  return j;
}

GpLeafModel gp_from_json(const json& j) {
  KernelParams params;
  params.family = kernel_family_from_name(j.at("family").get<std::string>());
  params.log_lengthscale = j.at("log_lengthscale").get<double>();
  params.log_signal_var = j.at("log_signal_var").get<double>();
  params.log_linear_var = j.at("log_linear_var").get<double>();
  params.log_noise_var = j.at("log_noise_var").get<double>();
  params.prior_mean = j.at("prior_mean").get<double>();
  return make_gp_model(mat_from_json(j.at("x_train")),
                       vec_from_json(j.at("y_train")), params);
}

}  // namespace

json config_to_json(const TreeConfig& c) {
  json j;
  j["max_depth"] = c.max_depth;
  j["min_samples_split"] = c.min_samples_split;
  j["vi_epochs"] = c.vi_epochs;
  j["learning_rate"] = c.learning_rate;
  j["mc_samples"] = c.mc_samples;
  if (c.tau) j["tau"] = *c.tau; else j["tau"] = nullptr;
  j["temperature"] = c.temperature;
  if (c.noise_floor) j["noise_floor"] = *c.noise_floor; else j["noise_floor"] = nullptr;
  j["kernel_family"] = kernel_family_name(c.kernel_family);
  j["gp_iters"] = c.gp_iters;
  j["gp_learning_rate"] = c.gp_learning_rate;
  j["min_leaf_gp"] = c.min_leaf_gp;
  j["cov_reg"] = c.cov_reg;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j;
}

TreeConfig config_from_json(const json& j) {
  TreeConfig c;
  c.max_depth = j.at("max_depth").get<int>();
  c.min_samples_split = j.at("min_samples_split").get<int>();
  c.vi_epochs = j.at("vi_epochs").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.mc_samples = j.at("mc_samples").get<int>();
  if (!j.at("tau").is_null()) c.tau = j.at("tau").get<double>();
  c.temperature = j.at("temperature").get<double>();
  if (!j.at("noise_floor").is_null())
    c.noise_floor = j.at("noise_floor").get<double>();
  c.kernel_family = kernel_family_from_name(j.at("kernel_family").get<std::string>());
  c.gp_iters = j.at("gp_iters").get<int>();
  c.gp_learning_rate = j.at("gp_learning_rate").get<double>();
  c.min_leaf_gp = j.at("min_leaf_gp").get<int>();
  c.cov_reg = j.at("cov_reg").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.threads = j.at("threads").get<int>();
  c.validate();
  return c;
}

json tree_to_json(const Tree& tree) {
  json j;
  j["format_version"] = 1;
  j["config"] = config_to_json(tree.config);
  j["feature_names"] = tree.feature_names;
  j["standardizer"] = {{"mean", vec_to_json(tree.standardizer.mean)},
                       {"std", vec_to_json(tree.standardizer.std)}};
  j["target_stats"] = {{"y_max", tree.target_stats.y_max},
                       {"y_mean", tree.target_stats.y_mean}};
  j["root"] = tree.root;

  json nodes = json::array();
  for (const TreeNode& n : tree.nodes) {
    json jn;
    jn["is_leaf"] = n.is_leaf;
    if (n.is_leaf) {
      jn["leaf_id"] = n.leaf_id;
    } else {
      jn["w_mean"] = vec_to_json(n.posterior.w_mean);
      jn["w_log_std"] = vec_to_json(n.posterior.w_log_std);
      jn["b_mean"] = n.posterior.b_mean;
      jn["b_log_std"] = n.posterior.b_log_std;
      jn["left"] = n.left;
      jn["right"] = n.right;
    }
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);

  json leaves = json::array();
  for (const Leaf& leaf : tree.leaves) {
    json jl;
    jl["id"] = leaf.id;
    jl["prototype"] = leaf.prototype;
    jl["tau"] = leaf.tau;
    jl["temperature"] = leaf.temperature;
    jl["noise_floor"] = leaf.noise_floor;
    jl["support"] = {{"centroid", vec_to_json(leaf.support.centroid)},
                     {"cov", mat_to_json(leaf.support.cov)},
                     {"reg", leaf.support.reg},
                     {"n_points", leaf.support.n_points}};
    jl["gp"] = leaf.gp ? gp_to_json(*leaf.gp) : json(nullptr);
    leaves.push_back(std::move(jl));
  }
  j["leaves"] = std::move(leaves);
  return j;
}

Tree tree_from_json(const json& j) {
  if (!j.is_object() || !j.contains("format_version"))
    throw InvalidInput("model file: missing format_version");
  if (j.at("format_version").get<int>() != 1)
    throw InvalidInput("model file: unsupported format_version");

  Tree tree;
  tree.config = config_from_json(j.at("config"));
  tree.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  tree.standardizer.mean = vec_from_json(j.at("standardizer").at("mean"));
  tree.standardizer.std = vec_from_json(j.at("standardizer").at("std"));
  tree.target_stats.y_max = j.at("target_stats").at("y_max").get<double>();
  tree.target_stats.y_mean = j.at("target_stats").at("y_mean").get<double>();
  tree.root = j.at("root").get<int>();

  for (const json& jn : j.at("nodes")) {
    TreeNode n;
    n.is_leaf = jn.at("is_leaf").get<bool>();
    if (n.is_leaf) {
      n.leaf_id = jn.at("leaf_id").get<int>();
    } else {
      n.posterior.w_mean = vec_from_json(jn.at("w_mean"));
      n.posterior.w_log_std = vec_from_json(jn.at("w_log_std"));
      n.posterior.b_mean = jn.at("b_mean").get<double>();
      n.posterior.b_log_std = jn.at("b_log_std").get<double>();
      n.left = jn.at("left").get<int>();
      n.right = jn.at("right").get<int>();
    }
    tree.nodes.push_back(std::move(n));
  }

  for (const json& jl : j.at("leaves")) {
    Leaf leaf;
    leaf.id = jl.at("id").get<int>();
    leaf.prototype = jl.at("prototype").get<double>();
    leaf.tau = jl.at("tau").get<double>();
    leaf.temperature = jl.at("temperature").get<double>();
    leaf.noise_floor = jl.at("noise_floor").get<double>();
    const json& js = jl.at("support");
    leaf.support.centroid = vec_from_json(js.at("centroid"));
    leaf.support.cov = mat_from_json(js.at("cov"));
    leaf.support.reg = js.at("reg").get<double>();
    leaf.support.n_points = js.at("n_points").get<int>();
    refresh_support_inverse(leaf.support);
    if (!jl.at("gp").is_null()) leaf.gp = gp_from_json(jl.at("gp"));
    tree.leaves.push_back(std::move(leaf));
  }

  if (tree.nodes.empty()) throw InvalidInput("model file: empty node arena");
  for (const TreeNode& n : tree.nodes) {
    if (n.is_leaf) {
      if (n.leaf_id < 0 || n.leaf_id >= static_cast<int>(tree.leaves.size()))
        throw InvalidInput("model file: leaf reference out of range");
    } else {
      const int count = static_cast<int>(tree.nodes.size());
      if (n.left < 0 || n.left >= count || n.right < 0 || n.right >= count)
        throw InvalidInput("model file: child reference out of range");
    }
  }
  return tree;
}

void save_model(const Tree& tree, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open model file for writing: " + path);
  out << tree_to_json(tree).dump(2) << '\n';
  if (!out) throw InvalidInput("failed writing model file: " + path);
}

Tree load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    return tree_from_json(j);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("model file has unexpected shape: ") + e.what());
  }
}

}  // namespace vspyct
