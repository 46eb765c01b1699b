#include "egta/payoff_tensor.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace egta {

namespace {

void check_finite(const std::vector<double>& values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("payoff values must be finite");
  }
}

}  // namespace

PayoffTensor::PayoffTensor(std::vector<int> strategies_per_player, std::vector<double> values)
    : strategies_(std::move(strategies_per_player)), values_(std::move(values)) {
  if (strategies_.empty()) throw std::invalid_argument("at least one player required");
  long long profiles = 1;
  for (int s : strategies_) {
    if (s <= 0) throw std::invalid_argument("strategy counts must be positive");
    profiles *= s;
    if (profiles > (1LL << 40)) throw std::invalid_argument("profile space too large");
  }
  num_profiles_ = static_cast<int>(profiles);
  if (values_.size() != static_cast<std::size_t>(num_profiles_) * strategies_.size())
    throw std::invalid_argument("payoff value count does not match shape");
  check_finite(values_);
}

PayoffTensor PayoffTensor::from_matrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument("single-population payoff matrix must be square");
  const int s = static_cast<int>(m.rows());
  std::vector<double> values(static_cast<std::size_t>(s) * s * 2);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      const std::size_t p = static_cast<std::size_t>(i) * s + j;
      values[p * 2 + 0] = m(i, j);
      values[p * 2 + 1] = m(j, i);
    }
  }
  return PayoffTensor({s, s}, std::move(values));
}

int PayoffTensor::profile_index(const std::vector<int>& profile) const {
  if (profile.size() != strategies_.size())
    throw std::invalid_argument("profile length does not match player count");
  int idx = 0;
  for (std::size_t k = 0; k < profile.size(); ++k) {
    if (profile[k] < 0 || profile[k] >= strategies_[k])
      throw std::out_of_range("strategy index out of range");
    idx = idx * strategies_[k] + profile[k];
  }
  return idx;
}

std::vector<int> PayoffTensor::decode_profile(int index) const {
  if (index < 0 || index >= num_profiles_) throw std::out_of_range("profile index out of range");
  std::vector<int> profile(strategies_.size());
  for (int k = static_cast<int>(strategies_.size()) - 1; k >= 0; --k) {
    profile[k] = index % strategies_[k];
    index /= strategies_[k];
  }
  return profile;
}

int PayoffTensor::side() const {
  if (!single_population_compatible())
    throw std::logic_error("single-population accessor requires a 2-player square game");
  return strategies_[0];
}

double PayoffTensor::at(int row, int col) const {
  const int s = side();
  if (row < 0 || row >= s || col < 0 || col >= s)
    throw std::out_of_range("matrix index out of range");
  return value(0, row * s + col);
}

Eigen::MatrixXd PayoffTensor::matrix() const {
  const int s = side();
  Eigen::MatrixXd m(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) m(i, j) = value(0, i * s + j);
  return m;
}

namespace {

using nlohmann::json;

// values nesting: one array level per player; leaves are either a list of K
// per-player payoffs, or a bare number for the 2-player single-population
// matrix form.
void flatten_values(const json& node, const std::vector<int>& strategies, std::size_t depth,
                    bool leaf_scalar, std::vector<std::vector<double>>& leaves) {
  if (depth == strategies.size()) {
    std::vector<double> leaf;
    if (leaf_scalar) {
      if (!node.is_number()) throw std::invalid_argument("expected scalar payoff leaf");
      leaf.push_back(node.get<double>());
    } else {
      if (!node.is_array() || node.size() != strategies.size())
        throw std::invalid_argument("expected one payoff per player at leaf");
      for (const auto& v : node) leaf.push_back(v.get<double>());
    }
    leaves.push_back(std::move(leaf));
    return;
  }
  if (!node.is_array() || node.size() != static_cast<std::size_t>(strategies[depth]))
    throw std::invalid_argument("payoff value nesting does not match strategy counts");
  for (const auto& sub : node) flatten_values(sub, strategies, depth + 1, leaf_scalar, leaves);
}

bool leaf_is_scalar(const json& node, std::size_t levels) {
  const json* cur = &node;
  for (std::size_t i = 0; i < levels; ++i) {
    if (!cur->is_array() || cur->empty()) return false;
    cur = &(*cur)[0];
  }
  return cur->is_number();
}

}  // namespace

PayoffTensor PayoffTensor::parse_json_text(const std::string& text) {
  json doc = json::parse(text);
  if (!doc.contains("num_players") || !doc.contains("strategies") || !doc.contains("values"))
    throw std::invalid_argument("payoff JSON requires num_players, strategies, values");
  const int k = doc["num_players"].get<int>();
  std::vector<int> strategies = doc["strategies"].get<std::vector<int>>();
  if (k != static_cast<int>(strategies.size()))
    throw std::invalid_argument("num_players does not match strategies list");

  const bool scalar_leaves = leaf_is_scalar(doc["values"], strategies.size());
  if (scalar_leaves && !(k == 2 && strategies[0] == strategies[1]))
    throw std::invalid_argument("scalar payoff leaves require a 2-player square game");

  std::vector<std::vector<double>> leaves;
  flatten_values(doc["values"], strategies, 0, scalar_leaves, leaves);

  if (scalar_leaves) {
    const int s = strategies[0];
    Eigen::MatrixXd m(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) m(i, j) = leaves[static_cast<std::size_t>(i) * s + j][0];
    return from_matrix(m);
  }
  std::vector<double> values;
  values.reserve(leaves.size() * strategies.size());
  for (const auto& leaf : leaves)
    for (double v : leaf) values.push_back(v);
  return PayoffTensor(std::move(strategies), std::move(values));
}

PayoffTensor PayoffTensor::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open payoff file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

PayoffTensor PayoffTensor::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open payoff file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("empty CSV payoff matrix");
  const std::size_t s = rows.size();
  Eigen::MatrixXd m(s, s);
  for (std::size_t i = 0; i < s; ++i) {
    if (rows[i].size() != s) throw std::invalid_argument("CSV payoff matrix must be square");
    for (std::size_t j = 0; j < s; ++j) m(i, j) = rows[i][j];
  }
  return from_matrix(m);
}

std::string PayoffTensor::to_json_text() const {
  json doc;
  doc["num_players"] = num_players();
  doc["strategies"] = strategies_;
  if (single_population_compatible()) {
    const int s = strategies_[0];
    json values = json::array();
    for (int i = 0; i < s; ++i) {
      json row = json::array();
      for (int j = 0; j < s; ++j) row.push_back(value(0, i * s + j));
      values.push_back(std::move(row));
    }
    doc["values"] = std::move(values);
  } else {
    // Nested per-profile arrays, leaf = per-player payoffs.
    std::function<json(int, int)> build = [&](int depth, int base) -> json {
      if (depth == num_players()) {
        json leaf = json::array();
        for (int p = 0; p < num_players(); ++p) leaf.push_back(value(p, base));
        return leaf;
      }
      int stride = 1;
      for (std::size_t k = depth + 1; k < strategies_.size(); ++k) stride *= strategies_[k];
      json arr = json::array();
      for (int s = 0; s < strategies_[depth]; ++s) arr.push_back(build(depth + 1, base + s * stride));
      return arr;
    };
    doc["values"] = build(0, 0);
  }
  return doc.dump(2);
}

void PayoffTensor::save_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write payoff file: " + path);
  out << to_json_text() << "\n";
}

}  // namespace egta
