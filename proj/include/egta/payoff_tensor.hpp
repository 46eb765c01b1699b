#ifndef EGTA_PAYOFF_TENSOR_HPP
#define EGTA_PAYOFF_TENSOR_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace egta {

// Expected payoffs for every pure strategy profile of a K-player game.
// Values are stored profile-major, player-minor. The 2-player square case
// doubles as the single-population matrix M(row, col): the row player's
// payoff when row meets col.
class PayoffTensor {
 public:
  PayoffTensor(std::vector<int> strategies_per_player, std::vector<double> values);

  // Single-population construction: player 0 gets m(i, j), player 1 the
  // transposed entry, matching a symmetric one-population game.
  static PayoffTensor from_matrix(const Eigen::MatrixXd& m);

  static PayoffTensor load_json(const std::string& path);
  static PayoffTensor parse_json_text(const std::string& text);
  static PayoffTensor load_csv(const std::string& path);
  void save_json(const std::string& path) const;
  std::string to_json_text() const;

  int num_players() const { return static_cast<int>(strategies_.size()); }
  const std::vector<int>& strategies_per_player() const { return strategies_; }
  int num_profiles() const { return num_profiles_; }

  double value(int player, int profile_index) const {
    return values_[static_cast<std::size_t>(profile_index) * strategies_.size() + player];
  }

  int profile_index(const std::vector<int>& profile) const;
  std::vector<int> decode_profile(int index) const;

  // Single-population accessors; only valid for 2-player square games.
  bool single_population_compatible() const {
    return num_players() == 2 && strategies_[0] == strategies_[1];
  }
  int side() const;
  double at(int row, int col) const;
  Eigen::MatrixXd matrix() const;

 private:
  std::vector<int> strategies_;
  std::vector<double> values_;  // size num_profiles * K
  int num_profiles_ = 0;
};

}  // namespace egta

#endif  // EGTA_PAYOFF_TENSOR_HPP
