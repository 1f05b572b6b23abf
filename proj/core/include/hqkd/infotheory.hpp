#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hqkd/qstate.hpp"

namespace hqkd {

inline constexpr double kProbabilityTolerance = 1e-9;

class Distribution {
 public:
  // Throws InvalidArgument for negative entries or a sum away from 1.
  explicit Distribution(std::vector<double> probs);

  static Distribution uniform(std::size_t n);

  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

// p(x_i, y_j) stored with X along rows and Y along columns.
class JointDistribution {
 public:
  explicit JointDistribution(Eigen::MatrixXd probs);

  // Builds p(x, y) = p(x) p(y|x) from an input law and a row-stochastic channel.
  static JointDistribution from_channel(const Distribution& input, const Eigen::MatrixXd& channel);

  const Eigen::MatrixXd& probs() const noexcept { return probs_; }
  Distribution marginal_x() const;
  Distribution marginal_y() const;
  JointDistribution transposed() const;

 private:
  Eigen::MatrixXd probs_;
};

struct EnsembleSpec {
  std::vector<DensityMatrix> states;
  Distribution probs;
};

struct ProtocolCost {
  double secret_bits = 0.0;     // b_s
  double qubits = 0.0;          // q_t
  double classical_bits = 0.0;  // b_t
};

struct EfficiencyResult {
  double value = 0.0;
  bool exceeds_bound = false;  // value > 1 breaks the Shannon + Holevo ceiling
};

double shannon_entropy(const Distribution& d);
double conditional_entropy(const JointDistribution& j);  // H(X|Y)
double mutual_information(const JointDistribution& j);   // H(X) - H(X|Y)
double holevo_chi(const EnsembleSpec& e);
EfficiencyResult efficiency(const ProtocolCost& c);

// Mixture sum_i p_i rho_i of an ensemble.
DensityMatrix ensemble_average(const EnsembleSpec& e);

// --- Published efficiency comparison ---------------------------------------

// Small exact fraction used for table entries.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den);
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational operator+(Rational a, Rational b);
Rational operator/(Rational a, Rational b);

enum class Qualifier { exact, strict_upper, upper };

std::string qualifier_name(Qualifier q);
std::string qualifier_symbol(Qualifier q);  // "", "<", "<="

struct SchemeRow {
  std::string scheme;
  Rational secret_bits;
  Qualifier secret_bits_qualifier = Qualifier::exact;  // "< 0.5" for B92
  Rational qubits;
  Rational classical_bits;
  bool classical_bits_lower_bound = false;  // ">= 1" for Goldenberg-Vaidman
};

struct SchemeEfficiency {
  SchemeRow row;
  Rational efficiency;
  Qualifier qualifier;
  std::string display;  // two decimals with qualifier, e.g. "<= 0.33"
};

// The six published schemes, stored as data.
const std::vector<SchemeRow>& published_schemes();

// Recomputes the efficiency column from (b_s, q_t, b_t); bounds on b_s or
// b_t propagate into the qualifier of the result.
SchemeEfficiency evaluate_scheme(const SchemeRow& row);

}  // namespace hqkd
