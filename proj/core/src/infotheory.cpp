#include "hqkd/infotheory.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "hqkd/errors.hpp"

namespace hqkd {
namespace {

double plogp_sum(const auto& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

void check_probabilities(const auto& probs, const char* what) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= -kProbabilityTolerance)) {
      throw InvalidArgument(std::string(what) + ": negative probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    throw InvalidArgument(std::string(what) + ": probabilities do not sum to 1");
  }
}

}  // namespace

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidArgument("distribution is empty");
  check_probabilities(probs_, "distribution");
}

Distribution Distribution::uniform(std::size_t n) {
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

JointDistribution::JointDistribution(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
  if (probs_.size() == 0) throw InvalidArgument("joint distribution is empty");
  const Eigen::VectorXd flat = probs_.reshaped();
  check_probabilities(flat, "joint distribution");
}

JointDistribution JointDistribution::from_channel(const Distribution& input,
                                                  const Eigen::MatrixXd& channel) {
  if (static_cast<std::size_t>(channel.rows()) != input.size()) {
    throw DimensionError("channel rows must match the input alphabet");
  }
  Eigen::MatrixXd joint = channel;
  for (Eigen::Index i = 0; i < channel.rows(); ++i) {
    joint.row(i) *= input.probs()[static_cast<std::size_t>(i)];
  }
  return JointDistribution(std::move(joint));
}

Distribution JointDistribution::marginal_x() const {
  const Eigen::VectorXd m = probs_.rowwise().sum();
  return Distribution(std::vector<double>(m.begin(), m.end()));
}

Distribution JointDistribution::marginal_y() const {
  const Eigen::RowVectorXd m = probs_.colwise().sum();
  return Distribution(std::vector<double>(m.begin(), m.end()));
}

JointDistribution JointDistribution::transposed() const {
  return JointDistribution(probs_.transpose());
}

double shannon_entropy(const Distribution& d) { return plogp_sum(d.probs()); }

double conditional_entropy(const JointDistribution& j) {
  const auto& p = j.probs();
  double h = 0.0;
  for (Eigen::Index y = 0; y < p.cols(); ++y) {
    const double py = p.col(y).sum();
    if (py <= 0.0) continue;
    const Eigen::VectorXd conditional = p.col(y) / py;
    h += py * plogp_sum(conditional);
  }
  return h;
}

double mutual_information(const JointDistribution& j) {
  return shannon_entropy(j.marginal_x()) - conditional_entropy(j);
}

DensityMatrix ensemble_average(const EnsembleSpec& e) {
  if (e.states.empty() || e.states.size() != e.probs.size()) {
    throw InvalidArgument("ensemble states and probabilities differ in length");
  }
  const auto dim = e.states.front().dim();
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix rho = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < e.states.size(); ++i) {
    if (e.states[i].dim() != dim) throw DimensionError("ensemble states differ in dimension");
    rho += e.probs.probs()[i] * e.states[i].matrix();
  }
  return DensityMatrix(std::move(rho));
}

double holevo_chi(const EnsembleSpec& e) {
  double chi = von_neumann_entropy(ensemble_average(e));
  for (std::size_t i = 0; i < e.states.size(); ++i) {
    chi -= e.probs.probs()[i] * von_neumann_entropy(e.states[i]);
  }
  return std::max(0.0, chi);
}

EfficiencyResult efficiency(const ProtocolCost& c) {
  if (c.secret_bits < 0.0 || c.qubits < 0.0 || c.classical_bits < 0.0) {
    throw InvalidArgument("protocol cost entries must be non-negative");
  }
  const double denom = c.qubits + c.classical_bits;
  if (!(denom > 0.0)) throw InvalidArgument("efficiency undefined: q_t + b_t = 0");
  const double e = c.secret_bits / denom;
  return {e, e > 1.0};
}

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidArgument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const auto g = std::gcd(num, den);
  return {num / (g == 0 ? 1 : g), den / (g == 0 ? 1 : g)};
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(Rational a, Rational b) {
  return Rational::make(a.num * b.den + b.num * a.den, a.den * b.den);
}

Rational operator/(Rational a, Rational b) {
  if (b.num == 0) throw InvalidArgument("division by zero rational");
  return Rational::make(a.num * b.den, a.den * b.num);
}

std::string qualifier_name(Qualifier q) {
  switch (q) {
    case Qualifier::exact: return "exact";
    case Qualifier::strict_upper: return "strict-bound";
    case Qualifier::upper: return "upper-bound";
  }
  return "exact";
}

std::string qualifier_symbol(Qualifier q) {
  switch (q) {
    case Qualifier::exact: return "";
    case Qualifier::strict_upper: return "<";
    case Qualifier::upper: return "<=";
  }
  return "";
}

const std::vector<SchemeRow>& published_schemes() {
  static const std::vector<SchemeRow> rows = {
      {"Bennett, 1992", Rational::make(1, 2), Qualifier::strict_upper, Rational::make(1, 1),
       Rational::make(1, 1), false},
      {"Bennett and Brassard, 1984", Rational::make(1, 2), Qualifier::exact, Rational::make(1, 1),
       Rational::make(1, 1), false},
      {"Goldenberg and Vaidman, 1995", Rational::make(1, 1), Qualifier::exact,
       Rational::make(2, 1), Rational::make(1, 1), true},
      {"Ekert, 1991", Rational::make(1, 1), Qualifier::exact, Rational::make(1, 1),
       Rational::make(1, 1), false},
      {"Koashi and Imoto, 1997", Rational::make(1, 1), Qualifier::exact, Rational::make(2, 1),
       Rational::make(0, 1), false},
      {"Cabello, 2000", Rational::make(2, 1), Qualifier::exact, Rational::make(2, 1),
       Rational::make(1, 1), false},
  };
  return rows;
}

SchemeEfficiency evaluate_scheme(const SchemeRow& row) {
  const Rational e = row.secret_bits / (row.qubits + row.classical_bits);
  // A strict bound on the numerator dominates a non-strict one on the denominator.
  Qualifier q = Qualifier::exact;
  if (row.classical_bits_lower_bound) q = Qualifier::upper;
  if (row.secret_bits_qualifier == Qualifier::upper) q = Qualifier::upper;
  if (row.secret_bits_qualifier == Qualifier::strict_upper) q = Qualifier::strict_upper;

  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", e.value());
  std::string display = qualifier_symbol(q);
  if (!display.empty()) display += " ";
  display += buf;
  return {row, e, q, std::move(display)};
}

}  // namespace hqkd
