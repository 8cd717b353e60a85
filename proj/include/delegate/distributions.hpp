#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "delegate/core.hpp"
#include "delegate/rng.hpp"

namespace delegate {

struct Uniform01 {};
struct Bernoulli { double p; };
/// F(x) = x^alpha on [0, 1].
struct PowerCdf { double alpha; };
struct Exponential { double lambda; };
/// f(x) = 2x on [0, 1].
struct LinearPdf {};
struct PointMass { double value; };
/// Finite support; values strictly increasing, probabilities summing to one.
struct DiscreteMarginal {
  std::vector<double> values;
  std::vector<double> probs;
};

struct Atom {
  double value;
  double prob;
};

/// Cut-off used to truncate supports for quadrature: cdf in [eps, 1 - eps].
inline constexpr double kTailMass = 1e-12;

/// A univariate law from the registry.
class Marginal {
 public:
  using Kind = std::variant<Uniform01, Bernoulli, PowerCdf, Exponential, LinearPdf, PointMass,
                            DiscreteMarginal>;

  Marginal(Kind kind);  // NOLINT: implicit by design of the registry types

  static Marginal uniform01();
  static Marginal bernoulli(double p);
  static Marginal power_cdf(double alpha);
  static Marginal exponential(double lambda);
  static Marginal linear_pdf();
  static Marginal point_mass(double value);
  static Marginal discrete(std::vector<double> values, std::vector<double> probs);

  const Kind& kind() const noexcept { return kind_; }
  std::string id() const;
  bool is_discrete() const noexcept;

  double cdf(double x) const;
  /// Density; throws for discrete laws.
  double pdf(double x) const;
  /// f / (1 - F); throws HAZARD_AT_SUPPORT_END where 1 - F = 0.
  double hazard(double x) const;
  /// Smallest x with F(x) >= u, for u in (0, 1).
  double quantile(double u) const;
  double sample(RngStream& rng) const { return quantile(rng.uniform01()); }

  double support_min() const;
  /// May be +infinity.
  double support_max() const;
  /// Atoms in increasing order; throws for continuous laws.
  std::vector<Atom> atoms() const;

 private:
  Kind kind_;
};

/// Law of the maximum of k i.i.d. draws from a base marginal: cdf F^k. With
/// k = 1 this is the marginal itself, so order-statistics routines accept it
/// for both plain and first-best (max-of-k) laws.
class MaxOfK {
 public:
  MaxOfK(Marginal base, int k = 1);  // NOLINT: a Marginal is a MaxOfK with k = 1

  const Marginal& base() const noexcept { return base_; }
  int k() const noexcept { return k_; }
  std::string id() const;
  bool is_discrete() const noexcept { return base_.is_discrete(); }

  double cdf(double x) const;
  double pdf(double x) const;
  double hazard(double x) const;
  double quantile(double u) const;
  double sample(RngStream& rng) const { return quantile(rng.uniform01()); }
  std::vector<Atom> atoms() const;

  /// Quadrature range [Q(kTailMass), Q(1 - kTailMass)] for continuous laws.
  std::pair<double, double> integration_range() const;

  /// Analytic for Uniform01 (Beta(k, 1)), exact sums for discrete laws,
  /// adaptive Simpson otherwise.
  double mean() const;
  double variance() const;

 private:
  Marginal base_;
  int k_;
};

MaxOfK max_of_k_marginal(const Marginal& marginal, int k);

/// x and y drawn independently.
struct IndependentProduct {
  Marginal x;
  Marginal y;
};

/// y is a deterministic function of x.
struct Comonotone {
  Marginal x;
  std::function<double(double)> g;
  std::string label;
};

struct TableRow {
  double x;
  double y;
  double prob;
};

struct DiscreteTable {
  std::vector<TableRow> rows;
};

/// Joint law of a solution's (x, y) pair.
class JointDistribution {
 public:
  using Kind = std::variant<IndependentProduct, Comonotone, DiscreteTable>;

  JointDistribution(Kind kind);  // NOLINT

  static JointDistribution point(double x, double y);

  const Kind& kind() const noexcept { return kind_; }
  std::string id() const;
  Solution sample(RngStream& rng) const;

  /// Finite support as (solution, probability), or nullopt when continuous.
  std::optional<std::vector<std::pair<Solution, double>>> finite_support() const;

 private:
  Kind kind_;
};

inline Marginal Marginal::uniform01() { return Marginal(Uniform01{}); }
inline Marginal Marginal::bernoulli(double p) { return Marginal(Bernoulli{p}); }
inline Marginal Marginal::power_cdf(double alpha) { return Marginal(PowerCdf{alpha}); }
inline Marginal Marginal::exponential(double lambda) { return Marginal(Exponential{lambda}); }
inline Marginal Marginal::linear_pdf() { return Marginal(LinearPdf{}); }
inline Marginal Marginal::point_mass(double value) { return Marginal(PointMass{value}); }
inline Marginal Marginal::discrete(std::vector<double> values, std::vector<double> probs) {
  return Marginal(DiscreteMarginal{std::move(values), std::move(probs)});
}
inline JointDistribution JointDistribution::point(double x, double y) {
  return JointDistribution(DiscreteTable{{{x, y, 1.0}}});
}

/// y as a function of x for the worst-case Bayes-Nash instance with n
/// symmetric agents holding k solutions each:
///   y = (1 - (1 - F(x))^k)^(-2(n-1)),
/// clamped at kWorstCaseYClamp near the bottom of the support.
inline constexpr double kWorstCaseYClamp = 1e12;
double worstcase_bne_y(int n, int k, double cdf_at_x);

/// Expected utility of proposing a solution with F(x) = cdf_at_x when the
/// other n - 1 agents propose their minimum-x solutions: win probability
/// (1 - (1 - F)^k)^(n-1) times the unclamped y.
double worstcase_bne_expected_utility(int n, int k, double cdf_at_x);

JointDistribution worstcase_bne_joint(int n, int k, const Marginal& x_marginal);

/// Registry ids: "uniform01", "bernoulli:p=0.5", "powercdf:alpha=2",
/// "exp:lambda=1", "linpdf2x", "pointmass:x=0.5", "discrete:[[v,p],...]".
Marginal parse_marginal(std::string_view id);

/// Joint ids: any marginal id (x from it, y ~ uniform01 independently),
/// "pointmass:x=..,y=..", "table:[[x,y,p],...]", "worstcase_bne:n=..,k=..".
JointDistribution parse_joint(std::string_view id);

}  // namespace delegate
