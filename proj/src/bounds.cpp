#include "delegate/bounds.hpp"

#include <cmath>

#include <fmt/format.h>

#include "delegate/error.hpp"

namespace delegate {
namespace {

double exponent_n(int n) {
  require(n >= 2, fmt::format("needs n >= 2, got {}", n));
  const double r = static_cast<double>(n) / (n - 1);
  return 0.5 * r * r;
}

}  // namespace

BmThreshold bm_threshold(double alpha, int n, int k) {
  require(alpha > 0.0 && n >= 1 && k >= 1, fmt::format("bm threshold needs alpha > 0, n, k >= 1; got {}, {}, {}", alpha, n, k));
  const double m = alpha * n * k;
  BmThreshold out;
  out.r = std::pow(1.0 / (m + 1.0), 1.0 / m);
  out.guarantee = out.r - std::pow(out.r, m + 1.0);
  out.guarantee_factored = out.r * m / (m + 1.0);
  out.ratio_form = std::pow(m / (m + 1.0), 1.0 / m);
  return out;
}

double pim_bound_symmetric(int n, double L) {
  require(n >= 2 && L > 0.0, fmt::format("needs n >= 2, L > 0; got {}, {}", n, L));
  return L * std::pow(1.0 - 1.0 / n, n - 1);
}

double pim_bound_mhr(int k) {
  require(k >= 1, fmt::format("needs k >= 1, got {}", k));
  const double kk = k;
  return std::sqrt(4.0 * kk / (3.0 * (kk + 1) * (kk + 1) * (kk + 2)));
}

double pim_bound_incpdf(int n, int k) {
  require(n >= 2 && k >= 1, fmt::format("needs n >= 2, k >= 1; got {}, {}", n, k));
  const double kk = k;
  return std::sqrt(12.0 * kk / ((kk + 1) * (kk + 1) * (kk + 2))) / (n + 1.0);
}

double incomplete_info_lower_bound(int n, int k) {
  require(n >= 2 && k >= 1, fmt::format("needs n >= 2, k >= 1; got {}, {}", n, k));
  return (k - 1.0) / (k + 1.0) - std::sqrt(std::log(static_cast<double>(n)) / (2.0 * k + 3.0));
}

double worstcase_min_ceiling(int n, int k) {
  require(n >= 1 && k >= 1, fmt::format("needs n, k >= 1; got {}, {}", n, k));
  return 1.0 / (k + 1.0) + std::sqrt(std::log(static_cast<double>(n)) / (2.0 * k + 3.0));
}

double approx_bne_epsilon(int n) { return -std::expm1(-exponent_n(n)); }

double bce_ratio(int n) { return std::exp(exponent_n(n)); }

double super_agent_alpha(double eps) {
  require(eps > 0.0 && eps < 1.0, fmt::format("eps must be in (0, 1), got {}", eps));
  return eps / (3.0 - eps);
}

std::string NamedInstance::id() const {
  switch (kind) {
    case NamedInstanceKind::kSuperAgentBm:
      return fmt::format("SUPER_AGENT_BM(alpha={})", alpha);
    case NamedInstanceKind::kSuperAgentPim:
      return fmt::format("SUPER_AGENT_PIM(L={},eps={})", L, eps);
    case NamedInstanceKind::kBernoulliTight:
      return fmt::format("BERNOULLI_TIGHT(n={},k={})", n, k);
    case NamedInstanceKind::kWorstcaseBne:
      return fmt::format("WORSTCASE_BNE(n={},k={})", n, k);
  }
  return "?";
}

double MaterializedInstance::value(const std::string& name) const {
  for (const auto& [key, v] : expected) {
    if (key == name) return v;
  }
  throw_invalid(fmt::format("no expected value named '{}'", name));
}

MaterializedInstance materialize(const NamedInstance& named) {
  MaterializedInstance out;
  switch (named.kind) {
    case NamedInstanceKind::kSuperAgentBm: {
      const double a = named.alpha;
      require(a > 0.0 && a < 0.5, fmt::format("super-agent alpha must be in (0, 1/2), got {}", a));
      AgentSpec super;
      super.slots.push_back(JointDistribution::point(1.0, 10.0));
      super.slots.push_back(JointDistribution(DiscreteTable{{{1.0 / a, 5.0, a}, {a / (1.0 - a), 5.0, 1.0 - a}}}));
      // Every draw of the second agent is below every draw of the first.
      AgentSpec minor = AgentSpec::fixed({Solution(a / (2.0 * (1.0 - a)), 1.0)});
      out.spec = InstanceSpec{{super, minor}};
      out.k = 2;
      out.expected = {{"alpha", a},
                      {"E_X1", 2.0 - a},
                      {"accept_w1_utility", 1.0},
                      {"reject_w1_utility", 1.0 + a},
                      {"alg_ceiling", 1.0 + a}};
      break;
    }
    case NamedInstanceKind::kSuperAgentPim: {
      const double L = named.L;
      const double e = named.eps;
      require(e > 0.0 && e < L, fmt::format("super-agent PIM needs 0 < eps < L, got eps={}, L={}", e, L));
      AgentSpec super = AgentSpec::fixed({Solution(L - e / 2.0, 5.0), Solution(e / 2.0, 10.0)});
      AgentSpec minor = AgentSpec::fixed({Solution(e / 4.0, 1.0)});
      out.spec = InstanceSpec{{super, minor}};
      out.k = 2;
      out.expected = {{"E_X1", L - e / 2.0}, {"mechanism_utility", e / 2.0}, {"gap", L - e}};
      break;
    }
    case NamedInstanceKind::kBernoulliTight: {
      const int n = named.n;
      const int k = named.k;
      require(n >= 2 && k >= 1, fmt::format("Bernoulli instance needs n >= 2, k >= 1, got {}, {}", n, k));
      const double p = -std::expm1(std::log1p(-1.0 / n) / k);
      out.x_marginal = Marginal::bernoulli(p);
      out.k = k;
      out.expected = {{"p", p}, {"q", 1.0 / n}, {"gap", pim_bound_symmetric(n, 1.0)}};
      break;
    }
    case NamedInstanceKind::kWorstcaseBne: {
      const int n = named.n;
      const int k = named.k;
      out.spec = InstanceSpec::symmetric(n, k, worstcase_bne_joint(n, k, Marginal::uniform01()));
      out.x_marginal = Marginal::uniform01();
      out.k = k;
      out.expected = {{"E_X_max", static_cast<double>(n) * k / (static_cast<double>(n) * k + 1.0)},
                      {"lower_bound", incomplete_info_lower_bound(n, k)},
                      {"min_ceiling", worstcase_min_ceiling(n, k)}};
      break;
    }
  }
  return out;
}

}  // namespace delegate
