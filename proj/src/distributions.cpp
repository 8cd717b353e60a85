#include "delegate/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "delegate/error.hpp"
#include "delegate/quadrature.hpp"

namespace delegate {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_probabilities(const std::vector<double>& probs, std::string_view what) {
  require(!probs.empty(), fmt::format("{} needs at least one atom", what));
  double total = 0.0;
  for (double p : probs) {
    require(p > 0.0 && std::isfinite(p), fmt::format("{} probabilities must be positive", what));
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12,
          fmt::format("{} probabilities sum to {:.17g}, expected 1", what, total));
}

std::string fmt_num(double v) { return fmt::format("{}", v); }

}  // namespace

// ---------------------------------------------------------------- Marginal

Marginal::Marginal(Kind kind) : kind_(std::move(kind)) {
  std::visit(Overloaded{
                 [](const Uniform01&) {},
                 [](const LinearPdf&) {},
                 [](const Bernoulli& b) {
                   require(b.p > 0.0 && b.p < 1.0, fmt::format("bernoulli needs 0 < p < 1, got {}", b.p));
                 },
                 [](const PowerCdf& d) {
                   require(d.alpha > 0.0 && std::isfinite(d.alpha),
                           fmt::format("powercdf needs alpha > 0, got {}", d.alpha));
                 },
                 [](const Exponential& d) {
                   require(d.lambda > 0.0 && std::isfinite(d.lambda),
                           fmt::format("exponential needs lambda > 0, got {}", d.lambda));
                 },
                 [](const PointMass& d) {
                   require(std::isfinite(d.value), "point mass value must be finite");
                 },
                 [](const DiscreteMarginal& d) {
                   require(d.values.size() == d.probs.size(), "discrete values and probs differ in length");
                   check_probabilities(d.probs, "discrete marginal");
                   for (std::size_t i = 0; i < d.values.size(); ++i) {
                     require(std::isfinite(d.values[i]), "discrete values must be finite");
                     require(i == 0 || d.values[i - 1] < d.values[i],
                             "discrete values must be strictly increasing");
                   }
                 },
             },
             kind_);
}

std::string Marginal::id() const {
  return std::visit(Overloaded{
                        [](const Uniform01&) -> std::string { return "uniform01"; },
                        [](const LinearPdf&) -> std::string { return "linpdf2x"; },
                        [](const Bernoulli& b) { return "bernoulli:p=" + fmt_num(b.p); },
                        [](const PowerCdf& d) { return "powercdf:alpha=" + fmt_num(d.alpha); },
                        [](const Exponential& d) { return "exp:lambda=" + fmt_num(d.lambda); },
                        [](const PointMass& d) { return "pointmass:x=" + fmt_num(d.value); },
                        [](const DiscreteMarginal& d) {
                          std::string s = "discrete:[";
                          for (std::size_t i = 0; i < d.values.size(); ++i) {
                            if (i) s += ',';
                            s += fmt::format("[{},{}]", d.values[i], d.probs[i]);
                          }
                          return s + "]";
                        },
                    },
                    kind_);
}

bool Marginal::is_discrete() const noexcept {
  return std::holds_alternative<Bernoulli>(kind_) || std::holds_alternative<PointMass>(kind_) ||
         std::holds_alternative<DiscreteMarginal>(kind_);
}

double Marginal::cdf(double x) const {
  if (is_discrete()) {
    double total = 0.0;
    for (const Atom& a : atoms()) {
      if (a.value <= x) total += a.prob;
    }
    return std::min(total, 1.0);
  }
  return std::visit(Overloaded{
                        [x](const Uniform01&) { return std::clamp(x, 0.0, 1.0); },
                        [x](const LinearPdf&) { return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x * x); },
                        [x](const PowerCdf& d) {
                          return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : std::pow(x, d.alpha));
                        },
                        [x](const Exponential& d) { return x <= 0.0 ? 0.0 : -std::expm1(-d.lambda * x); },
                        [](const auto&) { return 0.0; },
                    },
                    kind_);
}

double Marginal::pdf(double x) const {
  require(!is_discrete(), fmt::format("{} has no density", id()));
  return std::visit(Overloaded{
                        [x](const Uniform01&) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; },
                        [x](const LinearPdf&) { return (x >= 0.0 && x <= 1.0) ? 2.0 * x : 0.0; },
                        [x](const PowerCdf& d) {
                          if (x < 0.0 || x > 1.0) return 0.0;
                          if (x == 0.0) return d.alpha < 1.0 ? kInf : (d.alpha == 1.0 ? 1.0 : 0.0);
                          return d.alpha * std::pow(x, d.alpha - 1.0);
                        },
                        [x](const Exponential& d) { return x < 0.0 ? 0.0 : d.lambda * std::exp(-d.lambda * x); },
                        [](const auto&) { return 0.0; },
                    },
                    kind_);
}

double Marginal::hazard(double x) const {
  require(!is_discrete(), fmt::format("{} has no hazard rate", id()));
  // Survival computed directly rather than as 1 - cdf to keep the constant
  // exponential hazard exact.
  const double survival = std::visit(
      Overloaded{
          [x](const Uniform01&) { return x <= 0.0 ? 1.0 : (x >= 1.0 ? 0.0 : 1.0 - x); },
          [x](const LinearPdf&) { return x <= 0.0 ? 1.0 : (x >= 1.0 ? 0.0 : 1.0 - x * x); },
          [x](const PowerCdf& d) {
            return x <= 0.0 ? 1.0 : (x >= 1.0 ? 0.0 : -std::expm1(d.alpha * std::log(x)));
          },
          [x](const Exponential& d) { return x <= 0.0 ? 1.0 : std::exp(-d.lambda * x); },
          [](const auto&) { return 0.0; },
      },
      kind_);
  if (!(survival > 0.0)) {
    throw Error(ErrorCode::kHazardAtSupportEnd, fmt::format("hazard of {} undefined at {}: 1 - F = 0", id(), x));
  }
  if (const auto* e = std::get_if<Exponential>(&kind_); e && x >= 0.0) return e->lambda;
  return pdf(x) / survival;
}

double Marginal::quantile(double u) const {
  require(u > 0.0 && u <= 1.0, fmt::format("quantile level must be in (0, 1], got {}", u));
  if (is_discrete()) {
    const auto atom_list = atoms();
    double cum = 0.0;
    for (const Atom& a : atom_list) {
      cum += a.prob;
      if (u <= cum) return a.value;
    }
    return atom_list.back().value;
  }
  return std::visit(Overloaded{
                        [u](const Uniform01&) { return u; },
                        [u](const LinearPdf&) { return std::sqrt(u); },
                        [u](const PowerCdf& d) { return std::pow(u, 1.0 / d.alpha); },
                        [u](const Exponential& d) { return u >= 1.0 ? kInf : -std::log1p(-u) / d.lambda; },
                        [](const auto&) { return 0.0; },
                    },
                    kind_);
}

double Marginal::support_min() const {
  if (is_discrete()) return atoms().front().value;
  return 0.0;
}

double Marginal::support_max() const {
  if (is_discrete()) return atoms().back().value;
  return std::holds_alternative<Exponential>(kind_) ? kInf : 1.0;
}

std::vector<Atom> Marginal::atoms() const {
  return std::visit(Overloaded{
                        [](const Bernoulli& b) { return std::vector<Atom>{{0.0, 1.0 - b.p}, {1.0, b.p}}; },
                        [](const PointMass& d) { return std::vector<Atom>{{d.value, 1.0}}; },
                        [](const DiscreteMarginal& d) {
                          std::vector<Atom> out;
                          for (std::size_t i = 0; i < d.values.size(); ++i) out.push_back({d.values[i], d.probs[i]});
                          return out;
                        },
                        [this](const auto&) -> std::vector<Atom> {
                          throw_invalid(fmt::format("{} is continuous and has no atoms", id()));
                        },
                    },
                    kind_);
}

// ------------------------------------------------------------------ MaxOfK

MaxOfK::MaxOfK(Marginal base, int k) : base_(std::move(base)), k_(k) {
  require(k >= 1, fmt::format("max-of-k needs k >= 1, got {}", k));
}

MaxOfK max_of_k_marginal(const Marginal& marginal, int k) { return MaxOfK(marginal, k); }

std::string MaxOfK::id() const {
  return k_ == 1 ? base_.id() : fmt::format("max{}({})", k_, base_.id());
}

double MaxOfK::cdf(double x) const { return std::pow(base_.cdf(x), k_); }

double MaxOfK::pdf(double x) const {
  if (k_ == 1) return base_.pdf(x);
  const double f = base_.pdf(x);
  if (f == 0.0) return 0.0;
  return k_ * std::pow(base_.cdf(x), k_ - 1) * f;
}

double MaxOfK::hazard(double x) const {
  if (k_ == 1) return base_.hazard(x);
  require(!is_discrete(), fmt::format("{} has no hazard rate", id()));
  const double F = base_.cdf(x);
  const double survival = F <= 0.0 ? 1.0 : -std::expm1(k_ * std::log(F));
  if (!(survival > 0.0)) {
    throw Error(ErrorCode::kHazardAtSupportEnd, fmt::format("hazard of {} undefined at {}: 1 - F = 0", id(), x));
  }
  return pdf(x) / survival;
}

double MaxOfK::quantile(double u) const {
  require(u > 0.0 && u <= 1.0, fmt::format("quantile level must be in (0, 1], got {}", u));
  return base_.quantile(k_ == 1 ? u : std::pow(u, 1.0 / k_));
}

std::vector<Atom> MaxOfK::atoms() const {
  auto out = base_.atoms();
  if (k_ == 1) return out;
  double prev = 0.0;
  double cum = 0.0;
  for (Atom& a : out) {
    cum += a.prob;
    const double ck = std::pow(std::min(cum, 1.0), k_);
    a.prob = ck - prev;
    prev = ck;
  }
  return out;
}

std::pair<double, double> MaxOfK::integration_range() const {
  require(!is_discrete(), "integration range is defined for continuous laws only");
  return {quantile(kTailMass), quantile(1.0 - kTailMass)};
}

double MaxOfK::mean() const {
  if (std::holds_alternative<Uniform01>(base_.kind())) return k_ / (k_ + 1.0);
  if (is_discrete()) {
    double m = 0.0;
    for (const Atom& a : atoms()) m += a.value * a.prob;
    return m;
  }
  const auto [lo, hi] = integration_range();
  return adaptive_simpson([this](double x) { return x * pdf(x); }, lo, hi);
}

double MaxOfK::variance() const {
  if (std::holds_alternative<Uniform01>(base_.kind())) {
    const double k = k_;
    return k / ((k + 1.0) * (k + 1.0) * (k + 2.0));
  }
  const double mu = mean();
  if (is_discrete()) {
    double v = 0.0;
    for (const Atom& a : atoms()) v += (a.value - mu) * (a.value - mu) * a.prob;
    return v;
  }
  const auto [lo, hi] = integration_range();
  return adaptive_simpson([this, mu](double x) { return (x - mu) * (x - mu) * pdf(x); }, lo, hi);
}

// ------------------------------------------------------- JointDistribution

JointDistribution::JointDistribution(Kind kind) : kind_(std::move(kind)) {
  if (const auto* table = std::get_if<DiscreteTable>(&kind_)) {
    std::vector<double> probs;
    for (const TableRow& r : table->rows) {
      Solution(r.x, r.y);  // validates positivity
      probs.push_back(r.prob);
    }
    check_probabilities(probs, "table");
  }
  if (const auto* c = std::get_if<Comonotone>(&kind_)) {
    require(static_cast<bool>(c->g), "comonotone joint needs a y = g(x) map");
  }
}

std::string JointDistribution::id() const {
  return std::visit(Overloaded{
                        [](const IndependentProduct& p) {
                          if (std::holds_alternative<Uniform01>(p.y.kind())) return p.x.id();
                          return fmt::format("product({};{})", p.x.id(), p.y.id());
                        },
                        [](const Comonotone& c) { return c.label; },
                        [](const DiscreteTable& t) {
                          if (t.rows.size() == 1) return fmt::format("pointmass:x={},y={}", t.rows[0].x, t.rows[0].y);
                          std::string s = "table:[";
                          for (std::size_t i = 0; i < t.rows.size(); ++i) {
                            if (i) s += ',';
                            s += fmt::format("[{},{},{}]", t.rows[i].x, t.rows[i].y, t.rows[i].prob);
                          }
                          return s + "]";
                        },
                    },
                    kind_);
}

Solution JointDistribution::sample(RngStream& rng) const {
  return std::visit(Overloaded{
                        [&rng](const IndependentProduct& p) {
                          const double x = p.x.sample(rng);
                          const double y = p.y.sample(rng);
                          return Solution(x, y);
                        },
                        [&rng](const Comonotone& c) {
                          const double x = c.x.sample(rng);
                          return Solution(x, c.g(x));
                        },
                        [&rng](const DiscreteTable& t) {
                          const double u = rng.uniform01();
                          double cum = 0.0;
                          for (const TableRow& r : t.rows) {
                            cum += r.prob;
                            if (u <= cum) return Solution(r.x, r.y);
                          }
                          return Solution(t.rows.back().x, t.rows.back().y);
                        },
                    },
                    kind_);
}

std::optional<std::vector<std::pair<Solution, double>>> JointDistribution::finite_support() const {
  using Support = std::vector<std::pair<Solution, double>>;
  if (const auto* t = std::get_if<DiscreteTable>(&kind_)) {
    Support out;
    for (const TableRow& r : t->rows) out.emplace_back(Solution(r.x, r.y), r.prob);
    return out;
  }
  if (const auto* p = std::get_if<IndependentProduct>(&kind_); p && p->x.is_discrete() && p->y.is_discrete()) {
    Support out;
    for (const Atom& ax : p->x.atoms()) {
      for (const Atom& ay : p->y.atoms()) out.emplace_back(Solution(ax.value, ay.value), ax.prob * ay.prob);
    }
    return out;
  }
  return std::nullopt;
}

// ------------------------------------------------------ worst-case BNE joint

double worstcase_bne_y(int n, int k, double F) {
  const double base = -std::expm1(k * std::log1p(-std::clamp(F, 0.0, 1.0)));
  if (!(base > 0.0)) return kWorstCaseYClamp;
  return std::min(std::pow(base, -2.0 * (n - 1)), kWorstCaseYClamp);
}

double worstcase_bne_expected_utility(int n, int k, double F) {
  const double base = -std::expm1(k * std::log1p(-std::clamp(F, 0.0, 1.0)));
  const double win = std::pow(base, n - 1);
  const double y = std::pow(base, -2.0 * (n - 1));
  return win * y;
}

JointDistribution worstcase_bne_joint(int n, int k, const Marginal& x_marginal) {
  require(n >= 2 && k >= 1, fmt::format("worst-case joint needs n >= 2, k >= 1, got n={}, k={}", n, k));
  require(!x_marginal.is_discrete(), "worst-case joint needs a continuous x marginal");
  Marginal xm = x_marginal;
  auto g = [n, k, xm](double x) { return worstcase_bne_y(n, k, xm.cdf(x)); };
  std::string label = fmt::format("worstcase_bne:n={},k={}", n, k);
  if (!std::holds_alternative<Uniform01>(x_marginal.kind())) label += ",x=" + x_marginal.id();
  return JointDistribution(Comonotone{x_marginal, g, label});
}

// ----------------------------------------------------------------- parsing

namespace {

double parse_double(std::string_view text, std::string_view context) {
  double v = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kParse, fmt::format("bad number '{}' in {}", text, context));
  }
  return v;
}

struct ParsedId {
  std::string name;
  std::string rest;
  std::map<std::string, double, std::less<>> params;
};

ParsedId split_id(std::string_view id) {
  ParsedId out;
  const auto colon = id.find(':');
  out.name = std::string(id.substr(0, colon));
  if (colon == std::string_view::npos) return out;
  out.rest = std::string(id.substr(colon + 1));
  if (!out.rest.empty() && out.rest.front() == '[') return out;
  std::string_view rest = out.rest;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParse, fmt::format("expected key=value in '{}'", id));
    }
    out.params[std::string(item.substr(0, eq))] = parse_double(item.substr(eq + 1), id);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

double param(const ParsedId& p, std::string_view key, std::string_view id) {
  auto it = p.params.find(key);
  if (it == p.params.end()) throw Error(ErrorCode::kParse, fmt::format("'{}' is missing '{}'", id, key));
  return it->second;
}

nlohmann::json parse_array(const ParsedId& p, std::string_view id) {
  try {
    auto j = nlohmann::json::parse(p.rest);
    if (!j.is_array()) throw Error(ErrorCode::kParse, fmt::format("'{}' needs a JSON array", id));
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("bad array in '{}': {}", id, e.what()));
  }
}

int as_count(double v, std::string_view id) {
  if (v != std::floor(v) || v < 1) throw Error(ErrorCode::kParse, fmt::format("'{}' needs positive integers", id));
  return static_cast<int>(v);
}

}  // namespace

Marginal parse_marginal(std::string_view id) {
  const ParsedId p = split_id(id);
  if (p.name == "uniform01") return Marginal::uniform01();
  if (p.name == "linpdf2x") return Marginal::linear_pdf();
  if (p.name == "bernoulli") return Marginal::bernoulli(param(p, "p", id));
  if (p.name == "powercdf") return Marginal::power_cdf(param(p, "alpha", id));
  if (p.name == "exp") return Marginal::exponential(param(p, "lambda", id));
  if (p.name == "pointmass") return Marginal::point_mass(param(p, "x", id));
  if (p.name == "discrete") {
    std::vector<double> values, probs;
    for (const auto& row : parse_array(p, id)) {
      if (!row.is_array() || row.size() != 2) throw Error(ErrorCode::kParse, fmt::format("'{}' rows are [value, prob]", id));
      values.push_back(row[0].get<double>());
      probs.push_back(row[1].get<double>());
    }
    return Marginal::discrete(std::move(values), std::move(probs));
  }
  throw Error(ErrorCode::kParse, fmt::format("unknown marginal id '{}'", id));
}

JointDistribution parse_joint(std::string_view id) {
  const ParsedId p = split_id(id);
  if (p.name == "pointmass") return JointDistribution::point(param(p, "x", id), param(p, "y", id));
  if (p.name == "table") {
    DiscreteTable table;
    for (const auto& row : parse_array(p, id)) {
      if (!row.is_array() || row.size() != 3) throw Error(ErrorCode::kParse, fmt::format("'{}' rows are [x, y, prob]", id));
      table.rows.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
    return JointDistribution(std::move(table));
  }
  if (p.name == "worstcase_bne") {
    return worstcase_bne_joint(as_count(param(p, "n", id), id), as_count(param(p, "k", id), id), Marginal::uniform01());
  }
  Marginal x = parse_marginal(id);
  require(x.support_min() > 0.0 || !x.is_discrete(),
          fmt::format("'{}' puts mass on x <= 0 and cannot generate solutions", id));
  return JointDistribution(IndependentProduct{std::move(x), Marginal::uniform01()});
}

}  // namespace delegate
