#include "votedyn/rule.hpp"

#include "kernels/kernels_internal.hpp"

#include <cstdint>
#include <stdexcept>

namespace votedyn {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::operator()(double x) const noexcept {
  return kernels::compensated_horner(coeffs_.data(), coeffs_.size(), x);
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<double>(k);
  return Polynomial(std::move(d));
}

VotingRule make_rule(std::string name, Polynomial f1, Polynomial f2, std::optional<Sampler> sampler,
                     ModelTag model) {
  constexpr double kSlack = 1e-12;
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    const double a = f1(x);
    const double b = f2(x);
    if (!(a >= -kSlack && a <= 1.0 + kSlack) || !(b >= -kSlack && b <= 1.0 + kSlack)) {
      throw std::invalid_argument("rule " + name + ": f_i leaves [0,1] at x=" + std::to_string(x));
    }
  }
  return VotingRule{std::move(name), std::move(f1), std::move(f2), sampler, model};
}

VotingRule make_rule_bo3() {
  Polynomial f({0.0, 0.0, 3.0, -2.0});
  return make_rule("bo3", f, f, Sampler{Sampler::Kind::kMajority, 3}, ModelTag::kBo3);
}

VotingRule make_rule_bo2() {
  return make_rule("bo2", Polynomial({0.0, 2.0, -1.0}), Polynomial({0.0, 0.0, 1.0}),
                   Sampler{Sampler::Kind::kBestOfTwo, 2}, ModelTag::kBo2);
}

VotingRule make_rule_best_of(unsigned k) {
  if (k < 1 || 2 * k + 1 > 25) throw std::invalid_argument("best-of-(2k+1) requires 1 <= k <= 12");
  const unsigned m = 2 * k + 1;
  // binom[a][b] for a ≤ 25
  std::int64_t binom[26][26] = {};
  for (unsigned a = 0; a <= m; ++a) {
    binom[a][0] = 1;
    for (unsigned b = 1; b <= a; ++b) binom[a][b] = binom[a - 1][b - 1] + (b < a ? binom[a - 1][b] : 0);
  }
  // Σ_{i=k+1}^{m} C(m,i) x^i Σ_j C(m-i,j) (-x)^j
  std::vector<std::int64_t> c(m + 1, 0);
  for (unsigned i = k + 1; i <= m; ++i) {
    for (unsigned j = 0; j <= m - i; ++j) {
      const std::int64_t term = binom[m][i] * binom[m - i][j];
      c[i + j] += (j % 2 == 0) ? term : -term;
    }
  }
  std::vector<double> coeffs(c.begin(), c.end());
  Polynomial f(std::move(coeffs));
  const ModelTag tag = k == 1 ? ModelTag::kBo3 : ModelTag::kGeneric;
  return make_rule(k == 1 ? "bo3" : "best-of-" + std::to_string(m), f, f,
                   Sampler{Sampler::Kind::kMajority, m}, tag);
}

VotingRule rule_from_name(const std::string& name) {
  if (name == "bo3" || name == "best-of-3") return make_rule_bo3();
  if (name == "bo2") return make_rule_bo2();
  const std::string prefix = "best-of-";
  if (name.rfind(prefix, 0) == 0) {
    const std::string digits = name.substr(prefix.size());
    if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos &&
        digits.size() <= 3) {
      const unsigned m = static_cast<unsigned>(std::stoul(digits));
      if (m % 2 == 1 && m >= 3) return make_rule_best_of((m - 1) / 2);
    }
  }
  throw std::invalid_argument("unknown rule: " + name);
}

}  // namespace votedyn
