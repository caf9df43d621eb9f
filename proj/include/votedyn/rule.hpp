#pragma once

#include <optional>
#include <string>
#include <vector>

namespace votedyn {

/// Real polynomial with ascending coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  std::size_t degree() const noexcept { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }

  double operator()(double x) const noexcept;
  Polynomial derivative() const;

  bool operator==(const Polynomial&) const = default;

 private:
  std::vector<double> coeffs_;
};

/// Neighbor-sampling procedure equivalent to a rule's polynomials.
struct Sampler {
  enum class Kind { kBestOfTwo, kMajority };
  Kind kind;
  /// Neighbor draws per update: 2 for Best-of-two, 2k+1 for majority rules.
  unsigned draws;

  bool operator==(const Sampler&) const = default;
};

/// Which closed-form analysis applies to a rule.
enum class ModelTag { kBo3, kBo2, kGeneric };

/// (f1, f2)-polynomial voting rule: a vertex holding opinion i adopts opinion
/// 1 next step with probability f_i(deg_A(v) / deg(v)).
struct VotingRule {
  std::string name;
  Polynomial f1;
  Polynomial f2;
  std::optional<Sampler> sampler;
  ModelTag model = ModelTag::kGeneric;
};

/// Validates 0 ≤ f_i ≤ 1 on a 10⁻³ grid of [0,1]; throws std::invalid_argument.
VotingRule make_rule(std::string name, Polynomial f1, Polynomial f2,
                     std::optional<Sampler> sampler = std::nullopt,
                     ModelTag model = ModelTag::kGeneric);

/// Best-of-three: f1 = f2 = 3x² − 2x³.
VotingRule make_rule_bo3();

/// Best-of-two: f1 = 2x − x² (keep unless both samples disagree), f2 = x².
VotingRule make_rule_bo2();

/// Best-of-(2k+1): f1 = f2 = Pr[Bin(2k+1, x) ≥ k+1]. Requires 1 ≤ k ≤ 12.
VotingRule make_rule_best_of(unsigned k);

/// Parses `bo2`, `bo3` or `best-of-K` (K odd, the sample count).
VotingRule rule_from_name(const std::string& name);

}  // namespace votedyn
