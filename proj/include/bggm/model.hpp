#pragma once

#include "bggm/pdcore.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bggm {

enum class ClassLabel : std::uint8_t { class1 = 0, class2 = 1, unknown = 2 };

inline constexpr std::size_t class_index(ClassLabel c) { return static_cast<std::size_t>(c); }
inline constexpr ClassLabel class_from_index(std::size_t k) { return k == 0 ? ClassLabel::class1 : ClassLabel::class2; }
std::string_view to_string(ClassLabel c);

/// Samples in rows, proteins in columns.
struct Dataset {
  Matrix y;
  std::vector<ClassLabel> labels;
  std::vector<std::string> names;

  Index n() const { return y.rows(); }
  Index p() const { return y.cols(); }

  std::vector<Index> rows_with(ClassLabel c) const;

  /// Shape, finiteness and name checks. With `for_fit`, also requires n >= 2
  /// and at least one labeled sample per class. Throws ValidationError.
  void validate(bool for_fit) const;
};

struct Hyperparameters {
  /// Beta(a, b) prior on q_ij per class.
  std::array<Matrix, 2> edge_a;
  std::array<Matrix, 2> edge_b;
  /// Beta(e, f) prior on pi_ij.
  Matrix diff_e;
  Matrix diff_f;
  /// IG(shape, scale) prior on each S_i: density ∝ x^{-(shape+1)} exp(-scale/x).
  double s_shape = 1.0;
  double s_scale = 1.0;
  /// Beta(eta, zeta) prior on each unknown sample's class-1 probability.
  double label_eta = 2.0;
  double label_zeta = 2.0;
  std::array<Vector, 2> mu0;
  std::array<Matrix, 2> b0;
  /// Replace mu0 by per-class labeled means when a chain starts.
  bool center_mu0 = true;

  Index p() const { return diff_e.rows(); }
  void validate() const;
};

/// Beta(2,2) edge priors, (g,h) = (1,1), (eta,zeta) = (2,2), B0 = 1e-2 I.
Hyperparameters default_hyperparameters(Index p);

enum class Evidence : std::uint8_t { important, unimportant, none };
enum class EdgeScope : std::uint8_t { class1, class2, both };

struct PriorEdge {
  std::string protein_i;
  std::string protein_j;
  Evidence evidence = Evidence::none;
  EdgeScope scope = EdgeScope::both;
};

struct PriorNetwork {
  std::vector<PriorEdge> edges;

  /// Names must resolve, no self-edges, no repeated unordered pair.
  void validate(const std::vector<std::string>& names) const;
};

/// important -> Beta(10, 2), unimportant -> Beta(2, 10), none -> Beta(2, 2),
/// written to the classes named by each edge's scope.
Hyperparameters apply_prior_network(Hyperparameters h, const PriorNetwork& net,
                                    const std::vector<std::string>& names);

struct ClassState {
  Matrix a;   // selection, binary with unit diagonal
  Matrix r;   // correlation-role values
  Vector s;   // inverse partial standard deviations
  Vector mu;
  Matrix q;   // edge inclusion probabilities
};

struct ChainState {
  std::array<ClassState, 2> cls;
  Matrix lambda;                  // differential-edge indicators (upper triangle meaningful)
  Matrix pi;                      // differential-edge probabilities
  Vector h;                       // per unknown sample class-1 probability
  std::vector<ClassLabel> z_u;    // current labels of unknown samples

  Index p() const { return lambda.rows(); }
};

struct Violation {
  std::string code;
  std::string detail;
};

/// Every broken ChainState invariant. Empty means the state is valid.
std::vector<Violation> validate_state(const ChainState& st);

std::string serialize_state(const ChainState& st);
ChainState deserialize_state(std::string_view text);

}  // namespace bggm
