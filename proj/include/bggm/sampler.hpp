#pragma once

// Systematic-scan Metropolis-within-Gibbs sampler for the two-class model.
//
// One sweep visits, in order: every edge (i < j, lexicographic), every S_i,
// both class means, the q / pi probabilities, and the unknown labels. Edge
// updates move (A1_ij, A2_ij, R1_ij, R2_ij) jointly: the selection pair is
// drawn from the coupled Bernoulli prior, active R entries from the uniform
// prior on their admissible interval, so the acceptance ratio reduces to the
// two-class likelihood ratio (zero when a proposal leaves the PD cone).

#include "bggm/model.hpp"
#include "bggm/rng.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace bggm {

enum class RProposal : std::uint8_t { prior_uniform, random_walk };

struct ChainConfig {
  std::size_t iterations = 5000;
  std::size_t burn_in = 1000;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  RProposal r_proposal = RProposal::prior_uniform;
  double r_step = 0.1;         // random-walk sd for active R entries
  /// After each joint edge move, random-walk the R entry of every class in
  /// which the edge is active (A held fixed).
  bool refine_active_edges = true;
  double s_proposal_sd = 0.3;  // log-scale random walk for S
  bool check_invariants = true;

  std::size_t retained() const { return (iterations - burn_in) / thin; }
  void validate() const;
};

/// Retained part of one state.
struct Draw {
  std::array<Matrix, 2> a;
  std::array<Matrix, 2> r;
  Matrix lambda;
  std::array<Vector, 2> s;
  std::array<Vector, 2> mu;
  std::vector<ClassLabel> z_u;
};

struct UpdateCounter {
  std::uint64_t attempted = 0;
  std::uint64_t accepted = 0;
  std::uint64_t infeasible = 0;  // auto-rejected: empty interval or PD violation

  double rate() const { return attempted == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(attempted); }
};

struct AcceptanceStats {
  UpdateCounter edge;
  UpdateCounter s;
  UpdateCounter refine;
};

struct ChainSamples {
  std::vector<Draw> draws;
  AcceptanceStats acceptance;
  ChainConfig config;
  std::vector<std::string> names;
  std::vector<Index> unknown_rows;  // dataset rows behind z_u, in order
  std::size_t invariant_violations = 0;
};

/// Starting state. Empty graphs, R from the shrunk empirical partial
/// correlations, S = 1 / (class sample sd) (the precision diagonal of the
/// empty graph), class means,
/// q and pi at prior means, unknowns assigned to the nearest class mean.
/// A dataset with zero rows gives a prior-only start (R = I, S = 1, mu = mu0).
/// Throws ValidationError when a class has fewer than 2 labeled samples.
ChainState init_state(const Dataset& d, const Hyperparameters& h, std::uint64_t seed);

/// mu0 replaced by labeled class means when h.center_mu0 is set.
Hyperparameters resolve_hyperparameters(Hyperparameters h, const Dataset& d);

/// Owns a chain state plus the per-class caches the updates need
/// (C = A .* R, log det C, scatter about mu, class membership).
class Sampler {
 public:
  Sampler(const Dataset& d, Hyperparameters h, ChainConfig cfg, ChainState st);

  void update_edge(Index i, Index j, Rng& rng);
  /// Within-model move on R_ij for classes where A_ij = 1.
  void refine_edge_value(Index i, Index j, Rng& rng);
  void update_s(Index i, Rng& rng);
  void update_mu(Rng& rng);
  void update_q_pi(Rng& rng);
  void update_labels(Rng& rng);

  /// One full sweep in the fixed order.
  void sweep(Rng& rng);

  const ChainState& state() const { return st_; }
  const AcceptanceStats& acceptance() const { return acc_; }
  const Hyperparameters& hyperparameters() const { return h_; }

  /// Class-1 probability of each unknown sample from the last label update.
  const Vector& last_label_probabilities() const { return label_prob_; }

  /// Rows currently assigned to class k (labeled plus unknowns with z = k).
  Index class_size(std::size_t k) const { return static_cast<Index>(members_[k].size()); }

  /// Sum over members of log N(y | mu_k, Omega_k), both classes.
  double log_likelihood() const;

  Precision precision(std::size_t k) const;

  /// Throws NumericalError if the state stops being finite.
  void check_finite() const;

 private:
  void refresh_membership();
  void refresh_scatter(std::size_t k);
  void refresh_correlation(std::size_t k);

  const Dataset& d_;
  Hyperparameters h_;
  ChainConfig cfg_;
  ChainState st_;
  std::vector<Index> unknown_rows_;
  std::array<std::vector<Index>, 2> members_;
  std::array<Matrix, 2> c_;
  std::array<double, 2> log_det_c_{};
  std::array<Matrix, 2> scatter_;
  Vector label_prob_;
  AcceptanceStats acc_;
};

/// Burn-in, then keeps every `thin`-th sweep. Deterministic given cfg.seed.
/// Throws NumericalError (message carries the serialized state) on a
/// non-finite state.
ChainSamples run_chain(const Dataset& d, const Hyperparameters& h, const ChainConfig& cfg);

}  // namespace bggm
