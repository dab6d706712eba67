#pragma once
// Pointwise algebra of the second fundamental form of an n-dimensional
// submanifold with q-dimensional normal bundle, in orthonormal frames.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace hypermcf {

/// Components h^alpha_ij, one symmetric n x n block per normal direction.
class SecondFundamentalForm {
 public:
  /// Zero tensor.
  SecondFundamentalForm(int n, int q);
  /// Blocks are symmetrised on construction; all must be square and equal-sized.
  explicit SecondFundamentalForm(std::vector<Eigen::MatrixXd> blocks);

  /// Hypersurface-type tensor diag(principal) in the first normal direction.
  static SecondFundamentalForm diagonal(const std::vector<double>& principal, int q = 1);
  /// (1/n) g (x) H for the given mean curvature vector.
  static SecondFundamentalForm umbilic(int n, const Eigen::VectorXd& mean_curvature);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] int q() const { return static_cast<int>(blocks_.size()); }
  [[nodiscard]] const Eigen::MatrixXd& block(int alpha) const { return blocks_[static_cast<std::size_t>(alpha)]; }
  [[nodiscard]] const std::vector<Eigen::MatrixXd>& blocks() const { return blocks_; }

  /// H^alpha = trace of block alpha.
  [[nodiscard]] Eigen::VectorXd mean_curvature() const;
  [[nodiscard]] double norm_sq() const;       // |h|^2
  [[nodiscard]] double mean_norm_sq() const;  // |H|^2
  /// |ho|^2 computed from the traceless blocks (not by subtraction).
  [[nodiscard]] double traceless_norm_sq() const;
  [[nodiscard]] SecondFundamentalForm traceless() const;

  /// Change of frames: tangent basis columns `tangent`, normal basis columns `normal`
  /// (both orthogonal). Entry (alpha, i, j) of the result is
  /// sum_beta normal(beta, alpha) (tangent^T h^beta tangent)_ij.
  [[nodiscard]] SecondFundamentalForm rotated(const Eigen::MatrixXd& tangent, const Eigen::MatrixXd& normal) const;

 private:
  int n_;
  std::vector<Eigen::MatrixXd> blocks_;
};

/// Tensor expressed in a frame with nu_1 = H/|H| and h^1 diagonal.
struct SpecialFrameDecomposition {
  Eigen::VectorXd lambda_ring;                // h^1_ii - |H|/n, descending
  std::vector<Eigen::MatrixXd> offdiag_blocks;  // ho^alpha = h^alpha for alpha >= 2
  double mean_norm = 0;                       // |H|
  Eigen::MatrixXd tangent_frame;              // columns e_i in the input frame
  Eigen::MatrixXd normal_frame;               // columns nu_alpha in the input frame
};

/// Throws DegenerateFrameError when H = 0.
[[nodiscard]] SpecialFrameDecomposition special_frame(const SecondFundamentalForm& h);

/// P1 = sum lambda_ring^2, Q1/Q2 = diagonal/off-diagonal squares of the alpha >= 2 blocks.
struct PQSplit {
  double P1 = 0;
  double Q1 = 0;
  double Q2 = 0;
  [[nodiscard]] double P2() const { return Q1 + Q2; }
};
[[nodiscard]] PQSplit pq_split(const SpecialFrameDecomposition& d);

[[nodiscard]] double gradient_invariant_R1(const SecondFundamentalForm& h);
[[nodiscard]] double gradient_invariant_R2(const SecondFundamentalForm& h);
/// W = nc|ho|^2 - R1 + sum H^a h^a_ik h^b_ij h^b_jk.
[[nodiscard]] double gradient_invariant_W(const SecondFundamentalForm& h, double c);

/// max(1, |h|^2)^(degree/2): tolerance scale for a check of polynomial degree `degree`.
[[nodiscard]] double tolerance_scale(const SecondFundamentalForm& h, int degree);

/// Signed margins (bound - value) of the frame-adapted estimates, and the residuals
/// of the two exact identities for R2.
struct Section2Margins {
  double cauchy_schwarz_p1q1 = 0;  // P1 Q1 - sum_{a>1} (sum_i lr_i ho^a_ii)^2
  double offdiag_2p1q2 = 0;        // 2 P1 Q2 - sum ((lr_i - lr_j) ho^a_ij)^2
  double normal_block_p2 = 0;      // (3/2) P2^2 - (normal-block quartic)
  double r1_minus_r2 = 0;          // Lemma-type bound on R1 - R2/n
  double r2_identity_residual = 0; // R2 - (|ho|^2|H|^2 + |H|^4/n - P2|H|^2)
  double r2_frame_residual = 0;    // R2 - |H|^2 (P1 + |H|^2/n)
  double scale = 1;                // max(1, |h|^2)^2
};
[[nodiscard]] Section2Margins inequality_suite_section2(const SecondFundamentalForm& h);

struct CubicBoundResult {
  double margin = 0;      // (n-2)/sqrt(n(n-1)) |a| |b|^2 - |sum a_i b_i^2|
  bool equality = false;  // |a| = 0, |b| = 0, or n-1 of the pairs (a_i, b_i) coincide
  double scale = 1;       // max(1,|a|) max(1,|b|^2)
};
/// Requires sum a = sum b = 0 (to 1e-12 of the norm); throws PreconditionError otherwise.
[[nodiscard]] CubicBoundResult cubic_bound(std::span<const double> a, std::span<const double> b);

/// W - (eps/4)|H|^2|ho|^2. Throws PreconditionError outside the pinched regime.
[[nodiscard]] double W_lower_bound_check(const SecondFundamentalForm& h, double c, double eps);

/// Ricci tensor (n-1)c g + sum_a (H^a h^a - h^a h^a) in the frame of `h`.
[[nodiscard]] Eigen::MatrixXd ricci_tensor(const SecondFundamentalForm& h, double c);
/// Diagonal Ricci values in the special frame (input frame when H = 0).
[[nodiscard]] Eigen::VectorXd ricci_exact(const SecondFundamentalForm& h, double c);
/// Smallest eigenvalue of the Ricci tensor, i.e. min Ric(X) over unit X.
[[nodiscard]] double ricci_min(const SecondFundamentalForm& h, double c);

struct RicciBoundMargins {
  double bound_margin = 0;  // min Ric - (n-1)/n (nc + 2|H|^2/n - |h|^2 - (n-2)/sqrt(n(n-1)) |H||ho|)
  double final_margin = 0;  // min Ric - (n-1)/(4n) eps |H|^2
};
/// Throws PreconditionError outside the pinched regime.
[[nodiscard]] RicciBoundMargins ricci_bound_check(const SecondFundamentalForm& h, double c, double eps);

/// Zeroth-order reaction terms of the evolution of |h|^2, |H|^2 and |ho|^2.
struct ReactionTerms {
  double r_h = 0;   // 2R1 + 4c|H|^2 - 2nc|h|^2
  double r_H = 0;   // 2R2 + 2nc|H|^2
  double r_ho = 0;  // 2R1 - (2/n)R2 - 2nc|ho|^2
};
[[nodiscard]] ReactionTerms reaction_terms(const SecondFundamentalForm& h, double c);

/// True when |H|^2 > -n^2 c and |ho|^2 <= alpha_ring(|H|^2) - eps omega up to round-off.
[[nodiscard]] bool in_pinched_regime(const SecondFundamentalForm& h, double c, double eps);

// --- random tensors -------------------------------------------------------------

using Rng = std::mt19937_64;

/// i.i.d. standard normal entries, symmetrised.
[[nodiscard]] SecondFundamentalForm random_tensor(int n, int q, Rng& rng);
/// Haar-distributed orthogonal matrix.
[[nodiscard]] Eigen::MatrixXd random_orthogonal(int dim, Rng& rng);

/// Deterministic sample from the strict pinched set
/// { |H|^2 > -n^2 c, |ho|^2 < alpha_ring(|H|^2) - eps omega(|H|^2) }.
/// Throws SamplerError when that set is empty on the sampling range.
[[nodiscard]] SecondFundamentalForm random_pinched_sampler(int n, int q, double c, double eps, std::uint64_t seed);
[[nodiscard]] SecondFundamentalForm random_pinched_sample(int n, int q, double c, double eps, Rng& rng);

/// Seed of shard `index` derived from a base seed (splitmix64 step).
[[nodiscard]] std::uint64_t shard_seed(std::uint64_t base, std::uint64_t index);

}  // namespace hypermcf
