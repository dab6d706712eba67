#include "hypermcf/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "hypermcf/errors.hpp"
#include "hypermcf/profiles.hpp"

namespace hypermcf {

SecondFundamentalForm::SecondFundamentalForm(int n, int q) : n_(n) {
  if (n < 2) throw ConfigError("second fundamental form needs n >= 2");
  if (q < 1) throw ConfigError("second fundamental form needs q >= 1");
  blocks_.assign(static_cast<std::size_t>(q), Eigen::MatrixXd::Zero(n, n));
}

SecondFundamentalForm::SecondFundamentalForm(std::vector<Eigen::MatrixXd> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw ConfigError("second fundamental form needs q >= 1");
  n_ = static_cast<int>(blocks_.front().rows());
  if (n_ < 2) throw ConfigError("second fundamental form needs n >= 2");
  for (auto& b : blocks_) {
    if (b.rows() != n_ || b.cols() != n_) throw ConfigError("second fundamental form blocks must be n x n");
    b = 0.5 * (b + b.transpose()).eval();
  }
}

SecondFundamentalForm SecondFundamentalForm::diagonal(const std::vector<double>& principal, int q) {
  SecondFundamentalForm h(static_cast<int>(principal.size()), q);
  for (std::size_t i = 0; i < principal.size(); ++i) {
    h.blocks_[0](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = principal[i];
  }
  return h;
}

SecondFundamentalForm SecondFundamentalForm::umbilic(int n, const Eigen::VectorXd& mean_curvature) {
  SecondFundamentalForm h(n, static_cast<int>(mean_curvature.size()));
  for (Eigen::Index a = 0; a < mean_curvature.size(); ++a) {
    h.blocks_[static_cast<std::size_t>(a)] = Eigen::MatrixXd::Identity(n, n) * (mean_curvature[a] / n);
  }
  return h;
}

Eigen::VectorXd SecondFundamentalForm::mean_curvature() const {
  Eigen::VectorXd H(q());
  for (int a = 0; a < q(); ++a) H[a] = block(a).trace();
  return H;
}

double SecondFundamentalForm::norm_sq() const {
  double s = 0;
  for (const auto& b : blocks_) s += b.squaredNorm();
  return s;
}

double SecondFundamentalForm::mean_norm_sq() const { return mean_curvature().squaredNorm(); }

double SecondFundamentalForm::traceless_norm_sq() const { return traceless().norm_sq(); }

SecondFundamentalForm SecondFundamentalForm::traceless() const {
  SecondFundamentalForm out = *this;
  for (auto& b : out.blocks_) b.diagonal().array() -= b.trace() / n_;
  return out;
}

SecondFundamentalForm SecondFundamentalForm::rotated(const Eigen::MatrixXd& tangent,
                                                     const Eigen::MatrixXd& normal) const {
  if (tangent.rows() != n_ || tangent.cols() != n_ || normal.rows() != q() || normal.cols() != q()) {
    throw ConfigError("rotated: frame sizes do not match the tensor");
  }
  std::vector<Eigen::MatrixXd> in(blocks_.size());
  for (std::size_t b = 0; b < blocks_.size(); ++b) in[b] = tangent.transpose() * blocks_[b] * tangent;
  std::vector<Eigen::MatrixXd> out(blocks_.size(), Eigen::MatrixXd::Zero(n_, n_));
  for (int a = 0; a < q(); ++a) {
    for (int b = 0; b < q(); ++b) out[static_cast<std::size_t>(a)] += normal(b, a) * in[static_cast<std::size_t>(b)];
  }
  return SecondFundamentalForm(std::move(out));
}

SpecialFrameDecomposition special_frame(const SecondFundamentalForm& h) {
  const int n = h.n();
  const int q = h.q();
  const Eigen::VectorXd H = h.mean_curvature();
  const double Hn = H.norm();
  if (!(Hn > 1e-14 * std::max(1.0, std::sqrt(h.norm_sq())))) throw DegenerateFrameError();

  // Householder reflection exchanging H/|H| and e_1; its columns are the new normal frame.
  Eigen::MatrixXd normal = Eigen::MatrixXd::Identity(q, q);
  Eigen::VectorXd v = -H / Hn;
  v[0] += 1.0;
  const double vv = v.squaredNorm();
  if (vv > 1e-30) normal -= (2.0 / vv) * v * v.transpose();

  const auto in_normal = h.rotated(Eigen::MatrixXd::Identity(n, n), normal);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(in_normal.block(0));
  const Eigen::VectorXd& values = eig.eigenvalues();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return values[x] > values[y]; });
  Eigen::MatrixXd tangent(n, n);
  for (int k = 0; k < n; ++k) tangent.col(k) = eig.eigenvectors().col(order[static_cast<std::size_t>(k)]);

  const auto full = in_normal.rotated(tangent, Eigen::MatrixXd::Identity(q, q));

  SpecialFrameDecomposition d;
  d.mean_norm = Hn;
  d.lambda_ring.resize(n);
  for (int k = 0; k < n; ++k) d.lambda_ring[k] = values[order[static_cast<std::size_t>(k)]] - Hn / n;
  for (int a = 1; a < q; ++a) d.offdiag_blocks.push_back(full.block(a));
  d.tangent_frame = std::move(tangent);
  d.normal_frame = std::move(normal);
  return d;
}

PQSplit pq_split(const SpecialFrameDecomposition& d) {
  PQSplit s;
  s.P1 = d.lambda_ring.squaredNorm();
  for (const auto& b : d.offdiag_blocks) {
    const double diag = b.diagonal().squaredNorm();
    s.Q1 += diag;
    s.Q2 += b.squaredNorm() - diag;
  }
  return s;
}

namespace {

// sum_{a,b} <h^a, h^b>^2 + sum_{a,b} |h^a h^b - h^b h^a|^2 over the given blocks.
double quartic_block_sum(const std::vector<Eigen::MatrixXd>& blocks) {
  double s = 0;
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const double inner = (blocks[a].array() * blocks[b].array()).sum();
      s += inner * inner;
      if (a != b) s += (blocks[a] * blocks[b] - blocks[b] * blocks[a]).squaredNorm();
    }
  }
  return s;
}

}  // namespace

double gradient_invariant_R1(const SecondFundamentalForm& h) { return quartic_block_sum(h.blocks()); }

double gradient_invariant_R2(const SecondFundamentalForm& h) {
  const Eigen::VectorXd H = h.mean_curvature();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(h.n(), h.n());
  for (int a = 0; a < h.q(); ++a) m += H[a] * h.block(a);
  return m.squaredNorm();
}

double gradient_invariant_W(const SecondFundamentalForm& h, double c) {
  const Eigen::VectorXd H = h.mean_curvature();
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(h.n(), h.n());
  for (const auto& b : h.blocks()) sq += b * b;
  double cubic = 0;
  for (int a = 0; a < h.q(); ++a) cubic += H[a] * (h.block(a).array() * sq.array()).sum();
  return h.n() * c * h.traceless_norm_sq() - gradient_invariant_R1(h) + cubic;
}

double tolerance_scale(const SecondFundamentalForm& h, int degree) {
  return std::pow(std::max(1.0, h.norm_sq()), 0.5 * degree);
}

Section2Margins inequality_suite_section2(const SecondFundamentalForm& h) {
  const int n = h.n();
  const auto d = special_frame(h);
  const auto pq = pq_split(d);
  const double P2 = pq.P2();
  const double ho2 = h.traceless_norm_sq();
  const double H2 = h.mean_norm_sq();
  const double R1 = gradient_invariant_R1(h);
  const double R2 = gradient_invariant_R2(h);
  const auto& lr = d.lambda_ring;

  double cs = 0;
  double off = 0;
  for (const auto& b : d.offdiag_blocks) {
    const double t = lr.dot(b.diagonal());
    cs += t * t;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double e = (lr[i] - lr[j]) * b(i, j);
        off += e * e;
      }
    }
  }

  Section2Margins m;
  m.cauchy_schwarz_p1q1 = pq.P1 * pq.Q1 - cs;
  m.offdiag_2p1q2 = 2.0 * pq.P1 * pq.Q2 - off;
  m.normal_block_p2 = 1.5 * P2 * P2 - quartic_block_sum(d.offdiag_blocks);
  m.r1_minus_r2 = ho2 * ho2 + ho2 * H2 / n + 2.0 * P2 * ho2 - P2 * H2 / n - (R1 - R2 / n);
  m.r2_identity_residual = R2 - (ho2 * H2 + H2 * H2 / n - P2 * H2);
  m.r2_frame_residual = R2 - H2 * (pq.P1 + H2 / n);
  m.scale = tolerance_scale(h, 4);
  return m;
}

CubicBoundResult cubic_bound(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (n < 2 || b.size() != n) throw PreconditionError("cubic_bound: need equal lengths n >= 2");
  double sa = 0, sb = 0, a2 = 0, b2 = 0, cross = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sa += a[i];
    sb += b[i];
    a2 += a[i] * a[i];
    b2 += b[i] * b[i];
    cross += a[i] * b[i] * b[i];
  }
  const double na = std::sqrt(a2);
  const double nb = std::sqrt(b2);
  if (std::abs(sa) > 1e-12 * std::max(1.0, na) * std::sqrt(double(n)) ||
      std::abs(sb) > 1e-12 * std::max(1.0, nb) * std::sqrt(double(n))) {
    throw PreconditionError("cubic_bound: entries must sum to zero");
  }
  const double nd = static_cast<double>(n);
  CubicBoundResult r;
  r.margin = (nd - 2.0) / std::sqrt(nd * (nd - 1.0)) * na * b2 - std::abs(cross);
  r.scale = std::max(1.0, na) * std::max(1.0, b2);

  const double tol_a = 1e-12 * std::max(1.0, na);
  const double tol_b = 1e-12 * std::max(1.0, nb);
  if (na <= tol_a || nb <= tol_b) {
    r.equality = true;
    return r;
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t same = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(a[i] - a[j]) <= tol_a && std::abs(b[i] - b[j]) <= tol_b) ++same;
    }
    best = std::max(best, same);
  }
  r.equality = best + 1 >= n;
  return r;
}

bool in_pinched_regime(const SecondFundamentalForm& h, double c, double eps) {
  const PinchingProfile p(h.n(), c);
  const double H2 = h.mean_norm_sq();
  if (!(H2 > p.regime_boundary())) return false;
  const double bound = p.alpha_ring(H2) - eps * p.omega(H2);
  return h.traceless_norm_sq() <= bound + 1e-10 * std::max(1.0, std::abs(bound));
}

namespace {

void require_pinched(const SecondFundamentalForm& h, double c, double eps, const char* who) {
  if (!in_pinched_regime(h, c, eps)) throw PreconditionError(std::string(who) + ": not in pinched regime");
}

}  // namespace

double W_lower_bound_check(const SecondFundamentalForm& h, double c, double eps) {
  require_pinched(h, c, eps, "W_lower_bound_check");
  return gradient_invariant_W(h, c) - 0.25 * eps * h.mean_norm_sq() * h.traceless_norm_sq();
}

Eigen::MatrixXd ricci_tensor(const SecondFundamentalForm& h, double c) {
  const int n = h.n();
  const Eigen::VectorXd H = h.mean_curvature();
  Eigen::MatrixXd ric = Eigen::MatrixXd::Identity(n, n) * ((n - 1) * c);
  for (int a = 0; a < h.q(); ++a) ric += H[a] * h.block(a) - h.block(a) * h.block(a);
  return ric;
}

Eigen::VectorXd ricci_exact(const SecondFundamentalForm& h, double c) {
  const Eigen::MatrixXd ric = ricci_tensor(h, c);
  if (h.mean_norm_sq() == 0.0) return ric.diagonal();
  const auto d = special_frame(h);
  return (d.tangent_frame.transpose() * ric * d.tangent_frame).diagonal();
}

double ricci_min(const SecondFundamentalForm& h, double c) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ricci_tensor(h, c), Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[0];
}

RicciBoundMargins ricci_bound_check(const SecondFundamentalForm& h, double c, double eps) {
  require_pinched(h, c, eps, "ricci_bound_check");
  const double n = h.n();
  const double H2 = h.mean_norm_sq();
  const double ho2 = h.traceless_norm_sq();
  const double rmin = ricci_min(h, c);
  RicciBoundMargins m;
  m.bound_margin = rmin - (n - 1) / n *
                              (n * c + 2.0 * H2 / n - h.norm_sq() -
                               (n - 2) / std::sqrt(n * (n - 1)) * std::sqrt(H2) * std::sqrt(ho2));
  m.final_margin = rmin - (n - 1) / (4.0 * n) * eps * H2;
  return m;
}

ReactionTerms reaction_terms(const SecondFundamentalForm& h, double c) {
  const double n = h.n();
  const double R1 = gradient_invariant_R1(h);
  const double R2 = gradient_invariant_R2(h);
  const double H2 = h.mean_norm_sq();
  ReactionTerms r;
  r.r_h = 2.0 * R1 + 4.0 * c * H2 - 2.0 * n * c * h.norm_sq();
  r.r_H = 2.0 * R2 + 2.0 * n * c * H2;
  r.r_ho = 2.0 * R1 - (2.0 / n) * R2 - 2.0 * n * c * h.traceless_norm_sq();
  return r;
}

SecondFundamentalForm random_tensor(int n, int q, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Eigen::MatrixXd> blocks(static_cast<std::size_t>(q), Eigen::MatrixXd(n, n));
  for (auto& b : blocks) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) b(i, j) = gauss(rng);
    }
  }
  return SecondFundamentalForm(std::move(blocks));
}

Eigen::MatrixXd random_orthogonal(int dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    if (R(k, k) < 0) Q.col(k) *= -1.0;
  }
  return Q;
}

SecondFundamentalForm random_pinched_sample(int n, int q, double c, double eps, Rng& rng) {
  if (n < 6) throw ConfigError("random_pinched_sampler: n must be >= 6");
  if (q < 1) throw ConfigError("random_pinched_sampler: q must be >= 1");
  if (!(c < 0.0)) throw ConfigError("random_pinched_sampler: c must be negative");
  if (!(eps >= 0.0)) throw ConfigError("random_pinched_sampler: eps must be >= 0");
  const PinchingProfile p(n, c);
  const double lo = p.regime_boundary() * (1.0 + 1e-3);
  const double hi = p.regime_boundary() * 1e4;

  auto room = [&](double y) { return p.alpha_ring(y) - eps * p.omega(y); };
  // alpha_ring/omega increases towards 1/(n(n-1)), so feasibility is decided at the top end.
  if (!(room(hi) > 0.0)) {
    throw SamplerError("random_pinched_sampler: pinched set is empty for eps = " + std::to_string(eps));
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double y = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
    const double budget = room(y);
    if (!(budget > 0.0)) continue;

    std::vector<Eigen::MatrixXd> blocks(static_cast<std::size_t>(q), Eigen::MatrixXd(n, n));
    double norm2 = 0;
    for (auto& b : blocks) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) b(i, j) = gauss(rng);
      }
      b = 0.5 * (b + b.transpose()).eval();
      b.diagonal().array() -= b.trace() / n;
      norm2 += b.squaredNorm();
    }
    const double u = unit(rng);
    const double scale = std::sqrt(u * budget / norm2);
    for (auto& b : blocks) b *= scale;
    blocks[0].diagonal().array() += std::sqrt(y) / n;

    const Eigen::MatrixXd tangent = random_orthogonal(n, rng);
    const Eigen::MatrixXd normal = random_orthogonal(q, rng);
    auto h = SecondFundamentalForm(std::move(blocks)).rotated(tangent, normal);

    const double H2 = h.mean_norm_sq();
    if (H2 > p.regime_boundary() && h.traceless_norm_sq() < p.alpha_ring(H2) - eps * p.omega(H2)) return h;
  }
  throw SamplerError("random_pinched_sampler: rejection sampling did not converge");
}

SecondFundamentalForm random_pinched_sampler(int n, int q, double c, double eps, std::uint64_t seed) {
  Rng rng(seed);
  return random_pinched_sample(n, q, c, eps, rng);
}

std::uint64_t shard_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace hypermcf
