#include "tdmass/fock.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "tdmass/errors.hpp"

namespace tdmass::fock {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

Eigen::MatrixXd real_lowering(int dim) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

bool couples_parity_sectors(const Operator& h) {
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    for (Eigen::Index i = (j + 1) % 2; i < h.rows(); i += 2) {
      if (h(i, j) != 0.0) return true;
    }
  }
  return false;
}

Eigen::VectorXcd phase_factors(const Eigen::VectorXd& values, double t) {
  return values.unaryExpr([t](double v) { return std::polar(1.0, t * v); });
}

nlohmann::json check_parameters(double rho, double rho_dot, const CheckOptions& opt) {
  return {{"rho", rho},
          {"rho_dot", rho_dot},
          {"dim", opt.dim},
          {"working_dim", opt.working_dim()},
          {"sign", opt.sign == ShearSign::Appendix ? "appendix" : "main_text"}};
}

}  // namespace

Quadratures build_quadratures(int dim) {
  if (dim < 8) throw DomainError("number basis needs dim >= 8");
  const Eigen::MatrixXd a = real_lowering(dim);
  Quadratures out;
  out.a = a.cast<cd>();
  out.a_dag = a.transpose().cast<cd>();
  out.q = (out.a + out.a_dag) / std::sqrt(2.0);
  out.p = (out.a - out.a_dag) / (I * std::sqrt(2.0));
  return out;
}

Operator matrix_exp(const Operator& m) {
  if (!m.allFinite()) throw std::overflow_error("matrix_exp: non-finite input");
  Operator out = m.exp();
  if (!out.allFinite()) throw std::overflow_error("matrix_exp: scaling and squaring overflowed");
  return out;
}

HermitianSpectrum::HermitianSpectrum(const Operator& h) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n) throw ShapeError("HermitianSpectrum: matrix must be square");
  split_ = n > 1 && !couples_parity_sectors(h);
  if (!split_) {
    Eigen::SelfAdjointEigenSolver<Operator> es(h);
    values_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
    return;
  }

  std::vector<Eigen::Index> even, odd;
  for (Eigen::Index i = 0; i < n; ++i) (i % 2 == 0 ? even : odd).push_back(i);
  const auto ne = static_cast<Eigen::Index>(even.size());
  const auto no = static_cast<Eigen::Index>(odd.size());

  Eigen::SelfAdjointEigenSolver<Operator> es_even(Operator(h(even, even)));
  Eigen::SelfAdjointEigenSolver<Operator> es_odd(Operator(h(odd, odd)));
  values_.resize(n);
  values_ << es_even.eigenvalues(), es_odd.eigenvalues();
  vectors_ = Operator::Zero(n, n);
  for (Eigen::Index r = 0; r < ne; ++r) vectors_.row(even[r]).head(ne) = es_even.eigenvectors().row(r);
  for (Eigen::Index r = 0; r < no; ++r) vectors_.row(odd[r]).tail(no) = es_odd.eigenvectors().row(r);
}

Operator HermitianSpectrum::exp_block(double t, Eigen::Index rows, Eigen::Index cols) const {
  const Eigen::VectorXcd ph = phase_factors(values_, t);
  return vectors_.topRows(rows) * ph.asDiagonal() * vectors_.topRows(cols).adjoint();
}

Operator HermitianSpectrum::right_multiply(const Operator& m, double t) const {
  const Eigen::VectorXcd ph = phase_factors(values_, t);
  const Operator mv = m * vectors_;
  return (mv * ph.asDiagonal()) * vectors_.adjoint();
}

Vector HermitianSpectrum::apply(double t, const Vector& v) const {
  const Eigen::VectorXcd ph = phase_factors(values_, t);
  return vectors_ * ph.cwiseProduct(vectors_.adjoint() * v);
}

Operator expi_hermitian(const Operator& h, double t) { return HermitianSpectrum(h).exp(t); }

Vector coherent_vector(std::complex<double> alpha, int dim) {
  if (!(std::norm(alpha) < dim / 4.0)) {
    throw DomainError("coherent_vector: |alpha|^2 must stay below dim/4");
  }
  Vector v(dim);
  v[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) v[n] = v[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  return v / v.norm();
}

GaussianStated moments(const Vector& v, const Quadratures& ops) {
  const double weight = v.squaredNorm();
  const Vector qv = ops.q * v;
  const Vector pv = ops.p * v;
  const double mq = v.dot(qv).real() / weight;
  const double mp = v.dot(pv).real() / weight;
  GaussianStated s;
  s.mean << mq, mp;
  const double qq = qv.squaredNorm() / weight - mq * mq;
  const double pp = pv.squaredNorm() / weight - mp * mp;
  const double qp = qv.dot(pv).real() / weight - mq * mp;
  s.cov << qq, qp, qp, pp;
  return s;
}

Workspace::Workspace(const CheckOptions& opt)
    : opt_(opt),
      ops_(build_quadratures(opt.working_dim())),
      q2_([&] {
        const Eigen::MatrixXd a = real_lowering(opt.working_dim());
        const Eigen::MatrixXd q = (a + a.transpose()) / std::sqrt(2.0);
        return Operator((q * q).cast<cd>());
      }()),
      p2_([&] {
        // p = i Pt with Pt = (a^T - a)/sqrt(2) real, so p^2 = -Pt^2.
        const Eigen::MatrixXd a = real_lowering(opt.working_dim());
        const Eigen::MatrixXd pt = (a.transpose() - a) / std::sqrt(2.0);
        return Operator((-(pt * pt)).cast<cd>());
      }()),
      g_([&] {
        const Eigen::MatrixXd a = real_lowering(opt.working_dim());
        const Eigen::MatrixXd q = (a + a.transpose()) / std::sqrt(2.0);
        const Eigen::MatrixXd pt = (a.transpose() - a) / std::sqrt(2.0);
        return Operator(I * (q * pt + pt * q).cast<cd>());
      }()),
      q2_spec_(q2_),
      g_spec_(g_) {
  if (opt.guard < 0 || opt.guard >= opt.dim) throw DomainError("guard must lie in [0, dim)");
  if (opt.padding < 1) throw DomainError("padding must be >= 1");
}

Operator Workspace::t_rows(double rho, double rho_dot, Eigen::Index rows) const {
  const Eigen::Index w = q2_.rows();
  const Operator dil = g_spec_.exp_block(0.5 * std::log(rho), rows, w);
  return q2_spec_.right_multiply(dil, -rho_dot / (2.0 * rho));
}

CheckResult check_bch(double rho, double rho_dot, const Workspace& ws) {
  if (!(rho > 0.0)) throw DomainError("check_bch: rho must be positive");
  const CheckOptions& opt = ws.options();
  const int blk = opt.trusted_block();
  const Eigen::Index w = opt.working_dim();
  const double s = std::log(rho);

  // q^2 weight of the single exponent, (ln rho / 2) * 2 rho rho'/(1 - rho^2),
  // continued to its limit -rho'/2 at rho = 1.
  double q2_weight = rho == 1.0 ? -0.5 * rho_dot : s * rho * rho_dot / (1.0 - rho * rho);
  if (opt.sign == ShearSign::MainText) q2_weight = -q2_weight;

  const Operator combined = 0.5 * s * ws.dilation_generator() + q2_weight * ws.q_squared();
  const Operator lhs = HermitianSpectrum(combined).exp_block(1.0, blk, blk);
  const Operator rhs = ws.dilation_spectrum().exp_block(0.5 * s, blk, w) *
                       ws.q_squared_spectrum().exp_block(-rho_dot / (2.0 * rho), w, blk);

  CheckResult r;
  r.check = "bch_factorization";
  r.parameters = check_parameters(rho, rho_dot, opt);
  r.discrepancy = (lhs - rhs).cwiseAbs().maxCoeff();
  r.tolerance = opt.bch_tolerance;
  r.trusted_block = blk;
  r.pass = r.discrepancy < r.tolerance;
  return r;
}

CheckResult check_bch(double rho, double rho_dot, const CheckOptions& opt) {
  return check_bch(rho, rho_dot, Workspace(opt));
}

CheckResult check_invariant_similarity(double rho, double rho_dot, const Workspace& ws) {
  if (!(rho > 0.0)) throw DomainError("check_invariant_similarity: rho must be positive");
  const CheckOptions& opt = ws.options();
  const int blk = opt.trusted_block();

  // (rho p - rho' q)^2 = rho^2 p^2 + rho'^2 q^2 - rho rho' (qp + pq)
  const Operator invariant =
      0.5 * (ws.q_squared() / (rho * rho) + rho * rho * ws.p_squared() +
             rho_dot * rho_dot * ws.q_squared() - rho * rho_dot * ws.dilation_generator());
  const Operator t = ws.t_rows(rho, rho_dot, blk);
  const Operator mapped = (t * invariant) * t.adjoint();
  const Operator h0 =
      0.5 * (ws.p_squared().topLeftCorner(blk, blk) + ws.q_squared().topLeftCorner(blk, blk));

  CheckResult r;
  r.check = "invariant_similarity";
  r.parameters = check_parameters(rho, rho_dot, opt);
  r.parameters.erase("sign");
  r.discrepancy = (mapped - h0).cwiseAbs().maxCoeff();
  r.tolerance = opt.similarity_tolerance;
  r.trusted_block = blk;
  r.pass = r.discrepancy < r.tolerance;
  return r;
}

CheckResult check_invariant_similarity(double rho, double rho_dot, const CheckOptions& opt) {
  return check_invariant_similarity(rho, rho_dot, Workspace(opt));
}

FourierConventionReport fourier_convention(int dim) {
  const Quadratures ops = build_quadratures(dim);
  const Operator h = ops.p * ops.p + ops.q * ops.q;
  const Operator f =
      matrix_exp(-I * (std::numbers::pi / 4.0) * h) * std::polar(1.0, std::numbers::pi / 4.0);

  auto overlap = [](const Vector& a, const Vector& b) { return std::norm(a.dot(b)); };

  FourierConventionReport rep;
  const Vector vac = coherent_vector(0.0, dim);
  rep.vacuum_overlap = overlap(vac, f * vac);
  const Vector one = coherent_vector(1.0, dim);
  rep.parity_overlap = overlap(coherent_vector(-1.0, dim), f * (f * one));

  int minus = 0, plus = 0;
  for (const cd alpha : {cd(1, 0), cd(0, 1), cd(1, 1)}) {
    const Vector image = f * coherent_vector(alpha, dim);
    ConventionProbe probe{alpha, overlap(coherent_vector(-I * alpha, dim), image),
                          overlap(coherent_vector(I * alpha, dim), image)};
    constexpr double threshold = 1.0 - 1e-8;
    if (probe.overlap_minus_i > threshold && probe.overlap_plus_i < threshold) ++minus;
    if (probe.overlap_plus_i > threshold && probe.overlap_minus_i < threshold) ++plus;
    rep.probes.push_back(probe);
  }
  if (minus == 3) rep.sign = -1;
  if (plus == 3) rep.sign = +1;
  return rep;
}

}  // namespace tdmass::fock
