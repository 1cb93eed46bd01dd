#include "tdmass/gaussian.hpp"

#include <ostream>

#include "tdmass/errors.hpp"

namespace tdmass {

Eigen::Matrix2d propagator_matrix(const ErmakovSolution& ermakov, double tau) {
  if (ermakov.size() == 0) throw DomainError("empty Ermakov solution");
  const ErmakovPoint now = sample_at(ermakov, tau);
  return t_dagger_matrix(now.rho, now.rho_dot) * rotation_matrix(now.theta) *
         t_matrix(ermakov.rho[0], ermakov.rho_dot[0]);
}

PropagationReport make_report(double tau, const GaussianStated& state, double rho,
                              double rho_dot) {
  const auto sq = squeeze_params(state);
  return {tau,
          state,
          state.var_q(),
          state.var_p(),
          uncertainty_product(state),
          invariant_expectation(state, rho, rho_dot),
          sq.r,
          sq.phi};
}

PropagationReport propagate(const MassProfile& profile, const ErmakovSolution& ermakov, double tau,
                            const GaussianStated& initial) {
  check_domain(profile, tau);
  const ErmakovPoint now = sample_at(ermakov, tau);
  const GaussianStated moved =
      apply_T_dagger(apply_rotation(apply_T(initial, ermakov.rho[0], ermakov.rho_dot[0]), now.theta),
                     now.rho, now.rho_dot);
  return make_report(tau, moved, now.rho, now.rho_dot);
}

void write_csv(std::ostream& os, const std::vector<PropagationReport>& series) {
  const auto old_precision = os.precision(17);
  os << "tau,mean_q,mean_p,var_q,var_p,cov_qp,uncertainty,invariant,r,phi\n";
  for (const auto& r : series) {
    os << r.tau << ',' << r.state.mean[0] << ',' << r.state.mean[1] << ',' << r.var_q << ','
       << r.var_p << ',' << r.state.cov_qp() << ',' << r.uncertainty << ',' << r.invariant << ','
       << r.r << ',' << r.phi << '\n';
  }
  os.precision(old_precision);
}

}  // namespace tdmass
