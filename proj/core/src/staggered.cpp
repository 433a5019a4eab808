#include "pff/staggered.hpp"

#include <sstream>

#include "pff/errors.hpp"

namespace pff {

std::string_view to_string(Irreversibility i) {
  return i == Irreversibility::ReducedSpace ? "reduced-space" : "penalty";
}

Irreversibility parse_irreversibility(std::string_view text) {
  if (text == "reduced-space") return Irreversibility::ReducedSpace;
  if (text == "penalty") return Irreversibility::Penalty;
  throw ConfigError("unknown irreversibility method '" + std::string(text) + "' (expected reduced-space or penalty)");
}

void StaggeredSettings::validate() const {
  std::vector<std::string> problems;
  if (!(tol > 0.0)) problems.emplace_back("tol_staggered must be positive");
  if (max_iter < 1) problems.emplace_back("max_staggered must be >= 1");
  if (!(penalty.tol_ir > 0.0 && penalty.tol_ir < 1.0)) problems.emplace_back("tol_ir must lie in (0, 1)");
  if (!problems.empty()) {
    std::ostringstream os;
    os << "invalid staggered settings:";
    for (const auto& p : problems) os << "\n  " << p;
    throw ConfigError(os.str());
  }
  newton.validate();
  ls_mechanical.validate();
  ls_damage.validate();
}

bool damage_may_be_indefinite(const MaterialModel& m) {
  return m.split == SplitKind::StarConvex && m.gamma_star > 0.0;
}

StaggeredResult alternate_minimization(const Assembler& assembler, State& state, const StaggeredSettings& settings,
                                       const NewtonObserver& mechanical_observer) {
  StaggeredResult result;
  const bool penalized = settings.irreversibility == Irreversibility::Penalty;
  const PenaltySettings* penalty = penalized ? &settings.penalty : nullptr;
  const DofMap& amap = assembler.constraints().alpha;

  NewtonSettings damage_settings = settings.newton;
  damage_settings.allow_indefinite = settings.newton.allow_indefinite || damage_may_be_indefinite(assembler.material());

  Bounds bounds;
  bounds.lower = amap.restrict(state.alpha_prev);
  bounds.upper = Eigen::VectorXd::Ones(amap.num_free());
  bounds.tol = settings.newton.active_set_tol;

  MechanicalProblem mech(assembler, state);
  DamageProblem damage(assembler, state, penalty);

  double energy_prev = assembler.energy(state, penalty);
  result.initial_energy = energy_prev;
  int cum_u = 0, cum_alpha = 0;

  auto fail = [&](std::string_view cause, const std::string& message) {
    result.failure_cause = std::string(cause);
    result.message = message;
    return result;
  };

  for (int i = 1; i <= settings.max_iter; ++i) {
    std::string_view phase = failure::kMechanical;
    try {
      Eigen::VectorXd u = mech.current();
      NewtonReport mr = newton_solve(mech, u, settings.newton, settings.ls_mechanical, mechanical_observer);
      mech.commit(u);
      cum_u += mr.iterations;
      const bool mech_ok = mr.converged;
      const bool stopped = mr.stopped;
      result.mechanical.push_back(std::move(mr));
      if (stopped) return fail(failure::kMechanical, "stopped by observer");
      if (!mech_ok) {
        std::ostringstream os;
        os << "mechanical Newton solve did not converge in staggered iteration " << i;
        return fail(failure::kMechanical, os.str());
      }
      const double energy_mid = assembler.energy(state, penalty);

      phase = failure::kDamage;
      const Eigen::VectorXd alpha_old = state.alpha;
      Eigen::VectorXd a = damage.current();
      NewtonReport dr = penalized ? newton_solve(damage, a, damage_settings, settings.ls_damage)
                                  : reduced_space_newton(damage, a, bounds, damage_settings, settings.ls_damage);
      damage.commit(a);
      cum_alpha += dr.iterations;
      const bool damage_ok = dr.converged;
      result.damage.push_back(std::move(dr));
      if (!damage_ok) {
        std::ostringstream os;
        os << "damage Newton solve did not converge in staggered iteration " << i;
        return fail(failure::kDamage, os.str());
      }

      StaggeredIterate it;
      it.iteration = i;
      it.cum_newton_u = cum_u;
      it.cum_newton_alpha = cum_alpha;
      it.res_u_norm = assembler.residual_u(state).norm();
      it.dalpha_norm = assembler.l2_norm(state.alpha - alpha_old);
      it.energy = assembler.energy(state, penalty);
      it.energy_mid = energy_mid;
      it.denergy = energy_prev - it.energy;
      energy_prev = it.energy;
      result.path.push_back(it);
      if (it.res_u_norm <= settings.tol) {
        result.converged = true;
        return result;
      }
    } catch (const IndefiniteMatrixError& e) {
      return fail(failure::kIndefinite, std::string(phase) + ": " + e.what());
    } catch (const NotDescentError& e) {
      return fail(failure::kNotDescent, std::string(phase) + ": " + e.what());
    } catch (const AssemblyError& e) {
      return fail(failure::kAssembly, std::string(phase) + ": " + e.what());
    }
  }
  return fail(failure::kStaggeredCap, "staggered iteration cap reached");
}

}  // namespace pff
