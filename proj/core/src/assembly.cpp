#include "pff/assembly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include "pff/errors.hpp"

namespace pff {

std::string_view to_string(Field f) {
  switch (f) {
    case Field::Ux: return "ux";
    case Field::Uy: return "uy";
    case Field::Alpha: return "alpha";
  }
  return "unknown";
}

Field parse_field(std::string_view text) {
  if (text == "ux") return Field::Ux;
  if (text == "uy") return Field::Uy;
  if (text == "alpha") return Field::Alpha;
  throw ConfigError("unknown field '" + std::string(text) + "' (expected ux, uy or alpha)");
}

Eigen::VectorXd DofMap::restrict(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(num_free());
  for (int i = 0; i < num_free(); ++i) out[i] = full[free_to_full[i]];
  return out;
}

void DofMap::scatter(const Eigen::VectorXd& free, Eigen::VectorXd& full) const {
  for (int i = 0; i < num_free(); ++i) full[free_to_full[i]] = free[i];
}

State State::zeros(const Mesh& mesh) {
  State s;
  s.u = Eigen::VectorXd::Zero(2 * mesh.num_nodes());
  s.alpha = Eigen::VectorXd::Zero(mesh.num_nodes());
  s.alpha_prev = Eigen::VectorXd::Zero(mesh.num_nodes());
  return s;
}

void State::validate(const Mesh& mesh) const {
  const long n = mesh.num_nodes();
  if (u.size() != 2 * n || alpha.size() != n || alpha_prev.size() != n) {
    throw ConfigError("state vector lengths do not match the mesh");
  }
  for (long i = 0; i < n; ++i) {
    if (!(alpha_prev[i] >= 0.0 && alpha_prev[i] <= 1.0)) {
      throw ConfigError("alpha_prev outside [0, 1] at node " + std::to_string(i));
    }
  }
}

void set_dirichlet_values(const Mesh& mesh, State& state, const std::vector<DirichletCondition>& bcs) {
  for (const auto& bc : bcs) {
    for (int node : mesh.node_set(bc.node_set)) {
      switch (bc.field) {
        case Field::Ux: state.u[2 * node] = bc.value; break;
        case Field::Uy: state.u[2 * node + 1] = bc.value; break;
        case Field::Alpha: state.alpha[node] = bc.value; break;
      }
    }
  }
}

namespace {

DofMap make_map(const std::vector<bool>& fixed) {
  DofMap m;
  m.full_to_free.assign(fixed.size(), -1);
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (!fixed[i]) {
      m.full_to_free[i] = static_cast<int>(m.free_to_full.size());
      m.free_to_full.push_back(static_cast<int>(i));
    }
  }
  return m;
}

}  // namespace

Constraints apply_dirichlet(const Mesh& mesh, State& state, const std::vector<DirichletCondition>& bcs) {
  set_dirichlet_values(mesh, state, bcs);
  std::vector<bool> fixed_u(2 * mesh.num_nodes(), false), fixed_a(mesh.num_nodes(), false);
  for (const auto& bc : bcs) {
    for (int node : mesh.node_set(bc.node_set)) {
      switch (bc.field) {
        case Field::Ux: fixed_u[2 * node] = true; break;
        case Field::Uy: fixed_u[2 * node + 1] = true; break;
        case Field::Alpha: fixed_a[node] = true; break;
      }
    }
  }
  return {make_map(fixed_u), make_map(fixed_a)};
}

int assembly_threads() {
  static const int n = [] {
    if (const char* env = std::getenv("PFF_THREADS")) {
      const int v = std::atoi(env);
      if (v >= 1) return v;
    }
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  }();
  return n;
}

namespace {

// Runs f(e) for every element; results must go to per-element slots so the
// merge afterwards happens in element order regardless of the split.
template <class F>
void for_each_element(int n, F&& f) {
  const int threads = std::min(assembly_threads(), std::max(1, n / 256));
  if (threads <= 1) {
    for (int e = 0; e < n; ++e) f(e);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    const int lo = static_cast<int>(static_cast<long>(n) * t / threads);
    const int hi = static_cast<int>(static_cast<long>(n) * (t + 1) / threads);
    pool.emplace_back([&, t, lo, hi] {
      try {
        for (int e = lo; e < hi; ++e) f(e);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8, Eigen::RowMajor>;
using Mat4 = Eigen::Matrix<double, 4, 4, Eigen::RowMajor>;
using BMat = Eigen::Matrix<double, 3, 8>;

BMat strain_matrix(const QuadPoint& q) {
  BMat b = BMat::Zero();
  for (int a = 0; a < 4; ++a) {
    b(0, 2 * a) = q.dNdx[a];
    b(1, 2 * a + 1) = q.dNdy[a];
    b(2, 2 * a) = q.dNdy[a];
    b(2, 2 * a + 1) = q.dNdx[a];
  }
  return b;
}

struct ElementFields {
  Vec8 u;
  Eigen::Vector4d alpha;
  Eigen::Vector4d alpha_prev;
};

ElementFields gather(const std::array<int, 4>& quad, const State& s) {
  ElementFields f;
  for (int a = 0; a < 4; ++a) {
    f.u[2 * a] = s.u[2 * quad[a]];
    f.u[2 * a + 1] = s.u[2 * quad[a] + 1];
    f.alpha[a] = s.alpha[quad[a]];
    f.alpha_prev[a] = s.alpha_prev[quad[a]];
  }
  return f;
}

struct PointFields {
  SymStrain eps;
  double alpha;
  double alpha_prev;
  double grad_x;
  double grad_y;
};

PointFields interpolate(const QuadPoint& q, const ElementFields& f) {
  PointFields p{};
  Voigt v = Voigt::Zero();
  for (int a = 0; a < 4; ++a) {
    v[0] += q.dNdx[a] * f.u[2 * a];
    v[1] += q.dNdy[a] * f.u[2 * a + 1];
    v[2] += q.dNdy[a] * f.u[2 * a] + q.dNdx[a] * f.u[2 * a + 1];
    p.alpha += q.N[a] * f.alpha[a];
    p.alpha_prev += q.N[a] * f.alpha_prev[a];
    p.grad_x += q.dNdx[a] * f.alpha[a];
    p.grad_y += q.dNdy[a] * f.alpha[a];
  }
  p.eps = from_voigt(v);
  return p;
}

void check_finite(const Eigen::VectorXd& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw AssemblyError(std::string("non-finite ") + what + " entry at DOF " + std::to_string(i),
                          static_cast<int>(i));
    }
  }
}

}  // namespace

Assembler::Assembler(Mesh mesh, MaterialModel material, Constraints constraints)
    : mesh_(std::move(mesh)), material_(material), constraints_(std::move(constraints)) {
  material_.validate();
  mesh_.validate();
  if (constraints_.u.num_full() != 2 * mesh_.num_nodes() || constraints_.alpha.num_full() != mesh_.num_nodes()) {
    throw ConfigError("constraint maps do not match the mesh");
  }

  const double g = 1.0 / std::sqrt(3.0);
  const double gp[4][2] = {{-g, -g}, {g, -g}, {g, g}, {-g, g}};
  qp_.resize(4 * static_cast<std::size_t>(mesh_.num_elements()));
  for (int e = 0; e < mesh_.num_elements(); ++e) {
    const auto& quad = mesh_.quads[e];
    for (int k = 0; k < 4; ++k) {
      const double xi = gp[k][0], eta = gp[k][1];
      const double dxi[4] = {-(1 - eta) / 4, (1 - eta) / 4, (1 + eta) / 4, -(1 + eta) / 4};
      const double deta[4] = {-(1 - xi) / 4, -(1 + xi) / 4, (1 + xi) / 4, (1 - xi) / 4};
      Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
      for (int a = 0; a < 4; ++a) {
        const auto& x = mesh_.nodes[quad[a]];
        J(0, 0) += dxi[a] * x[0];
        J(0, 1) += dxi[a] * x[1];
        J(1, 0) += deta[a] * x[0];
        J(1, 1) += deta[a] * x[1];
      }
      const double det = J.determinant();
      const Eigen::Matrix2d Jinv = J.inverse();
      QuadPoint& q = qp_[4 * e + k];
      q.N[0] = (1 - xi) * (1 - eta) / 4;
      q.N[1] = (1 + xi) * (1 - eta) / 4;
      q.N[2] = (1 + xi) * (1 + eta) / 4;
      q.N[3] = (1 - xi) * (1 + eta) / 4;
      for (int a = 0; a < 4; ++a) {
        q.dNdx[a] = Jinv(0, 0) * dxi[a] + Jinv(0, 1) * deta[a];
        q.dNdy[a] = Jinv(1, 0) * dxi[a] + Jinv(1, 1) * deta[a];
      }
      q.wdetJ = det;
    }
  }

  free_dofs_u_.resize(mesh_.num_elements());
  free_dofs_alpha_.resize(mesh_.num_elements());
  for (int e = 0; e < mesh_.num_elements(); ++e) {
    const auto& quad = mesh_.quads[e];
    auto& du = free_dofs_u_[e];
    auto& da = free_dofs_alpha_[e];
    du.resize(8);
    da.resize(4);
    for (int a = 0; a < 4; ++a) {
      du[2 * a] = constraints_.u.full_to_free[2 * quad[a]];
      du[2 * a + 1] = constraints_.u.full_to_free[2 * quad[a] + 1];
      da[a] = constraints_.alpha.full_to_free[quad[a]];
    }
  }
  pattern_u_ = SparseSymMatrix::from_elements(constraints_.u.num_free(), free_dofs_u_, &scatter_u_);
  pattern_alpha_ = SparseSymMatrix::from_elements(constraints_.alpha.num_free(), free_dofs_alpha_, &scatter_alpha_);
}

double Assembler::lumped_weight(int e, int a) const {
  double w = 0.0;
  for (int k = 0; k < 4; ++k) w += qp_[4 * e + k].wdetJ * qp_[4 * e + k].N[a];
  return w;
}

double Assembler::energy(const State& s, const PenaltySettings* penalty) const {
  const MaterialModel& m = material_;
  const double frac = m.Gc / m.cw();
  const double eps_pen = penalty ? penalty->epsilon(m) : 0.0;
  std::vector<double> per_element(mesh_.num_elements());
  for_each_element(mesh_.num_elements(), [&](int e) {
    const ElementFields f = gather(mesh_.quads[e], s);
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) {
      const QuadPoint& q = qp_[4 * e + k];
      const PointFields p = interpolate(q, f);
      const SplitEval ev = evaluate_split(p.eps, m, EvalLevel::Energy);
      double density = detail::degradation(p.alpha, 0, m.a0) * ev.psi_D + ev.psi_R +
                       frac * (detail::dissipation(p.alpha, m.dissipation, 0) / m.ell +
                               m.ell * (p.grad_x * p.grad_x + p.grad_y * p.grad_y));
      sum += q.wdetJ * density;
    }
    if (penalty) {
      for (int a = 0; a < 4; ++a) {
        const double d = macaulay(f.alpha[a] - f.alpha_prev[a], Bracket::Minus);
        sum += lumped_weight(e, a) * 0.5 * eps_pen * d * d;
      }
    }
    if (!std::isfinite(sum)) throw AssemblyError("non-finite energy in element " + std::to_string(e), e);
    per_element[e] = sum;
  });
  double total = 0.0;
  for (double v : per_element) total += v;
  return total;
}

Eigen::VectorXd Assembler::residual_u_full(const State& s) const {
  const MaterialModel& m = material_;
  const int ne = mesh_.num_elements();
  std::vector<Vec8> local(ne);
  for_each_element(ne, [&](int e) {
    const ElementFields f = gather(mesh_.quads[e], s);
    Vec8 r = Vec8::Zero();
    for (int k = 0; k < 4; ++k) {
      const QuadPoint& q = qp_[4 * e + k];
      const PointFields p = interpolate(q, f);
      const SplitEval ev = evaluate_split(p.eps, m, EvalLevel::Stress);
      const Voigt sigma = detail::degradation(p.alpha, 0, m.a0) * ev.sigma_D + ev.sigma_R;
      r.noalias() += q.wdetJ * strain_matrix(q).transpose() * sigma;
    }
    local[e] = r;
  });
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * mesh_.num_nodes());
  for (int e = 0; e < ne; ++e) {
    const auto& quad = mesh_.quads[e];
    for (int a = 0; a < 4; ++a) {
      out[2 * quad[a]] += local[e][2 * a];
      out[2 * quad[a] + 1] += local[e][2 * a + 1];
    }
  }
  check_finite(out, "displacement residual");
  return out;
}

Eigen::VectorXd Assembler::residual_u(const State& s) const { return constraints_.u.restrict(residual_u_full(s)); }

Eigen::VectorXd Assembler::residual_alpha_full(const State& s, const PenaltySettings* penalty) const {
  const MaterialModel& m = material_;
  const double frac = m.Gc / m.cw();
  const double eps_pen = penalty ? penalty->epsilon(m) : 0.0;
  const int ne = mesh_.num_elements();
  std::vector<Eigen::Vector4d> local(ne);
  for_each_element(ne, [&](int e) {
    const ElementFields f = gather(mesh_.quads[e], s);
    Eigen::Vector4d r = Eigen::Vector4d::Zero();
    for (int k = 0; k < 4; ++k) {
      const QuadPoint& q = qp_[4 * e + k];
      const PointFields p = interpolate(q, f);
      const double psi_D = evaluate_split(p.eps, m, EvalLevel::Energy).psi_D;
      double point = detail::degradation(p.alpha, 1, m.a0) * psi_D +
                     frac * detail::dissipation(p.alpha, m.dissipation, 1) / m.ell;
      const double grad = 2.0 * frac * m.ell;
      for (int a = 0; a < 4; ++a) {
        r[a] += q.wdetJ * (q.N[a] * point + grad * (q.dNdx[a] * p.grad_x + q.dNdy[a] * p.grad_y));
      }
    }
    if (penalty) {
      for (int a = 0; a < 4; ++a) {
        r[a] += lumped_weight(e, a) * eps_pen * macaulay(f.alpha[a] - f.alpha_prev[a], Bracket::Minus);
      }
    }
    local[e] = r;
  });
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh_.num_nodes());
  for (int e = 0; e < ne; ++e) {
    for (int a = 0; a < 4; ++a) out[mesh_.quads[e][a]] += local[e][a];
  }
  check_finite(out, "damage residual");
  return out;
}

Eigen::VectorXd Assembler::residual_alpha(const State& s, const PenaltySettings* penalty) const {
  return constraints_.alpha.restrict(residual_alpha_full(s, penalty));
}

SparseSymMatrix Assembler::stiffness_u(const State& s) const {
  const MaterialModel& m = material_;
  const int ne = mesh_.num_elements();
  std::vector<Mat8> local(ne);
  for_each_element(ne, [&](int e) {
    const ElementFields f = gather(mesh_.quads[e], s);
    Mat8 k8 = Mat8::Zero();
    for (int k = 0; k < 4; ++k) {
      const QuadPoint& q = qp_[4 * e + k];
      const PointFields p = interpolate(q, f);
      const SplitEval ev = evaluate_split(p.eps, m, EvalLevel::Tangent);
      const VoigtTangent D = detail::degradation(p.alpha, 0, m.a0) * ev.C_D + ev.C_R;
      const BMat B = strain_matrix(q);
      k8.noalias() += q.wdetJ * B.transpose() * D * B;
    }
    if (!k8.allFinite()) throw AssemblyError("non-finite stiffness in element " + std::to_string(e), e);
    local[e] = k8;
  });
  SparseSymMatrix K = pattern_u_;
  double* values = K.values();
  for (int e = 0; e < ne; ++e) {
    const auto& dofs = free_dofs_u_[e];
    const auto& map = scatter_u_[e];
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        const int at = map[8 * i + j];
        if (at >= 0 && dofs[i] >= dofs[j]) values[at] += local[e](i, j);
      }
    }
  }
  return K;
}

SparseSymMatrix Assembler::stiffness_alpha(const State& s, const PenaltySettings* penalty) const {
  const MaterialModel& m = material_;
  const double frac = m.Gc / m.cw();
  const double eps_pen = penalty ? penalty->epsilon(m) : 0.0;
  const int ne = mesh_.num_elements();
  std::vector<Mat4> local(ne);
  for_each_element(ne, [&](int e) {
    const ElementFields f = gather(mesh_.quads[e], s);
    Mat4 k4 = Mat4::Zero();
    for (int k = 0; k < 4; ++k) {
      const QuadPoint& q = qp_[4 * e + k];
      const PointFields p = interpolate(q, f);
      const double psi_D = evaluate_split(p.eps, m, EvalLevel::Energy).psi_D;
      double point = detail::degradation(p.alpha, 2, m.a0) * psi_D +
                     frac * detail::dissipation(p.alpha, m.dissipation, 2) / m.ell;
      const double grad = 2.0 * frac * m.ell;
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          k4(a, b) += q.wdetJ * (q.N[a] * q.N[b] * point + grad * (q.dNdx[a] * q.dNdx[b] + q.dNdy[a] * q.dNdy[b]));
        }
      }
    }
    if (penalty) {
      for (int a = 0; a < 4; ++a) {
        if (f.alpha[a] - f.alpha_prev[a] < 0.0) k4(a, a) += lumped_weight(e, a) * eps_pen;
      }
    }
    if (!k4.allFinite()) throw AssemblyError("non-finite stiffness in element " + std::to_string(e), e);
    local[e] = k4;
  });
  SparseSymMatrix K = pattern_alpha_;
  double* values = K.values();
  for (int e = 0; e < ne; ++e) {
    const auto& dofs = free_dofs_alpha_[e];
    const auto& map = scatter_alpha_[e];
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const int at = map[4 * i + j];
        if (at >= 0 && dofs[i] >= dofs[j]) values[at] += local[e](i, j);
      }
    }
  }
  return K;
}

double Assembler::reaction(const State& s, const std::string& node_set, Field component) const {
  if (component == Field::Alpha) throw ConfigError("reaction force needs a displacement component");
  const Eigen::VectorXd r = residual_u_full(s);
  const int c = component == Field::Ux ? 0 : 1;
  double sum = 0.0;
  for (int node : mesh_.node_set(node_set)) sum += r[2 * node + c];
  return sum;
}

double Assembler::l2_norm(const Eigen::VectorXd& nodal) const {
  double sum = 0.0;
  for (int e = 0; e < mesh_.num_elements(); ++e) {
    const auto& quad = mesh_.quads[e];
    for (int k = 0; k < 4; ++k) {
      const QuadPoint& q = qp_[4 * e + k];
      double v = 0.0;
      for (int a = 0; a < 4; ++a) v += q.N[a] * nodal[quad[a]];
      sum += q.wdetJ * v * v;
    }
  }
  return std::sqrt(sum);
}

double Assembler::max_psi_D(const State& s) const {
  const int ne = mesh_.num_elements();
  std::vector<double> local(ne);
  for_each_element(ne, [&](int e) {
    const ElementFields f = gather(mesh_.quads[e], s);
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 4; ++k) {
      const PointFields p = interpolate(qp_[4 * e + k], f);
      best = std::max(best, evaluate_split(p.eps, material_, EvalLevel::Energy).psi_D);
    }
    local[e] = best;
  });
  return *std::max_element(local.begin(), local.end());
}

double Assembler::area() const {
  double sum = 0.0;
  for (const auto& q : qp_) sum += q.wdetJ;
  return sum;
}

}  // namespace pff
