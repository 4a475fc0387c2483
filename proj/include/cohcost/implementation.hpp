#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <tuple>
#include <utility>
#include <vector>

#include "cohcost/errors.hpp"
#include "cohcost/measures.hpp"
#include "cohcost/numerics.hpp"
#include "cohcost/quantum.hpp"
#include "cohcost/random.hpp"

namespace cohcost {

/// Desired gate U_S together with the conserved system charge A_S.
struct TargetSpec {
  HermitianObservable A_S;
  UnitaryGate U_S;

  TargetSpec(HermitianObservable a, UnitaryGate u) : A_S(std::move(a)), U_S(std::move(u)) {
    require_same_dim(A_S.dim(), U_S.dim(), "TargetSpec");
  }
  std::size_t d_S() const { return A_S.dim(); }
};

/// External system E with charge A_E, initial state rho_E and joint unitary U_SE on S (x) E.
struct ImplementationSet {
  std::size_t d_S;
  HermitianObservable A_E;
  DensityMatrix rho_E;
  UnitaryGate U_SE;

  ImplementationSet(std::size_t ds, HermitianObservable a_e, DensityMatrix rho_e, UnitaryGate u_se)
      : d_S(ds), A_E(std::move(a_e)), rho_E(std::move(rho_e)), U_SE(std::move(u_se)) {
    require_same_dim(A_E.dim(), rho_E.dim(), "ImplementationSet");
    require_same_dim(U_SE.dim(), d_S * A_E.dim(), "ImplementationSet");
  }
  std::size_t d_E() const { return A_E.dim(); }
};

/// A_S (x) I + I (x) A_E as a dense matrix.
inline ComplexMatrix total_charge(const ComplexMatrix& a_s, const ComplexMatrix& a_e) {
  return kron(a_s, ComplexMatrix::identity(a_e.rows())) + kron(ComplexMatrix::identity(a_s.rows()), a_e);
}

namespace detail {

/// Eigen-ensemble of rho_E, with the pure case short-circuited.
inline std::vector<std::pair<double, CVector>> ensemble(const DensityMatrix& rho) {
  if (auto v = rho.pure_vector()) return {{1.0, *v}};
  Spectrum sp = hermitian_eig(rho.mat());
  std::vector<std::pair<double, CVector>> out;
  for (std::size_t k = 0; k < sp.values.size(); ++k)
    if (sp.values[k] > 1e-15) out.emplace_back(sp.values[k], sp.vector(k));
  return out;
}

inline CVector adjoint_times(const ComplexMatrix& u, const CVector& x) {
  CVector y(u.cols(), 0.0);
  for (std::size_t i = 0; i < u.rows(); ++i) {
    const cplx xi = x[i];
    if (xi == cplx(0.0, 0.0)) continue;
    for (std::size_t j = 0; j < u.cols(); ++j) y[j] += std::conj(u(i, j)) * xi;
  }
  return y;
}

/// (A_S (x) I + I (x) A_E) x without forming the Kronecker products.
inline CVector apply_total_charge(const ComplexMatrix& a_s, const ComplexMatrix& a_e, const CVector& x) {
  const std::size_t ds = a_s.rows(), de = a_e.rows();
  CVector y(ds * de, 0.0);
  for (std::size_t a = 0; a < ds; ++a)
    for (std::size_t b = 0; b < ds; ++b) {
      const cplx ab = a_s(a, b);
      if (ab == cplx(0.0, 0.0)) continue;
      for (std::size_t e = 0; e < de; ++e) y[a * de + e] += ab * x[b * de + e];
    }
  for (std::size_t a = 0; a < ds; ++a)
    for (std::size_t e = 0; e < de; ++e) {
      cplx s = 0.0;
      for (std::size_t f = 0; f < de; ++f) s += a_e(e, f) * x[a * de + f];
      y[a * de + e] += s;
    }
  return y;
}

}  // namespace detail

/// Kraus operators of rho_S -> Tr_E[U_SE (rho_S (x) rho_E) U_SE^dagger], read off the dilation.
inline std::vector<ComplexMatrix> induced_kraus(const ImplementationSet& set) {
  const std::size_t ds = set.d_S, de = set.d_E();
  const ComplexMatrix& u = set.U_SE.mat();
  std::vector<ComplexMatrix> out;
  for (const auto& [q, phi] : detail::ensemble(set.rho_E)) {
    const double w = std::sqrt(q);
    for (std::size_t e = 0; e < de; ++e) {
      ComplexMatrix k(ds, ds);
      bool nonzero = false;
      for (std::size_t a = 0; a < ds; ++a)
        for (std::size_t i = 0; i < ds; ++i) {
          cplx s = 0.0;
          const cplx* row = &u.data()[(a * de + e) * u.cols() + i * de];
          for (std::size_t f = 0; f < de; ++f) s += row[f] * phi[f];
          k(a, i) = w * s;
          nonzero = nonzero || k(a, i) != cplx(0.0, 0.0);
        }
      if (nonzero) out.push_back(std::move(k));
    }
  }
  return out;
}

/// Choi matrix of the induced channel on S.
inline Channel induced_channel(const ImplementationSet& set) {
  auto kraus = induced_kraus(set);
  if (kraus.empty()) throw ValidationError("induced channel has no nonzero Kraus operator");
  return Channel::from_kraus(kraus);
}

/// Kraus operators of Lambda_{U_S^dagger} o Lambda_S.
inline std::vector<ComplexMatrix> error_kraus(const ImplementationSet& set, const TargetSpec& target) {
  require_same_dim(set.d_S, target.d_S(), "error_kraus");
  const ComplexMatrix ud = target.U_S.mat().adjoint();
  auto kraus = induced_kraus(set);
  for (auto& k : kraus) k = ud * k;
  return kraus;
}

/// Lambda_{U_S^dagger} o Lambda_S.
inline Channel error_channel(const ImplementationSet& set, const TargetSpec& target) {
  require_same_dim(set.d_S, target.d_S(), "error_channel");
  return induced_channel(set).conjugate_output(target.U_S.mat().adjoint());
}

/// Kraus operators from the Choi eigendecomposition, keeping positive eigenvalues.
inline std::vector<ComplexMatrix> kraus_from_choi(const Channel& ch) {
  Spectrum sp = hermitian_eig(ch.choi());
  std::vector<ComplexMatrix> out;
  for (std::size_t k = 0; k < sp.values.size(); ++k) {
    if (!(sp.values[k] > 0.0)) continue;
    const double w = std::sqrt(sp.values[k]);
    ComplexMatrix m(ch.d_out(), ch.d_in());
    for (std::size_t x = 0; x < ch.d_out() * ch.d_in(); ++x) m.data()[x] = w * sp.vectors(x, k);
    out.push_back(std::move(m));
  }
  return out;
}

namespace detail {

/// 1 - F_e^2 for the purification psi on S (x) R (d_R = d_S), as
/// sum_k ||(1 - |psi><psi|)(K_k (x) I) psi||^2.
struct DeficitObjective {
  const std::vector<ComplexMatrix>& kraus;
  std::size_t d;

  /// K Psi - <psi|K psi> Psi with Psi the d x d reshaping of psi, plus the overlap.
  std::pair<CVector, cplx> residual(const ComplexMatrix& k, const CVector& psi) const {
    CVector w(d * d, 0.0);
    cplx a = 0.0;
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        cplx s = 0.0;
        for (std::size_t m = 0; m < d; ++m) s += k(r, m) * psi[m * d + c];
        w[r * d + c] = s;
        a += std::conj(psi[r * d + c]) * s;
      }
    for (std::size_t x = 0; x < w.size(); ++x) w[x] -= a * psi[x];
    return {std::move(w), a};
  }

  double deficit(const CVector& psi) const {
    double acc = 0.0;
    for (const auto& k : kraus) {
      auto [w, a] = residual(k, psi);
      for (const auto& z : w) acc += std::norm(z);
    }
    return acc;
  }

  /// The optimizer minimizes, so values are -deficit.
  double value(const CVector& psi) const { return -deficit(psi); }

  std::pair<double, CVector> value_and_gradient(const CVector& psi) const {
    double acc = 0.0;
    CVector grad(d * d, 0.0);
    for (const auto& k : kraus) {
      auto [w, a] = residual(k, psi);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
          cplx s = 0.0;
          for (std::size_t m = 0; m < d; ++m) s += std::conj(k(m, r)) * w[m * d + c];
          grad[r * d + c] -= 2.0 * (s - std::conj(a) * w[r * d + c]);
        }
      for (const auto& z : w) acc += std::norm(z);
    }
    const double radial = inner(psi, grad).real();
    for (std::size_t x = 0; x < grad.size(); ++x) grad[x] -= radial * psi[x];
    return {-acc, grad};
  }
};

/// Bures distance sqrt(2(1 - F_e)) written in terms of D = 1 - F_e^2.
inline double delta_from_deficit(double deficit) {
  const double dd = std::clamp(deficit, 0.0, 1.0);
  return std::sqrt(2.0 * dd / (1.0 + std::sqrt(1.0 - dd)));
}

inline CVector purification_vector(const DensityMatrix& rho) {
  if (auto v = rho.pure_vector()) {
    const std::size_t d = rho.dim();
    CVector out(d * d, 0.0);
    for (std::size_t a = 0; a < d; ++a) out[a * d] = (*v)[a];
    return out;
  }
  return purify(rho).vec();
}

}  // namespace detail

inline double error_for_state(const std::vector<ComplexMatrix>& error_kraus_ops, const DensityMatrix& rho_s) {
  if (error_kraus_ops.empty() || error_kraus_ops.front().cols() != rho_s.dim())
    throw ValidationError("error_for_state: dimension mismatch");
  detail::DeficitObjective obj{error_kraus_ops, rho_s.dim()};
  return detail::delta_from_deficit(obj.deficit(detail::purification_vector(rho_s)));
}

inline double error_for_state(const Channel& error_ch, const DensityMatrix& rho_s) {
  require_same_dim(rho_s.dim(), error_ch.d_in(), "error_for_state");
  return error_for_state(kraus_from_choi(error_ch), rho_s);
}

/// delta(rho_S): entanglement Bures distance of the undone channel.
inline double error_for_state(const ImplementationSet& set, const TargetSpec& target, const DensityMatrix& rho_s) {
  require_same_dim(set.d_S, rho_s.dim(), "error_for_state");
  return error_for_state(error_kraus(set, target), rho_s);
}

struct OptimizerDiagnostics {
  int starts = 0;
  int iterations = 0;
  bool converged = false;
  double final_gradient_norm = 0.0;
};

struct ErrorReport {
  double worst_delta = 0.0;
  CVector argmax_state;
  std::vector<double> probe_deltas;
  OptimizerDiagnostics optimizer;
};

struct WorstCaseOptions {
  std::uint64_t seed = 42;
  int random_probes = 32;
  int starts = 8;
  int max_iterations = 500;
  double gradient_tolerance = 1e-9;
};

namespace detail {

struct DescentResult {
  CVector psi;
  double value;
  int iterations;
  bool converged;
  double gradient_norm;
};

inline DescentResult minimize_on_sphere(const DeficitObjective& obj, CVector psi, const WorstCaseOptions& opt) {
  psi = normalized(std::move(psi));
  auto [f, g] = obj.value_and_gradient(psi);
  double gn = norm2(g);
  double step = 1.0;
  int it = 0;
  bool stalled_at_precision = false;
  while (gn >= opt.gradient_tolerance && it < opt.max_iterations) {
    ++it;
    const CVector psi_old = psi;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      CVector trial(psi.size());
      for (std::size_t x = 0; x < psi.size(); ++x) trial[x] = psi[x] - step * g[x];
      trial = normalized(std::move(trial));
      double ft = obj.value(trial);
      if (ft <= f - 1e-4 * step * gn * gn) {
        psi = std::move(trial);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      stalled_at_precision = gn * gn < 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
      break;
    }
    CVector g_old = std::move(g);
    std::tie(f, g) = obj.value_and_gradient(psi);
    gn = norm2(g);
    double ss = 0.0, sy = 0.0;
    for (std::size_t x = 0; x < psi.size(); ++x) {
      cplx sx = psi[x] - psi_old[x];
      ss += std::norm(sx);
      sy += (std::conj(sx) * (g[x] - g_old[x])).real();
    }
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-8, 1e3) : std::min(step * 2.0, 1e3);
  }
  return {psi, f, it, gn < opt.gradient_tolerance || stalled_at_precision, gn};
}

}  // namespace detail

/// Worst-case error over all inputs of a channel on d_S, searching the purified
/// sphere in S (x) R with d_R = d_S. `extra_probes` are system states that are
/// always evaluated (embedded as |psi>|0>), `entangled_probes` full S (x) R vectors.
inline ErrorReport worst_case_error(const std::vector<ComplexMatrix>& error_kraus_ops,
                                    const std::vector<CVector>& extra_probes,
                                    const std::vector<CVector>& entangled_probes, const WorstCaseOptions& opt = {}) {
  if (error_kraus_ops.empty()) throw ValidationError("worst_case_error: empty Kraus list");
  const std::size_t d = error_kraus_ops.front().cols();
  detail::DeficitObjective obj{error_kraus_ops, d};
  Rng rng(opt.seed);

  std::vector<CVector> probes;
  auto embed = [d](const CVector& s) {
    CVector v(d * d, 0.0);
    for (std::size_t a = 0; a < d; ++a) v[a * d] = s[a];
    return normalized(v);
  };
  for (std::size_t k = 0; k < d; ++k) {
    CVector e(d, 0.0);
    e[k] = 1.0;
    probes.push_back(embed(e));
  }
  probes.push_back(embed(CVector(d, cplx(1.0, 0.0))));
  for (const auto& s : extra_probes) probes.push_back(embed(s));
  for (const auto& v : entangled_probes) probes.push_back(normalized(v));
  for (int r = 0; r < opt.random_probes; ++r) probes.push_back(normalized(random_vector(d * d, rng)));

  ErrorReport rep;
  double best_f = std::numeric_limits<double>::infinity();
  CVector best_psi;
  for (const auto& p : probes) {
    double f = obj.value(p);
    rep.probe_deltas.push_back(detail::delta_from_deficit(-f));
    if (f < best_f) {
      best_f = f;
      best_psi = p;
    }
  }

  bool all_converged = true;
  CVector best_probe = best_psi;
  for (int s = 0; s < opt.starts; ++s) {
    CVector start = s == 0 ? best_probe : random_vector(d * d, rng);
    auto res = detail::minimize_on_sphere(obj, start, opt);
    rep.optimizer.iterations += res.iterations;
    all_converged = all_converged && res.converged;
    if (res.value < best_f) {
      best_f = res.value;
      best_psi = res.psi;
    }
  }
  rep.optimizer.starts = opt.starts;
  rep.optimizer.converged = all_converged;
  rep.optimizer.final_gradient_norm = norm2(obj.value_and_gradient(best_psi).second);
  rep.worst_delta = detail::delta_from_deficit(-best_f);
  rep.argmax_state = best_psi;
  return rep;
}

/// delta_I = max over rho_S of delta(rho_S), with the extremal-state probes of the target.
inline ErrorReport worst_case_error(const ImplementationSet& set, const TargetSpec& target,
                                    const WorstCaseOptions& opt = {}) {
  require_same_dim(set.d_S, target.d_S(), "worst_case_error");
  auto kraus = error_kraus(set, target);
  const std::size_t d = target.d_S();
  ExtremalStates ex = extremal_states(target.U_S, target.A_S);
  std::vector<CVector> entangled;
  if (d >= 2) {
    CVector v(d * d, 0.0);
    for (std::size_t a = 0; a < d; ++a) {
      v[a * d + 0] += ex.up.vec()[a];
      v[a * d + 1] += ex.down.vec()[a];
    }
    entangled.push_back(v);
  }
  return worst_case_error(kraus, {ex.up.vec(), ex.down.vec()}, entangled, opt);
}

inline bool realizes_within(const ImplementationSet& set, const TargetSpec& target, double delta,
                            const WorstCaseOptions& opt = {}) {
  return worst_case_error(set, target, opt).worst_delta <= delta + 1e-9;
}

struct ConservationResidual {
  double op_norm = 0.0;
  double state_weighted = 0.0;
};

/// Norms of X = A_tot - U_SE^dagger A_tot U_SE: the operator norm and
/// sqrt(Tr[(I/d_S (x) rho_E) X^2]).
inline ConservationResidual conservation_residual(const ImplementationSet& set, const HermitianObservable& a_s) {
  require_same_dim(a_s.dim(), set.d_S, "conservation_residual");
  const ComplexMatrix& u = set.U_SE.mat();
  const ComplexMatrix& as = a_s.mat();
  const ComplexMatrix& ae = set.A_E.mat();
  auto apply_x = [&](const CVector& x) {
    CVector y = detail::apply_total_charge(as, ae, x);
    CVector z = detail::adjoint_times(u, detail::apply_total_charge(as, ae, u * x));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= z[i];
    return y;
  };
  ConservationResidual r;
  const std::size_t n = u.rows();
  if (n <= detail::kDenseNormLimit) {
    ComplexMatrix a = total_charge(as, ae);
    r.op_norm = operator_norm(a - u.adjoint() * a * u);
  } else {
    r.op_norm = operator_norm(n, apply_x, apply_x);
  }
  const std::size_t ds = set.d_S, de = set.d_E();
  double acc = 0.0;
  for (const auto& [q, phi] : detail::ensemble(set.rho_E))
    for (std::size_t a = 0; a < ds; ++a) {
      CVector x(n, 0.0);
      for (std::size_t f = 0; f < de; ++f) x[a * de + f] = phi[f];
      CVector y = apply_x(x);
      acc += q * inner(y, y).real() / double(ds);
    }
  r.state_weighted = std::sqrt(std::max(0.0, acc));
  return r;
}

}  // namespace cohcost
