#pragma once

// Randomized verification suites. Each inequality is recorded as a margin
// lhs - rhs; a violation is a margin above the slack.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cohcost/bounds.hpp"
#include "cohcost/gaussian.hpp"
#include "cohcost/implementation.hpp"
#include "cohcost/measures.hpp"
#include "cohcost/numerics.hpp"
#include "cohcost/quantum.hpp"
#include "cohcost/random.hpp"

namespace cohcost {

struct CheckOutcome {
  std::string suite_name;
  int trials = 0;
  int violations = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
};

constexpr double kDefaultSlack = 1e-8;

namespace detail {

class MarginLog {
 public:
  MarginLog(std::string name, int trials, std::uint64_t seed, double slack) : slack_(slack) {
    if (trials < 1) throw ValidationError("check suites need at least one trial");
    out_.suite_name = std::move(name);
    out_.trials = trials;
    out_.seed = seed;
  }
  void record(double lhs, double rhs) { record_margin(lhs - rhs); }
  void record_margin(double m) {
    if (std::isnan(m)) m = std::numeric_limits<double>::infinity();
    out_.worst_margin = std::max(out_.worst_margin, m);
    if (m > slack_) ++out_.violations;
  }
  CheckOutcome result() const { return out_; }

 private:
  double slack_;
  CheckOutcome out_;
};

inline DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double w) {
  return DensityMatrix::assume_valid(a.mat() * (1.0 - w) + b.mat() * w);
}

/// Hermitian operator with integer eigenvalues in [0, max_level] in a Haar-random basis.
inline ComplexMatrix random_integer_charge(std::size_t d, int max_level, Rng& rng) {
  std::vector<double> levels(d);
  for (auto& l : levels) l = double(uniform_index(rng, 0, std::size_t(max_level)));
  ComplexMatrix v = random_unitary_matrix(d, rng);
  ComplexMatrix a = v * ComplexMatrix::diagonal(levels) * v.adjoint();
  return (a + a.adjoint()) * 0.5;
}

struct RandomConservingInstance {
  TargetSpec target;
  ImplementationSet set;
};

/// Random target plus an exactly conserving set built from Haar blocks inside
/// the eigenspaces of A_S + A_E.
inline RandomConservingInstance random_conserving_instance(Rng& rng, std::size_t d_s, std::size_t d_e) {
  ComplexMatrix a_s = random_integer_charge(d_s, 2, rng);
  ComplexMatrix a_e = random_integer_charge(d_e, 3, rng);
  ComplexMatrix u = random_commuting_unitary(total_charge(a_s, a_e), rng);
  std::size_t rank = uniform_index(rng, 1, d_e);
  DensityMatrix rho_e = random_density(d_e, rng, rank);
  TargetSpec target(HermitianObservable(a_s), random_unitary(d_s, rng));
  ImplementationSet set(d_s, HermitianObservable(a_e), rho_e, UnitaryGate(u));
  return {std::move(target), std::move(set)};
}

/// Final state of E for the initial system state rho_s.
inline DensityMatrix final_environment(const ImplementationSet& set, const DensityMatrix& rho_s) {
  const ComplexMatrix& u = set.U_SE.mat();
  ComplexMatrix out = u * kron(rho_s.mat(), set.rho_E.mat()) * u.adjoint();
  return DensityMatrix::assume_valid(partial_trace(out, Keep::E, set.d_S, set.d_E()));
}

/// Distance from the origin to the numerical range of k, i.e. min over states of |<k>_rho|.
inline double numerical_range_distance(const ComplexMatrix& k) {
  auto support = [&](double theta) {
    cplx ph = std::exp(cplx(0.0, -theta));
    ComplexMatrix h = (k * ph + k.adjoint() * std::conj(ph)) * 0.5;
    return hermitian_eig_unchecked(h).min();
  };
  const int grid = 256;
  const double two_pi = 2.0 * std::numbers::pi;
  double best = -std::numeric_limits<double>::infinity(), best_t = 0.0;
  for (int g = 0; g < grid; ++g) {
    double t = two_pi * g / grid;
    double v = support(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  double lo = best_t - two_pi / grid, hi = best_t + two_pi / grid;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = support(x1), f2 = support(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = support(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = support(x1);
    }
  }
  best = std::max({best, f1, f2});
  return std::max(0.0, best);
}

}  // namespace detail

/// Delta <= l(s1,s2)(V_X(s1) + V_X(s2)) for L(s1,s2) <= 1, with l = L/(1-L).
inline CheckOutcome check_lemma_key_relation(int trials, std::uint64_t seed, std::size_t dim_max = 4,
                                             double slack = kDefaultSlack) {
  if (dim_max < 2) throw ValidationError("dim_max must be at least 2");
  detail::MarginLog log("lemma3", trials, seed, slack);
  for (int t = 0; t < trials; ++t) {
    Rng rng = trial_rng(seed, std::uint64_t(t));
    const std::size_t d = uniform_index(rng, 2, dim_max);
    DensityMatrix s1 = (t % 4 == 1 || t % 4 == 2) ? DensityMatrix::from_pure(random_pure(d, rng))
                                                   : random_density(d, rng, uniform_index(rng, 1, d));
    DensityMatrix s2 = s1;
    if (t % 4 == 3) {
      double eps = std::pow(10.0, uniform(rng, -4.0, 0.0));
      ComplexMatrix u = expm_hermitian(random_hermitian(d, rng), eps);
      s2 = DensityMatrix::assume_valid(u * s1.mat() * u.adjoint());
    } else if (t % 4 == 1) {
      s2 = DensityMatrix::from_pure(random_pure(d, rng));
    } else {
      s2 = random_density(d, rng, uniform_index(rng, 1, d));
    }
    double l = bures_distance(s1, s2);
    while (l > 1.0) {
      s2 = detail::mix(s1, s2, 0.5);
      l = bures_distance(s1, s2);
    }
    if (l >= 1.0) continue;
    HermitianObservable x(random_hermitian(d, rng) * std::pow(10.0, uniform(rng, -1.0, 1.0)));
    double delta = std::abs(((s1.mat() - s2.mat()) * x.mat()).trace().real());
    double ell = l / (1.0 - l);
    log.record(delta, ell * (variance(s1, x) + variance(s2, x)));
  }
  return log.result();
}

/// Lemma on near-unitary dynamics of A in contact with B: the product-state
/// distance bound, and the Uhlmann-partner bounds on the final states of B.
inline CheckOutcome check_lemma_L1(int trials, std::uint64_t seed, double slack = kDefaultSlack) {
  detail::MarginLog log("l1", trials, seed, slack);
  for (int t = 0; t < trials; ++t) {
    Rng rng = trial_rng(seed, std::uint64_t(t));
    const std::size_t da = uniform_index(rng, 2, 3), db = uniform_index(rng, 2, 3), dc = 2;
    const std::size_t dra = 2 * da, drb = db, dabc = da * db * dc;
    ComplexMatrix u_a = random_unitary_matrix(da, rng);

    ComplexMatrix u_abc;
    const int kind = t % 3;
    if (kind == 0) {
      u_abc = random_unitary_matrix(dabc, rng);
    } else {
      double eps = std::pow(10.0, uniform(rng, -3.0, -0.5));
      ComplexMatrix drift = expm_hermitian(random_hermitian(dabc, rng), eps);
      ComplexMatrix bc = kind == 1 ? ComplexMatrix::identity(db * dc) : random_unitary_matrix(db * dc, rng);
      u_abc = kron(u_a, bc) * drift;
    }

    DensityMatrix rho0 = random_density(da, rng, uniform_index(rng, 1, da));
    DensityMatrix rho1 = random_density(da, rng, uniform_index(rng, 1, da));
    DensityMatrix rho_b = random_density(db, rng, uniform_index(rng, 1, db));

    // Purifications on A (x) R_A with orthogonal reference supports.
    auto embed = [&](const DensityMatrix& rho, std::size_t offset) {
      PureState p = purify(rho);
      CVector v(da * dra, 0.0);
      for (std::size_t a = 0; a < da; ++a)
        for (std::size_t r = 0; r < da; ++r) v[a * dra + offset + r] = p.vec()[a * da + r];
      return v;
    };
    std::vector<CVector> psi_a(3);
    psi_a[0] = embed(rho0, 0);
    psi_a[1] = embed(rho1, da);
    psi_a[2] = CVector(da * dra);
    for (std::size_t x = 0; x < psi_a[2].size(); ++x) psi_a[2][x] = (psi_a[0][x] + psi_a[1][x]) / std::sqrt(2.0);
    std::vector<DensityMatrix> rho_in = {rho0, rho1, detail::mix(rho0, rho1, 0.5)};
    const CVector psi_b = purify(rho_b).vec();

    // Total vector ordered A, B, C, R_A, R_B.
    const std::vector<std::size_t> dims = {da, db, dc, dra, drb};
    const std::size_t nref = dra * drb;
    std::vector<DensityMatrix> sigma_b;
    std::vector<CVector> partner;
    std::vector<double> deltas;
    for (int i = 0; i < 3; ++i) {
      CVector tot(dabc * nref, 0.0);
      for (std::size_t a = 0; a < da; ++a)
        for (std::size_t b = 0; b < db; ++b)
          for (std::size_t ra = 0; ra < dra; ++ra)
            for (std::size_t rb = 0; rb < drb; ++rb) {
              std::size_t abc = (a * db + b) * dc;
              tot[abc * nref + ra * drb + rb] = psi_a[i][a * dra + ra] * psi_b[b * drb + rb];
            }
      CVector fin(tot.size(), 0.0);
      for (std::size_t r = 0; r < nref; ++r)
        for (std::size_t x = 0; x < dabc; ++x) {
          cplx s = 0.0;
          for (std::size_t y = 0; y < dabc; ++y) s += u_abc(x, y) * tot[y * nref + r];
          fin[x * nref + r] = s;
        }

      CVector target_ar(da * dra, 0.0);
      for (std::size_t ra = 0; ra < dra; ++ra)
        for (std::size_t a = 0; a < da; ++a)
          for (std::size_t a2 = 0; a2 < da; ++a2) target_ar[a * dra + ra] += u_a(a, a2) * psi_a[i][a2 * dra + ra];

      ComplexMatrix sigma_ar = reduced_state(fin, dims, {0, 3});
      double f = std::sqrt(std::max(0.0, expectation(sigma_ar, target_ar).real()));
      double delta = bures_from_fidelity(std::min(1.0, f));
      deltas.push_back(delta);

      DensityMatrix s_ab = DensityMatrix::assume_valid(reduced_state(fin, dims, {0, 1}));
      DensityMatrix s_b = DensityMatrix::assume_valid(reduced_state(fin, dims, {1}));
      ComplexMatrix rotated = u_a * rho_in[std::size_t(i)].mat() * u_a.adjoint();
      DensityMatrix product = DensityMatrix::assume_valid(kron(rotated, s_b.mat()));
      log.record(bures_distance(s_ab, product), 2.0 * delta);

      // Uhlmann partner on B, C, R_B: (<U_A psi| (x) I) |final>.
      const std::size_t drest = db * dc * drb;
      CVector phi(drest, 0.0);
      for (std::size_t a = 0; a < da; ++a)
        for (std::size_t b = 0; b < db; ++b)
          for (std::size_t c = 0; c < dc; ++c)
            for (std::size_t ra = 0; ra < dra; ++ra)
              for (std::size_t rb = 0; rb < drb; ++rb) {
                std::size_t abc = (a * db + b) * dc + c;
                phi[(b * dc + c) * drb + rb] += std::conj(target_ar[a * dra + ra]) * fin[abc * nref + ra * drb + rb];
              }
      double overlap = norm2(phi);
      log.record_margin(std::abs(overlap - f) - 1e-10);
      partner.push_back(overlap > 1e-12 ? normalized(phi) : CVector());
      sigma_b.push_back(s_b);
    }

    const double d01 = deltas[2];
    DensityMatrix s_prime = sigma_b[0];
    if (!partner[2].empty())
      s_prime = DensityMatrix::assume_valid(reduced_state(partner[2], {db, dc, drb}, {0}));
    double sum = bures_distance(sigma_b[0], s_prime) + bures_distance(s_prime, sigma_b[1]);
    log.record(sum, 2.0 * std::sqrt(2.0) * d01);
    if (d01 <= 1.0 / (2.0 * std::sqrt(2.0))) log.record(sum, 2.0 * d01);
  }
  return log.result();
}

/// Conservation consequences on random exactly conserving sets, plus the
/// variance perturbation fact for non-conserving unitaries and the
/// environment-mixing bound.
inline CheckOutcome check_conservation_lemmas(int trials, std::uint64_t seed, double slack = kDefaultSlack,
                                              NormConvention conv = NormConvention::Shifted) {
  detail::MarginLog log("conservation", trials, seed, slack);
  for (int t = 0; t < trials; ++t) {
    Rng rng = trial_rng(seed, std::uint64_t(t));
    const std::size_t ds = uniform_index(rng, 2, 3), de = uniform_index(rng, 2, 4);
    auto inst = detail::random_conserving_instance(rng, ds, de);
    const auto& set = inst.set;
    const auto& target = inst.target;
    const double norm_a = charge_norm(target.A_S, conv);
    const double asym = gate_asymmetry(target.U_S, target.A_S);

    ExtremalStates ex = extremal_states(target.U_S, target.A_S);
    DensityMatrix up = DensityMatrix::from_pure(ex.up), down = DensityMatrix::from_pure(ex.down);
    DensityMatrix both = detail::mix(up, down, 0.5);
    DensityMatrix sig_up = detail::final_environment(set, up);
    DensityMatrix sig_down = detail::final_environment(set, down);

    log.record(variance(sig_up, set.A_E) + variance(sig_down, set.A_E),
               2.0 * (variance(set.rho_E, set.A_E) + norm_a));

    auto err = error_kraus(set, target);
    const double d_up = error_for_state(err, up), d_down = error_for_state(err, down);
    const double d_both = error_for_state(err, both);
    const double big_delta = std::abs(((sig_up.mat() - sig_down.mat()) * set.A_E.mat()).trace().real());
    log.record(2.0 * asym, big_delta + 4.0 * d_both * norm_a);
    log.record(d_up + d_down, 2.0 * d_both);

    // Mixing bound: sum_eta q_eta delta_eta^2 <= 2 delta^2 for rho_E = sum_eta q_eta rho_eta.
    DensityMatrix rho_s = random_density(ds, rng, uniform_index(rng, 1, ds));
    const double d_rho = error_for_state(err, rho_s);
    double mixed = 0.0;
    for (const auto& [q, phi] : detail::ensemble(set.rho_E)) {
      ImplementationSet branch(ds, set.A_E, DensityMatrix::from_pure(PureState::normalize(phi)), set.U_SE);
      double d_eta = error_for_state(branch, target, rho_s);
      mixed += q * d_eta * d_eta;
    }
    log.record(mixed, 2.0 * d_rho * d_rho);

    // Variance perturbation for a non-conserving unitary and a positive operator.
    const std::size_t n = uniform_index(rng, 2, 5);
    ComplexMatrix a = random_wishart(n, uniform_index(rng, 1, n), rng);
    a = (a + a.adjoint()) * (0.5 * uniform(rng, 0.1, 3.0) / std::max(1e-12, operator_norm(a)));
    ComplexMatrix u = t % 2 == 0 ? random_unitary_matrix(n, rng)
                                 : expm_hermitian(random_hermitian(n, rng), std::pow(10.0, uniform(rng, -3.0, 0.0)));
    HermitianObservable obs(a);
    HermitianObservable rotated(u.adjoint() * a * u);
    const double chi_val = operator_norm(commutator(u, a));
    DensityMatrix rho = t % 3 == 0 ? DensityMatrix::from_pure(random_pure(n, rng)) : random_density(n, rng);
    const double va = variance(rho, obs), vb = variance(rho, rotated);
    log.record(std::abs(va * va - vb * vb), chi_val * (2.0 * va + chi_val));
  }
  return log.result();
}

/// sqrt(F(rho_E)) >= chi/(5 deltabar) - 4||A_S|| on random conserving sets and
/// Gaussian-protocol sets.
inline CheckOutcome check_single_state_bound(int trials, std::uint64_t seed, double slack = kDefaultSlack,
                                             NormConvention conv = NormConvention::Shifted) {
  detail::MarginLog log("single_state", trials, seed, slack);
  for (int t = 0; t < trials; ++t) {
    Rng rng = trial_rng(seed, std::uint64_t(t));
    const std::size_t ds = uniform_index(rng, 2, 3);
    std::optional<detail::RandomConservingInstance> inst;
    if (t % 2 == 0) {
      inst.emplace(detail::random_conserving_instance(rng, ds, uniform_index(rng, 2, 4)));
    } else {
      TargetSpec target(HermitianObservable(detail::random_integer_charge(ds, 2, rng)), random_unitary(ds, rng));
      double zeta = uniform(rng, 2.0, 12.0);
      GaussianProtocol p = protocol_for_zeta(target, zeta);
      inst.emplace(detail::RandomConservingInstance{std::move(target), std::move(p.set)});
    }
    const auto& set = inst->set;
    const auto& target = inst->target;

    std::vector<PureState> basis;
    DensityMatrix rho_s = DensityMatrix::maximally_mixed(ds);
    if (t % 4 < 2) {
      Spectrum sp = hermitian_eig(charge_change(target.U_S, target.A_S));
      for (std::size_t k = 0; k < ds; ++k) basis.push_back(PureState::normalize(sp.vector(k)));
      double w = uniform(rng, 0.0, 1.0);
      CVector v(ds, 0.0);
      cplx phase = std::exp(cplx(0.0, uniform(rng, 0.0, 2.0 * std::numbers::pi)));
      for (std::size_t x = 0; x < ds; ++x) v[x] = std::sqrt(w) * sp.vectors(x, ds - 1) + std::sqrt(1.0 - w) * phase * sp.vectors(x, 0);
      rho_s = DensityMatrix::from_pure(PureState::normalize(v));
    } else {
      ComplexMatrix b = random_unitary_matrix(ds, rng);
      for (std::size_t k = 0; k < ds; ++k) basis.push_back(PureState::normalize(column(b, k)));
      rho_s = random_density(ds, rng, uniform_index(rng, 1, ds));
    }

    auto err = error_kraus(set, target);
    const double d_rho = error_for_state(err, rho_s);
    double acc = d_rho * d_rho;
    for (const auto& psi : basis) {
      double r = std::max(0.0, expectation(rho_s.mat(), psi.vec()).real());
      double d = error_for_state(err, DensityMatrix::from_pure(psi));
      acc += r * d * d;
    }
    const double deltabar = std::sqrt(acc);
    const double c = chi(rho_s, basis, target);
    const double sqrt_f = std::sqrt(std::max(0.0, qfi(set.rho_E, set.A_E)));
    if (deltabar <= 0.0) {
      log.record_margin(c);
      continue;
    }
    log.record(single_state_report(c, deltabar, charge_norm(target.A_S, conv)).raw_value, sqrt_f);
  }
  return log.result();
}

/// min over states of |<T[exp(-(X - X' - X0)^2)]>| >= 1 - lambda_diff(X - X')^2 (1 + 2a)^2 / 4
/// with X = A_S/(2 sqrt 2 zeta), ||X|| = a <= 1/9.
inline CheckOutcome check_c2(int trials, std::uint64_t seed, double slack = kDefaultSlack) {
  detail::MarginLog log("c2", trials, seed, slack);
  for (int t = 0; t < trials; ++t) {
    Rng rng = trial_rng(seed, std::uint64_t(t));
    const std::size_t d = uniform_index(rng, 2, 4);
    ComplexMatrix a_s = random_hermitian(d, rng);
    a_s = a_s - ComplexMatrix::identity(d) * hermitian_eig(a_s).min();
    a_s = (a_s + a_s.adjoint()) * 0.5;
    const double norm_a = operator_norm(a_s);
    const double a = uniform(rng, 0.005, 1.0 / 9.0);
    const double zeta = norm_a / (2.0 * std::sqrt(2.0) * a);
    ComplexMatrix u = t % 2 == 0 ? random_unitary_matrix(d, rng)
                                 : expm_hermitian(random_hermitian(d, rng), std::pow(10.0, uniform(rng, -3.0, 0.0)));
    TargetSpec target{HermitianObservable(a_s), UnitaryGate(u)};

    ComplexMatrix x = a_s * (1.0 / (2.0 * std::sqrt(2.0) * zeta));
    const double diff = spectral_spread(x - u.adjoint() * x * u);
    const double x_norm = operator_norm(x);
    if (diff / 2.0 > x_norm * (1.0 + 1e-12) || x_norm > a * (1.0 + 1e-12)) continue;
    const double bound = 1.0 - diff * diff / 4.0 * (1.0 + 2.0 * a) * (1.0 + 2.0 * a);

    DensityMatrix rho = DensityMatrix::from_pure(random_pure(d, rng));
    log.record(bound, fidelity_lower_bound(target, zeta, rho));
    log.record(bound, detail::numerical_range_distance(lower_bound_operator(target, zeta)));
  }
  return log.result();
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"lemma3", "l1", "conservation", "single_state", "c2"};
  return names;
}

inline CheckOutcome run_suite(const std::string& name, int trials, std::uint64_t seed, std::size_t dim_max = 4) {
  if (name == "lemma3") return check_lemma_key_relation(trials, seed, dim_max);
  if (name == "l1") return check_lemma_L1(trials, seed);
  if (name == "conservation") return check_conservation_lemmas(trials, seed);
  if (name == "single_state") return check_single_state_bound(trials, seed);
  if (name == "c2") return check_c2(trials, seed);
  throw ValidationError("unknown suite '" + name + "'");
}

}  // namespace cohcost
