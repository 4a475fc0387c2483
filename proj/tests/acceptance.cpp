#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

#include "commands.hpp"
#include "test_util.hpp"

using namespace cohcost;
using namespace testutil;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int report(int id, const std::string& title, double limit_s, const std::function<Verdict()>& body) {
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool pass = v.pass && in_time;
  std::printf("%s criterion %d (%s): %s [%.2fs, limit %.0fs]\n", pass ? "PASS" : "FAIL", id, title.c_str(),
              v.detail.c_str(), secs, limit_s);
  return pass ? 0 : 1;
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

Verdict fig2() {
  auto rows = cctool::fig2_rows(bitflip_model(), NormConvention::Given, 0.05, 1.3, 100);
  const double edge = 8 * std::sqrt(2.0) / 9;
  double worst = 0;
  bool domain = true;
  for (const auto& r : rows) {
    worst = std::max(worst, std::abs(r.region_a - std::max(0.0, 1 / r.delta - 2)));
    if (r.domain_ok) worst = std::max(worst, std::abs(r.region_b - (1 / r.delta + std::sqrt(2.0) / 2)));
    domain = domain && (r.domain_ok == (r.delta <= edge));
  }
  return {worst <= 1e-12 && domain, "max closed-form deviation " + num(worst)};
}

Verdict threshold() {
  const double zeta = 9 / (2 * std::sqrt(2.0));
  TargetSpec t = bitflip_model();
  GaussianProtocol p = protocol_for_zeta(t, zeta);
  const double delta = worst_case_error(p.set, t).worst_delta;
  const double f = qfi(p.set.rho_E, p.set.A_E);
  const bool lattice = p.lattice.spacing == 1.0 && p.lattice.half_width == 27;
  const bool ok = lattice && delta <= 0.17460 + 1e-6 && std::abs(f - 40.5) <= 0.01 * 40.5;
  return {ok, "delta " + num(delta) + ", qfi " + num(f) + ", N " + std::to_string(p.lattice.half_width)};
}

Verdict sweep() {
  TargetSpec t = bitflip_model();
  bool ok = true;
  double product = 0;
  for (double z : {4.0, 8.0, 16.0, 32.0, 64.0}) {
    auto row = cctool::sweep_row(t, NormConvention::Given, z, 42);
    ok = ok && 2 * z >= 1 / row.delta - 2 - 1e-6;
    if (z == 64.0) product = row.delta * 2 * z;
  }
  ok = ok && product >= 0.9 && product <= 1.1;
  return {ok, "delta*2zeta at zeta=64 is " + num(product)};
}

Verdict suites() {
  const std::vector<std::pair<std::string, int>> plan = {
      {"lemma3", 1000}, {"conservation", 1000}, {"l1", 500}, {"c2", 500}, {"single_state", 300}};
  int total = 0;
  std::string detail;
  for (const auto& [name, n] : plan) {
    CheckOutcome o = run_suite(name, n, 42);
    total += o.violations;
    detail += name + "=" + std::to_string(o.violations) + "/" + std::to_string(o.trials) + " ";
  }
  detail.pop_back();
  return {total == 0, detail};
}

Verdict identities() {
  const int n = 1000;
  int failures = 0;
  Rng rng(42);
  for (int k = 0; k < n; ++k) {
    const std::size_t d = uniform_index(rng, 2, 5);
    PureState psi = random_pure(d, rng);
    HermitianObservable a(random_hermitian(d, rng));
    if (std::abs(qfi(DensityMatrix::from_pure(psi), a) - 4 * raw_variance_squared(psi.projector(), a.mat())) > 1e-9)
      ++failures;
  }
  for (int k = 0; k < n; ++k) {
    const std::size_t d1 = uniform_index(rng, 2, 3), d2 = uniform_index(rng, 2, 3);
    DensityMatrix r1 = random_density(d1, rng), r2 = random_density(d2, rng);
    HermitianObservable a(random_hermitian(d1, rng)), b(random_hermitian(d2, rng));
    HermitianObservable tot(kron(a.mat(), ComplexMatrix::identity(d2)) + kron(ComplexMatrix::identity(d1), b.mat()));
    if (std::abs(qfi(DensityMatrix(kron(r1.mat(), r2.mat())), tot) - qfi(r1, a) - qfi(r2, b)) > 1e-8) ++failures;
  }
  for (int k = 0; k < n; ++k) {
    const std::size_t d = uniform_index(rng, 2, 4);
    ComplexMatrix u = random_unitary_matrix(d, rng);
    std::vector<double> levels(d), p(d);
    double s = 0;
    for (std::size_t i = 0; i < d; ++i) {
      levels[i] = uniform(rng, -2, 2);
      p[i] = uniform(rng);
      s += p[i];
    }
    for (double& x : p) x /= s;
    ComplexMatrix am = u * ComplexMatrix::diagonal(levels) * u.adjoint();
    HermitianObservable a((am + am.adjoint()) * 0.5);
    if (k % 2 == 0) {
      ComplexMatrix rm = u * ComplexMatrix::diagonal(p) * u.adjoint();
      if (qfi(DensityMatrix((rm + rm.adjoint()) * 0.5), a) > 1e-9) ++failures;
    } else {
      DensityMatrix rho = random_density(d, rng);
      if (operator_norm(commutator(rho.mat(), a.mat())) > 1e-9 && !(qfi(rho, a) > 0)) ++failures;
    }
  }
  for (int k = 0; k < n; ++k) {
    const std::size_t d = uniform_index(rng, 2, 3);
    DensityMatrix rho = random_density(d, rng, uniform_index(rng, 1, d));
    Channel ch = Channel::compose(Channel::depolarizing(d, uniform(rng, 0, 0.5)), Channel::unitary(random_unitary(d, rng)));
    PureState base = purify(rho);
    ComplexMatrix w = random_unitary_matrix(d, rng);
    CVector alt(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t r2 = 0; r2 < d; ++r2) alt[i * d + r] += w(r, r2) * base.vec()[i * d + r2];
    if (std::abs(entanglement_fidelity(base, d, ch) - entanglement_fidelity(PureState::normalize(alt), d, ch)) > 1e-10)
      ++failures;
  }
  return {failures == 0, std::to_string(failures) + " failures over 4x" + std::to_string(n) + " instances"};
}

Verdict erasure() {
  TargetSpec t = erasure_model();
  const double target = 0.02;
  auto t2 = theorem2_bound(gate_asymmetry(t.U_S, t.A_S), target, charge_norm(t.A_S));
  GaussianProtocol p = protocol_for_target(t, t2.value * t2.value);
  const double delta = worst_case_error(p.set, t).worst_delta;
  const double sqrt_f = std::sqrt(qfi(p.set.rho_E, p.set.A_E));
  const double bound = erasure_bound(delta, 1.0);
  std::vector<PureState> basis = {PureState::basis(4, 0), PureState::basis(4, 3)};
  double best = 0;
  for (int k = 0; k <= 1000; ++k) {
    const double theta = (std::numbers::pi / 2) * k / 1000.0;
    best = std::max(best, chi(DensityMatrix::from_pure(PureState::normalize({std::cos(theta), 0.0, 0.0, std::sin(theta)})),
                              basis, t));
  }
  const bool ok = delta <= target && sqrt_f >= bound - 1e-6 && std::abs(best - 1) <= 1e-9;
  return {ok, "delta " + num(delta) + ", sqrtF " + num(sqrt_f) + " >= " + num(bound) + ", max chi " + num(best)};
}

}  // namespace

int main() {
  int failed = 0;
  failed += report(1, "fig2 boundaries", 1, fig2);
  failed += report(2, "threshold protocol", 30, threshold);
  failed += report(3, "theorem 1 sweep", 180, sweep);
  failed += report(4, "inequality suites", 600, suites);
  failed += report(5, "measure identities", 600, identities);
  failed += report(6, "erasure bound", 600, erasure);
  return failed == 0 ? 0 : 1;
}
