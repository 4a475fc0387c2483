#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cohcost/errors.hpp"
#include "cohcost/numerics.hpp"

namespace cohcost {

/// Hermitian operator within 1e-10.
class HermitianObservable {
 public:
  explicit HermitianObservable(ComplexMatrix m) : mat_(std::move(m)) {
    if (!mat_.square()) throw ValidationError("observable must be square");
    if (!is_hermitian(mat_)) throw ValidationError("observable is not Hermitian");
  }
  static HermitianObservable diagonal(const std::vector<double>& d) {
    return HermitianObservable(ComplexMatrix::diagonal(d));
  }
  const ComplexMatrix& mat() const noexcept { return mat_; }
  std::size_t dim() const noexcept { return mat_.rows(); }

 private:
  ComplexMatrix mat_;
};

/// Unitary with ||U^dagger U - I||_op <= 1e-10.
class UnitaryGate {
 public:
  explicit UnitaryGate(ComplexMatrix m) : mat_(std::move(m)) {
    if (!mat_.square()) throw ValidationError("unitary must be square");
    double dev = operator_norm(mat_.adjoint() * mat_ - ComplexMatrix::identity(mat_.rows()));
    if (dev > 1e-10) throw ValidationError("matrix is not unitary (deviation " + std::to_string(dev) + ")");
  }
  /// Skips the O(n^3) check for matrices that are unitary by construction.
  static UnitaryGate assume_unitary(ComplexMatrix m) {
    if (!m.square()) throw ValidationError("unitary must be square");
    return UnitaryGate(std::move(m), Trusted{});
  }
  static UnitaryGate identity(std::size_t n) { return assume_unitary(ComplexMatrix::identity(n)); }

  const ComplexMatrix& mat() const noexcept { return mat_; }
  std::size_t dim() const noexcept { return mat_.rows(); }
  UnitaryGate adjoint() const { return assume_unitary(mat_.adjoint()); }

 private:
  struct Trusted {};
  UnitaryGate(ComplexMatrix m, Trusted) : mat_(std::move(m)) {}
  ComplexMatrix mat_;
};

/// Unit vector within 1e-12.
class PureState {
 public:
  explicit PureState(CVector v) : vec_(std::move(v)) {
    if (vec_.empty()) throw ValidationError("pure state must be non-empty");
    double n = norm2(vec_);
    if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-12)
      throw ValidationError("pure state is not normalized (norm " + std::to_string(n) + ")");
  }
  static PureState normalize(CVector v) { return PureState(normalized(std::move(v))); }
  static PureState basis(std::size_t dim, std::size_t k) {
    CVector v(dim, 0.0);
    v.at(k) = 1.0;
    return PureState(std::move(v));
  }

  const CVector& vec() const noexcept { return vec_; }
  std::size_t dim() const noexcept { return vec_.size(); }
  ComplexMatrix projector() const { return outer(vec_, vec_); }

 private:
  CVector vec_;
};

/// Hermitian, PSD (eigenvalues >= -1e-10), unit trace within 1e-10.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {
    if (!mat_.square()) throw ValidationError("density matrix must be square");
    if (std::abs(mat_.trace() - cplx(1.0, 0.0)) > 1e-10) throw ValidationError("density matrix trace is not 1");
    Spectrum sp = hermitian_eig(mat_);
    require_psd(sp, "density matrix");
  }
  static DensityMatrix from_pure(const PureState& s) { return DensityMatrix(s.projector(), Trusted{}); }
  static DensityMatrix assume_valid(ComplexMatrix m) {
    if (!m.square()) throw ValidationError("density matrix must be square");
    return DensityMatrix(std::move(m), Trusted{});
  }
  static DensityMatrix maximally_mixed(std::size_t d) {
    return DensityMatrix(ComplexMatrix::identity(d) * (1.0 / double(d)), Trusted{});
  }

  const ComplexMatrix& mat() const noexcept { return mat_; }
  std::size_t dim() const noexcept { return mat_.rows(); }

  double purity() const {
    double f = mat_.frobenius_norm();
    return f * f;
  }

  /// Returns the state vector when Tr[rho^2] is within 1e-12 of 1.
  std::optional<CVector> pure_vector() const {
    if (std::abs(purity() - 1.0) >= 1e-12) return std::nullopt;
    std::size_t k = 0;
    for (std::size_t i = 1; i < dim(); ++i)
      if (mat_(i, i).real() > mat_(k, k).real()) k = i;
    double pk = mat_(k, k).real();
    CVector v(dim());
    for (std::size_t i = 0; i < dim(); ++i) v[i] = mat_(i, k) / std::sqrt(pk);
    return normalized(v);
  }

 private:
  struct Trusted {};
  DensityMatrix(ComplexMatrix m, Trusted) : mat_(std::move(m)) {}
  ComplexMatrix mat_;
};

/// Channel stored as its Choi matrix J = sum_ij L(|i><j|) (x) |i><j|
/// (output factor on the left), so L(X) = Tr_in[J (I (x) X^T)].
class Channel {
 public:
  Channel(ComplexMatrix choi, std::size_t d_in, std::size_t d_out)
      : choi_(std::move(choi)), d_in_(d_in), d_out_(d_out) {
    if (!choi_.square() || choi_.rows() != d_in * d_out) throw ValidationError("Choi matrix has wrong dimension");
  }

  static Channel identity(std::size_t d) { return unitary(ComplexMatrix::identity(d)); }

  static Channel unitary(const ComplexMatrix& u) { return from_kraus({u}); }
  static Channel unitary(const UnitaryGate& u) { return unitary(u.mat()); }

  /// Kraus operators K_e are d_out x d_in.
  static Channel from_kraus(const std::vector<ComplexMatrix>& kraus) {
    if (kraus.empty()) throw ValidationError("empty Kraus list");
    const std::size_t d_out = kraus.front().rows(), d_in = kraus.front().cols();
    const std::size_t n = d_in * d_out;
    ComplexMatrix j(n, n);
    for (const auto& k : kraus) {
      if (k.rows() != d_out || k.cols() != d_in) throw ValidationError("Kraus operators differ in shape");
      const auto& v = k.data();
      for (std::size_t x = 0; x < n; ++x) {
        if (v[x] == cplx(0.0, 0.0)) continue;
        for (std::size_t y = 0; y < n; ++y) j(x, y) += v[x] * std::conj(v[y]);
      }
    }
    return Channel(std::move(j), d_in, d_out);
  }

  /// rho -> (1-p) rho + p Tr[rho] I/d
  static Channel depolarizing(std::size_t d, double p) {
    Channel id = identity(d);
    ComplexMatrix j = id.choi_ * (1.0 - p) + ComplexMatrix::identity(d * d) * (p / double(d));
    return Channel(std::move(j), d, d);
  }

  /// rho -> Tr[rho] sigma
  static Channel replacement(std::size_t d_in, const DensityMatrix& sigma) {
    return Channel(kron(sigma.mat(), ComplexMatrix::identity(d_in)), d_in, sigma.dim());
  }

  const ComplexMatrix& choi() const noexcept { return choi_; }
  std::size_t d_in() const noexcept { return d_in_; }
  std::size_t d_out() const noexcept { return d_out_; }

  ComplexMatrix apply(const ComplexMatrix& x) const {
    if (x.rows() != d_in_ || x.cols() != d_in_) throw ValidationError("channel input dimension mismatch");
    ComplexMatrix out(d_out_, d_out_);
    for (std::size_t a = 0; a < d_out_; ++a)
      for (std::size_t b = 0; b < d_out_; ++b) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < d_in_; ++i)
          for (std::size_t k = 0; k < d_in_; ++k) s += choi_(a * d_in_ + i, b * d_in_ + k) * x(i, k);
        out(a, b) = s;
      }
    return out;
  }

  /// (L (x) id_anc)(M) for M on in (x) anc.
  ComplexMatrix apply_on_first(const ComplexMatrix& m, std::size_t d_anc) const {
    if (m.rows() != d_in_ * d_anc || !m.square()) throw ValidationError("apply_on_first: dimension mismatch");
    const std::size_t n = d_out_ * d_anc;
    ComplexMatrix out(n, n);
    for (std::size_t a = 0; a < d_out_; ++a)
      for (std::size_t b = 0; b < d_out_; ++b)
        for (std::size_t i = 0; i < d_in_; ++i)
          for (std::size_t k = 0; k < d_in_; ++k) {
            const cplx jv = choi_(a * d_in_ + i, b * d_in_ + k);
            if (jv == cplx(0.0, 0.0)) continue;
            for (std::size_t r = 0; r < d_anc; ++r)
              for (std::size_t s = 0; s < d_anc; ++s) out(a * d_anc + r, b * d_anc + s) += jv * m(i * d_anc + r, k * d_anc + s);
          }
    return out;
  }

  /// second o first
  static Channel compose(const Channel& first, const Channel& second) {
    if (first.d_out_ != second.d_in_) throw ValidationError("compose: dimension mismatch");
    const std::size_t di = first.d_in_, dm = first.d_out_, d_o = second.d_out_;
    ComplexMatrix j(d_o * di, d_o * di);
    for (std::size_t c = 0; c < d_o; ++c)
      for (std::size_t d = 0; d < d_o; ++d)
        for (std::size_t a = 0; a < dm; ++a)
          for (std::size_t b = 0; b < dm; ++b) {
            const cplx j2 = second.choi_(c * dm + a, d * dm + b);
            if (j2 == cplx(0.0, 0.0)) continue;
            for (std::size_t i = 0; i < di; ++i)
              for (std::size_t k = 0; k < di; ++k) j(c * di + i, d * di + k) += j2 * first.choi_(a * di + i, b * di + k);
          }
    return Channel(std::move(j), di, d_o);
  }

  /// X -> U L(X) U^dagger
  Channel conjugate_output(const ComplexMatrix& u) const {
    ComplexMatrix ui = kron(u, ComplexMatrix::identity(d_in_));
    return Channel(ui * choi_ * ui.adjoint(), d_in_, d_out_);
  }

  bool is_trace_preserving(double tol = 1e-9) const {
    ComplexMatrix t = partial_trace(choi_, Keep::E, d_out_, d_in_);
    return (t - ComplexMatrix::identity(d_in_)).max_abs() <= tol;
  }

 private:
  ComplexMatrix choi_;
  std::size_t d_in_;
  std::size_t d_out_;
};

// ---------------------------------------------------------------------------
// Fidelity and distances

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ValidationError(std::string(what) + ": dimension mismatch");
}

/// Tr sqrt(sqrt(rho) sigma sqrt(rho)).
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho.dim(), sigma.dim(), "fidelity");
  if (auto v = rho.pure_vector()) return std::sqrt(std::max(0.0, expectation(sigma.mat(), *v).real()));
  if (auto v = sigma.pure_vector()) return std::sqrt(std::max(0.0, expectation(rho.mat(), *v).real()));
  // Singular values of sqrt(rho) sqrt(sigma) restricted to both supports, so swapping the
  // arguments only transposes the factor.
  auto support_factor = [](const ComplexMatrix& m) {
    Spectrum sp = hermitian_eig(m);
    require_psd(sp, "fidelity");
    const double cut = 64.0 * std::numeric_limits<double>::epsilon() * double(m.rows()) * std::max(sp.max(), 1.0);
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < sp.values.size(); ++k)
      if (sp.values[k] > cut) keep.push_back(k);
    ComplexMatrix f(m.rows(), keep.size());
    for (std::size_t c = 0; c < keep.size(); ++c) {
      const double w = std::sqrt(sp.values[keep[c]]);
      for (std::size_t r = 0; r < m.rows(); ++r) f(r, c) = sp.vectors(r, keep[c]) * w;
    }
    return f;
  };
  ComplexMatrix b = support_factor(rho.mat()).adjoint() * support_factor(sigma.mat());
  if (b.rows() == 0 || b.cols() == 0) return 0.0;
  ComplexMatrix g = b.rows() <= b.cols() ? b * b.adjoint() : b.adjoint() * b;
  g = (g + g.adjoint()) * 0.5;
  double f = 0.0;
  for (double l : hermitian_eig(g).values) f += std::sqrt(std::max(l, 0.0));
  return f;
}

inline double bures_from_fidelity(double f) { return std::sqrt(std::max(0.0, 2.0 * (1.0 - f))); }

inline double bures_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return bures_from_fidelity(fidelity(rho, sigma));
}

/// sum_a sqrt(p_a) |psi_a> (x) |a> over ascending eigenpairs, on S (x) R with d_R = d_S.
inline PureState purify(const DensityMatrix& rho) {
  const std::size_t d = rho.dim();
  Spectrum sp = hermitian_eig(rho.mat());
  CVector v(d * d, 0.0);
  for (std::size_t a = 0; a < d; ++a) {
    double w = std::sqrt(std::max(sp.values[a], 0.0));
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) v[i * d + a] = w * sp.vectors(i, a);
  }
  return PureState::normalize(std::move(v));
}

/// F_e via the quadratic form vec(rho)^dagger J vec(rho).
inline double entanglement_fidelity(const DensityMatrix& rho, const Channel& ch) {
  require_same_dim(rho.dim(), ch.d_in(), "entanglement_fidelity");
  require_same_dim(rho.dim(), ch.d_out(), "entanglement_fidelity");
  const CVector w = vec(rho.mat());
  double f2 = inner(w, ch.choi() * w).real();
  return std::min(1.0, std::sqrt(std::max(0.0, f2)));
}

/// F_e evaluated on an explicit purification psi of rho on S (x) R.
inline double entanglement_fidelity(const PureState& psi, std::size_t d_s, const Channel& ch) {
  if (psi.dim() % d_s != 0) throw ValidationError("entanglement_fidelity: purification dimension mismatch");
  const std::size_t d_r = psi.dim() / d_s;
  ComplexMatrix out = ch.apply_on_first(psi.projector(), d_r);
  double f2 = expectation(out, psi.vec()).real();
  return std::min(1.0, std::sqrt(std::max(0.0, f2)));
}

inline double entanglement_bures(const DensityMatrix& rho, const Channel& ch) {
  return bures_from_fidelity(entanglement_fidelity(rho, ch));
}

}  // namespace cohcost
