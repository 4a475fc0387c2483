#pragma once

// Dense complex linear algebra used throughout the library.
//
// Tensor convention: for a composite space S (x) E the system S is the LEFT
// Kronecker factor and the composite index of |s>|e> is s*d_E + e.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cohcost/errors.hpp"

namespace cohcost {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// Dense row-major matrix of complex doubles.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0, 0.0)) {
    if (rows == 0 || cols == 0) throw ValidationError("matrix dimensions must be positive");
  }

  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows == 0 || cols == 0) throw ValidationError("matrix dimensions must be positive");
    if (data_.size() != rows * cols)
      throw ValidationError("entry count " + std::to_string(data_.size()) + " does not match " +
                            std::to_string(rows) + "x" + std::to_string(cols));
    if (!is_finite()) throw ValidationError("matrix has non-finite entries");
  }

  /// Build from nested row lists, e.g. {{0, 1}, {1, 0}}.
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r ? rows.begin()->size() : 0;
    std::vector<cplx> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
      if (row.size() != c) throw ValidationError("ragged row list");
      data.insert(data.end(), row.begin(), row.end());
    }
    return ComplexMatrix(r, c, std::move(data));
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(const std::vector<double>& d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static ComplexMatrix diagonal(const CVector& d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<cplx>& data() const noexcept { return data_; }
  std::vector<cplx>& data() noexcept { return data_; }

  bool is_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  ComplexMatrix transpose() const {
    ComplexMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  ComplexMatrix conj() const {
    ComplexMatrix r = *this;
    for (auto& z : r.data_) z = std::conj(z);
    return r;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  ComplexMatrix& operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(ComplexMatrix a, double s) { return a *= cplx(s, 0.0); }
  friend ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= cplx(s, 0.0); }
  friend ComplexMatrix operator-(ComplexMatrix a) { return a *= cplx(-1.0, 0.0); }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) throw ValidationError("matrix product shape mismatch");
    ComplexMatrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      cplx* out = &r.data_[i * b.cols_];
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a.data_[i * a.cols_ + k];
        if (aik == cplx(0.0, 0.0)) continue;
        const cplx* brow = &b.data_[k * b.cols_];
        for (std::size_t j = 0; j < b.cols_; ++j) out[j] += aik * brow[j];
      }
    }
    return r;
  }

  friend CVector operator*(const ComplexMatrix& a, const CVector& v) {
    if (a.cols_ != v.size()) throw ValidationError("matrix-vector shape mismatch");
    CVector r(a.rows_, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < a.rows_; ++i) {
      cplx s = 0.0;
      const cplx* row = &a.data_[i * a.cols_];
      for (std::size_t j = 0; j < a.cols_; ++j) s += row[j] * v[j];
      r[i] = s;
    }
    return r;
  }

 private:
  void require_same_shape(const ComplexMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ValidationError("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

// ---------------------------------------------------------------------------
// Vector helpers

inline cplx inner(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw ValidationError("vector length mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double norm2(const CVector& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

inline CVector normalized(CVector v) {
  double n = norm2(v);
  if (n == 0.0) throw ValidationError("cannot normalize the zero vector");
  for (auto& z : v) z /= n;
  return v;
}

/// |a><b|
inline ComplexMatrix outer(const CVector& a, const CVector& b) {
  ComplexMatrix r(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r(i, j) = a[i] * std::conj(b[j]);
  return r;
}

/// <v|A|v>
inline cplx expectation(const ComplexMatrix& a, const CVector& v) { return inner(v, a * v); }

inline CVector column(const ComplexMatrix& m, std::size_t j) {
  CVector c(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) c[i] = m(i, j);
  return c;
}

inline CVector kron(const CVector& a, const CVector& b) {
  CVector r(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) r[i * b.size() + k] = a[i] * b[k];
  return r;
}

// ---------------------------------------------------------------------------
// Tensor structure

/// (A (x) B)[(i*rB+k),(j*cB+l)] = A[i,j] * B[k,l].
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t rb = b.rows(), cb = b.cols();
  ComplexMatrix r(a.rows() * rb, a.cols() * cb);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx(0.0, 0.0)) continue;
      for (std::size_t k = 0; k < rb; ++k)
        for (std::size_t l = 0; l < cb; ++l) r(i * rb + k, j * cb + l) = aij * b(k, l);
    }
  return r;
}

enum class Keep { S, E };

/// Partial trace over one factor of S (x) E.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, Keep keep, std::size_t d_s, std::size_t d_e) {
  if (!m.square() || m.rows() != d_s * d_e)
    throw ValidationError("partial_trace: matrix is not (d_S*d_E)-square");
  if (keep == Keep::S) {
    ComplexMatrix r(d_s, d_s);
    for (std::size_t a = 0; a < d_s; ++a)
      for (std::size_t b = 0; b < d_s; ++b) {
        cplx s = 0.0;
        for (std::size_t e = 0; e < d_e; ++e) s += m(a * d_e + e, b * d_e + e);
        r(a, b) = s;
      }
    return r;
  }
  ComplexMatrix r(d_e, d_e);
  for (std::size_t e = 0; e < d_e; ++e)
    for (std::size_t f = 0; f < d_e; ++f) {
      cplx s = 0.0;
      for (std::size_t a = 0; a < d_s; ++a) s += m(a * d_e + e, a * d_e + f);
      r(e, f) = s;
    }
  return r;
}

/// Partial trace on a multipartite space with factor dimensions `dims`
/// (leftmost factor most significant). `keep` lists the retained factors in
/// the order they should appear in the result.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                                   const std::vector<std::size_t>& keep) {
  const std::size_t n = dims.size();
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  if (!m.square() || m.rows() != total) throw ValidationError("partial_trace: dimension mismatch");
  std::vector<bool> kept(n, false);
  for (auto k : keep) {
    if (k >= n || kept[k]) throw ValidationError("partial_trace: invalid keep list");
    kept[k] = true;
  }
  std::vector<std::size_t> traced;
  for (std::size_t k = 0; k < n; ++k)
    if (!kept[k]) traced.push_back(k);

  std::vector<std::size_t> stride(n, 1);
  for (std::size_t k = n; k-- > 1;) stride[k - 1] = stride[k] * dims[k];

  auto split = [&](std::size_t idx, const std::vector<std::size_t>& which) {
    std::vector<std::size_t> digits(which.size());
    for (std::size_t p = which.size(); p-- > 0;) {
      digits[p] = idx % dims[which[p]];
      idx /= dims[which[p]];
    }
    return digits;
  };
  std::size_t dk = 1, dt = 1;
  for (auto k : keep) dk *= dims[k];
  for (auto k : traced) dt *= dims[k];

  std::vector<std::size_t> keep_off(dk), trace_off(dt);
  for (std::size_t i = 0; i < dk; ++i) {
    auto d = split(i, keep);
    std::size_t off = 0;
    for (std::size_t p = 0; p < keep.size(); ++p) off += d[p] * stride[keep[p]];
    keep_off[i] = off;
  }
  for (std::size_t t = 0; t < dt; ++t) {
    auto d = split(t, traced);
    std::size_t off = 0;
    for (std::size_t p = 0; p < traced.size(); ++p) off += d[p] * stride[traced[p]];
    trace_off[t] = off;
  }
  ComplexMatrix r(dk, dk);
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      cplx s = 0.0;
      for (std::size_t t = 0; t < dt; ++t) s += m(keep_off[i] + trace_off[t], keep_off[j] + trace_off[t]);
      r(i, j) = s;
    }
  return r;
}

/// Reduced state of the pure vector psi on S (x) E without forming |psi><psi|.
inline ComplexMatrix reduced_state(const CVector& psi, Keep keep, std::size_t d_s, std::size_t d_e) {
  if (psi.size() != d_s * d_e) throw ValidationError("reduced_state: dimension mismatch");
  if (keep == Keep::S) {
    ComplexMatrix r(d_s, d_s);
    for (std::size_t a = 0; a < d_s; ++a)
      for (std::size_t b = 0; b < d_s; ++b) {
        cplx s = 0.0;
        for (std::size_t e = 0; e < d_e; ++e) s += psi[a * d_e + e] * std::conj(psi[b * d_e + e]);
        r(a, b) = s;
      }
    return r;
  }
  ComplexMatrix r(d_e, d_e);
  for (std::size_t e = 0; e < d_e; ++e)
    for (std::size_t f = 0; f < d_e; ++f) {
      cplx s = 0.0;
      for (std::size_t a = 0; a < d_s; ++a) s += psi[a * d_e + e] * std::conj(psi[a * d_e + f]);
      r(e, f) = s;
    }
  return r;
}

/// Reduced state of a pure vector on a multipartite space; `keep` lists the
/// retained factors in output order.
inline ComplexMatrix reduced_state(const CVector& psi, const std::vector<std::size_t>& dims,
                                   const std::vector<std::size_t>& keep) {
  const std::size_t n = dims.size();
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  if (psi.size() != total) throw ValidationError("reduced_state: dimension mismatch");
  std::vector<bool> kept(n, false);
  for (auto k : keep) {
    if (k >= n || kept[k]) throw ValidationError("reduced_state: invalid keep list");
    kept[k] = true;
  }
  std::vector<std::size_t> traced;
  for (std::size_t k = 0; k < n; ++k)
    if (!kept[k]) traced.push_back(k);
  std::vector<std::size_t> stride(n, 1);
  for (std::size_t k = n; k-- > 1;) stride[k - 1] = stride[k] * dims[k];
  auto offsets = [&](const std::vector<std::size_t>& which) {
    std::size_t count = 1;
    for (auto k : which) count *= dims[k];
    std::vector<std::size_t> off(count, 0);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t idx = i, o = 0;
      for (std::size_t p = which.size(); p-- > 0;) {
        o += (idx % dims[which[p]]) * stride[which[p]];
        idx /= dims[which[p]];
      }
      off[i] = o;
    }
    return off;
  };
  const auto ko = offsets(keep), to = offsets(traced);
  ComplexMatrix r(ko.size(), ko.size());
  for (std::size_t i = 0; i < ko.size(); ++i)
    for (std::size_t j = i; j < ko.size(); ++j) {
      cplx s = 0.0;
      for (std::size_t t = 0; t < to.size(); ++t) s += psi[ko[i] + to[t]] * std::conj(psi[ko[j] + to[t]]);
      r(i, j) = s;
      r(j, i) = std::conj(s);
    }
  return r;
}

/// Row-major vectorization: vec(M)[i*cols+j] = M[i,j].
inline CVector vec(const ComplexMatrix& m) { return m.data(); }

inline ComplexMatrix unvec(const CVector& v, std::size_t rows, std::size_t cols) {
  return ComplexMatrix(rows, cols, v);
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

// ---------------------------------------------------------------------------
// Hermitian eigensolver

/// Eigenvalues ascending; eigenvector k is column k of `vectors`.
struct Spectrum {
  std::vector<double> values;
  ComplexMatrix vectors;

  double min() const { return values.front(); }
  double max() const { return values.back(); }
  CVector vector(std::size_t k) const { return column(vectors, k); }
};

struct JacobiOptions {
  double relative_tolerance = 1e-13;
  int max_sweeps = 100;
};

namespace detail {

inline double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

}  // namespace detail

/// Cyclic complex Jacobi without the Hermiticity pre-check. Only the
/// Hermitian part of `h` is meaningful.
inline Spectrum hermitian_eig_unchecked(const ComplexMatrix& h, JacobiOptions opt = {}) {
  if (!h.square()) throw ValidationError("hermitian_eig: matrix is not square");
  const std::size_t n = h.rows();
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i)));
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double tol = opt.relative_tolerance * a.frobenius_norm();

  int sweep = 0;
  double off = detail::off_diagonal_norm(a);
  while (off > tol) {
    if (sweep == opt.max_sweeps)
      throw ConvergenceError("hermitian_eig: no convergence after " + std::to_string(opt.max_sweeps) + " sweeps",
                             off);
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double g = std::abs(apq);
        if (g == 0.0) continue;
        const cplx ph = apq / g;
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * g);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx s_ph = s * ph;
        const cplx s_phc = s * std::conj(ph);
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s_phc * akq;
          a(k, q) = s_ph * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s_ph * aqk;
          a(q, k) = s_phc * apk + c * aqk;
        }
        a(p, p) = app - t * g;
        a(q, q) = aqq + t * g;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s_phc * vkq;
          v(k, q) = s_ph * vkp + c * vkq;
        }
      }
    }
    off = detail::off_diagonal_norm(a);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  Spectrum out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Norms

namespace detail {

/// Largest eigenvalue of a PSD operator given as a matvec closure.
inline double power_iteration_psd(std::size_t n, const std::function<CVector(const CVector&)>& apply,
                                  int max_iter = 2000, double rel_tol = 1e-13) {
  CVector x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = cplx(1.0 + 0.37 * std::sin(1.7 * double(i) + 0.3), 0.21 * std::cos(0.9 * double(i)));
  x = normalized(x);
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    CVector y = apply(x);
    double ny = norm2(y);
    if (ny == 0.0) return 0.0;
    double next = inner(x, y).real();
    for (auto& z : y) z /= ny;
    x = std::move(y);
    if (it > 5 && std::abs(next - lambda) <= rel_tol * std::abs(next)) return std::max(next, 0.0);
    lambda = next;
  }
  return std::max(lambda, 0.0);
}

constexpr std::size_t kDenseNormLimit = 160;

}  // namespace detail

/// Largest singular value for a square operator available only through
/// matvecs with M and M^dagger.
inline double operator_norm(std::size_t n, const std::function<CVector(const CVector&)>& apply,
                            const std::function<CVector(const CVector&)>& apply_adjoint) {
  return std::sqrt(detail::power_iteration_psd(n, [&](const CVector& x) { return apply_adjoint(apply(x)); }));
}

/// Largest singular value. Dense Jacobi on M^dagger M for moderate sizes,
/// power iteration beyond that.
inline double operator_norm(const ComplexMatrix& m) {
  if (m.rows() <= detail::kDenseNormLimit && m.cols() <= detail::kDenseNormLimit) {
    Spectrum sp = hermitian_eig_unchecked(m.adjoint() * m);
    return std::sqrt(std::max(sp.max(), 0.0));
  }
  ComplexMatrix ad = m.adjoint();
  return operator_norm(
      m.cols(), [&](const CVector& x) { return m * x; }, [&](const CVector& x) { return ad * x; });
}

/// Sum of singular values.
inline double trace_norm_hermitian(const ComplexMatrix& h);
inline bool is_hermitian(const ComplexMatrix& h, double tol);

inline double trace_norm(const ComplexMatrix& m) {
  if (is_hermitian(m, 1e-14)) return trace_norm_hermitian((m + m.adjoint()) * 0.5);
  Spectrum sp = hermitian_eig_unchecked(m.adjoint() * m);
  double s = 0.0;
  for (double l : sp.values) s += std::sqrt(std::max(l, 0.0));
  return s;
}

/// Sum of |eigenvalues| of a Hermitian matrix.
inline double trace_norm_hermitian(const ComplexMatrix& h) {
  Spectrum sp = hermitian_eig_unchecked(h);
  double s = 0.0;
  for (double l : sp.values) s += std::abs(l);
  return s;
}

/// True when ||H - H^dagger||_op <= tol * (1 + ||H||_op).
inline bool is_hermitian(const ComplexMatrix& h, double tol = 1e-10) {
  if (!h.square()) return false;
  const std::size_t n = h.rows();
  ComplexMatrix d = h - h.adjoint();
  const double dF = d.frobenius_norm();
  if (dF == 0.0) return true;
  const double hF = h.frobenius_norm();
  if (dF <= tol * (1.0 + hF / std::sqrt(double(n)))) return true;
  if (dF > tol * (1.0 + hF) * std::sqrt(double(n))) return false;
  return operator_norm(d) <= tol * (1.0 + operator_norm(h));
}

inline Spectrum hermitian_eig(const ComplexMatrix& h, JacobiOptions opt = {}) {
  if (!h.square()) throw ValidationError("hermitian_eig: matrix is not square");
  if (!is_hermitian(h)) throw ValidationError("hermitian_eig: matrix is not Hermitian");
  return hermitian_eig_unchecked(h, opt);
}

/// Lowest and highest eigenvalue difference.
inline double spectral_spread(const ComplexMatrix& h) {
  Spectrum sp = hermitian_eig(h);
  return sp.max() - sp.min();
}

// ---------------------------------------------------------------------------
// Matrix functions

inline ComplexMatrix reconstruct(const Spectrum& sp, const CVector& fvals) {
  const std::size_t n = sp.values.size();
  ComplexMatrix r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (fvals[k] == cplx(0.0, 0.0)) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vik = sp.vectors(i, k) * fvals[k];
      for (std::size_t j = 0; j < n; ++j) r(i, j) += vik * std::conj(sp.vectors(j, k));
    }
  }
  return r;
}

/// V f(Lambda) V^dagger.
template <class F>
ComplexMatrix func_hermitian(const ComplexMatrix& h, F&& f) {
  Spectrum sp = hermitian_eig(h);
  CVector fv(sp.values.size());
  for (std::size_t k = 0; k < fv.size(); ++k) fv[k] = cplx(f(sp.values[k]));
  return reconstruct(sp, fv);
}

constexpr double kPsdClamp = -1e-10;

inline void require_psd(const Spectrum& sp, const std::string& what) {
  if (sp.min() < kPsdClamp)
    throw NotPsdError(what + ": eigenvalue " + std::to_string(sp.min()) + " below clamping window", sp.min());
}

inline ComplexMatrix psd_sqrt(const ComplexMatrix& p) {
  Spectrum sp = hermitian_eig(p);
  require_psd(sp, "psd_sqrt");
  CVector fv(sp.values.size());
  for (std::size_t k = 0; k < fv.size(); ++k) fv[k] = std::sqrt(std::max(sp.values[k], 0.0));
  return reconstruct(sp, fv);
}

/// exp(-i * theta * H).
inline ComplexMatrix expm_hermitian(const ComplexMatrix& h, double theta) {
  return func_hermitian(h, [theta](double x) { return std::exp(cplx(0.0, -theta * x)); });
}

}  // namespace cohcost
