#include "ghzqec/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace ghzqec {

namespace {

std::vector<int> dims_of(const std::vector<Site>& sites) {
  std::vector<int> d;
  d.reserve(sites.size());
  for (const auto& s : sites) d.push_back(s.dim);
  return d;
}

std::vector<int> resolve(const DensityMatrix& rho, const std::vector<std::string>& targets) {
  std::vector<int> idx;
  idx.reserve(targets.size());
  for (const auto& t : targets) {
    int i = rho.index_of(t);
    if (std::find(idx.begin(), idx.end(), i) != idx.end())
      throw std::invalid_argument("duplicate target " + t);
    idx.push_back(i);
  }
  return idx;
}

int local_dim(const std::vector<Site>& sites, const std::vector<int>& idx) {
  int d = 1;
  for (int i : idx) d *= sites[i].dim;
  return d;
}

}  // namespace

PureState::PureState(Vector amplitudes) : amp_(std::move(amplitudes)) {
  if (std::abs(amp_.norm() - 1.0) > 1e-12) throw std::invalid_argument("state not unit norm");
}

PureState PureState::basis(int dim, int index) {
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return PureState(v);
}

PureState ghz_state(int n, int sign) {
  Vector v = Vector::Zero(1 << n);
  v(0) = 1.0 / std::sqrt(2.0);
  v((1 << n) - 1) = sign / std::sqrt(2.0);
  return PureState(v);
}

PureState w_state(int n) {
  Vector v = Vector::Zero(1 << n);
  for (int k = 0; k < n; ++k) v(1 << k) = 1.0 / std::sqrt(double(n));
  return PureState(v);
}

PureState bell_state(bool psi, int sign) {
  Vector v = Vector::Zero(4);
  double s = 1.0 / std::sqrt(2.0);
  if (psi) {
    v(1) = s;
    v(2) = sign * s;
  } else {
    v(0) = s;
    v(3) = sign * s;
  }
  return PureState(v);
}

DensityMatrix::DensityMatrix(std::vector<Site> sites, Matrix data, bool heralded)
    : sites_(std::move(sites)), data_(std::move(data)), heralded_(heralded) {
  long d = 1;
  for (size_t i = 0; i < sites_.size(); ++i) {
    if (sites_[i].dim < 1) throw std::invalid_argument("bad site dim");
    for (size_t j = 0; j < i; ++j)
      if (sites_[j].label == sites_[i].label)
        throw std::invalid_argument("label collision: " + sites_[i].label);
    d *= sites_[i].dim;
  }
  if (data_.rows() != d || data_.cols() != d)
    throw std::invalid_argument("matrix size does not match register");
}

DensityMatrix DensityMatrix::from_pure(std::vector<Site> sites, const PureState& psi) {
  const Vector& v = psi.amplitudes();
  return DensityMatrix(std::move(sites), v * v.adjoint());
}

DensityMatrix DensityMatrix::qubits(const std::vector<std::string>& labels, Matrix data) {
  std::vector<Site> s;
  for (const auto& l : labels) s.push_back({l, 2});
  return DensityMatrix(std::move(s), std::move(data));
}

std::vector<std::string> DensityMatrix::labels() const {
  std::vector<std::string> out;
  for (const auto& s : sites_) out.push_back(s.label);
  return out;
}

int DensityMatrix::index_of(const std::string& label) const {
  for (size_t i = 0; i < sites_.size(); ++i)
    if (sites_[i].label == label) return static_cast<int>(i);
  throw std::out_of_range("unknown label: " + label);
}

bool DensityMatrix::has(const std::string& label) const {
  return std::any_of(sites_.begin(), sites_.end(), [&](const Site& s) { return s.label == label; });
}

DensityMatrix DensityMatrix::normalized() const {
  double t = trace();
  if (!(t > 0)) throw std::runtime_error("cannot normalize zero-trace state");
  return DensityMatrix(sites_, data_ / t, false);
}

DensityMatrix DensityMatrix::scaled(double s) const { return DensityMatrix(sites_, data_ * s, true); }

void DensityMatrix::check(double herm_tol, double psd_tol) const {
  double herm = (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > herm_tol) throw std::runtime_error("density matrix not Hermitian");
  if (!heralded_ && std::abs(data_.trace().real() - 1.0) > 1e-10)
    throw std::runtime_error("density matrix trace != 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (data_ + data_.adjoint()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -psd_tol) throw std::runtime_error("density matrix not PSD");
}

namespace detail {

LocalIndex::LocalIndex(const std::vector<int>& dims, const std::vector<int>& targets) {
  const int n = static_cast<int>(dims.size());
  std::vector<int> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];
  std::vector<bool> is_t(n, false);
  for (int t : targets) is_t[t] = true;

  offset = {0};
  for (int t : targets) {
    std::vector<int> next;
    next.reserve(offset.size() * dims[t]);
    for (int o : offset)
      for (int k = 0; k < dims[t]; ++k) next.push_back(o + k * stride[t]);
    offset.swap(next);
  }
  base = {0};
  for (int i = 0; i < n; ++i) {
    if (is_t[i]) continue;
    std::vector<int> next;
    next.reserve(base.size() * dims[i]);
    for (int b : base)
      for (int k = 0; k < dims[i]; ++k) next.push_back(b + k * stride[i]);
    base.swap(next);
  }
}

void left_apply(Matrix& m, const LocalIndex& ix, const Matrix& op) {
  const int dt = static_cast<int>(ix.offset.size());
  Vector v(dt), w(dt);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (int b : ix.base) {
      for (int t = 0; t < dt; ++t) v(t) = m(b + ix.offset[t], c);
      w.noalias() = op * v;
      for (int t = 0; t < dt; ++t) m(b + ix.offset[t], c) = w(t);
    }
  }
}

void right_apply_adjoint(Matrix& m, const LocalIndex& ix, const Matrix& op) {
  const int dt = static_cast<int>(ix.offset.size());
  const Matrix opa = op.adjoint();
  Matrix blk(m.rows(), dt);
  for (int b : ix.base) {
    for (int t = 0; t < dt; ++t) blk.col(t) = m.col(b + ix.offset[t]);
    Matrix out = blk * opa;
    for (int t = 0; t < dt; ++t) m.col(b + ix.offset[t]) = out.col(t);
  }
}

}  // namespace detail

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  std::vector<Site> s = a.sites();
  s.insert(s.end(), b.sites().begin(), b.sites().end());
  Matrix d = Eigen::kroneckerProduct(a.data(), b.data()).eval();
  return DensityMatrix(std::move(s), std::move(d), a.heralded() || b.heralded());
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
  std::vector<int> kept = resolve(rho, keep);
  std::sort(kept.begin(), kept.end());
  auto dims = dims_of(rho.sites());
  detail::LocalIndex ix(dims, kept);  // base runs over traced sites, offset over kept
  const int dk = static_cast<int>(ix.offset.size());
  Matrix out = Matrix::Zero(dk, dk);
  const Matrix& m = rho.data();
  for (int b : ix.base)
    for (int j = 0; j < dk; ++j)
      for (int i = 0; i < dk; ++i) out(i, j) += m(b + ix.offset[i], b + ix.offset[j]);

  std::vector<Site> s;
  for (int i : kept) s.push_back(rho.sites()[i]);
  return DensityMatrix(std::move(s), std::move(out), rho.heralded());
}

DensityMatrix permute(const DensityMatrix& rho, const std::vector<std::string>& order) {
  if (order.size() != rho.sites().size()) throw std::invalid_argument("permute needs every label");
  std::vector<int> idx = resolve(rho, order);
  auto dims = dims_of(rho.sites());
  detail::LocalIndex ix(dims, idx);  // base is {0}
  const int d = rho.dim();
  Matrix out(d, d);
  const Matrix& m = rho.data();
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) out(i, j) = m(ix.offset[i], ix.offset[j]);
  std::vector<Site> s;
  for (int i : idx) s.push_back(rho.sites()[i]);
  return DensityMatrix(std::move(s), std::move(out), rho.heralded());
}

DensityMatrix add(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.sites() != b.sites()) throw std::invalid_argument("add: register mismatch");
  return DensityMatrix(a.sites(), a.data() + b.data(), true);
}

double sqrt_fidelity(const Matrix& rho, const Vector& target) {
  if (rho.rows() != target.size()) throw std::invalid_argument("fidelity dimension mismatch");
  double f = (target.adjoint() * rho * target)(0, 0).real();
  return std::sqrt(std::clamp(f, 0.0, 1.0));
}

double sqrt_fidelity(const DensityMatrix& rho, const PureState& target) {
  return sqrt_fidelity(rho.data(), target.amplitudes());
}

DensityMatrix sandwich(const DensityMatrix& rho, const Matrix& A, const Matrix& B,
                       const std::vector<std::string>& targets) {
  std::vector<int> idx = resolve(rho, targets);
  int dl = local_dim(rho.sites(), idx);
  if (A.rows() != dl || A.cols() != dl || B.rows() != dl || B.cols() != dl)
    throw std::invalid_argument("operator size does not match targets");
  detail::LocalIndex ix(dims_of(rho.sites()), idx);
  Matrix m = rho.data();
  detail::left_apply(m, ix, A);
  detail::right_apply_adjoint(m, ix, B);
  return DensityMatrix(rho.sites(), std::move(m), rho.heralded());
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& U,
                            const std::vector<std::string>& targets) {
  if (U.rows() != U.cols()) throw std::invalid_argument("unitary must be square");
  Matrix I = Matrix::Identity(U.rows(), U.cols());
  if ((U.adjoint() * U - I).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("operator is not unitary");
  return sandwich(rho, U, U, targets);
}

DensityMatrix apply_kraus(const DensityMatrix& rho, const std::vector<Matrix>& kraus,
                          const std::vector<std::string>& targets) {
  if (kraus.empty()) throw std::invalid_argument("empty Kraus set");
  std::vector<int> idx = resolve(rho, targets);
  detail::LocalIndex ix(dims_of(rho.sites()), idx);
  Matrix acc = Matrix::Zero(rho.dim(), rho.dim());
  for (const auto& K : kraus) {
    Matrix m = rho.data();
    detail::left_apply(m, ix, K);
    detail::right_apply_adjoint(m, ix, K);
    acc += m;
  }
  return DensityMatrix(rho.sites(), std::move(acc), rho.heralded());
}

DensityMatrix measure_out(const DensityMatrix& rho, const Matrix& effect,
                          const std::vector<std::string>& targets) {
  std::vector<int> idx = resolve(rho, targets);
  std::vector<std::string> keep;
  for (int i = 0; i < static_cast<int>(rho.sites().size()); ++i)
    if (std::find(idx.begin(), idx.end(), i) == idx.end()) keep.push_back(rho.sites()[i].label);
  detail::LocalIndex ix(dims_of(rho.sites()), idx);
  Matrix m = rho.data();
  detail::left_apply(m, ix, effect);
  DensityMatrix full(rho.sites(), std::move(m), true);
  return partial_trace(full, keep);
}

Vector apply_local(const Vector& psi, const std::vector<int>& dims, const Matrix& op,
                   const std::vector<int>& targets) {
  detail::LocalIndex ix(dims, targets);
  Matrix m = psi;
  detail::left_apply(m, ix, op);
  return m.col(0);
}

}  // namespace ghzqec
