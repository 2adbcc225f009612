#include "qxform/fock.hpp"

#include "qxform/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>

namespace qxform {

namespace {

void require_fock_dim(std::size_t n) {
  if (n < 2) fail(ErrorKind::InvalidDimension, "Fock dimension must be >= 2, got " + std::to_string(n));
}

void require_square_pair(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    fail(ErrorKind::InvalidDimension, "operator dimensions differ");
}

}  // namespace

std::size_t factor_dim(const Factor& f) {
  return std::visit(
      [](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Qubit>) {
          return 2;
        } else if constexpr (std::is_same_v<T, FockMode>) {
          return x.levels;
        } else {
          return x.points;
        }
      },
      f);
}

HilbertLayout::HilbertLayout(std::vector<Factor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) fail(ErrorKind::Layout, "layout needs at least one factor");
  for (const auto& f : factors_) {
    if (qxform::factor_dim(f) == 0) fail(ErrorKind::Layout, "layout factor has zero dimension");
    if (const auto* g = std::get_if<Grid>(&f); g && !(g->length > 0.0))
      fail(ErrorKind::Layout, "grid length must be positive");
  }
  if (dim() > kMaxDim) fail(ErrorKind::Layout, "layout dimension " + std::to_string(dim()) + " exceeds memory guard");
}

std::size_t HilbertLayout::dim() const {
  std::size_t d = 1;
  for (const auto& f : factors_) d *= qxform::factor_dim(f);
  return d;
}

std::size_t HilbertLayout::factor_dim(std::size_t index) const {
  if (index >= factors_.size()) fail(ErrorKind::Layout, "factor index out of range");
  return qxform::factor_dim(factors_[index]);
}

StateVector::StateVector(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
  const double norm = amps_.norm();
  if (amps_.size() == 0 || !std::isfinite(norm) || norm == 0.0)
    fail(ErrorKind::Parameter, "state vector must be finite and nonzero");
  amps_ /= norm;
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) fail(ErrorKind::InvalidDimension, "density matrix must be square");
  if (!m_.allFinite()) fail(ErrorKind::Numeric, "density matrix has non-finite entries");
  if (!is_hermitian(m_, kHermitianTol)) fail(ErrorKind::Parameter, "density matrix is not Hermitian");
  if (std::abs(m_.trace() - cplx{1.0, 0.0}) > kTraceTol) fail(ErrorKind::Parameter, "density matrix trace differs from 1");
  if (hermitian_spectrum(m_)(0) < kPositivityFloor) fail(ErrorKind::Positivity, "density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::from_state(const StateVector& psi) {
  const auto& v = psi.amplitudes();
  ComplexMatrix m = v * v.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityMatrix(std::move(m));
}

ComplexMatrix annihilation(std::size_t n) {
  require_fock_dim(n);
  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

ComplexMatrix creation(std::size_t n) { return annihilation(n).adjoint(); }

ComplexMatrix number_operator(std::size_t n) {
  require_fock_dim(n);
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k < n; ++k) m(k, k) = static_cast<double>(k);
  return m;
}

ComplexMatrix position_quadrature(std::size_t n, double nu0) {
  if (!(nu0 > 0.0)) fail(ErrorKind::Parameter, "reference frequency nu0 must be positive");
  const ComplexMatrix a = annihilation(n);
  return (a + a.adjoint()) / std::sqrt(2.0 * nu0);
}

ComplexMatrix momentum_quadrature(std::size_t n, double nu0) {
  if (!(nu0 > 0.0)) fail(ErrorKind::Parameter, "reference frequency nu0 must be positive");
  const ComplexMatrix a = annihilation(n);
  return kI * std::sqrt(nu0 / 2.0) * (a.adjoint() - a);
}

ComplexMatrix identity(std::size_t n) { return ComplexMatrix::Identity(n, n); }

ComplexMatrix pauli(Pauli which) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  switch (which) {
    case Pauli::X: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case Pauli::Y: m(0, 1) = -kI; m(1, 0) = kI; break;
    case Pauli::Z: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    case Pauli::Plus: m(0, 1) = 1.0; break;   // |e><g|
    case Pauli::Minus: m(1, 0) = 1.0; break;  // |g><e|
  }
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix embed(const HilbertLayout& layout, std::size_t factor_index, const ComplexMatrix& op) {
  const std::size_t d = layout.factor_dim(factor_index);
  if (static_cast<std::size_t>(op.rows()) != d || static_cast<std::size_t>(op.cols()) != d)
    fail(ErrorKind::Layout, "operator dimension does not match layout factor " + std::to_string(factor_index));
  std::size_t before = 1;
  std::size_t after = 1;
  for (std::size_t i = 0; i < factor_index; ++i) before *= layout.factor_dim(i);
  for (std::size_t i = factor_index + 1; i < layout.factor_count(); ++i) after *= layout.factor_dim(i);
  return kron(kron(identity(before), op), identity(after));
}

ComplexMatrix expm(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::InvalidDimension, "expm needs a square matrix");
  if (!a.allFinite()) fail(ErrorKind::Numeric, "expm argument has non-finite entries");
  return a.exp();
}

ComplexMatrix evolution_operator(const ComplexMatrix& h, double dt) {
  if (h.rows() != h.cols()) fail(ErrorKind::InvalidDimension, "evolution operator needs a square matrix");
  if (!h.allFinite() || !std::isfinite(dt)) fail(ErrorKind::Numeric, "evolution operator argument is not finite");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numeric, "eigensolver failed");
  const ComplexVector phases = (-kI * dt * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

ComplexVector apply_evolution(const ComplexMatrix& h, double dt, const ComplexVector& v) {
  if (h.rows() != h.cols() || h.cols() != v.size()) fail(ErrorKind::InvalidDimension, "evolution dimensions differ");
  const double norm1 = h.cwiseAbs().colwise().sum().maxCoeff() * std::abs(dt);
  if (!std::isfinite(norm1)) fail(ErrorKind::Numeric, "evolution argument is not finite");
  const auto substeps = static_cast<int>(std::max(1.0, std::ceil(norm1 / 0.5)));
  const cplx factor = -kI * dt / static_cast<double>(substeps);
  ComplexVector out = v;
  for (int s = 0; s < substeps; ++s) {
    ComplexVector term = out;
    ComplexVector acc = out;
    for (int k = 1; k < 40; ++k) {
      term = (factor / static_cast<double>(k)) * (h * term);
      acc += term;
      if (term.norm() <= 1e-17 * acc.norm()) break;
    }
    out = acc;
  }
  return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square_pair(a, b);
  return a * b - b * a;
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const ComplexMatrix id = identity(static_cast<std::size_t>(a.rows()));
  return (a.adjoint() * a - id).cwiseAbs().maxCoeff() <= tol && (a * a.adjoint() - id).cwiseAbs().maxCoeff() <= tol;
}

StateVector fock_state(std::size_t n, std::size_t level) {
  require_fock_dim(n);
  if (level >= n) fail(ErrorKind::Parameter, "Fock level outside truncation");
  ComplexVector v = ComplexVector::Zero(n);
  v(level) = 1.0;
  return StateVector(std::move(v));
}

StateVector coherent_state(std::size_t n, cplx alpha) {
  require_fock_dim(n);
  ComplexVector v(n);
  cplx amp = std::exp(-0.5 * std::norm(alpha));
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) amp *= alpha / std::sqrt(static_cast<double>(k));
    v(k) = amp;
  }
  return StateVector(std::move(v));
}

Eigen::VectorXd hermitian_spectrum(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numeric, "eigensolver failed");
  return es.eigenvalues();
}

double max_abs(const ComplexMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace qxform
