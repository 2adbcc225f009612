#pragma once

// Truncated Fock-space operator algebra. hbar = 1 throughout; qubit basis
// order is (|e>, |g>); in tensor products the leftmost factor is the
// slowest-varying index.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <variant>
#include <vector>

namespace qxform {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

// Largest Hilbert-space dimension any builder in this project will allocate.
inline constexpr std::size_t kMaxDim = 4096;

struct Qubit {};
struct FockMode {
  std::size_t levels;
};
struct Grid {
  std::size_t points;
  double length;
};

using Factor = std::variant<Qubit, FockMode, Grid>;

class HilbertLayout {
 public:
  HilbertLayout() = default;
  explicit HilbertLayout(std::vector<Factor> factors);

  std::size_t dim() const;
  std::size_t factor_count() const { return factors_.size(); }
  std::size_t factor_dim(std::size_t index) const;
  const std::vector<Factor>& factors() const { return factors_; }

 private:
  std::vector<Factor> factors_;
};

std::size_t factor_dim(const Factor& f);

// A normalized pure state.
class StateVector {
 public:
  explicit StateVector(ComplexVector amplitudes);

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const ComplexVector& amplitudes() const { return amps_; }

 private:
  ComplexVector amps_;
};

// Hermitian, unit-trace, positive semidefinite (up to numerical floors).
class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPositivityFloor = -1e-10;

  explicit DensityMatrix(ComplexMatrix m);
  static DensityMatrix from_state(const StateVector& psi);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  ComplexMatrix m_;
};

ComplexMatrix annihilation(std::size_t n);
ComplexMatrix creation(std::size_t n);
ComplexMatrix number_operator(std::size_t n);
ComplexMatrix position_quadrature(std::size_t n, double nu0);
ComplexMatrix momentum_quadrature(std::size_t n, double nu0);
ComplexMatrix identity(std::size_t n);

enum class Pauli { X, Y, Z, Plus, Minus };
ComplexMatrix pauli(Pauli which);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix embed(const HilbertLayout& layout, std::size_t factor_index, const ComplexMatrix& op);

ComplexMatrix expm(const ComplexMatrix& a);
// exp(-i h dt) for Hermitian h, through its eigendecomposition.
ComplexMatrix evolution_operator(const ComplexMatrix& h, double dt);
// exp(-i h dt) v by a truncated Taylor series on the vector, substepped so
// that each substep has ||h dt||_1 <= 1/2; converged to machine precision.
ComplexVector apply_evolution(const ComplexMatrix& h, double dt, const ComplexVector& v);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
bool is_hermitian(const ComplexMatrix& a, double tol);
bool is_unitary(const ComplexMatrix& a, double tol);

// Fock basis states and truncated coherent states (renormalized after truncation).
StateVector fock_state(std::size_t n, std::size_t level);
StateVector coherent_state(std::size_t n, cplx alpha);

// Ascending eigenvalues of a Hermitian matrix.
Eigen::VectorXd hermitian_spectrum(const ComplexMatrix& a);
double max_abs(const ComplexMatrix& a);

}  // namespace qxform
