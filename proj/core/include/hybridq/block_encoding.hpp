#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hybridq/chebyshev.hpp"
#include "hybridq/ledger.hpp"
#include "hybridq/random.hpp"

namespace hybridq {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr int kMaxStateDim = 1 << 14;
inline constexpr int kMaxDenseDim = 1 << 11;

// Oracle input x_1..x_N with N a power of two.
class OracleInput {
 public:
  explicit OracleInput(std::vector<std::uint8_t> bits);
  static OracleInput from_string(std::string_view bits);

  std::size_t size() const { return bits_.size(); }
  int qubits() const;
  int weight() const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  OracleInput complement() const;
  std::string to_string() const;

 private:
  std::vector<std::uint8_t> bits_;
};

// Orthogonal projector onto a set of computational basis states.
class Projector {
 public:
  Projector(int dim, std::vector<int> indices);
  static Projector range(int dim, int begin, int end);

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(indices_.size()); }
  const std::vector<int>& indices() const { return indices_; }
  Eigen::MatrixXd matrix() const;

 private:
  int dim_;
  std::vector<int> indices_;
};

// A unitary U with projectors (Π̃, Π) encoding A = Π̃ U Π. The encoding keeps A's
// singular system in reduced coordinates (rows indexed by the projectors'
// basis states) so transformed encodings never need U itself; U is built on
// demand for small dimensions.
class BlockEncoding {
 public:
  BlockEncoding(int dim, Projector left, Projector right, CMatrix left_vectors,
                Eigen::VectorXd values, CMatrix right_vectors, std::int64_t queries_per_call,
                std::function<CMatrix()> unitary_source);

  static BlockEncoding from_unitary(const CMatrix& unitary, Projector left, Projector right,
                                    std::int64_t queries_per_call);

  int dim() const { return dim_; }
  const Projector& left_projector() const { return left_; }
  const Projector& right_projector() const { return right_; }
  std::int64_t queries_per_call() const { return queries_per_call_; }

  // A = Σ values_i |w_i⟩⟨v_i|. Values are singular values for base encodings and
  // may carry a sign after a polynomial transform.
  const Eigen::VectorXd& values() const { return values_; }
  const CMatrix& left_vectors() const { return w_; }
  const CMatrix& right_vectors() const { return v_; }
  Eigen::VectorXd singular_values() const { return values_.cwiseAbs(); }

  CMatrix reduced_block() const;
  CMatrix block() const;
  CMatrix unitary() const;

  // The single entry of a rank-one right projector's block.
  double scalar_value() const;

  CVector basis_state(int index) const;
  CVector apply_block(const CVector& state) const;
  double flag_probability(const CVector& state) const;

 private:
  int dim_;
  Projector left_;
  Projector right_;
  CMatrix w_;
  Eigen::VectorXd values_;
  CMatrix v_;
  std::int64_t queries_per_call_;
  std::function<CMatrix()> unitary_source_;
};

// U = O_X (H^{⊗n} ⊗ I), Π = |0^{n+1}⟩⟨0^{n+1}|, Π̃ = I ⊗ |1⟩⟨1|; block √(|x|/N).
// Basis index of |i⟩|b⟩ is 2i + b.
BlockEncoding threshold_block_encoding(const OracleInput& input);
// Same U with Π̃ = I ⊗ |0⟩⟨0|; block √((N - |x|)/N).
BlockEncoding complement_block_encoding(const OracleInput& input);

// Encodes H/3 through the dilation [[A, √(I-A²)], [√(I-A²), -A]]; the walk
// register is H padded to a power of two and the ancilla is the high bit.
BlockEncoding nand_block_encoding(const Eigen::MatrixXd& H, int tree_size);

// Spectral-level QSVT: values become P applied to the singular values, cost is
// cost_multiplier × degree × queries_per_call. One extra ancilla qubit carries the
// dilation, so the dimension doubles.
BlockEncoding apply_qsvt(const BlockEncoding& be, const BoundedPolynomial& p,
                         std::int64_t cost_multiplier = 1);

// Draws `shots` flag measurements with the exact success probability and
// records one circuit per shot. Zero-cost encodings record nothing.
std::int64_t sample_flag(const BlockEncoding& be, const CVector& initial_state, std::int64_t shots,
                         QueryLedger& ledger, Rng& rng);
std::int64_t sample_flag(const BlockEncoding& be, const CVector& initial_state, std::int64_t shots,
                         QueryLedger& ledger, std::uint64_t seed);

}  // namespace hybridq
