#include "hybridq/block_encoding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hybridq/errors.hpp"

namespace hybridq {

namespace {

bool is_power_of_two(std::size_t n) { return n >= 1 && std::has_single_bit(n); }

void require_dense(int dim) {
  if (dim > kMaxDenseDim) {
    throw InvalidSize("dense unitary of dimension " + std::to_string(dim) + " exceeds cap " +
                      std::to_string(kMaxDenseDim));
  }
}

void require_state_dim(int dim) {
  if (dim > kMaxStateDim) {
    throw InvalidSize("state dimension " + std::to_string(dim) + " exceeds cap " +
                      std::to_string(kMaxStateDim));
  }
}

// Square root of a PSD Hermitian matrix, clipping roundoff negatives.
CMatrix psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// [[B, √(I - BB†)], [√(I - B†B), -B†]] with the ancilla as the high index bit.
CMatrix halmos_dilation(const CMatrix& b) {
  const Eigen::Index n = b.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  CMatrix u(2 * n, 2 * n);
  u.topLeftCorner(n, n) = b;
  u.topRightCorner(n, n) = psd_sqrt(id - b * b.adjoint());
  u.bottomLeftCorner(n, n) = psd_sqrt(id - b.adjoint() * b);
  u.bottomRightCorner(n, n) = -b.adjoint();
  return u;
}

// Scalar encoding shared by the threshold and complement variants.
BlockEncoding scalar_encoding(const OracleInput& input, int flag) {
  const int n_items = static_cast<int>(input.size());
  const int dim = 2 * n_items;
  require_state_dim(dim);

  std::vector<int> left_idx(static_cast<std::size_t>(n_items));
  for (int i = 0; i < n_items; ++i) left_idx[i] = 2 * i + flag;
  Projector left(dim, left_idx);
  Projector right(dim, {0});

  // Items whose flag qubit lands on `flag` after the oracle.
  int hits = 0;
  for (int i = 0; i < n_items; ++i) hits += (input[i] == flag) ? 1 : 0;

  CMatrix w = CMatrix::Zero(n_items, 1);
  if (hits > 0) {
    const double amp = 1.0 / std::sqrt(static_cast<double>(hits));
    for (int i = 0; i < n_items; ++i) {
      if (input[i] == flag) w(i, 0) = amp;
    }
  } else {
    w(0, 0) = 1.0;  // any unit vector in range(Π̃) pairs with the zero value
  }
  Eigen::VectorXd values(1);
  values(0) = std::sqrt(static_cast<double>(hits) / n_items);
  CMatrix v = CMatrix::Ones(1, 1);

  auto bits = input.bits();
  auto source = [bits, dim]() {
    require_dense(dim);
    const int n = dim / 2;
    const double h = 1.0 / std::sqrt(static_cast<double>(n));
    CMatrix u = CMatrix::Zero(dim, dim);
    // (H^{⊗n} ⊗ I) maps |j⟩|b⟩ to Σ_i (±h)|i⟩|b⟩, then O_X flips b by x_i.
    for (int j = 0; j < n; ++j) {
      for (int b = 0; b < 2; ++b) {
        for (int i = 0; i < n; ++i) {
          const double sign = (std::popcount(static_cast<unsigned>(i & j)) % 2) ? -h : h;
          u(2 * i + (b ^ bits[i]), 2 * j + b) = sign;
        }
      }
    }
    return u;
  };
  return BlockEncoding(dim, std::move(left), std::move(right), std::move(w), std::move(values),
                       std::move(v), 1, source);
}

}  // namespace

OracleInput::OracleInput(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  if (!is_power_of_two(bits_.size())) {
    throw InvalidSize("oracle input size " + std::to_string(bits_.size()) +
                      " is not a power of two");
  }
  for (auto b : bits_) {
    if (b > 1) throw InvalidInput("oracle input bits must be 0 or 1");
  }
}

OracleInput OracleInput::from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw InvalidInput("bit string may only contain 0 and 1");
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return OracleInput(std::move(bits));
}

int OracleInput::qubits() const { return std::countr_zero(bits_.size()); }

int OracleInput::weight() const {
  int w = 0;
  for (auto b : bits_) w += b;
  return w;
}

OracleInput OracleInput::complement() const {
  auto bits = bits_;
  for (auto& b : bits) b ^= 1;
  return OracleInput(std::move(bits));
}

std::string OracleInput::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
  return s;
}

Projector::Projector(int dim, std::vector<int> indices) : dim_(dim), indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  if (dim_ < 1) throw InvalidSize("projector dimension must be positive");
  if (!indices_.empty() && (indices_.front() < 0 || indices_.back() >= dim_)) {
    throw InvalidInput("projector index out of range");
  }
}

Projector Projector::range(int dim, int begin, int end) {
  std::vector<int> idx;
  for (int i = begin; i < end; ++i) idx.push_back(i);
  return Projector(dim, std::move(idx));
}

Eigen::MatrixXd Projector::matrix() const {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int i : indices_) p(i, i) = 1.0;
  return p;
}

BlockEncoding::BlockEncoding(int dim, Projector left, Projector right, CMatrix left_vectors,
                             Eigen::VectorXd values, CMatrix right_vectors,
                             std::int64_t queries_per_call, std::function<CMatrix()> unitary_source)
    : dim_(dim),
      left_(std::move(left)),
      right_(std::move(right)),
      w_(std::move(left_vectors)),
      values_(std::move(values)),
      v_(std::move(right_vectors)),
      queries_per_call_(queries_per_call),
      unitary_source_(std::move(unitary_source)) {
  require_state_dim(dim_);
  if (left_.dim() != dim_ || right_.dim() != dim_) {
    throw InvalidOperator("projector dimensions do not match the encoding");
  }
  if (w_.rows() != left_.rank() || v_.rows() != right_.rank() || w_.cols() != values_.size() ||
      v_.cols() != values_.size()) {
    throw InvalidOperator("singular system shape does not match the projectors");
  }
  if (queries_per_call_ < 0) throw InvalidOperator("negative query cost");
}

BlockEncoding BlockEncoding::from_unitary(const CMatrix& unitary, Projector left, Projector right,
                                          std::int64_t queries_per_call) {
  const int dim = static_cast<int>(unitary.rows());
  if (unitary.cols() != dim) throw InvalidOperator("unitary must be square");
  require_dense(dim);
  const double defect = (unitary.adjoint() * unitary - CMatrix::Identity(dim, dim)).norm();
  if (defect > 1e-10 * dim) throw InvalidOperator("matrix is not unitary");

  const int r_out = left.rank(), r_in = right.rank();
  CMatrix reduced(r_out, r_in);
  for (int a = 0; a < r_out; ++a)
    for (int b = 0; b < r_in; ++b) reduced(a, b) = unitary(left.indices()[a], right.indices()[b]);

  CMatrix w = CMatrix::Zero(r_out, r_in);
  CMatrix v = CMatrix::Identity(r_in, r_in);
  Eigen::VectorXd values = Eigen::VectorXd::Zero(r_in);
  if (r_out > 0 && r_in > 0) {
    Eigen::JacobiSVD<CMatrix> svd(reduced, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const int r = std::min(r_out, r_in);
    v = svd.matrixV();
    for (int i = 0; i < r; ++i) {
      w.col(i) = svd.matrixU().col(i);
      values(i) = svd.singularValues()(i);
    }
  }
  auto shared = std::make_shared<const CMatrix>(unitary);
  return BlockEncoding(dim, std::move(left), std::move(right), std::move(w), std::move(values),
                       std::move(v), queries_per_call, [shared]() { return *shared; });
}

CMatrix BlockEncoding::reduced_block() const { return w_ * values_.asDiagonal() * v_.adjoint(); }

CMatrix BlockEncoding::block() const {
  require_dense(dim_);
  const CMatrix r = reduced_block();
  CMatrix full = CMatrix::Zero(dim_, dim_);
  for (int a = 0; a < left_.rank(); ++a)
    for (int b = 0; b < right_.rank(); ++b) full(left_.indices()[a], right_.indices()[b]) = r(a, b);
  return full;
}

CMatrix BlockEncoding::unitary() const {
  require_dense(dim_);
  return unitary_source_();
}

double BlockEncoding::scalar_value() const {
  if (right_.rank() != 1 || values_.size() != 1) {
    throw InvalidOperator("scalar value needs a rank-one right projector");
  }
  return values_(0);
}

CVector BlockEncoding::basis_state(int index) const {
  if (index < 0 || index >= dim_) throw InvalidInput("basis index out of range");
  CVector s = CVector::Zero(dim_);
  s(index) = 1.0;
  return s;
}

CVector BlockEncoding::apply_block(const CVector& state) const {
  if (state.size() != dim_) throw InvalidInput("state dimension does not match the encoding");
  CVector reduced(right_.rank());
  for (int b = 0; b < right_.rank(); ++b) reduced(b) = state(right_.indices()[b]);
  const CVector coeffs = values_.cast<Complex>().cwiseProduct(v_.adjoint() * reduced);
  const CVector out_reduced = w_ * coeffs;
  CVector out = CVector::Zero(dim_);
  for (int a = 0; a < left_.rank(); ++a) out(left_.indices()[a]) = out_reduced(a);
  return out;
}

double BlockEncoding::flag_probability(const CVector& state) const {
  if (state.size() != dim_) throw InvalidInput("state dimension does not match the encoding");
  const double norm2 = state.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-8) throw InvalidInput("initial state is not normalized");
  double inside = 0.0;
  for (int i : right_.indices()) inside += std::norm(state(i));
  if (norm2 - inside > 1e-20 + 1e-10) throw InvalidInput("initial state leaves the image of Π");
  return apply_block(state).squaredNorm();
}

BlockEncoding threshold_block_encoding(const OracleInput& input) { return scalar_encoding(input, 1); }

BlockEncoding complement_block_encoding(const OracleInput& input) {
  return scalar_encoding(input, 0);
}

BlockEncoding nand_block_encoding(const Eigen::MatrixXd& H, int tree_size) {
  const Eigen::Index s = H.rows();
  if (H.cols() != s || s < 1) throw InvalidOperator("H must be a nonempty square matrix");
  if (tree_size < 1 || s > 2L * tree_size + 1) {
    throw InvalidOperator("H is larger than a tree of the declared size allows");
  }
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw InvalidOperator("H is not symmetric");
  if (H.cwiseAbs().maxCoeff() > 1.0 + 1e-12) throw InvalidOperator("H has an entry above 1");
  for (Eigen::Index i = 0; i < s; ++i) {
    if ((H.row(i).array() != 0.0).count() > 3) throw InvalidOperator("H has a row of degree above 3");
  }

  const int walk = static_cast<int>(std::bit_ceil(static_cast<std::size_t>(s)));
  const int dim = 2 * walk;
  require_state_dim(dim);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H / 3.0);
  CMatrix v = CMatrix::Identity(walk, walk);
  CMatrix w = CMatrix::Identity(walk, walk);
  Eigen::VectorXd values = Eigen::VectorXd::Zero(walk);
  for (Eigen::Index i = 0; i < s; ++i) {
    const double lambda = es.eigenvalues()(i);
    v.col(i).setZero();
    v.col(i).head(s) = es.eigenvectors().col(i).cast<Complex>();
    w.col(i) = (lambda < 0.0 ? -1.0 : 1.0) * v.col(i);
    values(i) = std::abs(lambda);
  }

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(walk, walk);
  a.topLeftCorner(s, s) = H / 3.0;
  auto source = [a]() { return halmos_dilation(a.cast<Complex>()); };
  Projector proj = Projector::range(dim, 0, walk);
  return BlockEncoding(dim, proj, proj, std::move(w), std::move(values), std::move(v), 1, source);
}

BlockEncoding apply_qsvt(const BlockEncoding& be, const BoundedPolynomial& p,
                         std::int64_t cost_multiplier) {
  if (cost_multiplier < 1) throw InvalidInput("cost multiplier must be >= 1");
  const int dim = 2 * be.dim();
  require_state_dim(dim);

  Eigen::VectorXd values(be.values().size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double sv = std::min(std::abs(be.values()(i)), 1.0);
    const double sign = be.values()(i) < 0.0 ? -1.0 : 1.0;
    values(i) = sign * clenshaw(p.coeffs, sv);
  }
  const Projector left(dim, be.left_projector().indices());
  const Projector right(dim, be.right_projector().indices());
  const std::int64_t cost = cost_multiplier * p.degree() * be.queries_per_call();

  // The dilation of the transformed block, on one extra ancilla (high bit).
  auto block = std::make_shared<const BlockEncoding>(be.dim(), Projector(be.dim(), left.indices()),
                                                     Projector(be.dim(), right.indices()),
                                                     be.left_vectors(), values, be.right_vectors(),
                                                     cost, std::function<CMatrix()>{});
  return BlockEncoding(dim, left, right, be.left_vectors(), values, be.right_vectors(), cost,
                       [block]() { return halmos_dilation(block->block()); });
}

std::int64_t sample_flag(const BlockEncoding& be, const CVector& initial_state, std::int64_t shots,
                         QueryLedger& ledger, Rng& rng) {
  if (shots < 1) throw InvalidInput("shots must be positive");
  const double prob = std::clamp(be.flag_probability(initial_state), 0.0, 1.0);
  if (be.queries_per_call() > 0) ledger.record(be.queries_per_call(), shots);
  std::binomial_distribution<std::int64_t> dist(shots, prob);
  return dist(rng);
}

std::int64_t sample_flag(const BlockEncoding& be, const CVector& initial_state, std::int64_t shots,
                         QueryLedger& ledger, std::uint64_t seed) {
  Rng rng(seed);
  return sample_flag(be, initial_state, shots, ledger, rng);
}

}  // namespace hybridq
