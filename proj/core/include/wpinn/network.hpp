#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace wpinn {

/// Fully connected feed-forward network shape: tanh hidden layers and an
/// affine scalar output (no activation on the last layer).
struct NetworkArchitecture {
  int input_dim = 1;
  std::vector<int> hidden = {20, 20, 20, 20};

  int output_dim() const { return 1; }
  /// Number of affine layers (hidden layers plus the output layer).
  int layer_count() const { return static_cast<int>(hidden.size()) + 1; }
  int layer_inputs(int layer) const;
  int layer_outputs(int layer) const;
  /// Total number of weights and biases: sum over layers of (fan_in+1)*fan_out.
  int parameter_count() const;
  int max_width() const;

  /// Throws std::invalid_argument on non-positive dimensions or no hidden layer.
  void validate() const;

  bool operator==(const NetworkArchitecture&) const = default;
};

/// Deterministic flattening of all weights and biases into one vector.
///
/// Layers are concatenated in forward order; within a layer the weight matrix
/// is stored row-major (row = output neuron, column = input neuron) followed
/// by the layer's bias vector.  The mapping is a bijection between flat
/// indices and (layer, kind, row, col) coordinates.
class ParameterLayout {
 public:
  enum class Kind { weight, bias };
  struct Entry {
    int layer = 0;
    Kind kind = Kind::weight;
    int row = 0;
    int col = 0;  ///< always 0 for biases
    bool operator==(const Entry&) const = default;
  };

  explicit ParameterLayout(const NetworkArchitecture& arch);

  int size() const { return size_; }
  int weight_index(int layer, int row, int col) const;
  int bias_index(int layer, int row) const;
  /// Offset of the first weight of `layer`; biases follow the weight block.
  int weight_offset(int layer) const { return layer_offset_[layer]; }
  int bias_offset(int layer) const;
  /// Inverse mapping; throws std::out_of_range for indices outside the vector.
  Entry describe(int flat_index) const;

 private:
  NetworkArchitecture arch_;
  std::vector<int> layer_offset_;
  int size_ = 0;
};

/// Glorot (uniform) initial parameter vector: each weight is drawn from
/// U(-a, a) with a = sqrt(6 / (fan_in + fan_out)) for its layer; all biases
/// are exactly zero.  Deterministic given (arch, seed).
Eigen::VectorXd glorot_init(const NetworkArchitecture& arch, std::uint64_t seed);

/// Value and exact input derivatives of the network output at one point.
///
/// `first` and `second` are always allocated at full size d and d x d;
/// entries above `order` are zero-filled.  `second` is exactly symmetric
/// (each unordered pair is computed once and mirrored).
struct Jet {
  int order = 0;            ///< highest derivative order carried (0, 1, or 2)
  double value = 0.0;
  Eigen::VectorXd first;    ///< d entries, du/dx_i
  Eigen::MatrixXd second;   ///< d x d symmetric, d2u/dx_i dx_j
};

/// Flat index of the unordered pair (i, j), i,j < dim, in the packed
/// upper-triangle ordering (0,0),(0,1),...,(0,d-1),(1,1),...,(d-1,d-1).
int sym_pair_index(int i, int j, int dim);
/// Number of packed second-derivative channels: dim*(dim+1)/2.
int sym_pair_count(int dim);

/// Jets of a whole batch of points, one column per point.
struct JetBatch {
  int dim = 0;
  int order = 0;
  Eigen::Index points = 0;
  Eigen::RowVectorXd value;  ///< 1 x n
  Eigen::MatrixXd first;     ///< dim x n (empty when order < 1)
  Eigen::MatrixXd second;    ///< sym_pair_count(dim) x n (empty when order < 2)
};

/// Adjoint seeds for backward(): the objective's partial derivatives with
/// respect to each output channel of a JetBatch.  A packed second-derivative
/// row (i, j) stands for the single symmetric entry used by consumers, so its
/// seed is the total sensitivity of the objective to that unordered pair.
struct JetSeeds {
  Eigen::RowVectorXd value;
  Eigen::MatrixXd first;
  Eigen::MatrixXd second;

  static JetSeeds zero(int dim, int order, Eigen::Index points);
};

/// Recording of one batched forward jet evaluation, consumed by backward().
/// Also owns the scratch buffers, so reusing one tape across evaluations
/// avoids all per-call allocation once shapes stabilise.
class JetTape {
 public:
  JetTape() = default;

 private:
  friend class TanhNetwork;
  struct Layer {
    Eigen::MatrixXd in;       // input channels to this affine layer
    Eigen::MatrixXd t;        // tanh values (layer output, value channel)
    Eigen::MatrixXd zfirst;   // pre-activation first-derivative channels
    Eigen::MatrixXd zsecond;  // pre-activation second-derivative channels
  };
  std::vector<Layer> layers_;
  Eigen::MatrixXd out_in_;    // input channels to the final affine layer
  Eigen::VectorXd params_;    // parameters the recording was made with
  int dim_ = 0;
  int order_ = 0;
  Eigen::Index points_ = 0;
  bool recorded_ = false;
  // scratch (sized lazily, reused across calls)
  Eigen::MatrixXd zval_, phi1_, phi2_, phi3_, zbar_, abar_a_, abar_b_;
  Eigen::RowVectorXd sbar_;
};

/// Tanh multilayer perceptron with exact input derivatives up to order 2 and
/// exact parameter gradients of functionals of those derivatives.
///
/// The forward pass propagates (value, Jacobian, Hessian) channels through
/// each affine/tanh layer; backward() reverse-accumulates through the
/// recorded computation, so gradients of residual losses (including paths
/// through second derivatives) are exact up to round-off.
class TanhNetwork {
 public:
  explicit TanhNetwork(NetworkArchitecture arch);

  const NetworkArchitecture& architecture() const { return arch_; }
  const ParameterLayout& layout() const { return layout_; }

  /// Network output at a single point (value channel only).
  double forward(const Eigen::VectorXd& params, const Eigen::VectorXd& x) const;

  /// Exact jet at a single point; `order` in {0, 1, 2}.
  Jet eval_jet(const Eigen::VectorXd& params, const Eigen::VectorXd& x, int order) const;

  /// Batched jets for the columns of `points` (dim x n), recording the
  /// computation into `tape` for a subsequent backward() call.
  JetBatch eval_batch(const Eigen::VectorXd& params, const Eigen::MatrixXd& points,
                      int order, JetTape& tape) const;

  /// Convenience overload with a throwaway tape.
  JetBatch eval_batch(const Eigen::VectorXd& params, const Eigen::MatrixXd& points,
                      int order) const;

  /// Accumulates (+=) into `grad` the gradient with respect to the parameters
  /// of sum over points and channels of seed * output_channel, reverse-mode
  /// through the recording in `tape`.  `grad` must have layout().size()
  /// entries; the tape must hold a recording made by this network.
  void backward(JetTape& tape, const JetSeeds& seeds, Eigen::VectorXd& grad) const;

 private:
  void check_params(const Eigen::VectorXd& params) const;

  NetworkArchitecture arch_;
  ParameterLayout layout_;
};

}  // namespace wpinn
