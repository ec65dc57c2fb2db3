#include "wpinn/network.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace wpinn {

namespace {

using ConstWeightMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using WeightMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

}  // namespace

// ---------------------------------------------------------------------------
// NetworkArchitecture
// ---------------------------------------------------------------------------

int NetworkArchitecture::layer_inputs(int layer) const {
  return layer == 0 ? input_dim : hidden[layer - 1];
}

int NetworkArchitecture::layer_outputs(int layer) const {
  return layer == static_cast<int>(hidden.size()) ? output_dim() : hidden[layer];
}

int NetworkArchitecture::parameter_count() const {
  int count = 0;
  for (int l = 0; l < layer_count(); ++l) {
    count += (layer_inputs(l) + 1) * layer_outputs(l);
  }
  return count;
}

int NetworkArchitecture::max_width() const {
  int w = input_dim;
  for (int h : hidden) w = std::max(w, h);
  return std::max(w, output_dim());
}

void NetworkArchitecture::validate() const {
  if (input_dim <= 0) {
    throw std::invalid_argument("NetworkArchitecture: input_dim must be positive");
  }
  if (hidden.empty()) {
    throw std::invalid_argument("NetworkArchitecture: at least one hidden layer required");
  }
  for (int h : hidden) {
    if (h <= 0) {
      throw std::invalid_argument("NetworkArchitecture: hidden layer widths must be positive");
    }
  }
}

// ---------------------------------------------------------------------------
// ParameterLayout
// ---------------------------------------------------------------------------

ParameterLayout::ParameterLayout(const NetworkArchitecture& arch) : arch_(arch) {
  arch_.validate();
  layer_offset_.reserve(arch_.layer_count());
  int offset = 0;
  for (int l = 0; l < arch_.layer_count(); ++l) {
    layer_offset_.push_back(offset);
    offset += (arch_.layer_inputs(l) + 1) * arch_.layer_outputs(l);
  }
  size_ = offset;
}

int ParameterLayout::weight_index(int layer, int row, int col) const {
  return layer_offset_[layer] + row * arch_.layer_inputs(layer) + col;
}

int ParameterLayout::bias_offset(int layer) const {
  return layer_offset_[layer] + arch_.layer_inputs(layer) * arch_.layer_outputs(layer);
}

int ParameterLayout::bias_index(int layer, int row) const {
  return bias_offset(layer) + row;
}

ParameterLayout::Entry ParameterLayout::describe(int flat_index) const {
  if (flat_index < 0 || flat_index >= size_) {
    throw std::out_of_range("ParameterLayout::describe: index " + std::to_string(flat_index) +
                            " outside parameter vector of length " + std::to_string(size_));
  }
  int layer = arch_.layer_count() - 1;
  while (layer_offset_[layer] > flat_index) --layer;
  const int local = flat_index - layer_offset_[layer];
  const int n_in = arch_.layer_inputs(layer);
  const int n_weights = n_in * arch_.layer_outputs(layer);
  if (local < n_weights) {
    return Entry{layer, Kind::weight, local / n_in, local % n_in};
  }
  return Entry{layer, Kind::bias, local - n_weights, 0};
}

// ---------------------------------------------------------------------------
// Initialisation
// ---------------------------------------------------------------------------

Eigen::VectorXd glorot_init(const NetworkArchitecture& arch, std::uint64_t seed) {
  arch.validate();
  const ParameterLayout layout(arch);
  Eigen::VectorXd params = Eigen::VectorXd::Zero(layout.size());
  std::mt19937_64 rng(seed);
  for (int l = 0; l < arch.layer_count(); ++l) {
    const int n_in = arch.layer_inputs(l);
    const int n_out = arch.layer_outputs(l);
    const double limit = std::sqrt(6.0 / (n_in + n_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    double* w = params.data() + layout.weight_offset(l);
    for (int k = 0; k < n_in * n_out; ++k) w[k] = dist(rng);
    // biases stay exactly zero
  }
  return params;
}

// ---------------------------------------------------------------------------
// Channel bookkeeping
// ---------------------------------------------------------------------------

int sym_pair_index(int i, int j, int dim) {
  if (i > j) std::swap(i, j);
  return i * dim - i * (i - 1) / 2 + (j - i);
}

int sym_pair_count(int dim) { return dim * (dim + 1) / 2; }

JetSeeds JetSeeds::zero(int dim, int order, Eigen::Index points) {
  JetSeeds s;
  s.value = Eigen::RowVectorXd::Zero(points);
  if (order >= 1) s.first = Eigen::MatrixXd::Zero(dim, points);
  if (order >= 2) s.second = Eigen::MatrixXd::Zero(sym_pair_count(dim), points);
  return s;
}

// ---------------------------------------------------------------------------
// TanhNetwork
// ---------------------------------------------------------------------------

TanhNetwork::TanhNetwork(NetworkArchitecture arch) : arch_(std::move(arch)), layout_(arch_) {}

void TanhNetwork::check_params(const Eigen::VectorXd& params) const {
  if (params.size() != layout_.size()) {
    throw std::invalid_argument("TanhNetwork: parameter vector has " +
                                std::to_string(params.size()) + " entries, expected " +
                                std::to_string(layout_.size()));
  }
}

JetBatch TanhNetwork::eval_batch(const Eigen::VectorXd& params, const Eigen::MatrixXd& points,
                                 int order) const {
  JetTape tape;
  return eval_batch(params, points, order, tape);
}

JetBatch TanhNetwork::eval_batch(const Eigen::VectorXd& params, const Eigen::MatrixXd& points,
                                 int order, JetTape& tape) const {
  check_params(params);
  if (order < 0 || order > 2) {
    throw std::invalid_argument("TanhNetwork::eval_batch: unsupported derivative order " +
                                std::to_string(order));
  }
  const int d = arch_.input_dim;
  if (points.rows() != d) {
    throw std::invalid_argument("TanhNetwork::eval_batch: points have dimension " +
                                std::to_string(points.rows()) + ", expected " + std::to_string(d));
  }
  if (points.cols() == 0) {
    throw std::invalid_argument("TanhNetwork::eval_batch: empty point batch");
  }

  const Eigen::Index n = points.cols();
  const int nf = order >= 1 ? d : 0;               // first-derivative channels
  const int ns = order >= 2 ? sym_pair_count(d) : 0;  // second-derivative channels
  const Eigen::Index cn = (1 + nf + ns) * n;       // total channel columns
  const int hidden_count = static_cast<int>(arch_.hidden.size());

  tape.layers_.resize(hidden_count);
  tape.params_ = params;
  tape.dim_ = d;
  tape.order_ = order;
  tape.points_ = n;

  // Input jet: value block = coordinates, Jacobian blocks = constant basis
  // vectors, Hessian blocks = zero.
  Eigen::MatrixXd& a0 = tape.layers_[0].in;
  a0.resize(d, cn);
  a0.leftCols(n) = points;
  for (int i = 0; i < nf; ++i) {
    auto block = a0.middleCols((1 + i) * n, n);
    block.setZero();
    block.row(i).setOnes();
  }
  if (ns > 0) a0.rightCols(static_cast<Eigen::Index>(ns) * n).setZero();

  for (int l = 0; l < hidden_count; ++l) {
    const int n_in = arch_.layer_inputs(l);
    const int n_out = arch_.layer_outputs(l);
    ConstWeightMap w(params.data() + layout_.weight_offset(l), n_out, n_in);
    const auto b = params.segment(layout_.bias_offset(l), n_out);
    JetTape::Layer& layer = tape.layers_[l];

    tape.zval_.resize(n_out, n);
    tape.zval_.noalias() = w * layer.in.leftCols(n);
    tape.zval_.colwise() += b;
    layer.t = tape.zval_.array().tanh();
    if (nf > 0) {
      layer.zfirst.resize(n_out, static_cast<Eigen::Index>(nf) * n);
      layer.zfirst.noalias() = w * layer.in.middleCols(n, static_cast<Eigen::Index>(nf) * n);
    }
    if (ns > 0) {
      layer.zsecond.resize(n_out, static_cast<Eigen::Index>(ns) * n);
      layer.zsecond.noalias() =
          w * layer.in.rightCols(static_cast<Eigen::Index>(ns) * n);
    }

    Eigen::MatrixXd& next = (l + 1 < hidden_count) ? tape.layers_[l + 1].in : tape.out_in_;
    next.resize(n_out, cn);
    next.leftCols(n) = layer.t;
    if (nf > 0) {
      tape.phi1_ = 1.0 - layer.t.array().square();
      for (int i = 0; i < nf; ++i) {
        next.middleCols((1 + i) * n, n) =
            tape.phi1_.array() * layer.zfirst.middleCols(i * n, n).array();
      }
    }
    if (ns > 0) {
      tape.phi2_ = -2.0 * layer.t.array() * tape.phi1_.array();
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
          const int p = sym_pair_index(i, j, d);
          next.middleCols((1 + d + p) * n, n) =
              tape.phi2_.array() * layer.zfirst.middleCols(i * n, n).array() *
                  layer.zfirst.middleCols(j * n, n).array() +
              tape.phi1_.array() * layer.zsecond.middleCols(p * n, n).array();
        }
      }
    }
  }

  // Final affine layer (scalar output, no activation).
  const int out_layer = hidden_count;
  const int n_last = arch_.layer_inputs(out_layer);
  ConstWeightMap w_out(params.data() + layout_.weight_offset(out_layer), 1, n_last);
  const double b_out = params[layout_.bias_offset(out_layer)];
  Eigen::RowVectorXd out_channels(cn);
  out_channels.noalias() = w_out * tape.out_in_;

  JetBatch batch;
  batch.dim = d;
  batch.order = order;
  batch.points = n;
  batch.value = out_channels.segment(0, n);
  batch.value.array() += b_out;
  if (nf > 0) {
    batch.first.resize(d, n);
    for (int i = 0; i < d; ++i) batch.first.row(i) = out_channels.segment((1 + i) * n, n);
  }
  if (ns > 0) {
    batch.second.resize(ns, n);
    for (int p = 0; p < ns; ++p) batch.second.row(p) = out_channels.segment((1 + d + p) * n, n);
  }
  tape.recorded_ = true;
  return batch;
}

void TanhNetwork::backward(JetTape& tape, const JetSeeds& seeds, Eigen::VectorXd& grad) const {
  if (!tape.recorded_ || tape.dim_ != arch_.input_dim) {
    throw std::logic_error("TanhNetwork::backward: tape does not hold a matching recording");
  }
  if (grad.size() != layout_.size()) {
    throw std::invalid_argument("TanhNetwork::backward: gradient vector has wrong length");
  }
  const int d = tape.dim_;
  const int order = tape.order_;
  const Eigen::Index n = tape.points_;
  const int nf = order >= 1 ? d : 0;
  const int ns = order >= 2 ? sym_pair_count(d) : 0;
  const Eigen::Index cn = (1 + nf + ns) * n;
  const int hidden_count = static_cast<int>(arch_.hidden.size());
  const Eigen::VectorXd& params = tape.params_;

  if (seeds.value.size() != n || (nf > 0 && (seeds.first.rows() != d || seeds.first.cols() != n)) ||
      (ns > 0 && (seeds.second.rows() != ns || seeds.second.cols() != n))) {
    throw std::invalid_argument("TanhNetwork::backward: seed shapes do not match the recording");
  }

  // Output-channel adjoints as one row over all channel columns.
  tape.sbar_.resize(cn);
  tape.sbar_.segment(0, n) = seeds.value;
  for (int i = 0; i < nf; ++i) tape.sbar_.segment((1 + i) * n, n) = seeds.first.row(i);
  for (int p = 0; p < ns; ++p) tape.sbar_.segment((1 + d + p) * n, n) = seeds.second.row(p);

  // Final affine layer.
  const int out_layer = hidden_count;
  const int n_last = arch_.layer_inputs(out_layer);
  ConstWeightMap w_out(params.data() + layout_.weight_offset(out_layer), 1, n_last);
  WeightMap w_out_grad(grad.data() + layout_.weight_offset(out_layer), 1, n_last);
  w_out_grad.noalias() += tape.sbar_ * tape.out_in_.transpose();
  grad[layout_.bias_offset(out_layer)] += seeds.value.sum();

  Eigen::MatrixXd* abar = &tape.abar_a_;
  Eigen::MatrixXd* abar_next = &tape.abar_b_;
  abar->resize(n_last, cn);
  abar->noalias() = w_out.transpose() * tape.sbar_;

  for (int l = hidden_count - 1; l >= 0; --l) {
    const int n_in = arch_.layer_inputs(l);
    const int n_out = arch_.layer_outputs(l);
    JetTape::Layer& layer = tape.layers_[l];
    ConstWeightMap w(params.data() + layout_.weight_offset(l), n_out, n_in);

    tape.phi1_ = 1.0 - layer.t.array().square();
    if (order >= 1) tape.phi2_ = -2.0 * layer.t.array() * tape.phi1_.array();
    if (order >= 2) {
      tape.phi3_ = -2.0 * (tape.phi1_.array().square() + layer.t.array() * tape.phi2_.array());
    }

    tape.zbar_.resize(n_out, cn);
    // Value channel: phi' * abar_val + phi'' * sum_i abar_first_i * zfirst_i
    // + sum_p abar_second_p * (phi''' zf_i zf_j + phi'' zsecond_p).
    {
      auto zv = tape.zbar_.leftCols(n);
      zv = (tape.phi1_.array() * (*abar).leftCols(n).array()).matrix();
      for (int i = 0; i < nf; ++i) {
        zv.array() += tape.phi2_.array() * (*abar).middleCols((1 + i) * n, n).array() *
                      layer.zfirst.middleCols(i * n, n).array();
      }
      if (ns > 0) {
        for (int i = 0; i < d; ++i) {
          for (int j = i; j < d; ++j) {
            const int p = sym_pair_index(i, j, d);
            zv.array() += (*abar).middleCols((1 + d + p) * n, n).array() *
                          (tape.phi3_.array() * layer.zfirst.middleCols(i * n, n).array() *
                               layer.zfirst.middleCols(j * n, n).array() +
                           tape.phi2_.array() * layer.zsecond.middleCols(p * n, n).array());
          }
        }
      }
    }
    // First-derivative channels: phi' * abar_first_i plus the cross terms of
    // every pair channel containing i.
    for (int i = 0; i < nf; ++i) {
      auto zf = tape.zbar_.middleCols((1 + i) * n, n);
      zf = (tape.phi1_.array() * (*abar).middleCols((1 + i) * n, n).array()).matrix();
    }
    if (ns > 0) {
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
          const int p = sym_pair_index(i, j, d);
          auto abar_p = (*abar).middleCols((1 + d + p) * n, n);
          tape.zbar_.middleCols((1 + i) * n, n).array() +=
              tape.phi2_.array() * abar_p.array() * layer.zfirst.middleCols(j * n, n).array();
          tape.zbar_.middleCols((1 + j) * n, n).array() +=
              tape.phi2_.array() * abar_p.array() * layer.zfirst.middleCols(i * n, n).array();
        }
      }
      // Second-derivative channels: phi' * abar_second_p.
      for (int p = 0; p < ns; ++p) {
        tape.zbar_.middleCols((1 + d + p) * n, n) =
            (tape.phi1_.array() * (*abar).middleCols((1 + d + p) * n, n).array()).matrix();
      }
    }

    WeightMap w_grad(grad.data() + layout_.weight_offset(l), n_out, n_in);
    w_grad.noalias() += tape.zbar_ * layer.in.transpose();
    grad.segment(layout_.bias_offset(l), n_out) += tape.zbar_.leftCols(n).rowwise().sum();

    if (l > 0) {
      abar_next->resize(n_in, cn);
      abar_next->noalias() = w.transpose() * tape.zbar_;
      std::swap(abar, abar_next);
    }
  }
}

double TanhNetwork::forward(const Eigen::VectorXd& params, const Eigen::VectorXd& x) const {
  return eval_jet(params, x, 0).value;
}

Jet TanhNetwork::eval_jet(const Eigen::VectorXd& params, const Eigen::VectorXd& x,
                          int order) const {
  const int d = arch_.input_dim;
  if (x.size() != d) {
    throw std::invalid_argument("TanhNetwork::eval_jet: point has dimension " +
                                std::to_string(x.size()) + ", expected " + std::to_string(d));
  }
  JetBatch batch = eval_batch(params, x, order);
  Jet jet;
  jet.order = order;
  jet.value = batch.value[0];
  jet.first = Eigen::VectorXd::Zero(d);
  jet.second = Eigen::MatrixXd::Zero(d, d);
  if (order >= 1) jet.first = batch.first.col(0);
  if (order >= 2) {
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        const double v = batch.second(sym_pair_index(i, j, d), 0);
        jet.second(i, j) = v;
        jet.second(j, i) = v;
      }
    }
  }
  return jet;
}

}  // namespace wpinn
