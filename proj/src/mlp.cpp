#include "qsq/mlp.hpp"

#include "qsq/error.hpp"

namespace qsq {

std::string to_string(Activation act) {
  switch (act) {
    case Activation::kTanh: return "tanh";
  }
  return "?";
}

Activation parse_activation(const std::string& text) {
  if (text == "tanh") return Activation::kTanh;
  throw Error(ErrorCode::kInvalidArgument, "unknown activation '" + text + "'");
}

Mlp::Mlp(std::vector<int> sizes, Activation activation)
    : sizes_(std::move(sizes)), activation_(activation) {
  if (sizes_.size() < 2) throw Error(ErrorCode::kInvalidArgument, "MLP needs >= 2 layer sizes");
  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] < 1 || sizes_[l + 1] < 1) {
      throw Error(ErrorCode::kInvalidArgument, "MLP layer sizes must be positive");
    }
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  params_ = Eigen::VectorXd::Zero(total);
}

Mlp Mlp::orthogonal(std::vector<int> sizes, double hidden_gain, double output_gain,
                    std::mt19937_64& rng) {
  Mlp net(std::move(sizes), Activation::kTanh);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int l = 0; l < net.num_layers(); ++l) {
    const int rows = net.sizes_[l + 1];
    const int cols = net.sizes_[l];
    const int big = std::max(rows, cols);
    const int small = std::min(rows, cols);
    Eigen::MatrixXd gauss(big, small);
    for (Eigen::Index j = 0; j < gauss.cols(); ++j) {
      for (Eigen::Index i = 0; i < gauss.rows(); ++i) gauss(i, j) = normal(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
    for (int j = 0; j < small; ++j) {
      if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    const double gain = (l + 1 == net.num_layers()) ? output_gain : hidden_gain;
    if (rows >= cols) {
      net.weight(l) = gain * q;
    } else {
      net.weight(l) = gain * q.transpose();
    }
    net.bias(l).setZero();
  }
  return net;
}

Mlp::ConstMatrixMap Mlp::weight(int layer) const {
  return ConstMatrixMap(params_.data() + offsets_[layer], sizes_[layer + 1], sizes_[layer]);
}

Mlp::ConstVectorMap Mlp::bias(int layer) const {
  const Eigen::Index start =
      offsets_[layer] + static_cast<Eigen::Index>(sizes_[layer + 1]) * sizes_[layer];
  return ConstVectorMap(params_.data() + start, sizes_[layer + 1]);
}

Eigen::Map<Eigen::MatrixXd> Mlp::weight(int layer) {
  return Eigen::Map<Eigen::MatrixXd>(params_.data() + offsets_[layer], sizes_[layer + 1],
                                     sizes_[layer]);
}

Eigen::Map<Eigen::VectorXd> Mlp::bias(int layer) {
  const Eigen::Index start =
      offsets_[layer] + static_cast<Eigen::Index>(sizes_[layer + 1]) * sizes_[layer];
  return Eigen::Map<Eigen::VectorXd>(params_.data() + start, sizes_[layer + 1]);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input) const {
  Tape tape;
  return forward(input, tape);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input, Tape& tape) const {
  if (input.rows() != input_size()) {
    throw Error(ErrorCode::kDimensionMismatch, "MLP input has wrong feature count");
  }
  tape.values.resize(sizes_.size());
  tape.values[0] = input;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = weight(l) * tape.values[l];
    z.colwise() += bias(l);
    if (l + 1 < num_layers()) z = z.array().tanh().matrix();
    tape.values[l + 1] = std::move(z);
  }
  return tape.values.back();
}

void Mlp::backward(const Tape& tape, const Eigen::MatrixXd& grad_output,
                   Eigen::VectorXd& grad) const {
  if (grad.size() != params_.size()) grad = Eigen::VectorXd::Zero(params_.size());
  Eigen::MatrixXd delta = grad_output;
  for (int l = num_layers() - 1; l >= 0; --l) {
    const Eigen::Index w_size = static_cast<Eigen::Index>(sizes_[l + 1]) * sizes_[l];
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + offsets_[l], sizes_[l + 1], sizes_[l]);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + offsets_[l] + w_size, sizes_[l + 1]);
    gw.noalias() += delta * tape.values[l].transpose();
    gb += delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = weight(l).transpose() * delta;
      // tanh' = 1 - tanh^2
      delta = back.array() * (1.0 - tape.values[l].array().square());
    }
  }
}

Adam::Adam(Eigen::Index size, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (grad.size() != params.size() || grad.size() != m_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "Adam: gradient size mismatch");
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const double step = lr_ * std::sqrt(c2) / c1;
  params.array() -= step * m_.array() / (v_.array().sqrt() + eps_ * std::sqrt(c2));
}

}  // namespace qsq
