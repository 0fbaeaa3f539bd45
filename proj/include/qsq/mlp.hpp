#ifndef QSQ_MLP_HPP_
#define QSQ_MLP_HPP_

#include <Eigen/Dense>

#include <random>
#include <string>
#include <vector>

namespace qsq {

enum class Activation { kTanh };

std::string to_string(Activation act);
Activation parse_activation(const std::string& text);

// Fully connected network with tanh hidden layers and a linear output layer.
// Parameters live in one flat vector; each layer's weight (out x in, column
// major) is followed by its bias.
class Mlp {
 public:
  using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;
  using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

  Mlp() = default;
  Mlp(std::vector<int> sizes, Activation activation);

  // Orthogonal weights (gain on hidden layers, output_gain on the last),
  // zero biases.
  static Mlp orthogonal(std::vector<int> sizes, double hidden_gain, double output_gain,
                        std::mt19937_64& rng);

  const std::vector<int>& sizes() const { return sizes_; }
  Activation activation() const { return activation_; }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  Eigen::Index num_params() const { return params_.size(); }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  ConstMatrixMap weight(int layer) const;
  ConstVectorMap bias(int layer) const;
  Eigen::Map<Eigen::MatrixXd> weight(int layer);
  Eigen::Map<Eigen::VectorXd> bias(int layer);

  // Activations of every layer for a batch (columns are samples).
  struct Tape {
    std::vector<Eigen::MatrixXd> values;  // values[0] = input, back() = output
  };

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& input, Tape& tape) const;

  // Accumulates dL/dparams into grad given dL/doutput.
  void backward(const Tape& tape, const Eigen::MatrixXd& grad_output, Eigen::VectorXd& grad) const;

 private:
  std::vector<int> sizes_;
  Activation activation_ = Activation::kTanh;
  std::vector<Eigen::Index> offsets_;  // start of each layer's weight
  Eigen::VectorXd params_;
};

// Adaptive moment estimation on a flat parameter vector.
class Adam {
 public:
  Adam() = default;
  Adam(Eigen::Index size, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  double lr() const { return lr_; }
  long steps() const { return t_; }

 private:
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  Eigen::VectorXd m_, v_;
};

}  // namespace qsq

#endif  // QSQ_MLP_HPP_
