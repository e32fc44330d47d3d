#include "tdsim/nn.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tdsim {

Mlp::Mlp(std::vector<int> layer_sizes, std::mt19937_64& init_rng)
    : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2)
    throw std::invalid_argument("Mlp: need at least input and output sizes");
  const int L = static_cast<int>(sizes_.size()) - 1;
  weights_.resize(L);
  biases_.resize(L);
  for (int l = 0; l < L; ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    // He-uniform: U(-sqrt(6/fan_in), +sqrt(6/fan_in)).
    const double limit = std::sqrt(6.0 / in);
    weights_[l].resize(out, in);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c)
        weights_[l](r, c) = (2.0 * uniform01(init_rng) - 1.0) * limit;
    biases_[l] = Eigen::VectorXd::Zero(out);
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input,
                             Cache* cache) const {
  if (input.rows() != sizes_.front())
    throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  const int L = num_layers();
  if (cache) {
    cache->activations.assign(L + 1, {});
    cache->pre.assign(L, {});
    cache->activations[0] = input;
  }
  Eigen::MatrixXd a = input;
  for (int l = 0; l < L; ++l) {
    Eigen::MatrixXd z = (weights_[l] * a).colwise() + biases_[l];
    if (cache) cache->pre[l] = z;
    if (l + 1 < L) z = z.cwiseMax(0.0);  // ReLU on hidden layers
    if (cache) cache->activations[l + 1] = z;
    a = std::move(z);
  }
  return a;
}

Eigen::VectorXd Mlp::forward_vec(const Eigen::VectorXd& input) const {
  return forward(input);
}

Eigen::VectorXd Mlp::last_hidden(const Eigen::VectorXd& input) const {
  const int L = num_layers();
  if (L < 2)
    throw std::invalid_argument("Mlp::last_hidden: no hidden layer");
  Eigen::VectorXd a = input;
  for (int l = 0; l + 1 < L; ++l)
    a = ((weights_[l] * a) + biases_[l]).cwiseMax(0.0);
  return a;
}

Mlp::Grads Mlp::backward(const Cache& cache,
                         const Eigen::MatrixXd& output_grad) const {
  const int L = num_layers();
  Grads g = zero_grads();
  Eigen::MatrixXd delta = output_grad;  // d loss / d pre-activation (output)
  for (int l = L - 1; l >= 0; --l) {
    if (l != L - 1)
      delta = delta.cwiseProduct(
          (cache.pre[l].array() > 0.0).cast<double>().matrix());
    g.w[l] = delta * cache.activations[l].transpose();
    g.b[l] = delta.rowwise().sum();
    if (l > 0) delta = weights_[l].transpose() * delta;
  }
  return g;
}

Mlp::Grads Mlp::zero_grads() const {
  Grads g;
  g.w.resize(num_layers());
  g.b.resize(num_layers());
  for (int l = 0; l < num_layers(); ++l) {
    g.w[l] = Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols());
    g.b[l] = Eigen::VectorXd::Zero(biases_[l].size());
  }
  return g;
}

int Mlp::parameter_count() const { return tdsim::parameter_count(sizes_); }

int parameter_count(const std::vector<int>& layer_sizes) {
  int total = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
    total += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
  return total;
}

std::vector<double> Mlp::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (int l = 0; l < num_layers(); ++l) {
    const auto& w = weights_[l];
    out.insert(out.end(), w.data(), w.data() + w.size());
    const auto& b = biases_[l];
    out.insert(out.end(), b.data(), b.data() + b.size());
  }
  return out;
}

void Mlp::unflatten(const std::vector<double>& params) {
  std::size_t k = 0;
  for (int l = 0; l < num_layers(); ++l) {
    auto& w = weights_[l];
    std::memcpy(w.data(), params.data() + k, w.size() * sizeof(double));
    k += w.size();
    auto& b = biases_[l];
    std::memcpy(b.data(), params.data() + k, b.size() * sizeof(double));
    k += b.size();
  }
  if (k != params.size())
    throw std::invalid_argument("Mlp::unflatten: parameter count mismatch");
}

namespace {
constexpr char kMagic[4] = {'T', 'D', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void Mlp::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("Mlp::save: cannot open '" + path + "'");
  out.write(kMagic, 4);
  const std::uint32_t version = kVersion;
  out.write(reinterpret_cast<const char*>(&version), 4);
  const std::uint32_t n = static_cast<std::uint32_t>(sizes_.size());
  out.write(reinterpret_cast<const char*>(&n), 4);
  for (int s : sizes_) {
    const std::int32_t v = s;
    out.write(reinterpret_cast<const char*>(&v), 4);
  }
  const auto params = flatten();
  out.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (!out) throw std::runtime_error("Mlp::save: write failed for '" + path + "'");
}

Mlp Mlp::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("Mlp::load: cannot open '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("Mlp::load: bad magic in '" + path + "'");
  std::uint32_t version = 0, n = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (version != kVersion)
    throw std::runtime_error("Mlp::load: unsupported version");
  in.read(reinterpret_cast<char*>(&n), 4);
  Mlp net;
  net.sizes_.resize(n);
  for (auto& s : net.sizes_) {
    std::int32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    s = v;
  }
  net.weights_.resize(n - 1);
  net.biases_.resize(n - 1);
  for (std::uint32_t l = 0; l + 1 < n; ++l) {
    net.weights_[l].resize(net.sizes_[l + 1], net.sizes_[l]);
    net.biases_[l].resize(net.sizes_[l + 1]);
  }
  std::vector<double> params(net.parameter_count());
  in.read(reinterpret_cast<char*>(params.data()),
          static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (!in) throw std::runtime_error("Mlp::load: truncated file '" + path + "'");
  net.unflatten(params);
  return net;
}

Adam::Adam(const Mlp& net, double learning_rate, double beta1, double beta2,
           double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  for (int l = 0; l < net.num_layers(); ++l) {
    mw_.push_back(Eigen::MatrixXd::Zero(net.weights(l).rows(),
                                        net.weights(l).cols()));
    vw_.push_back(Eigen::MatrixXd::Zero(net.weights(l).rows(),
                                        net.weights(l).cols()));
    mb_.push_back(Eigen::VectorXd::Zero(net.biases(l).size()));
    vb_.push_back(Eigen::VectorXd::Zero(net.biases(l).size()));
  }
}

void Adam::step(Mlp& net, const Mlp::Grads& grads) {
  t_ += 1;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (int l = 0; l < net.num_layers(); ++l) {
    mw_[l] = beta1_ * mw_[l] + (1.0 - beta1_) * grads.w[l];
    vw_[l] = beta2_ * vw_[l] +
             (1.0 - beta2_) * grads.w[l].cwiseProduct(grads.w[l]);
    net.weights(l).array() -= lr_ * (mw_[l].array() / bc1) /
                              ((vw_[l].array() / bc2).sqrt() + eps_);
    mb_[l] = beta1_ * mb_[l] + (1.0 - beta1_) * grads.b[l];
    vb_[l] = beta2_ * vb_[l] +
             (1.0 - beta2_) * grads.b[l].cwiseProduct(grads.b[l]);
    net.biases(l).array() -= lr_ * (mb_[l].array() / bc1) /
                             ((vb_[l].array() / bc2).sqrt() + eps_);
  }
}

double gradient_check(Mlp& net, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y, double h) {
  Mlp::Cache cache;
  const Eigen::VectorXd out = net.forward(x, &cache);
  const Eigen::MatrixXd dOut = out - y;
  const Mlp::Grads analytic = net.backward(cache, dOut);

  auto loss = [&]() {
    const Eigen::VectorXd o = net.forward_vec(x);
    return 0.5 * (o - y).squaredNorm();
  };

  double max_rel_err = 0.0;
  auto check_param = [&](double& p, double analytic_g) {
    const double saved = p;
    p = saved + h;
    const double lp = loss();
    p = saved - h;
    const double lm = loss();
    p = saved;
    const double fd = (lp - lm) / (2.0 * h);
    const double denom = std::max({std::abs(fd), std::abs(analytic_g), 1e-8});
    max_rel_err = std::max(max_rel_err, std::abs(fd - analytic_g) / denom);
  };

  for (int l = 0; l < net.num_layers(); ++l) {
    auto& w = net.weights(l);
    for (int r = 0; r < w.rows(); ++r)
      for (int c = 0; c < w.cols(); ++c)
        check_param(w(r, c), analytic.w[l](r, c));
    auto& b = net.biases(l);
    for (int i = 0; i < b.size(); ++i) check_param(b(i), analytic.b[l](i));
  }
  return max_rel_err;
}

Mlp fedavg(const std::vector<const Mlp*>& models) {
  if (models.empty()) throw std::invalid_argument("fedavg: no models");
  for (const Mlp* m : models)
    if (!m->same_architecture(*models.front()))
      throw std::invalid_argument("fedavg: architecture mismatch");
  Mlp avg = *models.front();
  for (int l = 0; l < avg.num_layers(); ++l) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(avg.weights(l).rows(),
                                              avg.weights(l).cols());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(avg.biases(l).size());
    for (const Mlp* m : models) {
      w += m->weights(l);
      b += m->biases(l);
    }
    avg.weights(l) = w / static_cast<double>(models.size());
    avg.biases(l) = b / static_cast<double>(models.size());
  }
  return avg;
}

bool equal_params(const Mlp& a, const Mlp& b) {
  if (!a.same_architecture(b)) return false;
  return a.flatten() == b.flatten();
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  const double lse = std::log((logits.array() - m).exp().sum()) + m;
  return logits.array() - lse;
}

}  // namespace tdsim
