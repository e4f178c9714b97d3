/*
 * Copyright (c) 2026 groundsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "groundsim/neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace groundsim {

Vec affine(const Matrix& w, const Vec& b, const Vec& x) {
  if (static_cast<int>(x.size()) != w.cols)
    throw std::invalid_argument("affine: dimension mismatch");
  Vec y(w.rows);
  for (int r = 0; r < w.rows; ++r) {
    double acc = b[r];
    const double* row = &w.values[static_cast<size_t>(r) * w.cols];
    for (int c = 0; c < w.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

void MlpSpec::validate() const {
  if (widths.size() < 2) throw std::invalid_argument("mlp: need >= 2 layers");
  for (int w : widths)
    if (w < 1) throw std::invalid_argument("mlp: widths must be >= 1");
}

Mlp Mlp::init(const MlpSpec& spec, RngStream& rng) {
  spec.validate();
  Mlp mlp;
  mlp.spec = spec;
  for (size_t i = 0; i + 1 < spec.widths.size(); ++i) {
    const int fan_in = spec.widths[i];
    const int fan_out = spec.widths[i + 1];
    Matrix w(fan_out, fan_in);
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& v : w.values) v = rng.uniform(-bound, bound);
    mlp.weights.push_back(std::move(w));
    mlp.biases.emplace_back(fan_out, 0.0);
  }
  return mlp;
}

Vec Mlp::forward(const Vec& input) const {
  MlpCache cache;
  return forward(input, cache);
}

Vec Mlp::forward(const Vec& input, MlpCache& cache) const {
  if (static_cast<int>(input.size()) != spec.input_width())
    throw std::invalid_argument("mlp_forward: input width mismatch");
  cache.activations.clear();
  cache.pre.clear();
  cache.activations.push_back(input);
  Vec a = input;
  for (size_t i = 0; i < weights.size(); ++i) {
    Vec z = affine(weights[i], biases[i], a);
    cache.pre.push_back(z);
    const bool last = (i + 1 == weights.size());
    if (!last)
      for (double& v : z) v = std::max(0.0, v);
    cache.activations.push_back(z);
    a = std::move(z);
  }
  return a;
}

MlpGrads Mlp::zero_grads() const {
  MlpGrads g;
  for (size_t i = 0; i < weights.size(); ++i) {
    g.weights.emplace_back(weights[i].rows, weights[i].cols);
    g.biases.emplace_back(biases[i].size(), 0.0);
  }
  return g;
}

void MlpGrads::add(const MlpGrads& other) {
  for (size_t i = 0; i < weights.size(); ++i) {
    for (size_t j = 0; j < weights[i].values.size(); ++j)
      weights[i].values[j] += other.weights[i].values[j];
    for (size_t j = 0; j < biases[i].size(); ++j)
      biases[i][j] += other.biases[i][j];
  }
}

void MlpGrads::scale(double s) {
  for (auto& w : weights)
    for (double& v : w.values) v *= s;
  for (auto& b : biases)
    for (double& v : b) v *= s;
}

std::vector<std::span<double>> MlpGrads::refs() {
  std::vector<std::span<double>> out;
  for (size_t i = 0; i < weights.size(); ++i) {
    out.emplace_back(weights[i].values);
    out.emplace_back(biases[i]);
  }
  return out;
}

std::vector<std::span<double>> Mlp::param_refs() {
  std::vector<std::span<double>> out;
  for (size_t i = 0; i < weights.size(); ++i) {
    out.emplace_back(weights[i].values);
    out.emplace_back(biases[i]);
  }
  return out;
}

Vec mlp_backward(const Mlp& mlp, const MlpCache& cache, const Vec& output_grad,
                 MlpGrads& grads) {
  if (cache.activations.size() != mlp.weights.size() + 1 ||
      cache.pre.size() != mlp.weights.size())
    throw std::invalid_argument("mlp_backward: stale cache");
  if (output_grad.size() != static_cast<size_t>(mlp.spec.output_width()))
    throw std::invalid_argument("mlp_backward: output grad width mismatch");

  Vec dz = output_grad;
  for (int i = static_cast<int>(mlp.weights.size()) - 1; i >= 0; --i) {
    const bool last = (i + 1 == static_cast<int>(mlp.weights.size()));
    if (!last) {
      // dz currently holds grad wrt this layer's post-activation
      const Vec& z = cache.pre[i];
      for (size_t j = 0; j < dz.size(); ++j)
        if (z[j] <= 0.0) dz[j] = 0.0;
    }
    const Vec& a_in = cache.activations[i];
    Matrix& gw = grads.weights[i];
    for (int r = 0; r < gw.rows; ++r) {
      double* row = &gw.values[static_cast<size_t>(r) * gw.cols];
      const double d = dz[r];
      for (int c = 0; c < gw.cols; ++c) row[c] += d * a_in[c];
      grads.biases[i][r] += d;
    }
    // grad wrt this layer's input
    const Matrix& w = mlp.weights[i];
    Vec da(w.cols, 0.0);
    for (int r = 0; r < w.rows; ++r) {
      const double* row = &w.values[static_cast<size_t>(r) * w.cols];
      const double d = dz[r];
      for (int c = 0; c < w.cols; ++c) da[c] += row[c] * d;
    }
    dz = std::move(da);
  }
  return dz;
}

std::pair<double, Vec> mse_loss(const Vec& pred, const Vec& target) {
  if (pred.size() != target.size())
    throw std::invalid_argument("mse_loss: length mismatch");
  const double n = static_cast<double>(pred.size());
  double loss = 0.0;
  Vec grad(pred.size());
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    loss += d * d;
    grad[i] = 2.0 * d / n;
  }
  return {loss / n, grad};
}

Vec softmax(const Vec& logits) {
  Vec out(logits.size());
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

std::pair<double, Vec> cross_entropy_loss(const Vec& logits, int cls) {
  if (cls < 0 || cls >= static_cast<int>(logits.size()))
    throw std::invalid_argument("cross_entropy_loss: class index out of range");
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  const double lse = mx + std::log(sum);
  const double loss = lse - logits[cls];
  Vec grad = softmax(logits);
  grad[cls] -= 1.0;
  return {loss, grad};
}

void AdamState::apply(std::vector<std::span<double>> params,
                      std::vector<std::span<double>> grads) {
  size_t total = 0;
  for (const auto& g : grads) total += g.size();
  if (m_.empty()) {
    m_.assign(total, 0.0);
    v_.assign(total, 0.0);
  } else if (m_.size() != total) {
    throw std::invalid_argument("adam: parameter count changed");
  }

  double norm_sq = 0.0;
  for (const auto& g : grads)
    for (double v : g) norm_sq += v * v;
  const double norm = std::sqrt(norm_sq);
  const double scale = (norm > grad_clip_ && norm > 0.0) ? grad_clip_ / norm : 1.0;

  step_ += 1;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));

  size_t k = 0;
  for (size_t b = 0; b < grads.size(); ++b) {
    auto& p = params[b];
    const auto& g = grads[b];
    for (size_t i = 0; i < g.size(); ++i, ++k) {
      const double gi = g[i] * scale;
      m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * gi;
      v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * gi * gi;
      const double mhat = m_[k] / bc1;
      const double vhat = v_[k] / bc2;
      p[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

namespace {

void put_f64_le(std::ostream& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

double get_f64_le(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw std::runtime_error("weights: truncated file");
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(buf[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

}  // namespace

void save_weights(const std::string& path, const Mlp& mlp) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("weights: cannot write " + path);
  out << "groundsim-weights v1 widths=";
  for (size_t i = 0; i < mlp.spec.widths.size(); ++i) {
    if (i) out << ',';
    out << mlp.spec.widths[i];
  }
  out << " output="
      << (mlp.spec.output == OutputKind::identity ? "identity" : "softmax_ce")
      << "\n";
  for (size_t i = 0; i < mlp.weights.size(); ++i) {
    for (double v : mlp.weights[i].values) put_f64_le(out, v);
    for (double v : mlp.biases[i]) put_f64_le(out, v);
  }
}

Mlp load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("weights: cannot open " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic, version, widths_kv, output_kv;
  hs >> magic >> version >> widths_kv >> output_kv;
  if (magic != "groundsim-weights" || version != "v1" ||
      widths_kv.rfind("widths=", 0) != 0 || output_kv.rfind("output=", 0) != 0)
    throw std::runtime_error("weights: bad header in " + path);

  MlpSpec spec;
  std::stringstream ws(widths_kv.substr(7));
  std::string tok;
  while (std::getline(ws, tok, ',')) spec.widths.push_back(std::stoi(tok));
  const std::string out_tag = output_kv.substr(7);
  if (out_tag == "identity") spec.output = OutputKind::identity;
  else if (out_tag == "softmax_ce") spec.output = OutputKind::softmax_ce;
  else throw std::runtime_error("weights: unknown output tag " + out_tag);
  spec.validate();

  Mlp mlp;
  mlp.spec = spec;
  for (size_t i = 0; i + 1 < spec.widths.size(); ++i) {
    Matrix w(spec.widths[i + 1], spec.widths[i]);
    for (double& v : w.values) v = get_f64_le(in);
    Vec b(spec.widths[i + 1]);
    for (double& v : b) v = get_f64_le(in);
    mlp.weights.push_back(std::move(w));
    mlp.biases.push_back(std::move(b));
  }
  return mlp;
}

}  // namespace groundsim
