/*
 * Copyright (c) 2026 groundsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "groundsim/rng.hpp"

namespace groundsim {

using Vec = std::vector<double>;

struct Matrix {
  int rows = 0, cols = 0;
  Vec values;  // row-major

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), values(static_cast<size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return values[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return values[static_cast<size_t>(r) * cols + c]; }
  bool operator==(const Matrix&) const = default;
};

// y = W x + b
Vec affine(const Matrix& w, const Vec& b, const Vec& x);

enum class OutputKind { identity, softmax_ce };

struct MlpSpec {
  std::vector<int> widths;  // >= 2 entries; hidden activation is ReLU
  OutputKind output = OutputKind::identity;

  void validate() const;
  int input_width() const { return widths.front(); }
  int output_width() const { return widths.back(); }
  bool operator==(const MlpSpec&) const = default;
};

struct MlpCache {
  std::vector<Vec> activations;  // activations[0] is the input
  std::vector<Vec> pre;          // pre-activation per layer
};

struct MlpGrads {
  std::vector<Matrix> weights;
  std::vector<Vec> biases;

  void add(const MlpGrads& other);
  void scale(double s);
  std::vector<std::span<double>> refs();
};

struct Mlp {
  MlpSpec spec;
  std::vector<Matrix> weights;  // [out x in] per layer
  std::vector<Vec> biases;

  // Glorot-uniform weights, zero biases
  static Mlp init(const MlpSpec& spec, RngStream& rng);

  Vec forward(const Vec& input) const;
  Vec forward(const Vec& input, MlpCache& cache) const;

  MlpGrads zero_grads() const;
  std::vector<std::span<double>> param_refs();
  bool operator==(const Mlp&) const = default;
};

// Exact reverse-mode gradients of forward; returns dL/dinput (used to chain
// into upstream layers) and accumulates parameter gradients into `grads`.
Vec mlp_backward(const Mlp& mlp, const MlpCache& cache, const Vec& output_grad,
                 MlpGrads& grads);

// mean of squared differences; grad = 2(pred-target)/n
std::pair<double, Vec> mse_loss(const Vec& pred, const Vec& target);

// softmax cross-entropy with log-sum-exp stabilization; grad wrt logits
std::pair<double, Vec> cross_entropy_loss(const Vec& logits, int cls);

Vec softmax(const Vec& logits);

// Adam over an arbitrary set of parameter blocks. Gradients are globally
// norm-clipped to grad_clip before the update.
class AdamState {
 public:
  AdamState() = default;
  AdamState(double lr, double grad_clip) : lr_(lr), grad_clip_(grad_clip) {}

  void apply(std::vector<std::span<double>> params,
             std::vector<std::span<double>> grads);

  long step_count() const { return step_; }
  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }

 private:
  double lr_ = 1e-3;
  double grad_clip_ = 0.5;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long step_ = 0;
  Vec m_, v_;
};

// Header line (widths, activation tags) followed by little-endian 64-bit
// floats in layer order; round-trips bit-exactly.
void save_weights(const std::string& path, const Mlp& mlp);
Mlp load_weights(const std::string& path);

}  // namespace groundsim
