// Copyright 2026 The Lactose Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lactose/tensor.hpp"

namespace lactose {

enum class Activation { kLinear, kReLU, kTanh };

std::string_view to_string(Activation act);
// Accepts "linear", "relu", "tanh" (case-sensitive). Throws ValidationError.
Activation parse_activation(std::string_view name);

double activate(Activation act, double z);
// Derivative of the activation at pre-activation z with post-activation a.
// ReLU'(0) is 0.
double activation_derivative(Activation act, double z, double a);

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation activation = Activation::kLinear;

  std::size_t parameter_count() const { return out * in + out; }
  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

// Architecture of an MLP: input width plus one shape per dense layer.
struct ModelLayout {
  std::size_t input_width = 0;
  std::vector<LayerShape> layers;

  // Builds a chained layout from widths [in, h1, ..., out] and one
  // activation per layer.
  static ModelLayout chain(const std::vector<std::size_t>& widths,
                           const std::vector<Activation>& activations);

  std::size_t output_width() const;
  std::size_t parameter_count() const;
  // Throws ShapeError when widths do not chain or a width is zero.
  void validate() const;

  friend bool operator==(const ModelLayout&, const ModelLayout&) = default;
};

struct DenseLayer {
  Tensor2D weights;  // out x in
  Tensor2D bias;     // out x 1
  Activation activation = Activation::kLinear;

  std::size_t in() const { return weights.cols(); }
  std::size_t out() const { return weights.rows(); }
};

// Feed-forward stack of dense layers with a single live parameter set.
class MLPModel {
 public:
  // All parameters zero.
  explicit MLPModel(ModelLayout layout);
  // Validates that layer widths chain; throws ShapeError otherwise.
  explicit MLPModel(std::vector<DenseLayer> layers);

  const ModelLayout& layout() const { return layout_; }
  std::size_t input_width() const { return layout_.input_width; }
  std::size_t output_width() const { return layout_.output_width(); }
  std::size_t parameter_count() const { return layout_.parameter_count(); }

  std::span<const DenseLayer> layers() const { return layers_; }
  DenseLayer& layer(std::size_t i) { return layers_.at(i); }

 private:
  ModelLayout layout_;
  std::vector<DenseLayer> layers_;
};

// All model parameters linearized in canonical order: layers in order, and
// within a layer the weights row-major (out x in) followed by the bias.
struct FlatParams {
  ModelLayout layout;
  std::vector<double> values;

  bool bit_equal(const FlatParams& other) const;
};

// Zero vector shaped like `layout`.
FlatParams zero_params(const ModelLayout& layout);

FlatParams extract_params(const MLPModel& model);
// Throws ShapeError if p.layout differs from the model's layout.
void inject_params(MLPModel& model, const FlatParams& p);

// Uniform in [-s, s] with s = 1/sqrt(fan_in), drawn from SplitMix64(seed) in
// canonical parameter order.
FlatParams init_params(const ModelLayout& layout, std::uint64_t seed);
MLPModel make_model(const ModelLayout& layout, std::uint64_t seed);

// FNV-1a over the parameter bytes. Used to tie a trace to the parameters
// it was computed with.
std::uint64_t param_fingerprint(const MLPModel& model);

// Everything backward needs from one forward pass.
struct ForwardTrace {
  ModelLayout layout;
  std::uint64_t fingerprint = 0;
  // inputs[l] is the input to layer l (inputs[0] is x).
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> pre;   // z_l
  std::vector<std::vector<double>> post;  // a_l = act(z_l)

  std::span<const double> output() const { return post.back(); }
};

// Pure. Throws ShapeError on width mismatch, NumericError on non-finite input
// or output.
ForwardTrace forward(const MLPModel& model, std::span<const double> x);
std::vector<double> predict(const MLPModel& model, std::span<const double> x);

enum class LossKind { kMSE };

// Mean over output components of (y_i - y_hat_i)^2.
double loss(LossKind kind, std::span<const double> y,
            std::span<const double> y_hat);

// dLoss/dParams in canonical order. Throws ConsistencyError if the trace was
// not produced by this model with its current parameters.
FlatParams backward(const MLPModel& model, const ForwardTrace& trace,
                    std::span<const double> y, LossKind kind);

}  // namespace lactose
