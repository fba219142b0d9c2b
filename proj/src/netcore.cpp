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

#include "lactose/netcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "lactose/error.hpp"
#include "lactose/kernels.hpp"
#include "lactose/rng.hpp"

namespace lactose {

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::kLinear:
      return "linear";
    case Activation::kReLU:
      return "relu";
    case Activation::kTanh:
      return "tanh";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  for (Activation a : {Activation::kLinear, Activation::kReLU, Activation::kTanh})
    if (name == to_string(a)) return a;
  throw ValidationError("unknown activation '" + std::string(name) +
                        "' (expected linear, relu or tanh)");
}

double activate(Activation act, double z) {
  switch (act) {
    case Activation::kLinear:
      return z;
    case Activation::kReLU:
      return z > 0.0 ? z : 0.0;
    case Activation::kTanh:
      return std::tanh(z);
  }
  return z;
}

double activation_derivative(Activation act, double z, double a) {
  switch (act) {
    case Activation::kLinear:
      return 1.0;
    case Activation::kReLU:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh:
      return 1.0 - a * a;
  }
  return 1.0;
}

// ---------------------------------------------------------------------------
// Layout

ModelLayout ModelLayout::chain(const std::vector<std::size_t>& widths,
                               const std::vector<Activation>& activations) {
  if (widths.size() < 2)
    throw ShapeError("a model needs at least an input and an output width");
  if (activations.size() != widths.size() - 1) {
    throw ShapeError("expected " + std::to_string(widths.size() - 1) +
                     " activations, got " + std::to_string(activations.size()));
  }
  ModelLayout layout;
  layout.input_width = widths[0];
  for (std::size_t i = 0; i + 1 < widths.size(); ++i)
    layout.layers.push_back({widths[i], widths[i + 1], activations[i]});
  layout.validate();
  return layout;
}

std::size_t ModelLayout::output_width() const {
  return layers.empty() ? 0 : layers.back().out;
}

std::size_t ModelLayout::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.parameter_count();
  return n;
}

void ModelLayout::validate() const {
  if (layers.empty()) throw ShapeError("model has no layers");
  if (input_width == 0) throw ShapeError("model input width is zero");
  std::size_t width = input_width;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].in != width) {
      throw ShapeError("layer " + std::to_string(i) + " expects " +
                       std::to_string(layers[i].in) + " inputs but receives " +
                       std::to_string(width));
    }
    if (layers[i].out == 0)
      throw ShapeError("layer " + std::to_string(i) + " has zero outputs");
    width = layers[i].out;
  }
}

// ---------------------------------------------------------------------------
// Model

MLPModel::MLPModel(ModelLayout layout) : layout_(std::move(layout)) {
  layout_.validate();
  layers_.reserve(layout_.layers.size());
  for (const auto& s : layout_.layers)
    layers_.push_back({Tensor2D(s.out, s.in), Tensor2D(s.out, 1), s.activation});
}

MLPModel::MLPModel(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ShapeError("model has no layers");
  layout_.input_width = layers_.front().in();
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const DenseLayer& l = layers_[i];
    if (l.bias.rows() != l.out() || l.bias.cols() != 1) {
      throw ShapeError("layer " + std::to_string(i) + " bias must be " +
                       std::to_string(l.out()) + "x1");
    }
    layout_.layers.push_back({l.in(), l.out(), l.activation});
  }
  layout_.validate();
}

// ---------------------------------------------------------------------------
// Flat parameters

bool FlatParams::bit_equal(const FlatParams& other) const {
  return layout == other.layout && lactose::bit_equal(values, other.values);
}

FlatParams zero_params(const ModelLayout& layout) {
  return {layout, std::vector<double>(layout.parameter_count(), 0.0)};
}

FlatParams extract_params(const MLPModel& model) {
  FlatParams p{model.layout(), {}};
  p.values.reserve(model.parameter_count());
  for (const auto& l : model.layers()) {
    p.values.insert(p.values.end(), l.weights.values().begin(),
                    l.weights.values().end());
    p.values.insert(p.values.end(), l.bias.values().begin(),
                    l.bias.values().end());
  }
  return p;
}

void inject_params(MLPModel& model, const FlatParams& p) {
  if (!(p.layout == model.layout()))
    throw ShapeError("parameter layout does not match the model");
  if (p.values.size() != model.parameter_count()) {
    throw ShapeError("parameter vector has " + std::to_string(p.values.size()) +
                     " values, model needs " +
                     std::to_string(model.parameter_count()));
  }
  const double* src = p.values.data();
  for (std::size_t i = 0; i < model.layers().size(); ++i) {
    DenseLayer& l = model.layer(i);
    std::copy_n(src, l.weights.size(), l.weights.data());
    src += l.weights.size();
    std::copy_n(src, l.bias.size(), l.bias.data());
    src += l.bias.size();
  }
}

FlatParams init_params(const ModelLayout& layout, std::uint64_t seed) {
  layout.validate();
  FlatParams p{layout, {}};
  p.values.reserve(layout.parameter_count());
  SplitMix64 rng(seed);
  for (const auto& s : layout.layers) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(s.in));
    for (std::size_t i = 0; i < s.parameter_count(); ++i)
      p.values.push_back(rng.uniform(-scale, scale));
  }
  return p;
}

MLPModel make_model(const ModelLayout& layout, std::uint64_t seed) {
  MLPModel model(layout);
  inject_params(model, init_params(layout, seed));
  return model;
}

std::uint64_t param_fingerprint(const MLPModel& model) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto mix = [&h](std::span<const double> values) {
    for (double v : values) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001B3ULL;
      }
    }
  };
  for (const auto& l : model.layers()) {
    mix(l.weights.values());
    mix(l.bias.values());
  }
  return h;
}

// ---------------------------------------------------------------------------
// Forward / loss / backward

ForwardTrace forward(const MLPModel& model, std::span<const double> x) {
  if (x.size() != model.input_width()) {
    throw ShapeError("input has " + std::to_string(x.size()) +
                     " values, model expects " +
                     std::to_string(model.input_width()));
  }
  if (!all_finite(x)) throw NumericError("input contains a non-finite value");

  const auto& k = kernels::active();
  ForwardTrace t;
  t.layout = model.layout();
  t.fingerprint = param_fingerprint(model);
  const std::size_t depth = model.layers().size();
  t.inputs.reserve(depth);
  t.pre.reserve(depth);
  t.post.reserve(depth);

  std::vector<double> a(x.begin(), x.end());
  for (const DenseLayer& l : model.layers()) {
    std::vector<double> z(l.out());
    k.matvec(l.weights.data(), a.data(), l.bias.data(), z.data(), l.out(),
             l.in());
    std::vector<double> next(z.size());
    std::transform(z.begin(), z.end(), next.begin(),
                   [act = l.activation](double v) { return activate(act, v); });
    t.inputs.push_back(std::move(a));
    t.pre.push_back(std::move(z));
    a = next;
    t.post.push_back(std::move(next));
  }
  if (!all_finite(t.output()))
    throw NumericError("forward pass produced a non-finite prediction");
  return t;
}

std::vector<double> predict(const MLPModel& model, std::span<const double> x) {
  ForwardTrace t = forward(model, x);
  return std::move(t.post.back());
}

double loss(LossKind kind, std::span<const double> y,
            std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) {
    throw ShapeError("target has " + std::to_string(y.size()) +
                     " values, prediction has " + std::to_string(y_hat.size()));
  }
  if (y.empty()) throw ShapeError("loss of an empty vector");
  if (!all_finite(y) || !all_finite(y_hat))
    throw NumericError("loss input contains a non-finite value");
  switch (kind) {
    case LossKind::kMSE: {
      double sum = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - y_hat[i];
        sum = sum + r * r;
      }
      return sum / static_cast<double>(y.size());
    }
  }
  return 0.0;
}

FlatParams backward(const MLPModel& model, const ForwardTrace& trace,
                    std::span<const double> y, LossKind kind) {
  if (!(trace.layout == model.layout()) ||
      trace.pre.size() != model.layers().size() ||
      trace.fingerprint != param_fingerprint(model)) {
    throw ConsistencyError(
        "forward trace was not produced by this model and its current "
        "parameters");
  }
  const auto y_hat = trace.output();
  if (y.size() != y_hat.size()) {
    throw ShapeError("target has " + std::to_string(y.size()) +
                     " values, model outputs " + std::to_string(y_hat.size()));
  }
  if (!all_finite(y)) throw NumericError("target contains a non-finite value");

  // dL/dy_hat
  std::vector<double> delta(y_hat.size());
  switch (kind) {
    case LossKind::kMSE: {
      const double n = static_cast<double>(y_hat.size());
      for (std::size_t i = 0; i < delta.size(); ++i)
        delta[i] = (2.0 * (y_hat[i] - y[i])) / n;
      break;
    }
  }

  const auto& k = kernels::active();
  FlatParams grads = zero_params(model.layout());
  // Walk the canonical layout backwards; offset points at the layer's slice.
  std::size_t offset = grads.values.size();
  const auto layers = model.layers();
  for (std::size_t li = layers.size(); li-- > 0;) {
    const DenseLayer& l = layers[li];
    const auto& z = trace.pre[li];
    const auto& a = trace.post[li];
    for (std::size_t i = 0; i < delta.size(); ++i)
      delta[i] = delta[i] * activation_derivative(l.activation, z[i], a[i]);

    offset -= l.weights.size() + l.bias.size();
    double* dw = grads.values.data() + offset;
    double* db = dw + l.weights.size();
    k.outer(delta.data(), trace.inputs[li].data(), dw, l.out(), l.in());
    std::copy(delta.begin(), delta.end(), db);

    if (li > 0) {
      std::vector<double> upstream(l.in());
      k.matvec_t(l.weights.data(), delta.data(), upstream.data(), l.out(),
                 l.in());
      delta = std::move(upstream);
    }
  }
  return grads;
}

}  // namespace lactose
