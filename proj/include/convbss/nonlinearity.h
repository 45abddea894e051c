// convbss/nonlinearity.h

// Copyright 2026 The convbss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONVBSS_NONLINEARITY_H_
#define CONVBSS_NONLINEARITY_H_

#include <cmath>
#include <numbers>
#include <string>

namespace convbss {

enum class NonlinearityKind { kPow3, kTanh, kGauss };

std::string ToString(NonlinearityKind kind);
NonlinearityKind NonlinearityFromString(const std::string &name);

/// Contrast function G with its derivative g and second derivative g'.
///
///   pow3:  G = u^4/4          g = u^3              g' = 3u^2
///   tanh:  G = log cosh u     g = tanh u           g' = 1 - tanh^2 u
///   gauss: G = -exp(-u^2/2)   g = u exp(-u^2/2)    g' = (1-u^2) exp(-u^2/2)
class Nonlinearity {
 public:
  explicit Nonlinearity(NonlinearityKind kind = NonlinearityKind::kTanh)
      : kind_(kind) {}

  NonlinearityKind kind() const { return kind_; }
  double G(double u) const;
  double g(double u) const;
  double g_prime(double u) const;

  /// E{G(z)} for standard normal z. Exact for pow3 (3/4) and gauss
  /// (-1/sqrt 2); tanh uses the quadrature below.
  double gaussian_reference() const;

 private:
  NonlinearityKind kind_;
};

/// E{f(z)}, z ~ N(0,1), by composite Simpson on [-12, 12] with 24000 panels.
template <typename F>
double GaussianExpectation(F &&f) {
  constexpr int kPanels = 24000;
  constexpr double kLo = -12.0;
  constexpr double kHi = 12.0;
  const double h = (kHi - kLo) / kPanels;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto weight = [&](double z) { return f(z) * norm * std::exp(-0.5 * z * z); };
  double sum = weight(kLo) + weight(kHi);
  for (int i = 1; i < kPanels; ++i)
    sum += (i % 2 ? 4.0 : 2.0) * weight(kLo + i * h);
  return sum * h / 3.0;
}

}  // namespace convbss

#endif  // CONVBSS_NONLINEARITY_H_
