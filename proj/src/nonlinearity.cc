// nonlinearity.cc

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

#include "convbss/nonlinearity.h"

#include <cmath>
#include <numbers>

#include "convbss/error.h"

namespace convbss {

std::string ToString(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::kPow3: return "pow3";
    case NonlinearityKind::kTanh: return "tanh";
    case NonlinearityKind::kGauss: return "gauss";
  }
  return "unknown";
}

NonlinearityKind NonlinearityFromString(const std::string &name) {
  if (name == "pow3") return NonlinearityKind::kPow3;
  if (name == "tanh") return NonlinearityKind::kTanh;
  if (name == "gauss") return NonlinearityKind::kGauss;
  throw InvalidArgumentError("unknown nonlinearity '" + name + "'");
}

double Nonlinearity::G(double u) const {
  switch (kind_) {
    case NonlinearityKind::kPow3: return 0.25 * u * u * u * u;
    case NonlinearityKind::kTanh: {
      // log cosh u without overflow for large |u|.
      const double a = std::abs(u);
      return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
    }
    case NonlinearityKind::kGauss: return -std::exp(-0.5 * u * u);
  }
  return 0.0;
}

double Nonlinearity::g(double u) const {
  switch (kind_) {
    case NonlinearityKind::kPow3: return u * u * u;
    case NonlinearityKind::kTanh: return std::tanh(u);
    case NonlinearityKind::kGauss: return u * std::exp(-0.5 * u * u);
  }
  return 0.0;
}

double Nonlinearity::g_prime(double u) const {
  switch (kind_) {
    case NonlinearityKind::kPow3: return 3.0 * u * u;
    case NonlinearityKind::kTanh: {
      const double t = std::tanh(u);
      return 1.0 - t * t;
    }
    case NonlinearityKind::kGauss: {
      const double u2 = u * u;
      return (1.0 - u2) * std::exp(-0.5 * u2);
    }
  }
  return 0.0;
}

double Nonlinearity::gaussian_reference() const {
  switch (kind_) {
    case NonlinearityKind::kPow3: return 0.75;
    case NonlinearityKind::kGauss: return -1.0 / std::numbers::sqrt2;
    case NonlinearityKind::kTanh: {
      static const double kTanhReference =
          GaussianExpectation([](double z) { return Nonlinearity(NonlinearityKind::kTanh).G(z); });
      return kTanhReference;
    }
  }
  return 0.0;
}

}  // namespace convbss
