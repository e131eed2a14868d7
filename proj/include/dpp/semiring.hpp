// Copyright 2026 The Authors.
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

// Semirings for message passing. Each provides Value, zero(), one(),
// add(a, b), mul(a, b), accumulate(acc, b) and is_zero(a).

#pragma once

#include "dpp/linalg.hpp"

namespace dpp {

struct SumProduct {
  using Value = double;
  Value zero() const { return 0.0; }
  Value one() const { return 1.0; }
  Value add(Value a, Value b) const { return a + b; }
  Value mul(Value a, Value b) const { return a * b; }
  void accumulate(Value& acc, Value b) const { acc += b; }
  bool is_zero(Value a) const { return a == 0.0; }
};

/// (p, a, b, ab) style tuple; multiplying elements of the form
/// (p, p a, p b, p a b) multiplies p and adds a and b.
struct SecondOrder {
  double q = 0.0;
  double phi = 0.0;
  double psi = 0.0;
  double c = 0.0;

  /// w = (p, p a, p b, p a b).
  static SecondOrder weight(double p, double a, double b) { return {p, p * a, p * b, p * a * b}; }
};

struct SecondOrderSemiring {
  using Value = SecondOrder;
  Value zero() const { return {}; }
  Value one() const { return {1.0, 0.0, 0.0, 0.0}; }
  Value add(const Value& x, const Value& y) const {
    return {x.q + y.q, x.phi + y.phi, x.psi + y.psi, x.c + y.c};
  }
  Value mul(const Value& x, const Value& y) const {
    return {x.q * y.q, x.q * y.phi + y.q * x.phi, x.q * y.psi + y.q * x.psi,
            x.q * y.c + y.q * x.c + x.phi * y.psi + y.phi * x.psi};
  }
  void accumulate(Value& acc, const Value& y) const {
    acc.q += y.q;
    acc.phi += y.phi;
    acc.psi += y.psi;
    acc.c += y.c;
  }
  bool is_zero(const Value& x) const {
    return x.q == 0.0 && x.phi == 0.0 && x.psi == 0.0 && x.c == 0.0;
  }
};

/// Vector-valued tuple: phi, psi in R^d and c a d x d matrix.
struct SecondOrderVec {
  double q = 0.0;
  Vector phi;
  Vector psi;
  Matrix c;
};

struct VectorSecondOrderSemiring {
  using Value = SecondOrderVec;
  Index dim = 0;

  Value zero() const { return {0.0, Vector::Zero(dim), Vector::Zero(dim), Matrix::Zero(dim, dim)}; }
  Value one() const { return {1.0, Vector::Zero(dim), Vector::Zero(dim), Matrix::Zero(dim, dim)}; }

  /// (p, p a, p b, p a b^T).
  Value weight(double p, const Vector& a, const Vector& b) const {
    return {p, p * a, p * b, p * a * b.transpose()};
  }

  Value add(const Value& x, const Value& y) const {
    Value out = x;
    accumulate(out, y);
    return out;
  }

  Value mul(const Value& x, const Value& y) const {
    check(x);
    check(y);
    Value out;
    out.q = x.q * y.q;
    out.phi = x.q * y.phi + y.q * x.phi;
    out.psi = x.q * y.psi + y.q * x.psi;
    out.c = x.q * y.c + y.q * x.c;
    out.c.noalias() += x.phi * y.psi.transpose();
    out.c.noalias() += y.phi * x.psi.transpose();
    return out;
  }

  void accumulate(Value& acc, const Value& y) const {
    check(acc);
    check(y);
    acc.q += y.q;
    acc.phi += y.phi;
    acc.psi += y.psi;
    acc.c += y.c;
  }

  bool is_zero(const Value& x) const {
    return x.q == 0.0 && x.phi.isZero(0.0) && x.psi.isZero(0.0) && x.c.isZero(0.0);
  }

 private:
  void check(const Value& x) const {
    if (x.phi.size() != dim || x.psi.size() != dim || x.c.rows() != dim || x.c.cols() != dim) {
      fail(ErrorCode::kDimensionMismatch, "semiring element has the wrong dimension");
    }
  }
};

}  // namespace dpp
