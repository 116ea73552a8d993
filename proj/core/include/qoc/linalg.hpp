// Copyright 2026 The qoc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace qoc {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

/// Dense complex 2x2 operator, row-major. Used for Hamiltonians, costates,
/// target operators and anything else living in the qubit's Liouville space.
struct Op2 {
    cplx m00{}, m01{}, m10{}, m11{};

    static constexpr Op2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Op2 zero() { return {}; }

    constexpr Op2& operator+=(const Op2& o) {
        m00 += o.m00;
        m01 += o.m01;
        m10 += o.m10;
        m11 += o.m11;
        return *this;
    }
    constexpr Op2& operator-=(const Op2& o) {
        m00 -= o.m00;
        m01 -= o.m01;
        m10 -= o.m10;
        m11 -= o.m11;
        return *this;
    }
    constexpr Op2& operator*=(cplx s) {
        m00 *= s;
        m01 *= s;
        m10 *= s;
        m11 *= s;
        return *this;
    }
    constexpr Op2& operator*=(double s) {
        m00 *= s;
        m01 *= s;
        m10 *= s;
        m11 *= s;
        return *this;
    }

    constexpr Op2 adjoint() const { return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)}; }
    constexpr cplx trace() const { return m00 + m11; }

    bool is_finite() const {
        return std::isfinite(m00.real()) && std::isfinite(m00.imag()) && std::isfinite(m01.real()) &&
               std::isfinite(m01.imag()) && std::isfinite(m10.real()) && std::isfinite(m10.imag()) &&
               std::isfinite(m11.real()) && std::isfinite(m11.imag());
    }

    friend constexpr Op2 operator+(Op2 a, const Op2& b) { return a += b; }
    friend constexpr Op2 operator-(Op2 a, const Op2& b) { return a -= b; }
    friend constexpr Op2 operator-(const Op2& a) { return {-a.m00, -a.m01, -a.m10, -a.m11}; }
    friend constexpr Op2 operator*(Op2 a, double s) { return a *= s; }
    friend constexpr Op2 operator*(double s, Op2 a) { return a *= s; }
    friend constexpr Op2 operator*(Op2 a, cplx s) { return a *= s; }
    friend constexpr Op2 operator*(cplx s, Op2 a) { return a *= s; }
    friend constexpr Op2 operator*(const Op2& a, const Op2& b) {
        return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11, a.m10 * b.m00 + a.m11 * b.m10,
                a.m10 * b.m01 + a.m11 * b.m11};
    }
    friend constexpr bool operator==(const Op2&, const Op2&) = default;
};

constexpr Op2 commutator(const Op2& a, const Op2& b) { return a * b - b * a; }

/// Liouville-space inner product <<a|b>> = Tr{a^dagger b}.
constexpr cplx inner(const Op2& a, const Op2& b) {
    return std::conj(a.m00) * b.m00 + std::conj(a.m01) * b.m01 + std::conj(a.m10) * b.m10 + std::conj(a.m11) * b.m11;
}

/// Frobenius norm.
inline double norm(const Op2& a) { return std::sqrt(std::real(inner(a, a))); }

inline double max_abs_diff(const Op2& a, const Op2& b) {
    const Op2 d = a - b;
    return std::max(std::max(std::abs(d.m00), std::abs(d.m01)), std::max(std::abs(d.m10), std::abs(d.m11)));
}

}  // namespace qoc
