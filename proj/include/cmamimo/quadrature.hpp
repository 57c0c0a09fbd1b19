// SPDX-License-Identifier: Apache-2.0
//
// cmamimo: characteristic-mode degrees-of-freedom analysis for MIMO antennas
// Copyright (C) 2026 The cmamimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CMAMIMO_QUADRATURE_HPP
#define CMAMIMO_QUADRATURE_HPP

#include "types.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace cmamimo::quad
{
    // Barycentric point with a weight normalised so that the weights of a rule sum to 1.
    struct TriPoint
    {
        double a, b, c;
        double w;
    };

    using TriRule = std::vector<TriPoint>;

    // Degree-2 symmetric 3-point rule.
    inline const TriRule &three_point()
    {
        static const TriRule rule = {
            {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
            {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0},
            {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0},
        };
        return rule;
    }

    // Degree-5 7-point rule (Dunavant).
    inline const TriRule &seven_point()
    {
        static const TriRule rule = [] {
            const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
            const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
            return TriRule{
                {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
                {a1, b1, b1, w1},
                {b1, a1, b1, w1},
                {b1, b1, a1, w1},
                {a2, b2, b2, w2},
                {b2, a2, b2, w2},
                {b2, b2, a2, w2},
            };
        }();
        return rule;
    }

    // Gauss-Legendre nodes and weights on [0, 1].
    inline std::vector<std::array<double, 2>> gauss_legendre01(int n)
    {
        std::vector<std::array<double, 2>> out(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
        {
            double x = std::cos(pi * (i + 0.75) / (n + 0.5));
            double dp = 1.0;
            for (int it = 0; it < 100; ++it)
            {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k)
                {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                if (n == 1)
                    p0 = 1.0, p1 = x;
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15)
                    break;
            }
            out[static_cast<std::size_t>(i)] = {0.5 * (1.0 - x), 1.0 / ((1.0 - x * x) * dp * dp)};
        }
        return out;
    }

    // Collapsed (Duffy) tensor Gauss rule with n*n points; exact for polynomials of degree 2n-2.
    inline TriRule collapsed_gauss(int n)
    {
        const auto gl = gauss_legendre01(n);
        TriRule rule;
        rule.reserve(static_cast<std::size_t>(n * n));
        for (const auto &[u, wu] : gl)
            for (const auto &[v, wv] : gl)
            {
                const double b = u * (1.0 - v), c = u * v;
                rule.push_back({1.0 - b - c, b, c, 2.0 * wu * wv * u});
            }
        return rule;
    }

    // Averages a rule over the three choices of apex vertex. Collapsed rules are already symmetric in the
    // two base vertices, so the result is invariant under every relabelling of the triangle corners.
    inline TriRule apex_symmetrized(const TriRule &rule)
    {
        TriRule out;
        out.reserve(3 * rule.size());
        for (const auto &p : rule)
        {
            out.push_back({p.a, p.b, p.c, p.w / 3.0});
            out.push_back({p.b, p.c, p.a, p.w / 3.0});
            out.push_back({p.c, p.a, p.b, p.w / 3.0});
        }
        return out;
    }

    inline Vec3 map_point(const TriPoint &p, const Vec3 &v0, const Vec3 &v1, const Vec3 &v2)
    {
        return p.a * v0 + p.b * v1 + p.c * v2;
    }
}

#endif
