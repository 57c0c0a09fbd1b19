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

// Independent reference computations used by the tests. Nothing here calls into the library's numerical
// kernels; only plain types are shared.

#ifndef CMAMIMO_TESTS_ORACLES_HPP
#define CMAMIMO_TESTS_ORACLES_HPP

#include "cmamimo/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <utility>
#include <vector>

namespace oracle
{
    using cmamimo::cplx;
    using cmamimo::MatrixXc;
    using cmamimo::Vec3;

    // Gauss-Legendre nodes/weights on [0, 1] by Newton iteration on P_n.
    inline std::vector<std::pair<double, double>> gauss01(int n)
    {
        std::vector<std::pair<double, double>> out;
        for (int i = 1; i <= n; ++i)
        {
            double x = std::cos(cmamimo::pi * (i - 0.25) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it)
            {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k)
                {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16)
                    break;
            }
            out.emplace_back(0.5 * (x + 1.0), 1.0 / ((1.0 - x * x) * dp * dp));
        }
        return out;
    }

    struct Tri
    {
        Vec3 a, b, c;
        double area() const { return 0.5 * (b - a).cross(c - a).norm(); }
    };

    // Value-initialized accumulator; Eigen fixed-size types are not zeroed by default construction.
    template <typename R>
    R zero_of()
    {
        if constexpr (std::is_arithmetic_v<R> || std::is_same_v<R, cplx>)
            return R(0);
        else
            return R::Zero();
    }

    // Integral of f over a triangle with apex r (which may lie on the triangle), Duffy-mapped so that
    // integrands behaving like 1/|r' - r| become smooth. Signed: orientation relative to normal n.
    template <typename F>
    auto duffy_apex(const Vec3 &r, const Vec3 &p, const Vec3 &q, const Vec3 &n, int order, F &&f)
    {
        using R = decltype(f(Vec3()));
        R acc = zero_of<R>();
        const double signed2A = (p - r).cross(q - r).dot(n);
        if (std::abs(signed2A) < 1e-300)
            return acc;
        const auto g = gauss01(order);
        for (const auto &[u, wu] : g)
            for (const auto &[v, wv] : g)
            {
                const Vec3 x = r + u * (p - r) + u * v * (q - p);
                acc = acc + f(x) * (wu * wv * u * signed2A);
            }
        return acc;
    }

    // Integral of f over triangle t, splitting at r so a 1/R singularity at r is cancelled.
    template <typename F>
    auto integrate_split(const Tri &t, const Vec3 &r, int order, F &&f)
    {
        const Vec3 n = (t.b - t.a).cross(t.c - t.a).normalized();
        // Project r into the plane so the signed decomposition is exact.
        const Vec3 rp = r - (r - t.a).dot(n) * n;
        return duffy_apex(rp, t.a, t.b, n, order, f) + duffy_apex(rp, t.b, t.c, n, order, f) + duffy_apex(rp, t.c, t.a, n, order, f);
    }

    // Plain product Gauss rule on a triangle through the collapsed square.
    template <typename F>
    auto integrate_tri(const Tri &t, int order, F &&f)
    {
        using R = decltype(f(Vec3()));
        R acc = zero_of<R>();
        const double A2 = 2.0 * t.area();
        for (const auto &[u, wu] : gauss01(order))
            for (const auto &[v, wv] : gauss01(order))
            {
                const Vec3 x = t.a + u * (t.b - t.a) + u * v * (t.c - t.b);
                acc = acc + f(x) * (wu * wv * u * A2);
            }
        return acc;
    }

    // Self-impedance of the single RWG function on two triangles sharing edge (v0, v1), with free vertices
    // vp (plus) and vm (minus). Full kernel, no singularity extraction: the inner integral is split at the
    // observation point instead.
    inline cplx rwg_self_impedance(const Vec3 &v0, const Vec3 &v1, const Vec3 &vp, const Vec3 &vm, double frequency, int order = 16)
    {
        const double k = 2.0 * cmamimo::pi * frequency / cmamimo::c0;
        const double omega = 2.0 * cmamimo::pi * frequency;
        const double len = (v1 - v0).norm();
        const Tri tp{v0, v1, vp}, tm{v0, v1, vm};
        const double Ap = tp.area(), Am = tm.area();
        struct Side
        {
            const Tri *t;
            double A;
            double sign;
            Vec3 free;
        };
        const std::array<Side, 2> sides{{{&tp, Ap, 1.0, vp}, {&tm, Am, -1.0, vm}}};
        auto fvec = [&](const Side &s, const Vec3 &x) -> Vec3 { return s.sign * len / (2.0 * s.A) * (x - s.free); };
        auto fdiv = [&](const Side &s) { return s.sign * len / s.A; };

        cplx total = 0.0;
        for (const auto &obs : sides)
            for (const auto &src : sides)
            {
                total += integrate_tri(*obs.t, order, [&](const Vec3 &r) {
                    const Vec3 fm = fvec(obs, r);
                    return integrate_split(*src.t, r, order, [&](const Vec3 &rp) {
                        const double R = (r - rp).norm();
                        const cplx g = R > 0.0 ? std::exp(cplx(0.0, -k * R)) / R : cplx(0.0);
                        return (fm.dot(fvec(src, rp)) - fdiv(obs) * fdiv(src) / (k * k)) * g;
                    });
                });
            }
        return cplx(0.0, omega * cmamimo::mu0 / (4.0 * cmamimo::pi)) * total;
    }

    // Interior edges by brute force: every pair of faces, count shared vertex pairs.
    inline int count_interior_edges(const std::vector<std::array<int, 3>> &faces)
    {
        std::map<std::pair<int, int>, int> count;
        for (std::size_t f = 0; f < faces.size(); ++f)
            for (std::size_t g = 0; g < faces.size(); ++g)
            {
                if (f == g)
                    continue;
                int shared = 0;
                std::array<int, 2> sv{};
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        if (faces[f][i] == faces[g][j] && shared < 2)
                            sv[shared++] = faces[f][i];
                if (shared == 2)
                    count[{std::min(sv[0], sv[1]), std::max(sv[0], sv[1])}]++;
            }
        int n = 0;
        for (const auto &[e, c] : count)
            if (c == 2) // seen from each of its two faces
                ++n;
        return n;
    }

    // Finite generalized eigenvalues of X j = lambda R j from the spectrum of X^-1 R: mu = 1 / lambda.
    inline std::vector<double> pencil_eigenvalues_via_inverse(const Eigen::MatrixXd &X, const Eigen::MatrixXd &R, double rel_cut = 1e-9)
    {
        const Eigen::MatrixXd A = X.inverse() * R;
        Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
        const Eigen::VectorXcd mu = es.eigenvalues();
        const double top = mu.cwiseAbs().maxCoeff();
        std::vector<double> lam;
        for (Eigen::Index i = 0; i < mu.size(); ++i)
            if (std::abs(mu(i)) > rel_cut * top)
                lam.push_back(1.0 / mu(i).real());
        std::sort(lam.begin(), lam.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        return lam;
    }

    // A * diag(d) * B by explicit summation.
    inline MatrixXc triple_product(const MatrixXc &A, const Eigen::VectorXcd &d, const MatrixXc &B)
    {
        MatrixXc out = MatrixXc::Zero(A.rows(), B.cols());
        for (Eigen::Index r = 0; r < A.rows(); ++r)
            for (Eigen::Index c = 0; c < B.cols(); ++c)
            {
                cplx s = 0.0;
                for (Eigen::Index k = 0; k < d.size(); ++k)
                    s += A(r, k) * d(k) * B(k, c);
                out(r, c) = s;
            }
        return out;
    }

    // Left inverse of a full-column-rank matrix from the normal equations.
    inline MatrixXc normal_equations_pinv(const MatrixXc &E)
    {
        const MatrixXc EhE = E.adjoint() * E;
        return EhE.lu().solve(E.adjoint());
    }

    inline double population_std(const std::vector<double> &v)
    {
        long double mean = 0.0L;
        for (double x : v)
            mean += x;
        mean /= static_cast<long double>(v.size());
        long double var = 0.0L;
        for (double x : v)
            var += (x - mean) * (x - mean);
        return static_cast<double>(std::sqrt(var / static_cast<long double>(v.size())));
    }

    inline MatrixXc random_complex(Eigen::Index r, Eigen::Index c, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> N(0.0, 1.0);
        MatrixXc M(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j)
                M(i, j) = cplx(N(rng), N(rng));
        return M;
    }

    // Random complex matrix of prescribed rank.
    inline MatrixXc random_rank(Eigen::Index r, Eigen::Index c, Eigen::Index rank, std::mt19937_64 &rng)
    {
        if (rank == 0)
            return MatrixXc::Zero(r, c);
        return random_complex(r, rank, rng) * random_complex(rank, c, rng);
    }
}

#endif
