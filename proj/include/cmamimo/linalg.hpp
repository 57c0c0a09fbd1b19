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

#ifndef CMAMIMO_LINALG_HPP
#define CMAMIMO_LINALG_HPP

#include "types.hpp"

#include <Eigen/SVD>

#include <span>
#include <vector>

namespace cmamimo
{
    // Relative singular-value cutoff shared by every rank and pseudo-inverse in the library.
    inline constexpr double rank_tolerance = 1e-10;

    template <typename Derived>
    VectorXd singular_values(const Eigen::MatrixBase<Derived> &A)
    {
        if (A.size() == 0)
            return VectorXd();
        using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
        if (std::min(A.rows(), A.cols()) <= 32)
            return Eigen::JacobiSVD<Mat>(A).singularValues();
        return Eigen::BDCSVD<Mat>(A).singularValues();
    }

    // Number of singular values above tol * sigma_max. An all-zero matrix has rank 0.
    inline int rank_from_singulars(const VectorXd &sigma, double tol = rank_tolerance)
    {
        if (sigma.size() == 0 || !(sigma(0) > 0.0))
            return 0;
        int r = 0;
        for (Eigen::Index i = 0; i < sigma.size(); ++i)
            if (sigma(i) > tol * sigma(0))
                ++r;
        return r;
    }

    template <typename Derived>
    int numerical_rank(const Eigen::MatrixBase<Derived> &A, double tol = rank_tolerance)
    {
        return rank_from_singulars(singular_values(A), tol);
    }

    // Moore-Penrose pseudo-inverse with a relative singular-value cutoff.
    template <typename Derived>
    auto pseudo_inverse(const Eigen::MatrixBase<Derived> &A, double tol = rank_tolerance)
    {
        using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
        if (A.size() == 0)
            return Mat(A.cols(), A.rows());
        Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const VectorXd &s = svd.singularValues();
        VectorXd s_inv = VectorXd::Zero(s.size());
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > tol * s(0))
                s_inv(i) = 1.0 / s(i);
        Mat out = svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().adjoint();
        return out;
    }

    // Count of singular values whose power is at least gamma times the strongest one:
    // #{ l : sigma_l^2 >= gamma * sigma_1^2 }. Expects a descending spectrum.
    inline int threshold_count(std::span<const double> sigma, double gamma)
    {
        if (!(gamma > 0.0 && gamma < 1.0))
            throw InputError("threshold gamma must lie in (0, 1)");
        if (sigma.empty() || !(sigma[0] > 0.0))
            return 0;
        const double cutoff = gamma * sigma[0] * sigma[0];
        int n = 0;
        for (double s : sigma)
            if (s * s >= cutoff)
                ++n;
        return n;
    }

    inline int threshold_count(const VectorXd &sigma, double gamma)
    {
        return threshold_count(std::span<const double>(sigma.data(), static_cast<std::size_t>(sigma.size())), gamma);
    }

    inline std::vector<double> to_std(const VectorXd &v)
    {
        return std::vector<double>(v.data(), v.data() + v.size());
    }
}

#endif
