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

#ifndef CMAMIMO_DOF_HPP
#define CMAMIMO_DOF_HPP

#include "channel.hpp"
#include "linalg.hpp"
#include "log.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <string>
#include <vector>

namespace cmamimo
{
    // Port-to-port channel H = U_R G U_T seen through both antennas.
    struct EquivalentChannel
    {
        MatrixXc H; // L_R x L_T
        VectorXd singulars;
    };

    struct DofReport
    {
        int dof_H = 0;           // gamma-threshold count on sigma(H)
        int dof_G_effective = 0; // gamma-threshold count on sigma(G)
        int rank_H = 0;          // strict numerical ranks, relative cutoff 1e-10
        int rank_G = 0;
        int port_mode_upper = 0; // min(L_T, L_R, n_T, n_R)
        int lower_bound = 0;     // rank(V_R) + rank(V_T) + rank(Gamma) - n_R - n_T, may be negative
        int gamma_matrix_rank = 0;
        int L_T = 0, L_R = 0, n_T = 0, n_R = 0;
        double gamma = 0.5;
        double fitness = 0.0;
        std::vector<double> sigma_H;
        std::vector<double> sigma_G;
    };

    struct GammaMatrix
    {
        MatrixXc Gamma; // n_R x n_T
        double residual = 0.0;
        std::vector<int> rx_columns; // pattern columns retained after dropping dependent ones
        std::vector<int> tx_columns;
    };

    // U_T = Jbar_T diag(m_T) V_T: port signals to per-face current.
    inline MatrixXc transmitter_map(const MatrixXc &J_T, const VectorXc &m_T, const MatrixXc &V_T)
    {
        if (J_T.cols() != m_T.size() || V_T.rows() != m_T.size())
            throw InputError("transmitter map: mode count mismatch between patterns, significances and excitation");
        return J_T * m_T.asDiagonal() * V_T;
    }

    // Greedy scan of columns in order; returns the indices that raise the numerical rank.
    inline std::vector<int> independent_columns(const MatrixXc &A, double tol = rank_tolerance)
    {
        std::vector<int> keep;
        int rank = 0;
        MatrixXc acc(A.rows(), 0);
        for (Eigen::Index c = 0; c < A.cols(); ++c)
        {
            MatrixXc trial(A.rows(), acc.cols() + 1);
            trial << acc, A.col(c);
            const int r = numerical_rank(trial, tol);
            if (r > rank)
            {
                rank = r;
                acc = trial;
                keep.push_back(static_cast<int>(c));
            }
        }
        return keep;
    }

    // U_R = V_R^+ diag(m_R)^-1 Ebar_R^+: received field to port signals.
    inline MatrixXc receiver_map(const MatrixXc &V_R, const VectorXc &m_R, const MatrixXc &E_R)
    {
        if (E_R.cols() != m_R.size() || V_R.rows() != m_R.size())
            throw InputError("receiver map: mode count mismatch between patterns, significances and excitation");
        const Eigen::Index L = V_R.cols();
        if (V_R.rows() < L)
            throw NumericalError("receiver map: fewer modes (" + std::to_string(V_R.rows()) + ") than ports (" + std::to_string(L) + ")");
        if (numerical_rank(V_R) < L)
        {
            const auto ok = independent_columns(V_R);
            std::string bad;
            for (int l = 0; l < static_cast<int>(L); ++l)
                if (std::find(ok.begin(), ok.end(), l) == ok.end())
                    bad += (bad.empty() ? "" : ", ") + std::to_string(l);
            throw NumericalError("receiver map: modal excitation matrix is rank deficient; dependent ports: " + bad);
        }
        for (Eigen::Index i = 0; i < m_R.size(); ++i)
            if (!(std::abs(m_R(i)) > 0.0))
                throw NumericalError("receiver map: zero modal significance");
        return pseudo_inverse(V_R) * m_R.cwiseInverse().asDiagonal() * pseudo_inverse(E_R);
    }

    inline EquivalentChannel equivalent_channel(const MatrixXc &U_R, const MatrixXc &G, const MatrixXc &U_T)
    {
        if (U_R.cols() != G.rows() || G.cols() != U_T.rows())
            throw InputError("equivalent channel: inner dimensions do not match");
        EquivalentChannel ch;
        ch.H = U_R * G * U_T;
        ch.singulars = singular_values(ch.H);
        return ch;
    }

    // Least-squares factorisation G ~ Ebar_R Gamma Jbar_T^T. Dependent pattern columns are dropped first.
    // residual = |G - Ebar_R Gamma Jbar_T^T|_F / |G|_F, the part of G outside the modal subspaces.
    inline GammaMatrix gamma_decomposition(const MatrixXc &G, const MatrixXc &E_R, const MatrixXc &J_T)
    {
        if (G.rows() != E_R.rows() || G.cols() != J_T.rows())
            throw InputError("gamma decomposition: pattern dimensions do not match the channel");
        GammaMatrix out;
        out.rx_columns = independent_columns(E_R);
        out.tx_columns = independent_columns(J_T);
        if (static_cast<Eigen::Index>(out.rx_columns.size()) < E_R.cols() || static_cast<Eigen::Index>(out.tx_columns.size()) < J_T.cols())
            log::warn("gamma decomposition: dropped linearly dependent mode patterns");
        MatrixXc E(E_R.rows(), static_cast<Eigen::Index>(out.rx_columns.size()));
        for (std::size_t i = 0; i < out.rx_columns.size(); ++i)
            E.col(static_cast<Eigen::Index>(i)) = E_R.col(out.rx_columns[i]);
        MatrixXc J(J_T.rows(), static_cast<Eigen::Index>(out.tx_columns.size()));
        for (std::size_t i = 0; i < out.tx_columns.size(); ++i)
            J.col(static_cast<Eigen::Index>(i)) = J_T.col(out.tx_columns[i]);

        const MatrixXc Jt = J.transpose();
        out.Gamma = pseudo_inverse(E) * G * pseudo_inverse(Jt);
        const double gn = G.norm();
        out.residual = gn > 0.0 ? (G - E * out.Gamma * Jt).norm() / gn : 0.0;
        out.residual = std::clamp(out.residual, 0.0, 1.0);
        return out;
    }

    inline int achievable_dof(const EquivalentChannel &ch, double gamma)
    {
        return threshold_count(ch.singulars, gamma);
    }

    struct DofBounds
    {
        int upper_port_mode = 0;
        int upper_channel = 0;
        int lower = 0;
    };

    inline DofBounds dof_bounds(const MatrixXc &V_R, const MatrixXc &V_T, const MatrixXc &Gamma, int n_R, int n_T, int L_T, int L_R,
                                int dof_G_effective)
    {
        DofBounds b;
        b.upper_port_mode = std::min({L_T, L_R, n_T, n_R});
        b.upper_channel = dof_G_effective;
        b.lower = numerical_rank(V_R) + numerical_rank(V_T) + numerical_rank(Gamma) - n_R - n_T;
        return b;
    }

    // H ~ V_R^+ diag(m_R)^-1 Gamma diag(m_T) V_T, the modal-domain form of the equivalent channel.
    inline MatrixXc simplified_channel(const MatrixXc &V_R, const VectorXc &m_R, const MatrixXc &Gamma, const VectorXc &m_T, const MatrixXc &V_T)
    {
        return pseudo_inverse(V_R) * m_R.cwiseInverse().asDiagonal() * Gamma * m_T.asDiagonal() * V_T;
    }

    // Single-port antenna element of a conventional array: its normalised radiated pattern (3 N_e) and position.
    struct ElementAnalysis
    {
        VectorXc pattern;
        Vec3 centroid = Vec3::Zero();
    };

    struct ConventionalModel
    {
        MatrixXc U_T;      // blkdiag(j_e, ..., j_e)
        MatrixXc U_R;      // blkdiag(e_e, ..., e_e)^+
        MatrixXc G_point;  // L_R x L_T point-source channel
        MatrixXc H_reduced; // rho_T rho_R G_point
    };

    // L x L point-source channel between element positions (leading 1/d term only).
    inline MatrixXc point_source_channel(const std::vector<Vec3> &rx, const std::vector<Vec3> &tx, double k0)
    {
        MatrixXc G(static_cast<Eigen::Index>(rx.size()), static_cast<Eigen::Index>(tx.size()));
        for (std::size_t i = 0; i < rx.size(); ++i)
            for (std::size_t j = 0; j < tx.size(); ++j)
                G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = green_scalar(rx[i], tx[j], k0);
        return G;
    }

    inline MatrixXc block_diagonal(const VectorXc &v, int copies)
    {
        MatrixXc B = MatrixXc::Zero(v.size() * copies, copies);
        for (int l = 0; l < copies; ++l)
            B.block(v.size() * l, l, v.size(), 1) = v;
        return B;
    }

    // Reduction of the modal signal model to a conventional array of identical, uncoupled elements.
    inline ConventionalModel conventional_reduce(const std::vector<ElementAnalysis> &tx, const std::vector<ElementAnalysis> &rx, cplx rho_T,
                                                 cplx rho_R, double k0)
    {
        if (tx.empty() || rx.empty())
            throw InputError("conventional reduction needs at least one element per side");
        auto check_identical = [](const std::vector<ElementAnalysis> &els, const char *side) {
            for (const auto &e : els)
            {
                if (e.pattern.size() != els.front().pattern.size() || (e.pattern - els.front().pattern).norm() > 1e-6 * els.front().pattern.norm())
                    throw InputError(std::string("conventional reduction inapplicable: ") + side + " elements are not identical");
            }
        };
        check_identical(tx, "transmit");
        check_identical(rx, "receive");

        ConventionalModel out;
        const VectorXc je = tx.front().pattern.normalized();
        const VectorXc ee = rx.front().pattern.normalized();
        out.U_T = block_diagonal(je, static_cast<int>(tx.size()));
        out.U_R = pseudo_inverse(block_diagonal(ee, static_cast<int>(rx.size())));
        std::vector<Vec3> tp, rp;
        for (const auto &e : tx)
            tp.push_back(e.centroid);
        for (const auto &e : rx)
            rp.push_back(e.centroid);
        out.G_point = point_source_channel(rp, tp, k0);
        out.H_reduced = rho_T * rho_R * out.G_point;
        return out;
    }
}

#endif
