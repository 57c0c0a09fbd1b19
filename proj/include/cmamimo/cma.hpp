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

#ifndef CMAMIMO_CMA_HPP
#define CMAMIMO_CMA_HPP

#include "efie.hpp"
#include "linalg.hpp"
#include "log.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <numeric>
#include <ostream>
#include <vector>

namespace cmamimo
{
    inline cplx modal_significance(double lambda) { return 1.0 / cplx(1.0, lambda); }

    // Characteristic modes of one antenna. Columns of mode_coeffs have unit Euclidean norm and are mutually
    // orthogonal with respect to R_psd and X. Modes are ordered by decreasing |m|.
    struct ModeBasis
    {
        VectorXd eigenvalues;
        MatrixXd mode_coeffs;   // N_rwg x n
        VectorXc significances; // m_i = 1 / (1 + j lambda_i)
        MatrixXc excitation;    // V, n x L (empty until excitation_matrix is applied)
        MatrixXc mode_patterns; // 3 N_faces x n (empty until mode_patterns is applied)
        int available = 0;      // finite eigenpairs before truncation to n_keep
        double gram_deviation = 0.0;

        int n_kept() const { return static_cast<int>(eigenvalues.size()); }

        // Keeps the listed mode indices, in the given order, across every per-mode field.
        void select(const std::vector<int> &idx)
        {
            const auto n = static_cast<Eigen::Index>(idx.size());
            VectorXd ev(n);
            MatrixXd jc(mode_coeffs.rows(), n);
            VectorXc m(n);
            MatrixXc V(excitation.size() ? n : 0, excitation.cols());
            MatrixXc P(mode_patterns.rows(), mode_patterns.size() ? n : 0);
            for (Eigen::Index i = 0; i < n; ++i)
            {
                const int s = idx[static_cast<std::size_t>(i)];
                ev(i) = eigenvalues(s);
                jc.col(i) = mode_coeffs.col(s);
                m(i) = significances(s);
                if (excitation.size())
                    V.row(i) = excitation.row(s);
                if (mode_patterns.size())
                    P.col(i) = mode_patterns.col(s);
            }
            eigenvalues = ev;
            mode_coeffs = jc;
            significances = m;
            excitation = V;
            mode_patterns = P;
        }
    };

    // Solves X j = lambda R_psd j restricted to the radiating subspace of R_psd. In the eigenbasis of R_psd the
    // non-radiating block is eliminated through its Schur complement, which yields the finite eigenpairs of
    // the singular pencil exactly; the reduced problem is then a standard symmetric one.
    inline ModeBasis solve_modes(const ImpedanceOperator &op, int n_keep)
    {
        if (n_keep < 1)
            throw InputError("n_keep must be at least 1");
        const Eigen::Index N = op.R_psd.rows();
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(op.R_psd);
        const VectorXd &rv = es.eigenvalues();
        const double top = N ? rv.maxCoeff() : 0.0;
        if (!(top > 0.0))
            throw NumericalError("degenerate structure: the radiation matrix has no radiating subspace");

        std::vector<Eigen::Index> keep, drop;
        for (Eigen::Index i = 0; i < N; ++i)
            (rv(i) >= radiating_floor * top ? keep : drop).push_back(i);
        const auto nk = static_cast<Eigen::Index>(keep.size());
        const auto nd = static_cast<Eigen::Index>(drop.size());
        MatrixXd Q1(N, nk), Q2(N, nd);
        VectorXd r1(nk);
        for (Eigen::Index i = 0; i < nk; ++i)
        {
            Q1.col(i) = es.eigenvectors().col(keep[static_cast<std::size_t>(i)]);
            r1(i) = rv(keep[static_cast<std::size_t>(i)]);
        }
        for (Eigen::Index i = 0; i < nd; ++i)
            Q2.col(i) = es.eigenvectors().col(drop[static_cast<std::size_t>(i)]);

        const MatrixXd XQ1 = op.X * Q1;
        MatrixXd S = Q1.transpose() * XQ1;
        MatrixXd elim; // maps reduced coordinates to the non-radiating block: z = elim * y
        if (nd > 0)
        {
            const MatrixXd X22 = Q2.transpose() * op.X * Q2;
            const MatrixXd X21 = Q2.transpose() * XQ1;
            Eigen::PartialPivLU<MatrixXd> lu(X22);
            if (!(std::abs(lu.determinant()) > 0.0) || !std::isfinite(lu.rcond()) || lu.rcond() < 1e-15)
                throw NumericalError("reactance restricted to the non-radiating subspace is singular");
            elim = -lu.solve(X21);
            S += X21.transpose() * elim;
        }
        S = 0.5 * (S + S.transpose()).eval();

        const VectorXd dinv = r1.cwiseSqrt().cwiseInverse();
        const MatrixXd A = dinv.asDiagonal() * S * dinv.asDiagonal();
        Eigen::SelfAdjointEigenSolver<MatrixXd> std_es(0.5 * (A + A.transpose()));

        std::vector<int> order(static_cast<std::size_t>(nk));
        std::iota(order.begin(), order.end(), 0);
        const VectorXd &lam = std_es.eigenvalues();
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(lam(a)) < std::abs(lam(b)); });
        const int n = std::min<int>(n_keep, static_cast<int>(nk));

        ModeBasis mb;
        mb.available = static_cast<int>(nk);
        mb.eigenvalues.resize(n);
        mb.mode_coeffs.resize(N, n);
        mb.significances.resize(n);
        for (int i = 0; i < n; ++i)
        {
            const int s = order[static_cast<std::size_t>(i)];
            const VectorXd y = dinv.asDiagonal() * std_es.eigenvectors().col(s);
            VectorXd j = Q1 * y;
            if (nd > 0)
                j += Q2 * (elim * y);
            j.normalize();
            Eigen::Index imax = 0;
            j.cwiseAbs().maxCoeff(&imax);
            if (j(imax) < 0.0)
                j = -j;
            mb.eigenvalues(i) = lam(s);
            mb.mode_coeffs.col(i) = j;
            mb.significances(i) = modal_significance(lam(s));
        }
        return mb;
    }

    // V[i, l] = j_i^T b_l: overlap of mode current i with the excitation of port l.
    inline MatrixXc excitation_matrix(const ModeBasis &modes, const std::vector<ExcitationVector> &excitations)
    {
        if (excitations.empty())
            throw InputError("at least one port excitation is required");
        MatrixXc V(modes.n_kept(), static_cast<Eigen::Index>(excitations.size()));
        for (std::size_t l = 0; l < excitations.size(); ++l)
        {
            if (excitations[l].b.size() != modes.mode_coeffs.rows())
                throw InputError("excitation vector length does not match the basis size");
            V.col(static_cast<Eigen::Index>(l)) = modes.mode_coeffs.transpose().cast<cplx>() * excitations[l].b;
        }
        return V;
    }

    struct PatternResult
    {
        MatrixXc patterns;
        std::vector<int> kept; // mode indices with a non-zero sampled pattern
    };

    // Column i = S j_i / |S j_i|. Modes whose sampled pattern vanishes are dropped.
    inline PatternResult mode_patterns(const ModeBasis &modes, const SamplingMatrix &sampler)
    {
        if (sampler.cols() != modes.mode_coeffs.rows())
            throw InputError("sampling operator does not match the mode basis");
        const MatrixXd raw = sampler.entries * modes.mode_coeffs;
        const double scale = raw.size() ? raw.cwiseAbs().maxCoeff() : 0.0;
        PatternResult out;
        for (Eigen::Index i = 0; i < raw.cols(); ++i)
        {
            const double nrm = raw.col(i).norm();
            if (!(nrm > 1e-14 * scale))
            {
                log::warn("mode " + std::to_string(i) + " has a zero sampled pattern and is dropped");
                continue;
            }
            out.kept.push_back(static_cast<int>(i));
        }
        out.patterns.resize(raw.rows(), static_cast<Eigen::Index>(out.kept.size()));
        for (std::size_t c = 0; c < out.kept.size(); ++c)
        {
            const auto col = raw.col(out.kept[c]);
            out.patterns.col(static_cast<Eigen::Index>(c)) = (col / col.norm()).cast<cplx>();
        }
        return out;
    }

    // Fills excitation and pattern fields, dropping modes without a sampled pattern.
    inline void attach_ports_and_patterns(ModeBasis &modes, const std::vector<ExcitationVector> &excitations, const SamplingMatrix &sampler)
    {
        modes.excitation = excitation_matrix(modes, excitations);
        PatternResult pr = mode_patterns(modes, sampler);
        if (static_cast<int>(pr.kept.size()) != modes.n_kept())
        {
            modes.mode_patterns.resize(0, 0);
            modes.select(pr.kept);
        }
        modes.mode_patterns = std::move(pr.patterns);
        const MatrixXc gram = modes.mode_patterns.transpose() * modes.mode_patterns;
        modes.gram_deviation = (gram - MatrixXc::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    }

    // Drops modes with |m| below the floor, keeping order.
    inline void truncate_significance(ModeBasis &modes, double floor)
    {
        std::vector<int> keep;
        for (int i = 0; i < modes.n_kept(); ++i)
            if (std::abs(modes.significances(i)) >= floor)
                keep.push_back(i);
        if (static_cast<int>(keep.size()) != modes.n_kept())
            modes.select(keep);
    }

    // CSV: mode, eigenvalue, |m|, then |V[i, l]| per port.
    inline void write_mode_report_csv(std::ostream &os, const ModeBasis &modes)
    {
        os << "mode,eigenvalue,modal_significance";
        for (Eigen::Index l = 0; l < modes.excitation.cols(); ++l)
            os << ",abs_V_port" << l;
        os << '\n';
        os.precision(17);
        for (int i = 0; i < modes.n_kept(); ++i)
        {
            os << i << ',' << modes.eigenvalues(i) << ',' << std::abs(modes.significances(i));
            for (Eigen::Index l = 0; l < modes.excitation.cols(); ++l)
                os << ',' << std::abs(modes.excitation(i, l));
            os << '\n';
        }
    }
}

#endif
