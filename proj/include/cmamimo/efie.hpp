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

#ifndef CMAMIMO_EFIE_HPP
#define CMAMIMO_EFIE_HPP

#include "mesh.hpp"
#include "quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

namespace cmamimo
{
    // Closed-form integrals of 1/R and r'/R over a flat triangle, observed from an arbitrary point.
    struct StaticPotentials
    {
        double scalar = 0.0; // \int 1/|r - r'| dS'
        Vec3 vector = Vec3::Zero(); // \int r' / |r - r'| dS'
    };

    inline StaticPotentials triangle_static_potentials(const Vec3 &r, const Vec3 &p0, const Vec3 &p1, const Vec3 &p2)
    {
        const Vec3 n = (p1 - p0).cross(p2 - p0).normalized();
        const double h = (r - p0).dot(n);
        const double ah = std::abs(h);
        const Vec3 rho = r - h * n;
        const std::array<const Vec3 *, 3> pts = {&p0, &p1, &p2};

        StaticPotentials out;
        Vec3 rho_part = Vec3::Zero();
        for (int i = 0; i < 3; ++i)
        {
            const Vec3 &a = *pts[i];
            const Vec3 &b = *pts[(i + 1) % 3];
            const Vec3 lhat = (b - a).normalized();
            const Vec3 uhat = lhat.cross(n);
            const double lp = (b - rho).dot(lhat);
            const double lm = (a - rho).dot(lhat);
            const double P0 = (a - rho).dot(uhat);
            const double R0sq = P0 * P0 + h * h;
            const double Rp = (b - r).norm();
            const double Rm = (a - r).norm();

            double f2 = 0.0;
            const double scale = (b - a).norm();
            if (R0sq > 1e-28 * scale * scale)
                f2 = (lp + lm >= 0.0) ? std::log((Rp + lp) / (Rm + lm)) : std::log((Rm - lm) / (Rp - lp));

            double beta = 0.0;
            if (ah > 0.0)
                beta = std::atan(P0 * lp / (R0sq + ah * Rp)) - std::atan(P0 * lm / (R0sq + ah * Rm));
            out.scalar += P0 * f2 - ah * beta;
            rho_part += 0.5 * uhat * (R0sq * f2 + lp * Rp - lm * Rm);
        }
        out.vector = rho_part + rho * out.scalar;
        return out;
    }

    // (exp(-jkR) - 1) / R, finite at R = 0.
    inline cplx smooth_kernel(double k, double R)
    {
        const double x = k * R;
        if (x < 1e-8)
            return cplx(-0.5 * k * x, -k);
        const double s = std::sin(0.5 * x);
        return cplx(-2.0 * s * s / R, -std::sin(x) / R);
    }

    inline cplx full_kernel(double k, double R)
    {
        return std::exp(cplx(0.0, -k * R)) / R;
    }

    struct ImpedanceOperator
    {
        MatrixXc Z;
        MatrixXd R;
        MatrixXd X;
        MatrixXd R_psd;
        double frequency = 0.0;
        double k0 = 0.0;

        int size() const { return static_cast<int>(Z.rows()); }
    };

    // Relative eigenvalue floor below which R is treated as non-radiating.
    inline constexpr double radiating_floor = 1e-10;

    // Spectral projection of a symmetric matrix onto its numerically positive part: eigenvalues below
    // floor * (largest eigenvalue) are set to zero.
    inline MatrixXd project_psd(const MatrixXd &R, double floor = radiating_floor)
    {
        if (R.size() == 0)
            return R;
        const MatrixXd Rs = 0.5 * (R + R.transpose());
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(Rs);
        VectorXd ev = es.eigenvalues();
        const double top = ev.maxCoeff();
        if (!(top > 0.0))
            return MatrixXd::Zero(R.rows(), R.cols());
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (ev(i) < floor * top)
                ev(i) = 0.0;
        MatrixXd out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
        return 0.5 * (out + out.transpose());
    }

    namespace detail
    {
        struct FaceBasis
        {
            int edge;
            double sign;
            int free_vertex;
        };

        inline std::vector<std::vector<FaceBasis>> face_bases(const RwgBasis &basis)
        {
            std::vector<std::vector<FaceBasis>> out(static_cast<std::size_t>(basis.mesh.num_faces()));
            for (int n = 0; n < basis.size(); ++n)
            {
                const RwgEdge &e = basis.edges[n];
                out[e.plus_face].push_back({n, 1.0, e.plus_free});
                out[e.minus_face].push_back({n, -1.0, e.minus_free});
            }
            return out;
        }

        inline double diameter(const TriMesh &m, int f)
        {
            const Vec3 a = m.corner(f, 0), b = m.corner(f, 1), c = m.corner(f, 2);
            return std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
        }

        // Source-triangle integrals of the Green kernel g and g*r' at one observation point.
        struct SourceIntegrals
        {
            cplx scalar;
            Eigen::Vector3cd vector;
        };

        inline SourceIntegrals regular_source(double k, const Vec3 &r, const TriMesh &m, int q, const quad::TriRule &rule)
        {
            const Vec3 a = m.corner(q, 0), b = m.corner(q, 1), c = m.corner(q, 2);
            SourceIntegrals s{0.0, Eigen::Vector3cd::Zero()};
            for (const auto &pt : rule)
            {
                const Vec3 rp = quad::map_point(pt, a, b, c);
                const cplx g = pt.w * m.face_areas[q] * full_kernel(k, (r - rp).norm());
                s.scalar += g;
                s.vector += g * rp.cast<cplx>();
            }
            return s;
        }

        inline SourceIntegrals singular_source(double k, const Vec3 &r, const TriMesh &m, int q)
        {
            const Vec3 a = m.corner(q, 0), b = m.corner(q, 1), c = m.corner(q, 2);
            const StaticPotentials st = triangle_static_potentials(r, a, b, c);
            SourceIntegrals s{st.scalar, st.vector.cast<cplx>()};
            for (const auto &pt : quad::seven_point())
            {
                const Vec3 rp = quad::map_point(pt, a, b, c);
                const cplx g = pt.w * m.face_areas[q] * smooth_kernel(k, (r - rp).norm());
                s.scalar += g;
                s.vector += g * rp.cast<cplx>();
            }
            return s;
        }
    }

    // Quadrature settings for the Galerkin EFIE. Pairs of triangles closer than near_factor times the
    // larger diameter use singularity extraction with the near_test rule on the observation triangle.
    struct EfieOptions
    {
        double near_factor = 2.0;
        int near_test_order = 8; // collapsed Gauss order, averaged over apex choice (3*n*n points)
    };

    // Galerkin EFIE matrix over RWG functions, exp(+j omega t) convention:
    // Z_mn = j omega mu0 / (4 pi) \int\int [f_m . f_n - (div f_m)(div f_n) / k^2] exp(-jkR)/R dS dS'.
    inline ImpedanceOperator assemble_impedance(const RwgBasis &basis, double frequency, const EfieOptions &opt = {})
    {
        if (!(frequency > 0.0))
            throw InputError("frequency must be positive");
        if (basis.size() == 0)
            throw GeometryError("RWG basis is empty; the mesh has no interior edges");
        const TriMesh &m = basis.mesh;
        for (double a : m.face_areas)
            if (a < 1e-12)
                throw GeometryError("degenerate triangle with area below 1e-12 m^2");

        const double k = wavenumber(frequency);
        const double omega = 2.0 * pi * frequency;
        const cplx pref = I1 * omega * mu0 / (4.0 * pi);
        const auto fb = detail::face_bases(basis);
        const int nf = m.num_faces();
        const int N = basis.size();
        const quad::TriRule near_rule = quad::apex_symmetrized(quad::collapsed_gauss(opt.near_test_order));
        const quad::TriRule &far_rule = quad::three_point();

        std::vector<double> diam(static_cast<std::size_t>(nf));
        for (int f = 0; f < nf; ++f)
            diam[f] = detail::diameter(m, f);

        MatrixXc Z = MatrixXc::Zero(N, N);

        // Contribution of source face q to observation face p, integrated with test rule `rule` on p.
        auto face_pair = [&](int p, int q, bool near, const quad::TriRule &rule) {
            Eigen::Matrix3cd block = Eigen::Matrix3cd::Zero(); // [basis on p][basis on q]
            const Vec3 a = m.corner(p, 0), b = m.corner(p, 1), c = m.corner(p, 2);
            for (const auto &pt : rule)
            {
                const Vec3 r = quad::map_point(pt, a, b, c);
                const detail::SourceIntegrals s = near ? detail::singular_source(k, r, m, q) : detail::regular_source(k, r, m, q, far_rule);
                const double w = pt.w * m.face_areas[p];
                for (std::size_t i = 0; i < fb[p].size(); ++i)
                {
                    const auto &bm = fb[p][i];
                    const RwgEdge &em = basis.edges[bm.edge];
                    const Vec3 fm = r - m.vertices[bm.free_vertex];
                    for (std::size_t j = 0; j < fb[q].size(); ++j)
                    {
                        const auto &bn = fb[q][j];
                        const RwgEdge &en = basis.edges[bn.edge];
                        const Vec3 &vn = m.vertices[bn.free_vertex];
                        const double ss = bm.sign * bn.sign * em.length * en.length;
                        // \int g (r' - v_n) dS' = vector - v_n * scalar
                        const Eigen::Vector3cd Iv = s.vector - vn.cast<cplx>() * s.scalar;
                        const cplx vec_term = ss / (4.0 * m.face_areas[p] * m.face_areas[q]) * fm.cast<cplx>().dot(Iv);
                        const cplx sca_term = ss / (m.face_areas[p] * m.face_areas[q] * k * k) * s.scalar;
                        block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += w * (vec_term - sca_term);
                    }
                }
            }
            return block;
        };

        for (int p = 0; p < nf; ++p)
            for (int q = p; q < nf; ++q)
            {
                if (fb[p].empty() || fb[q].empty())
                    continue;
                const double dist = (m.face_centroids[p] - m.face_centroids[q]).norm();
                // Lattice meshes put many pairs exactly on the threshold; the slack keeps such ties on the near
                // side regardless of roundoff, so mirror-image pairs are classified alike.
                const bool near = dist < opt.near_factor * std::max(diam[p], diam[q]) * (1.0 + 1e-9);
                Eigen::Matrix3cd block;
                if (near)
                    block = 0.5 * (face_pair(p, q, true, near_rule) + face_pair(q, p, true, near_rule).transpose());
                else
                    block = face_pair(p, q, false, far_rule);
                for (std::size_t i = 0; i < fb[p].size(); ++i)
                    for (std::size_t j = 0; j < fb[q].size(); ++j)
                    {
                        const int mi = fb[p][i].edge, nj = fb[q][j].edge;
                        const cplx v = pref * block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                        if (p == q)
                        {
                            Z(mi, nj) += v;
                        }
                        else
                        {
                            Z(mi, nj) += v;
                            Z(nj, mi) += v;
                        }
                    }
            }
        Z = 0.5 * (Z + Z.transpose()).eval();

        ImpedanceOperator op;
        op.Z = Z;
        op.R = Z.real();
        op.X = Z.imag();
        op.R_psd = project_psd(op.R);
        op.frequency = frequency;
        op.k0 = k;
        return op;
    }

    struct ExcitationVector
    {
        VectorXc b;
        int port_index = 0;
    };

    // Delta-gap source of 1 V across the port edge: b_n = l_n on that edge, zero elsewhere.
    inline ExcitationVector delta_gap_excitation(const RwgBasis &basis, const std::vector<std::pair<Vec3, Vec3>> &ports, int l)
    {
        if (l < 0 || l >= static_cast<int>(ports.size()))
            throw InputError("port index out of range");
        const int n = basis.find_edge(ports[l].first, ports[l].second);
        if (n < 0)
            throw GeometryError("port " + std::to_string(l) + " edge is not an interior edge of the mesh");
        ExcitationVector ex;
        ex.b = VectorXc::Zero(basis.size());
        ex.b(n) = basis.edges[n].length;
        ex.port_index = l;
        return ex;
    }

    inline std::vector<std::pair<Vec3, Vec3>> port_points(const PlateSpec &spec)
    {
        std::vector<std::pair<Vec3, Vec3>> out;
        for (int l = 0; l < spec.ports(); ++l)
            out.push_back(spec.port_points(l));
        return out;
    }

    inline std::vector<ExcitationVector> port_excitations(const RwgBasis &basis, const std::vector<std::pair<Vec3, Vec3>> &ports)
    {
        std::vector<ExcitationVector> out;
        for (int l = 0; l < static_cast<int>(ports.size()); ++l)
            out.push_back(delta_gap_excitation(basis, ports, l));
        return out;
    }
}

#endif
