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

#ifndef CMAMIMO_CHANNEL_HPP
#define CMAMIMO_CHANNEL_HPP

#include "linalg.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"

#include <limits>
#include <ostream>
#include <vector>

namespace cmamimo
{
    // Which terms of the free-space dyadic Green function to include.
    enum class GreenTerms
    {
        full,        // 1/d, 1/d^2 and 1/d^3
        leading_only // far-field 1/d term
    };

    // Free-space dyadic Green function between observation point r and source point r':
    //   G = -j eta exp(-j k d) / (2 lambda d) * [ (I - dd^T) + j lambda/(2 pi d) (I - 3 dd^T)
    //                                              - (lambda/(2 pi d))^2 (I - 3 dd^T) ]
    inline Matrix3c green_dyadic(const Vec3 &r, const Vec3 &rp, double k0, GreenTerms terms = GreenTerms::full)
    {
        const Vec3 dv = r - rp;
        const double d = dv.norm();
        if (!(d > 0.0))
            throw GeometryError("dyadic Green function evaluated at coincident points");
        const Vec3 dh = dv / d;
        const double lam = 2.0 * pi / k0;
        const Eigen::Matrix3d I3 = Eigen::Matrix3d::Identity();
        const Eigen::Matrix3d dd = dh * dh.transpose();
        const cplx pref = -I1 * eta0 * std::exp(cplx(0.0, -k0 * d)) / (2.0 * lam * d);
        const double u = lam / (2.0 * pi * d);
        Matrix3c bracket = (I3 - dd).cast<cplx>();
        if (terms == GreenTerms::full)
            bracket += (I1 * u - u * u) * (I3 - 3.0 * dd).cast<cplx>();
        return pref * bracket;
    }

    // Scalar point-source coupling: the leading-term amplitude of the dyadic Green function.
    inline cplx green_scalar(const Vec3 &r, const Vec3 &rp, double k0)
    {
        const double d = (r - rp).norm();
        if (!(d > 0.0))
            throw GeometryError("scalar Green function evaluated at coincident points");
        const double lam = 2.0 * pi / k0;
        return -I1 * eta0 * std::exp(cplx(0.0, -k0 * d)) / (2.0 * lam * d);
    }

    struct ChannelOperator
    {
        MatrixXc G; // 3 N_rx_faces x 3 N_tx_faces
        double k0 = 0.0;
        VectorXd singulars;
        std::vector<Vec3> tx_centroids, rx_centroids;
        std::vector<double> tx_areas, rx_areas;
    };

    struct ChannelOptions
    {
        // Source quadrature per transmit face: 1 = centroid x area, 3 = symmetric 3-point rule.
        int source_points = 1;
        GreenTerms terms = GreenTerms::full;
        bool compute_singulars = true;
    };

    inline double min_centroid_distance(const TriMesh &a, const TriMesh &b)
    {
        double best = std::numeric_limits<double>::infinity();
        for (const auto &p : a.face_centroids)
            for (const auto &q : b.face_centroids)
                best = std::min(best, (p - q).norm());
        return best;
    }

    // Field at receive centroids produced by a piecewise-constant current density on transmit faces:
    // block(p, q) = (-j omega mu0) G(c_p, c_q) A_q. Receive samples carry no area weight.
    inline ChannelOperator assemble_channel(const TriMesh &tx, const TriMesh &rx, double k0, const ChannelOptions &opt = {})
    {
        if (!(k0 > 0.0))
            throw InputError("wavenumber must be positive");
        if (tx.num_faces() == 0 || rx.num_faces() == 0)
            throw GeometryError("channel apertures must contain at least one face");
        if (!(min_centroid_distance(tx, rx) > 0.0))
            throw GeometryError("transmit and receive apertures overlap");
        if (opt.source_points != 1 && opt.source_points != 3)
            throw InputError("source_points must be 1 or 3");

        const double omega = k0 * c0;
        const cplx pref = -I1 * omega * mu0;
        ChannelOperator ch;
        ch.k0 = k0;
        ch.tx_centroids = tx.face_centroids;
        ch.rx_centroids = rx.face_centroids;
        ch.tx_areas = tx.face_areas;
        ch.rx_areas = rx.face_areas;
        ch.G.resize(3 * rx.num_faces(), 3 * tx.num_faces());
        for (int q = 0; q < tx.num_faces(); ++q)
            for (int p = 0; p < rx.num_faces(); ++p)
            {
                Matrix3c blk;
                if (opt.source_points == 1)
                    blk = green_dyadic(rx.face_centroids[p], tx.face_centroids[q], k0, opt.terms) * tx.face_areas[q];
                else
                {
                    blk.setZero();
                    for (const auto &pt : quad::three_point())
                    {
                        const Vec3 rp = quad::map_point(pt, tx.corner(q, 0), tx.corner(q, 1), tx.corner(q, 2));
                        blk += green_dyadic(rx.face_centroids[p], rp, k0, opt.terms) * (pt.w * tx.face_areas[q]);
                    }
                }
                ch.G.block<3, 3>(3 * p, 3 * q) = pref * blk;
            }
        if (opt.compute_singulars)
            ch.singulars = singular_values(ch.G);
        return ch;
    }

    struct ChannelDof
    {
        int effective = 0;   // #{ sigma_l^2 >= gamma sigma_1^2 }
        int strict_rank = 0; // relative cutoff 1e-12
    };

    inline ChannelDof dof_g(const ChannelOperator &op, double gamma)
    {
        if (op.singulars.size() == 0)
            throw InputError("channel has an empty singular spectrum");
        return {threshold_count(op.singulars, gamma), rank_from_singulars(op.singulars, 1e-12)};
    }

    inline void write_spectrum_csv(std::ostream &os, const VectorXd &sigma, double gamma)
    {
        os << "index,singular_value,power,threshold_power\n";
        os.precision(17);
        const double cut = sigma.size() ? gamma * sigma(0) * sigma(0) : 0.0;
        for (Eigen::Index i = 0; i < sigma.size(); ++i)
            os << i + 1 << ',' << sigma(i) << ',' << sigma(i) * sigma(i) << ',' << cut << '\n';
    }
}

#endif
