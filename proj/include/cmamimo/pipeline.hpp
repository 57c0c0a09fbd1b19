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

#ifndef CMAMIMO_PIPELINE_HPP
#define CMAMIMO_PIPELINE_HPP

#include "channel.hpp"
#include "cma.hpp"
#include "dof.hpp"
#include "efie.hpp"
#include "mesh.hpp"

#include <memory>

namespace cmamimo
{
    // Modes with |m| below this floor never enter diag(m)^-1.
    inline constexpr double significance_floor = 1e-3;

    // One configured plate with its characteristic modes. Patterns are embedded in the full-aperture face
    // ordering so that every configuration of a plate shares one channel matrix.
    struct AntennaModel
    {
        PlateSpec spec;
        BitVector bits;
        TriMesh mesh;
        RwgBasis basis;
        ImpedanceOperator impedance;
        ModeBasis modes;
        MatrixXc aperture_patterns; // 3 * (2 * pixels) x n, zero rows on switched-off pixels
    };

    // What a link evaluation needs from one antenna. Small enough to cache per configuration.
    struct ModalSummary
    {
        VectorXc significances;
        MatrixXc excitation;        // n x L
        MatrixXc aperture_patterns; // 3 * (2 * pixels) x n

        int n_kept() const { return static_cast<int>(significances.size()); }

        static ModalSummary of(const AntennaModel &a)
        {
            return {a.modes.significances, a.modes.excitation, a.aperture_patterns};
        }
    };

    inline MatrixXc embed_in_aperture(const TriMesh &mesh, const MatrixXc &patterns, int aperture_faces)
    {
        if (static_cast<int>(mesh.aperture_face.size()) != mesh.num_faces())
            throw InputError("mesh carries no aperture face map");
        MatrixXc out = MatrixXc::Zero(3 * aperture_faces, patterns.cols());
        for (int f = 0; f < mesh.num_faces(); ++f)
            out.middleRows(3 * mesh.aperture_face[f], 3) = patterns.middleRows(3 * f, 3);
        return out;
    }

    inline AntennaModel analyze_antenna(const PlateSpec &spec, const BitVector &bits, double frequency, int n_keep)
    {
        AntennaModel a;
        a.spec = spec;
        a.bits = bits;
        a.mesh = build_plate_mesh(spec, bits);
        a.basis = extract_rwg(a.mesh);
        a.impedance = assemble_impedance(a.basis, frequency);
        a.modes = solve_modes(a.impedance, n_keep);
        const auto ex = port_excitations(a.basis, port_points(spec));
        attach_ports_and_patterns(a.modes, ex, face_sampling_operator(a.basis));
        truncate_significance(a.modes, significance_floor);
        if (a.modes.n_kept() == 0)
            throw NumericalError("no characteristic mode above the significance floor");
        a.aperture_patterns = embed_in_aperture(a.mesh, a.modes.mode_patterns, 2 * spec.bit_length());
        return a;
    }

    // Transmit and receive plates, operating point and the shared aperture channel.
    struct LinkSetup
    {
        PlateSpec tx, rx;
        double frequency = 27e9;
        double gamma = 0.5;
        int n_keep = 20;
        ChannelOperator channel;
        ChannelDof channel_dof;

        static LinkSetup create(const PlateSpec &tx, const PlateSpec &rx, double frequency, double gamma, int n_keep)
        {
            LinkSetup s;
            s.tx = tx;
            s.rx = rx;
            s.frequency = frequency;
            s.gamma = gamma;
            s.n_keep = n_keep;
            s.channel = assemble_channel(build_aperture_mesh(tx), build_aperture_mesh(rx), wavenumber(frequency));
            s.channel_dof = dof_g(s.channel, gamma);
            return s;
        }
    };

    struct LinkResult
    {
        EquivalentChannel channel;
        DofReport report;
        GammaMatrix gamma;
    };

    // Fitness: negative population standard deviation of the leading min(L_T, L_R) singular values.
    inline double singular_spread_fitness(const std::vector<double> &sigma, int L_m)
    {
        const int n = std::min<int>(L_m, static_cast<int>(sigma.size()));
        if (n <= 0)
            return 0.0;
        double mean = 0.0;
        for (int l = 0; l < n; ++l)
            mean += sigma[static_cast<std::size_t>(l)];
        mean /= n;
        double var = 0.0;
        for (int l = 0; l < n; ++l)
        {
            const double d = sigma[static_cast<std::size_t>(l)] - mean;
            var += d * d;
        }
        return -std::sqrt(var / n);
    }

    inline LinkResult evaluate_link(const LinkSetup &setup, const ModalSummary &tx, const ModalSummary &rx, bool with_gamma = true)
    {
        LinkResult res;
        const MatrixXc U_T = transmitter_map(tx.aperture_patterns, tx.significances, tx.excitation);
        const MatrixXc U_R = receiver_map(rx.excitation, rx.significances, rx.aperture_patterns);
        res.channel = equivalent_channel(U_R, setup.channel.G, U_T);

        DofReport &r = res.report;
        r.gamma = setup.gamma;
        r.L_T = setup.tx.ports();
        r.L_R = setup.rx.ports();
        r.n_T = tx.n_kept();
        r.n_R = rx.n_kept();
        r.dof_H = achievable_dof(res.channel, setup.gamma);
        r.dof_G_effective = setup.channel_dof.effective;
        r.rank_H = rank_from_singulars(res.channel.singulars);
        r.rank_G = rank_from_singulars(setup.channel.singulars);
        r.sigma_H = to_std(res.channel.singulars);
        r.sigma_G = to_std(setup.channel.singulars);
        r.fitness = singular_spread_fitness(r.sigma_H, std::min(r.L_T, r.L_R));
        r.port_mode_upper = std::min({r.L_T, r.L_R, r.n_T, r.n_R});
        if (with_gamma)
        {
            res.gamma = gamma_decomposition(setup.channel.G, rx.aperture_patterns, tx.aperture_patterns);
            r.gamma_matrix_rank = numerical_rank(res.gamma.Gamma);
            const auto b = dof_bounds(rx.excitation, tx.excitation, res.gamma.Gamma, r.n_R, r.n_T, r.L_T, r.L_R, r.dof_G_effective);
            r.lower_bound = b.lower;
        }
        return res;
    }

    inline LinkResult evaluate_link(const LinkSetup &setup, const AntennaModel &tx, const AntennaModel &rx, bool with_gamma = true)
    {
        return evaluate_link(setup, ModalSummary::of(tx), ModalSummary::of(rx), with_gamma);
    }
}

#endif
