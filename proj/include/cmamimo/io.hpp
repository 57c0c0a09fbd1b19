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

#ifndef CMAMIMO_IO_HPP
#define CMAMIMO_IO_HPP

#include "dof.hpp"
#include "efie.hpp"
#include "mesh.hpp"
#include "pipeline.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace cmamimo::io
{
    using nlohmann::json;

    // Text mesh:
    //   cmamimo-mesh 1
    //   vertices <n>
    //   <x> <y> <z>          (n lines, meters)
    //   faces <m>
    //   <i> <j> <k>          (m lines, zero-based)
    inline void write_mesh_text(std::ostream &os, const TriMesh &mesh)
    {
        os.precision(17);
        os << "cmamimo-mesh 1\nvertices " << mesh.num_vertices() << '\n';
        for (const auto &v : mesh.vertices)
            os << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
        os << "faces " << mesh.num_faces() << '\n';
        for (const auto &f : mesh.faces)
            os << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    }

    inline TriMesh read_mesh_text(std::istream &is)
    {
        std::string tag;
        int version = 0, nv = 0, nf = 0;
        if (!(is >> tag >> version) || tag != "cmamimo-mesh" || version != 1)
            throw InputError("mesh text: missing 'cmamimo-mesh 1' header");
        if (!(is >> tag >> nv) || tag != "vertices" || nv < 0)
            throw InputError("mesh text: expected 'vertices <n>'");
        std::vector<Vec3> verts(static_cast<std::size_t>(nv));
        for (auto &v : verts)
            if (!(is >> v.x() >> v.y() >> v.z()))
                throw InputError("mesh text: truncated vertex list");
        if (!(is >> tag >> nf) || tag != "faces" || nf < 0)
            throw InputError("mesh text: expected 'faces <m>'");
        std::vector<std::array<int, 3>> faces(static_cast<std::size_t>(nf));
        for (auto &f : faces)
            if (!(is >> f[0] >> f[1] >> f[2]))
                throw InputError("mesh text: truncated face list");
        return TriMesh::from_faces(std::move(verts), std::move(faces));
    }

    inline json mesh_to_json(const TriMesh &mesh)
    {
        json j;
        j["format"] = "cmamimo-mesh";
        j["version"] = 1;
        json v = json::array(), f = json::array();
        for (const auto &p : mesh.vertices)
            v.push_back({p.x(), p.y(), p.z()});
        for (const auto &t : mesh.faces)
            f.push_back({t[0], t[1], t[2]});
        j["vertices"] = v;
        j["faces"] = f;
        return j;
    }

    inline TriMesh mesh_from_json(const json &j)
    {
        try
        {
            if (j.at("format").get<std::string>() != "cmamimo-mesh")
                throw InputError("mesh json: wrong format tag");
            std::vector<Vec3> verts;
            for (const auto &p : j.at("vertices"))
                verts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
            std::vector<std::array<int, 3>> faces;
            for (const auto &t : j.at("faces"))
                faces.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
            return TriMesh::from_faces(std::move(verts), std::move(faces));
        }
        catch (const json::exception &e)
        {
            throw InputError(std::string("mesh json: ") + e.what());
        }
    }

    // Dense impedance matrix as separate row-major real and imaginary arrays.
    inline json impedance_to_json(const ImpedanceOperator &op)
    {
        json j;
        j["format"] = "cmamimo-impedance";
        j["version"] = 1;
        j["frequency"] = op.frequency;
        j["size"] = op.size();
        json re = json::array(), im = json::array();
        for (int r = 0; r < op.size(); ++r)
        {
            json rr = json::array(), ri = json::array();
            for (int c = 0; c < op.size(); ++c)
            {
                rr.push_back(op.Z(r, c).real());
                ri.push_back(op.Z(r, c).imag());
            }
            re.push_back(rr);
            im.push_back(ri);
        }
        j["real"] = re;
        j["imag"] = im;
        return j;
    }

    inline ImpedanceOperator impedance_from_json(const json &j)
    {
        try
        {
            if (j.at("format").get<std::string>() != "cmamimo-impedance")
                throw InputError("impedance json: wrong format tag");
            ImpedanceOperator op;
            op.frequency = j.at("frequency").get<double>();
            op.k0 = wavenumber(op.frequency);
            const int n = j.at("size").get<int>();
            op.Z.resize(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    op.Z(r, c) = cplx(j.at("real").at(r).at(c).get<double>(), j.at("imag").at(r).at(c).get<double>());
            op.R = op.Z.real();
            op.X = op.Z.imag();
            op.R_psd = project_psd(op.R);
            return op;
        }
        catch (const json::exception &e)
        {
            throw InputError(std::string("impedance json: ") + e.what());
        }
    }

    inline json report_to_json(const DofReport &r)
    {
        json j;
        j["dof_H"] = r.dof_H;
        j["dof_G_effective"] = r.dof_G_effective;
        j["rank_H"] = r.rank_H;
        j["rank_G"] = r.rank_G;
        j["port_mode_upper"] = r.port_mode_upper;
        j["lower_bound"] = r.lower_bound;
        j["gamma_matrix_rank"] = r.gamma_matrix_rank;
        j["L_T"] = r.L_T;
        j["L_R"] = r.L_R;
        j["n_T"] = r.n_T;
        j["n_R"] = r.n_R;
        j["gamma"] = r.gamma;
        j["fitness"] = r.fitness;
        j["sigma_H"] = r.sigma_H;
        j["sigma_G"] = r.sigma_G;
        return j;
    }

    inline DofReport report_from_json(const json &j)
    {
        try
        {
            DofReport r;
            r.dof_H = j.at("dof_H").get<int>();
            r.dof_G_effective = j.at("dof_G_effective").get<int>();
            r.rank_H = j.at("rank_H").get<int>();
            r.rank_G = j.at("rank_G").get<int>();
            r.port_mode_upper = j.at("port_mode_upper").get<int>();
            r.lower_bound = j.at("lower_bound").get<int>();
            r.gamma_matrix_rank = j.at("gamma_matrix_rank").get<int>();
            r.L_T = j.at("L_T").get<int>();
            r.L_R = j.at("L_R").get<int>();
            r.n_T = j.at("n_T").get<int>();
            r.n_R = j.at("n_R").get<int>();
            r.gamma = j.at("gamma").get<double>();
            r.fitness = j.at("fitness").get<double>();
            r.sigma_H = j.at("sigma_H").get<std::vector<double>>();
            r.sigma_G = j.at("sigma_G").get<std::vector<double>>();
            return r;
        }
        catch (const json::exception &e)
        {
            throw InputError(std::string("dof report json: ") + e.what());
        }
    }

    namespace detail
    {
        inline std::vector<std::vector<double>> read_numeric_csv(std::istream &is, const std::string &what, bool header)
        {
            std::vector<std::vector<double>> rows;
            std::string line;
            int n = 0;
            while (std::getline(is, line))
            {
                ++n;
                if (header && n == 1)
                    continue;
                if (line.find_first_not_of(" \t\r") == std::string::npos)
                    continue;
                std::vector<double> row;
                std::stringstream ss(line);
                std::string cell;
                while (std::getline(ss, cell, ','))
                {
                    try
                    {
                        std::size_t used = 0;
                        row.push_back(std::stod(cell, &used));
                        if (cell.find_first_not_of(" \t\r", used) != std::string::npos)
                            throw std::invalid_argument(cell);
                    }
                    catch (const std::exception &)
                    {
                        throw InputError(what + " line " + std::to_string(n) + ": '" + cell + "' is not a number");
                    }
                }
                if (!rows.empty() && row.size() != rows.front().size())
                    throw InputError(what + " line " + std::to_string(n) + ": inconsistent column count");
                rows.push_back(std::move(row));
            }
            return rows;
        }
    }

    // Externally computed modes, e.g. exported from a full-wave solver.
    //   modes csv (one header line): mode, eigenvalue, then Re V[i,l], Im V[i,l] for each port l
    //   pattern csv (no header): 3 * faces rows; Re and Im of each mode's per-face current, mode by mode
    inline ModalSummary import_modal_summary(std::istream &modes_csv, std::istream &patterns_csv)
    {
        const auto mrows = detail::read_numeric_csv(modes_csv, "modes csv", true);
        if (mrows.empty())
            throw InputError("modes csv: no modes");
        const std::size_t cols = mrows.front().size();
        if (cols < 4 || cols % 2 != 0)
            throw InputError("modes csv: expected mode, eigenvalue and Re/Im pairs per port");
        const auto n = static_cast<Eigen::Index>(mrows.size());
        const auto L = static_cast<Eigen::Index>((cols - 2) / 2);
        ModalSummary s;
        s.significances.resize(n);
        s.excitation.resize(n, L);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const auto &r = mrows[static_cast<std::size_t>(i)];
            s.significances(i) = modal_significance(r[1]);
            for (Eigen::Index l = 0; l < L; ++l)
                s.excitation(i, l) = cplx(r[static_cast<std::size_t>(2 + 2 * l)], r[static_cast<std::size_t>(3 + 2 * l)]);
        }
        const auto prows = detail::read_numeric_csv(patterns_csv, "pattern csv", false);
        if (prows.empty() || prows.size() % 3 != 0)
            throw InputError("pattern csv: row count must be a positive multiple of 3");
        if (static_cast<Eigen::Index>(prows.front().size()) != 2 * n)
            throw InputError("pattern csv: expected " + std::to_string(2 * n) + " columns (Re, Im per mode)");
        s.aperture_patterns.resize(static_cast<Eigen::Index>(prows.size()), n);
        for (std::size_t r = 0; r < prows.size(); ++r)
            for (Eigen::Index i = 0; i < n; ++i)
                s.aperture_patterns(static_cast<Eigen::Index>(r), i) =
                    cplx(prows[r][static_cast<std::size_t>(2 * i)], prows[r][static_cast<std::size_t>(2 * i + 1)]);
        return s;
    }

    // Inverse of import_modal_summary; eigenvalues are recovered from m = 1 / (1 + j lambda).
    inline void export_modal_summary(std::ostream &modes_csv, std::ostream &patterns_csv, const ModalSummary &s)
    {
        modes_csv.precision(17);
        patterns_csv.precision(17);
        modes_csv << "mode,eigenvalue";
        for (Eigen::Index l = 0; l < s.excitation.cols(); ++l)
            modes_csv << ",re_V" << l << ",im_V" << l;
        modes_csv << '\n';
        for (int i = 0; i < s.n_kept(); ++i)
        {
            const double lambda = (1.0 / s.significances(i)).imag();
            modes_csv << i << ',' << lambda;
            for (Eigen::Index l = 0; l < s.excitation.cols(); ++l)
                modes_csv << ',' << s.excitation(i, l).real() << ',' << s.excitation(i, l).imag();
            modes_csv << '\n';
        }
        for (Eigen::Index r = 0; r < s.aperture_patterns.rows(); ++r)
        {
            for (Eigen::Index i = 0; i < s.aperture_patterns.cols(); ++i)
                patterns_csv << (i ? "," : "") << s.aperture_patterns(r, i).real() << ',' << s.aperture_patterns(r, i).imag();
            patterns_csv << '\n';
        }
    }

    inline json read_json_file(const std::filesystem::path &p)
    {
        std::ifstream in(p);
        if (!in)
            throw InputError("cannot open " + p.string());
        try
        {
            return json::parse(in);
        }
        catch (const json::exception &e)
        {
            throw InputError(p.string() + ": " + e.what());
        }
    }

    // Writes through a temporary file and renames, so readers never see a half-written file.
    inline void write_file_atomic(const std::filesystem::path &p, const std::string &content)
    {
        const auto tmp = p.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out)
                throw Error("cannot write " + tmp);
            out << content;
            if (!out)
                throw Error("write failed: " + tmp);
        }
        std::filesystem::rename(tmp, p);
    }
}

#endif
