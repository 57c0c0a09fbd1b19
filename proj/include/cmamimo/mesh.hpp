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

#ifndef CMAMIMO_MESH_HPP
#define CMAMIMO_MESH_HPP

#include "types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace cmamimo
{
    using BitVector = std::vector<std::uint8_t>;

    struct PixelIndex
    {
        int row = 0;
        int col = 0;
        auto operator<=>(const PixelIndex &) const = default;
    };

    // A port edge between two grid vertices, each given as (row, col) on the (rows+1) x (cols+1) lattice.
    struct PortEdge
    {
        PixelIndex a;
        PixelIndex b;
    };

    // Rectangular plate in the z = origin.z plane divided into pixel_rows x pixel_cols square-ish pixels.
    // Pixels are indexed row-major; bit (r * pixel_cols + c) switches pixel (r, c). Spine pixels are always
    // metal and carry every port edge, so the number of ports never depends on the configuration.
    struct PlateSpec
    {
        double width = 0.0;  // extent along x [m]
        double height = 0.0; // extent along y [m]
        int pixel_rows = 0;
        int pixel_cols = 0;
        int tris_per_pixel = 2;
        std::vector<PixelIndex> spine;
        std::vector<PortEdge> port_edges;
        Vec3 origin = Vec3::Zero();

        int ports() const { return static_cast<int>(port_edges.size()); }
        int bit_length() const { return pixel_rows * pixel_cols; }
        int bits_per_port() const { return ports() > 0 ? bit_length() / ports() : 0; }
        double pixel_dx() const { return width / pixel_cols; }
        double pixel_dy() const { return height / pixel_rows; }

        Vec3 lattice_point(PixelIndex v) const
        {
            return origin + Vec3(v.col * pixel_dx(), v.row * pixel_dy(), 0.0);
        }

        std::pair<Vec3, Vec3> port_points(int l) const
        {
            if (l < 0 || l >= ports())
                throw InputError("port index out of range");
            return {lattice_point(port_edges[l].a), lattice_point(port_edges[l].b)};
        }

        bool is_spine(int row, int col) const
        {
            return std::find(spine.begin(), spine.end(), PixelIndex{row, col}) != spine.end();
        }

        // Largest diagonal of a pixel; the longest triangle edge in the mesh.
        double max_face_size() const { return std::hypot(pixel_dx(), pixel_dy()); }

        void validate() const
        {
            if (!(width > 0.0) || !(height > 0.0))
                throw InputError("plate width and height must be positive");
            if (pixel_rows <= 0 || pixel_cols <= 0)
                throw InputError("plate must have at least one pixel row and column");
            if (tris_per_pixel != 2)
                throw InputError("only two triangles per pixel are supported");
            for (const auto &p : spine)
                if (p.row < 0 || p.row >= pixel_rows || p.col < 0 || p.col >= pixel_cols)
                    throw InputError("spine pixel outside the pixel grid");
            if (ports() > 0 && bit_length() % ports() != 0)
                throw InputError("pixel count must equal ports * bits_per_port");
            for (const auto &e : port_edges)
                if (!edge_on_spine(e))
                    throw InputError("port edge does not lie inside the feed spine");
        }

        // Plate with one always-on spine column at col 0 and one port per pair of pixel rows. Port l sits on
        // the horizontal edge between spine rows 2l and 2l+1, so pixel_rows = 2 * ports.
        static PlateSpec feed_spine_plate(double width, double height, int ports, int pixel_cols, Vec3 origin = Vec3::Zero())
        {
            PlateSpec s;
            s.width = width;
            s.height = height;
            s.pixel_rows = 2 * ports;
            s.pixel_cols = pixel_cols;
            s.origin = origin;
            for (int r = 0; r < s.pixel_rows; ++r)
                s.spine.push_back({r, 0});
            for (int l = 0; l < ports; ++l)
                s.port_edges.push_back({{2 * l + 1, 0}, {2 * l + 1, 1}});
            s.validate();
            return s;
        }

        // Reference plate: ports x 8 bits, pixels of the given size, two pixel rows per port.
        static PlateSpec reference(int ports, double pixel_size, Vec3 origin = Vec3::Zero())
        {
            const int cols = 4;
            return feed_spine_plate(cols * pixel_size, 2 * ports * pixel_size, ports, cols, origin);
        }

    private:
        bool edge_on_spine(const PortEdge &e) const
        {
            // Collect the pixels adjacent to the edge; every one of them must be a spine pixel.
            const int dr = e.b.row - e.a.row, dc = e.b.col - e.a.col;
            std::vector<PixelIndex> adj;
            if (dr == 0 && std::abs(dc) == 1)
            {
                const int c = std::min(e.a.col, e.b.col);
                adj = {{e.a.row - 1, c}, {e.a.row, c}};
            }
            else if (dc == 0 && std::abs(dr) == 1)
            {
                const int r = std::min(e.a.row, e.b.row);
                adj = {{r, e.a.col - 1}, {r, e.a.col}};
            }
            else if (dr == 1 && dc == 1)
                adj = {{e.a.row, e.a.col}}; // pixel diagonal
            else if (dr == -1 && dc == -1)
                adj = {{e.b.row, e.b.col}};
            else
                return false;
            for (const auto &p : adj)
                if (!is_spine(p.row, p.col))
                    return false;
            return true;
        }
    };

    struct TriMesh
    {
        std::vector<Vec3> vertices;
        std::vector<std::array<int, 3>> faces;
        std::vector<double> face_areas;
        std::vector<Vec3> face_centroids;
        // Optional index of each face in the full plate aperture (2 * pixel + k); empty for imported meshes.
        std::vector<int> aperture_face;

        int num_faces() const { return static_cast<int>(faces.size()); }
        int num_vertices() const { return static_cast<int>(vertices.size()); }

        Vec3 corner(int face, int k) const { return vertices[faces[face][k]]; }

        Vec3 normal(int face) const
        {
            return (corner(face, 1) - corner(face, 0)).cross(corner(face, 2) - corner(face, 0)).normalized();
        }

        // Builds a mesh and its derived quantities; throws GeometryError on malformed input.
        static TriMesh from_faces(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces)
        {
            TriMesh m;
            m.vertices = std::move(vertices);
            m.faces = std::move(faces);
            const int nv = m.num_vertices();
            std::set<std::array<int, 3>> seen;
            for (const auto &f : m.faces)
            {
                for (int k = 0; k < 3; ++k)
                    if (f[k] < 0 || f[k] >= nv)
                        throw GeometryError("face vertex index out of range");
                if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
                    throw GeometryError("face with repeated vertex");
                auto key = f;
                std::sort(key.begin(), key.end());
                if (!seen.insert(key).second)
                    throw GeometryError("duplicate face");
            }
            m.face_areas.reserve(m.faces.size());
            m.face_centroids.reserve(m.faces.size());
            for (const auto &f : m.faces)
            {
                const Vec3 &a = m.vertices[f[0]], &b = m.vertices[f[1]], &c = m.vertices[f[2]];
                const double area = 0.5 * (b - a).cross(c - a).norm();
                if (!(area > 0.0))
                    throw GeometryError("degenerate face with zero area");
                m.face_areas.push_back(area);
                m.face_centroids.push_back((a + b + c) / 3.0);
            }
            return m;
        }
    };

    // Each on-pixel contributes two triangles split along its (r,c)-(r+1,c+1) diagonal, both wound
    // counter-clockwise seen from +z. Only referenced lattice points become vertices, in lattice order.
    inline TriMesh build_plate_mesh(const PlateSpec &spec, const BitVector &bits)
    {
        spec.validate();
        if (static_cast<int>(bits.size()) != spec.bit_length())
            throw InputError("configuration length " + std::to_string(bits.size()) + " does not match plate bit length " +
                             std::to_string(spec.bit_length()));

        const int stride = spec.pixel_cols + 1;
        auto lattice = [&](int r, int c) { return r * stride + c; };

        std::vector<std::array<int, 3>> lattice_faces;
        std::vector<int> aperture_face;
        for (int r = 0; r < spec.pixel_rows; ++r)
            for (int c = 0; c < spec.pixel_cols; ++c)
            {
                if (!bits[static_cast<std::size_t>(r * spec.pixel_cols + c)] && !spec.is_spine(r, c))
                    continue;
                const int v00 = lattice(r, c), v10 = lattice(r, c + 1), v01 = lattice(r + 1, c), v11 = lattice(r + 1, c + 1);
                lattice_faces.push_back({v00, v10, v11});
                lattice_faces.push_back({v00, v11, v01});
                aperture_face.push_back(2 * (r * spec.pixel_cols + c));
                aperture_face.push_back(2 * (r * spec.pixel_cols + c) + 1);
            }

        std::map<int, int> compact;
        for (const auto &f : lattice_faces)
            for (int v : f)
                compact.emplace(v, 0);
        std::vector<Vec3> vertices;
        vertices.reserve(compact.size());
        for (auto &[lat, idx] : compact)
        {
            idx = static_cast<int>(vertices.size());
            vertices.push_back(spec.lattice_point({lat / stride, lat % stride}));
        }
        for (auto &f : lattice_faces)
            for (int &v : f)
                v = compact.at(v);
        TriMesh mesh = TriMesh::from_faces(std::move(vertices), std::move(lattice_faces));
        mesh.aperture_face = std::move(aperture_face);
        return mesh;
    }

    // Mesh of the whole plate with every pixel present.
    inline TriMesh build_aperture_mesh(const PlateSpec &spec)
    {
        return build_plate_mesh(spec, BitVector(static_cast<std::size_t>(spec.bit_length()), 1));
    }

    // One RWG function per interior edge. The plus triangle is the lower-indexed face.
    struct RwgEdge
    {
        int v0 = 0, v1 = 0; // v0 < v1
        int plus_face = 0, minus_face = 0;
        int plus_free = 0, minus_free = 0; // vertex opposite the edge in each face
        double length = 0.0;
    };

    struct RwgBasis
    {
        TriMesh mesh;
        std::vector<RwgEdge> edges;

        int size() const { return static_cast<int>(edges.size()); }

        // RWG vector function of edge n evaluated at point r inside face f (zero outside its support).
        Vec3 evaluate(int n, int f, const Vec3 &r) const
        {
            const RwgEdge &e = edges[n];
            if (f == e.plus_face)
                return e.length / (2.0 * mesh.face_areas[f]) * (r - mesh.vertices[e.plus_free]);
            if (f == e.minus_face)
                return e.length / (2.0 * mesh.face_areas[f]) * (mesh.vertices[e.minus_free] - r);
            return Vec3::Zero();
        }

        double divergence(int n, int f) const
        {
            const RwgEdge &e = edges[n];
            if (f == e.plus_face)
                return e.length / mesh.face_areas[f];
            if (f == e.minus_face)
                return -e.length / mesh.face_areas[f];
            return 0.0;
        }

        // Index of the basis edge joining the two points, or -1.
        int find_edge(const Vec3 &a, const Vec3 &b, double tol = 1e-9) const
        {
            for (int n = 0; n < size(); ++n)
            {
                const Vec3 &p = mesh.vertices[edges[n].v0], &q = mesh.vertices[edges[n].v1];
                const double scale = tol * std::max(1.0, edges[n].length);
                if (((p - a).norm() < scale && (q - b).norm() < scale) || ((p - b).norm() < scale && (q - a).norm() < scale))
                    return n;
            }
            return -1;
        }
    };

    inline RwgBasis extract_rwg(const TriMesh &mesh)
    {
        std::map<std::pair<int, int>, std::vector<int>> incidence;
        for (int f = 0; f < mesh.num_faces(); ++f)
            for (int k = 0; k < 3; ++k)
            {
                int a = mesh.faces[f][k], b = mesh.faces[f][(k + 1) % 3];
                if (a > b)
                    std::swap(a, b);
                incidence[{a, b}].push_back(f);
            }

        RwgBasis basis;
        basis.mesh = mesh;
        auto free_vertex = [&](int f, int a, int b) {
            for (int v : mesh.faces[f])
                if (v != a && v != b)
                    return v;
            throw GeometryError("edge not part of face");
        };
        for (const auto &[key, faces] : incidence) // std::map keeps lexicographic vertex-pair order
        {
            if (faces.size() > 2)
                throw GeometryError("non-manifold edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                                    ") shared by " + std::to_string(faces.size()) + " faces");
            if (faces.size() != 2)
                continue;
            RwgEdge e;
            e.v0 = key.first;
            e.v1 = key.second;
            e.plus_face = std::min(faces[0], faces[1]);
            e.minus_face = std::max(faces[0], faces[1]);
            e.plus_free = free_vertex(e.plus_face, e.v0, e.v1);
            e.minus_free = free_vertex(e.minus_face, e.v0, e.v1);
            e.length = (mesh.vertices[e.v1] - mesh.vertices[e.v0]).norm();
            if (!(e.length > 0.0))
                throw GeometryError("zero-length edge");
            basis.edges.push_back(e);
        }
        return basis;
    }

    // Maps RWG coefficients to stacked (x, y, z) surface current density at face centroids: row 3f + k.
    struct SamplingMatrix
    {
        MatrixXd entries;

        Eigen::Index rows() const { return entries.rows(); }
        Eigen::Index cols() const { return entries.cols(); }
    };

    inline SamplingMatrix face_sampling_operator(const RwgBasis &basis)
    {
        const int nf = basis.mesh.num_faces();
        SamplingMatrix S{MatrixXd::Zero(3 * nf, basis.size())};
        for (int n = 0; n < basis.size(); ++n)
            for (int f : {basis.edges[n].plus_face, basis.edges[n].minus_face})
                S.entries.block<3, 1>(3 * f, n) = basis.evaluate(n, f, basis.mesh.face_centroids[f]);
        return S;
    }
}

#endif
