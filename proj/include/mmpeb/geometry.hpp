// SPDX-License-Identifier: Apache-2.0
//
// mmpeb  C++ library for mmWave uplink/downlink position and orientation error bounds
// Copyright (C) 2026 mmpeb contributors
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

#ifndef MMPEB_GEOMETRY_HPP
#define MMPEB_GEOMETRY_HPP

#include "types.hpp"

namespace mmpeb
{
    // Antenna array as centroid-relative element coordinates (3 x N).
    struct ArrayGeometry
    {
        Eigen::Matrix3Xd elements; // meters, column per element, centroid at origin

        Eigen::Index size() const { return elements.cols(); }
    };

    // Rectangular grid in the xz-plane, x-major element ordering (x sweeps fastest).
    // The centroid is subtracted exactly so sum of coordinates is zero.
    inline ArrayGeometry make_ura(int n_x, int n_z, double spacing)
    {
        if (n_x < 1 || n_z < 1)
            throw std::invalid_argument("make_ura: element counts must be >= 1");
        if (spacing <= 0.0)
            throw std::invalid_argument("make_ura: spacing must be > 0");
        ArrayGeometry g;
        g.elements.resize(3, static_cast<Eigen::Index>(n_x) * n_z);
        Eigen::Index c = 0;
        for (int iz = 0; iz < n_z; ++iz)
            for (int ix = 0; ix < n_x; ++ix, ++c)
            {
                g.elements(0, c) = (ix - 0.5 * (n_x - 1)) * spacing;
                g.elements(1, c) = 0.0;
                g.elements(2, c) = (iz - 0.5 * (n_z - 1)) * spacing;
            }
        return g;
    }

    // Centered line of elements on the x-axis.
    inline ArrayGeometry make_ula(int n, double spacing)
    {
        if (n < 1)
            throw std::invalid_argument("make_ula: element count must be >= 1");
        if (spacing <= 0.0)
            throw std::invalid_argument("make_ula: spacing must be > 0");
        ArrayGeometry g;
        g.elements.setZero(3, n);
        for (int i = 0; i < n; ++i)
            g.elements(0, i) = (i - 0.5 * (n - 1)) * spacing;
        return g;
    }

    // k(theta, phi) = (2 pi / lambda) [cos phi sin theta, sin phi sin theta, cos theta]^T
    inline Vec3 wavenumber(const AnglePair &a, double lambda)
    {
        if (lambda <= 0.0)
            throw std::invalid_argument("wavenumber: lambda must be > 0");
        const double k = 2.0 * kPi / lambda;
        return {k * std::cos(a.phi) * std::sin(a.theta),
                k * std::sin(a.phi) * std::sin(a.theta),
                k * std::cos(a.theta)};
    }

    inline Vec3 wavenumber_dtheta(const AnglePair &a, double lambda)
    {
        const double k = 2.0 * kPi / lambda;
        return {k * std::cos(a.phi) * std::cos(a.theta),
                k * std::sin(a.phi) * std::cos(a.theta),
                -k * std::sin(a.theta)};
    }

    inline Vec3 wavenumber_dphi(const AnglePair &a, double lambda)
    {
        const double k = 2.0 * kPi / lambda;
        return {-k * std::sin(a.phi) * std::sin(a.theta),
                k * std::cos(a.phi) * std::sin(a.theta),
                0.0};
    }

    // Unit-norm array response (1/sqrt(N)) exp(-j Delta^T k).
    inline VectorXcd steering_vector(const ArrayGeometry &g, const AnglePair &a, double lambda)
    {
        const VectorXd phase = g.elements.transpose() * wavenumber(a, lambda);
        const double scale = 1.0 / std::sqrt(static_cast<double>(g.size()));
        VectorXcd out(g.size());
        for (Eigen::Index i = 0; i < g.size(); ++i)
            out(i) = std::polar(scale, -phase(i));
        return out;
    }

    // Rotation by phi0 around z followed by theta0 around the negative x'-axis.
    inline Eigen::Matrix3d rotation_matrix(const Orientation &o)
    {
        const double c = std::cos(o.phi0), s = std::sin(o.phi0);
        const double ct = std::cos(o.theta0), st = std::sin(o.theta0);
        Eigen::Matrix3d r;
        r << c, -s * ct, -s * st,
            s, c * ct, c * st,
            0.0, -st, ct;
        return r;
    }

    // Spherical angles of a nonzero vector. Sets the degenerate flag when the
    // azimuth is undefined (x = y = 0); phi is then 0 by convention and the
    // caller must treat the geometry as singular.
    inline AnglePair angles_of(const Vec3 &v, bool *degenerate = nullptr)
    {
        const double n = v.norm();
        if (n == 0.0)
            throw std::invalid_argument("angles_of: zero vector");
        AnglePair a;
        a.theta = std::acos(std::clamp(v.z() / n, -1.0, 1.0));
        // +0.0 normalises the sign of a negative zero so the azimuth lands in
        // (-pi, pi]; the degeneracy tolerance absorbs rotation round-off
        const bool deg = std::hypot(v.x(), v.y()) <= 1e-12 * n;
        a.phi = deg ? 0.0 : std::atan2(v.y() + 0.0, v.x() + 0.0);
        if (degenerate)
            *degenerate |= deg;
        return a;
    }

    // Angles and delay of one propagation path.
    struct PathGeometry
    {
        AnglePair bs;       // seen from the BS (global frame)
        AnglePair ue;       // seen from the UE (rotated frame)
        double toa = 0.0;   // seconds
        double d1 = 0.0;    // BS->cluster (or BS->UE for LOS), meters
        double d2 = 0.0;    // cluster->UE, 0 for LOS
        bool degenerate = false;
    };

    // LOS relations: BS angles from p, UE angles from p' = -R^T p, toa = |p|/c.
    inline PathGeometry los_path_geometry(const Vec3 &p, const Orientation &o)
    {
        if (p.norm() == 0.0)
            throw std::invalid_argument("los_path_geometry: |p| must be > 0");
        PathGeometry pg;
        pg.bs = angles_of(p, &pg.degenerate);
        const Vec3 pprime = -(rotation_matrix(o).transpose() * p);
        pg.ue = angles_of(pprime, &pg.degenerate);
        pg.d1 = p.norm();
        pg.toa = pg.d1 / kSpeedOfLight;
        return pg;
    }

    // Single-bounce relations: BS sees the cluster q, the UE sees w = p - q in
    // its rotated frame, toa = (|q| + |w|)/c.
    inline PathGeometry nlos_path_geometry(const Vec3 &p, const Orientation &o, const Vec3 &q)
    {
        const Vec3 w = p - q;
        if (q.norm() == 0.0 || w.norm() == 0.0)
            throw std::invalid_argument("nlos_path_geometry: |q| and |p-q| must be > 0");
        PathGeometry pg;
        pg.bs = angles_of(q, &pg.degenerate);
        const Vec3 wprime = -(rotation_matrix(o).transpose() * w);
        pg.ue = angles_of(wprime, &pg.degenerate);
        pg.d1 = q.norm();
        pg.d2 = w.norm();
        pg.toa = (pg.d1 + pg.d2) / kSpeedOfLight;
        return pg;
    }
}

#endif
