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

#ifndef MMPEB_SIGNAL_HPP
#define MMPEB_SIGNAL_HPP

#include "detail/quadrature.hpp"
#include "geometry.hpp"
#include "types.hpp"

#include <vector>

namespace mmpeb
{
    // Unit-energy pulse described by its PSD |P(f)|^2.
    //
    // ideal_sinc is a flat PSD 1/B on [-B/2, B/2] with B = support_factor * W.
    //   support_factor = 2 ("full band"): Weff^2 = W^2/3, the convention behind
    //     the reference scenario figures.
    //   support_factor = 1 ("strict"):    Weff^2 = W^2/12, the literal flat PSD
    //     over the signal bandwidth.
    // sampled_psd integrates a tabulated PSD by adaptive quadrature.
    struct PulseSpec
    {
        enum class Kind
        {
            ideal_sinc,
            sampled_psd
        };

        Kind kind = Kind::ideal_sinc;
        double bandwidth = 125e6;  // W, Hz
        double support_factor = 2; // ideal_sinc: PSD support is support_factor*W

        // (f, |P(f)|^2) samples, f ascending; linearly interpolated
        std::vector<std::pair<double, double>> psd_samples;

        static PulseSpec ideal_sinc(double w, double support = 2.0)
        {
            PulseSpec p;
            p.kind = Kind::ideal_sinc;
            p.bandwidth = w;
            p.support_factor = support;
            return p;
        }

        static PulseSpec sampled(double w, std::vector<std::pair<double, double>> samples)
        {
            PulseSpec p;
            p.kind = Kind::sampled_psd;
            p.bandwidth = w;
            p.psd_samples = std::move(samples);
            return p;
        }

        double support() const
        {
            if (kind == Kind::ideal_sinc)
                return support_factor * bandwidth;
            if (psd_samples.empty())
                throw std::invalid_argument("PulseSpec: empty PSD table");
            return 2.0 * std::max(std::abs(psd_samples.front().first),
                                  std::abs(psd_samples.back().first));
        }

        double psd_at(double f) const
        {
            if (kind == Kind::ideal_sinc)
            {
                const double b = support();
                return std::abs(f) <= 0.5 * b ? 1.0 / b : 0.0;
            }
            if (psd_samples.size() < 2)
                throw std::invalid_argument("PulseSpec: PSD table needs >= 2 samples");
            if (f < psd_samples.front().first || f > psd_samples.back().first)
                return 0.0;
            if (f == psd_samples.back().first)
                return psd_samples.back().second;
            auto hi = std::upper_bound(psd_samples.begin(), psd_samples.end(), f,
                                       [](double v, const auto &s) { return v < s.first; });
            if (hi == psd_samples.begin())
                return psd_samples.front().second;
            auto lo = hi - 1;
            const double t = (f - lo->first) / (hi->first - lo->first);
            return lo->second + t * (hi->second - lo->second);
        }
    };

    // sqrt of the second spectral moment, integral f^2 |P(f)|^2 df.
    inline double effective_bandwidth(const PulseSpec &pulse)
    {
        if (pulse.kind == PulseSpec::Kind::ideal_sinc)
        {
            const double b = pulse.support();
            return b / std::sqrt(12.0); // flat PSD: integral = B^2/12
        }
        const double half = 0.5 * pulse.support();
        const double m2 = detail::adaptive_trapezoid(
            [&](double f) { return f * f * pulse.psd_at(f); }, -half, half);
        const double e = detail::adaptive_trapezoid(
            [&](double f) { return pulse.psd_at(f); }, -half, half);
        if (e < 1e-12)
            throw std::invalid_argument("effective_bandwidth: PSD integrates to zero");
        return std::sqrt(m2 / e);
    }

    // Effective bandwidth squared in the reference convention, Weff^2 = W^2/3.
    inline double paper_effective_bandwidth_sq(double w) { return w * w / 3.0; }

    // Delay-correlation matrices R_i[u,v] = integral (2 pi f)^i |P(f)|^2
    // exp(-j 2 pi f (tau_v - tau_u)) df for i in {0,1,2}.
    struct SignalCorrelations
    {
        MatrixXcd r0, r1, r2;
        double weff = 0.0; // RMS bandwidth of the pulse actually used
    };

    namespace detail
    {
        // Closed forms for a flat unit-energy PSD on [-B/2, B/2], x = B*dtau:
        //   r0 = sinc(x)
        //   r1 = j B (cos(pi x) - sinc(x)) / x
        //   r2 = B^2 (pi sin(pi x)/x + 2 cos(pi x)/x^2 - 2 sin(pi x)/(pi x^3))
        inline double sinc(double x)
        {
            if (std::abs(x) < 1e-8)
                return 1.0 - kPi * kPi * x * x / 6.0;
            return std::sin(kPi * x) / (kPi * x);
        }

        inline cplx flat_r0(double x) { return cplx(sinc(x), 0.0); }

        inline cplx flat_r1(double x, double b)
        {
            double v;
            if (std::abs(x) < 1e-4)
                v = -kPi * kPi * x / 3.0 + std::pow(kPi, 4) * x * x * x / 30.0;
            else
                v = (std::cos(kPi * x) - sinc(x)) / x;
            return cplx(0.0, b * v);
        }

        inline cplx flat_r2(double x, double b)
        {
            double v;
            if (std::abs(x) < 1e-3)
                v = kPi * kPi / 3.0 - std::pow(kPi, 4) * x * x / 10.0;
            else
                v = kPi * std::sin(kPi * x) / x + 2.0 * std::cos(kPi * x) / (x * x) -
                    2.0 * std::sin(kPi * x) / (kPi * x * x * x);
            return cplx(b * b * v, 0.0);
        }

        inline cplx quad_r(const PulseSpec &pulse, int order, double dtau)
        {
            const double half = 0.5 * pulse.support();
            // diagonal magnitude bounds the entries; anchors the stop criterion
            const double scale = std::pow(2.0 * kPi * half, order);
            auto re = [&](double f) {
                return std::pow(2.0 * kPi * f, order) * pulse.psd_at(f) *
                       std::cos(2.0 * kPi * f * dtau);
            };
            auto im = [&](double f) {
                return -std::pow(2.0 * kPi * f, order) * pulse.psd_at(f) *
                       std::sin(2.0 * kPi * f * dtau);
            };
            return {adaptive_trapezoid(re, -half, half, 1e-10, scale),
                    adaptive_trapezoid(im, -half, half, 1e-10, scale)};
        }
    }

    inline SignalCorrelations correlation_matrices(const PulseSpec &pulse,
                                                   const std::vector<double> &taus)
    {
        const auto m = static_cast<Eigen::Index>(taus.size());
        if (m < 1)
            throw std::invalid_argument("correlation_matrices: need at least one delay");
        SignalCorrelations s;
        s.r0.resize(m, m);
        s.r1.resize(m, m);
        s.r2.resize(m, m);
        s.weff = effective_bandwidth(pulse);
        const bool closed = pulse.kind == PulseSpec::Kind::ideal_sinc;
        const double b = pulse.support();
        for (Eigen::Index u = 0; u < m; ++u)
            for (Eigen::Index v = 0; v < m; ++v)
            {
                const double dtau = taus[static_cast<std::size_t>(v)] -
                                    taus[static_cast<std::size_t>(u)];
                if (closed)
                {
                    const double x = b * dtau;
                    s.r0(u, v) = detail::flat_r0(x);
                    s.r1(u, v) = detail::flat_r1(x, b);
                    s.r2(u, v) = detail::flat_r2(x, b);
                }
                else
                {
                    s.r0(u, v) = detail::quad_r(pulse, 0, dtau);
                    s.r1(u, v) = detail::quad_r(pulse, 1, dtau);
                    s.r2(u, v) = detail::quad_r(pulse, 2, dtau);
                }
            }
        return s;
    }

    // Multi-beam directional precoder, trace(F^H F) = 1.
    struct Beamformer
    {
        MatrixXcd f;                      // N_T x N_B
        std::vector<AnglePair> directions; // beam centers in the array frame
    };

    inline Beamformer beamformer(const ArrayGeometry &geom,
                                 const std::vector<AnglePair> &directions, double lambda)
    {
        if (directions.empty())
            throw std::invalid_argument("beamformer: need at least one beam");
        Beamformer b;
        b.directions = directions;
        b.f.resize(geom.size(), static_cast<Eigen::Index>(directions.size()));
        const double scale = 1.0 / std::sqrt(static_cast<double>(directions.size()));
        for (std::size_t l = 0; l < directions.size(); ++l)
            b.f.col(static_cast<Eigen::Index>(l)) = scale * steering_vector(geom, directions[l], lambda);
        return b;
    }

    // Ground footprint served by a sector: 120 deg span around the array
    // broadside (+y), plane z = -height.
    struct SectorSpec
    {
        double radius = 50.0;        // m
        double height = 10.0;        // BS height above the UE plane, m
        double span = deg2rad(120.0);
        double az_center = kPi / 2;  // sector faces the xz-array broadside
        double r_min = 1.0;          // innermost beam ring / grid radius, m
    };

    enum class BeamLayout
    {
        uniform_polar, // near-square grid, uniform azimuth x uniform radius
        equal_spacing  // rings with per-ring counts proportional to arc length
    };

    namespace detail
    {
        inline std::vector<std::pair<double, double>>
        polar_ground_points(const SectorSpec &sec, int n_b, BeamLayout layout)
        {
            std::vector<std::pair<double, double>> pts; // (r, az)
            const int n_r = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_b))));
            std::vector<double> radii(static_cast<std::size_t>(n_r));
            for (int j = 0; j < n_r; ++j)
                radii[static_cast<std::size_t>(j)] =
                    sec.r_min + (j + 0.5) * (sec.radius - sec.r_min) / n_r;

            if (layout == BeamLayout::uniform_polar)
            {
                // row-major fill over the near-square grid
                const int n_az = n_r;
                for (int j = 0; j < n_r && static_cast<int>(pts.size()) < n_b; ++j)
                    for (int i = 0; i < n_az && static_cast<int>(pts.size()) < n_b; ++i)
                        pts.emplace_back(radii[static_cast<std::size_t>(j)],
                                         sec.az_center - 0.5 * sec.span + (i + 0.5) * sec.span / n_az);
                return pts;
            }

            // counts proportional to ring arc length, totalling n_b
            std::vector<double> raw(static_cast<std::size_t>(n_r));
            double arcsum = 0.0;
            for (auto r : radii)
                arcsum += r;
            std::vector<int> counts(static_cast<std::size_t>(n_r));
            int total = 0;
            for (int j = 0; j < n_r; ++j)
            {
                raw[static_cast<std::size_t>(j)] = n_b * radii[static_cast<std::size_t>(j)] / arcsum;
                counts[static_cast<std::size_t>(j)] =
                    std::max(1, static_cast<int>(std::floor(raw[static_cast<std::size_t>(j)])));
                total += counts[static_cast<std::size_t>(j)];
            }
            while (total < n_b)
            {
                int best = 0;
                double gap = -1e300;
                for (int j = 0; j < n_r; ++j)
                    if (raw[static_cast<std::size_t>(j)] - counts[static_cast<std::size_t>(j)] > gap)
                    {
                        gap = raw[static_cast<std::size_t>(j)] - counts[static_cast<std::size_t>(j)];
                        best = j;
                    }
                ++counts[static_cast<std::size_t>(best)];
                ++total;
            }
            while (total > n_b)
            {
                int best = 0;
                double gap = 1e300;
                for (int j = 0; j < n_r; ++j)
                    if (counts[static_cast<std::size_t>(j)] > 1 &&
                        raw[static_cast<std::size_t>(j)] - counts[static_cast<std::size_t>(j)] < gap)
                    {
                        gap = raw[static_cast<std::size_t>(j)] - counts[static_cast<std::size_t>(j)];
                        best = j;
                    }
                --counts[static_cast<std::size_t>(best)];
                --total;
            }
            for (int j = 0; j < n_r; ++j)
                for (int i = 0; i < counts[static_cast<std::size_t>(j)]; ++i)
                    pts.emplace_back(radii[static_cast<std::size_t>(j)],
                                     sec.az_center - 0.5 * sec.span +
                                         (i + 0.5) * sec.span / counts[static_cast<std::size_t>(j)]);
            return pts;
        }
    }

    // Beam centers on the ground footprint, as directions from the BS at the origin.
    inline std::vector<AnglePair> downlink_beam_grid(const SectorSpec &sec, int n_b,
                                                     BeamLayout layout = BeamLayout::uniform_polar)
    {
        if (n_b < 1)
            throw std::invalid_argument("downlink_beam_grid: n_b must be >= 1");
        std::vector<AnglePair> dirs;
        for (auto [r, az] : detail::polar_ground_points(sec, n_b, layout))
            dirs.push_back(angles_of(Vec3(r * std::cos(az), r * std::sin(az), -sec.height)));
        return dirs;
    }

    // Beam centers for the UE: the point-mirrored ground grid on the virtual
    // plane through the BS (z = +height in the zero-orientation UE frame),
    // expressed in the global frame, i.e. rotated with the UE orientation.
    // The set seen in the UE's own frame does not depend on o.
    inline std::vector<AnglePair> uplink_beam_grid(const Orientation &o, int n_b,
                                                   const SectorSpec &sec,
                                                   BeamLayout layout = BeamLayout::uniform_polar)
    {
        if (n_b < 1)
            throw std::invalid_argument("uplink_beam_grid: n_b must be >= 1");
        const Eigen::Matrix3d r = rotation_matrix(o);
        std::vector<AnglePair> dirs;
        for (auto [rad, az] : detail::polar_ground_points(sec, n_b, layout))
        {
            const Vec3 v(-rad * std::cos(az), -rad * std::sin(az), sec.height);
            dirs.push_back(angles_of(r * v.normalized()));
        }
        return dirs;
    }

    // Same grid expressed in the UE array frame (what the UE precoder uses).
    inline std::vector<AnglePair> uplink_beam_grid_local(int n_b, const SectorSpec &sec,
                                                         BeamLayout layout = BeamLayout::uniform_polar)
    {
        return uplink_beam_grid(Orientation{}, n_b, sec, layout);
    }
}

#endif
