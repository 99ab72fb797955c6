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

#ifndef MMPEB_TYPES_HPP
#define MMPEB_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mmpeb
{
    using Vec3 = Eigen::Vector3d;
    using cplx = std::complex<double>;
    using Eigen::MatrixXcd;
    using Eigen::MatrixXd;
    using Eigen::VectorXcd;
    using Eigen::VectorXd;

    constexpr double kSpeedOfLight = 299792458.0; // m/s
    constexpr double kPi = 3.14159265358979323846;

    inline double deg2rad(double d) { return d * kPi / 180.0; }
    inline double rad2deg(double r) { return r * 180.0 / kPi; }

    // Wrap an angle to (-pi, pi].
    inline double wrap_angle(double a)
    {
        a = std::fmod(a + kPi, 2.0 * kPi);
        if (a <= 0.0)
            a += 2.0 * kPi;
        return a - kPi;
    }

    // Elevation measured from +z (0 = zenith, pi = nadir), azimuth in (-pi, pi].
    struct AnglePair
    {
        double theta = 0.0;
        double phi = 0.0;
    };

    // UE orientation: phi0 rotates around z, theta0 around the negative x'-axis.
    struct Orientation
    {
        double theta0 = 0.0;
        double phi0 = 0.0;
    };

    enum class LinkDirection
    {
        uplink,  // UE transmits, BS receives
        downlink // BS transmits, UE receives
    };

    inline const char *to_string(LinkDirection d)
    {
        return d == LinkDirection::uplink ? "ul" : "dl";
    }
}

#endif
