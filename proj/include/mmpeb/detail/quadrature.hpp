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

#ifndef MMPEB_DETAIL_QUADRATURE_HPP
#define MMPEB_DETAIL_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace mmpeb::detail
{
    // Gauss-Legendre nodes/weights on [-1, 1] via Newton iteration.
    inline void gauss_legendre(std::size_t n, std::vector<double> &x, std::vector<double> &w)
    {
        x.resize(n);
        w.resize(n);
        const std::size_t m = (n + 1) / 2;
        for (std::size_t i = 0; i < m; ++i)
        {
            double z = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it)
            {
                double p1 = 1.0, p2 = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
                }
                pp = n * (z * p1 - p2) / (z * z - 1.0);
                const double z1 = z;
                z = z1 - p1 / pp;
                if (std::abs(z - z1) < 1e-15)
                    break;
            }
            x[i] = -z;
            x[n - 1 - i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
            w[n - 1 - i] = w[i];
        }
    }

    // Composite trapezoid, refined by doubling until successive estimates agree
    // to rel_tol relative to max(|estimate|, abs_scale) or the panel limit is
    // hit. abs_scale keeps the stop criterion meaningful for oscillatory
    // integrals that nearly cancel.
    template <typename F>
    double adaptive_trapezoid(F &&f, double a, double b, double rel_tol = 1e-10,
                              double abs_scale = 0.0, std::size_t n0 = 64,
                              std::size_t n_max = (1u << 22))
    {
        std::size_t n = n0;
        double h = (b - a) / static_cast<double>(n);
        double s = 0.5 * (f(a) + f(b));
        for (std::size_t i = 1; i < n; ++i)
            s += f(a + h * static_cast<double>(i));
        double prev = s * h;
        while (n < n_max)
        {
            double mid = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                mid += f(a + h * (static_cast<double>(i) + 0.5));
            n *= 2;
            h *= 0.5;
            s += mid;
            const double cur = s * h;
            const double scale = std::max({std::abs(cur), std::abs(prev), abs_scale, 1e-300});
            if (std::abs(cur - prev) < rel_tol * scale)
                return cur;
            prev = cur;
        }
        return prev;
    }
}

#endif
