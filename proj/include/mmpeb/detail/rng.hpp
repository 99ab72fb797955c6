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

#ifndef MMPEB_DETAIL_RNG_HPP
#define MMPEB_DETAIL_RNG_HPP

#include <cstdint>
#include <random>

namespace mmpeb::detail
{
    // Uniform doubles from the raw mt19937_64 stream. std::uniform_real_distribution
    // is implementation-defined, which would break cross-platform reproducibility
    // of seeded scenarios.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : gen_(seed) {}

        double uniform() // [0, 1)
        {
            return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        }

        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    private:
        std::mt19937_64 gen_;
    };
}

#endif
