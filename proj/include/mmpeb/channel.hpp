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

#ifndef MMPEB_CHANNEL_HPP
#define MMPEB_CHANNEL_HPP

#include "detail/rng.hpp"
#include "geometry.hpp"
#include "signal.hpp"
#include "types.hpp"

#include <optional>
#include <vector>

namespace mmpeb
{
    enum class PathKind
    {
        los,
        reflector,
        scatterer
    };

    struct Path
    {
        PathKind kind = PathKind::los;
        std::optional<Vec3> cluster; // q_m, absent for LOS
        cplx beta{0.0, 0.0};
        PathGeometry geometry;
    };

    // Power gains:
    //   LOS        |b|^2 = lambda^2 / ((4 pi)^2 D1^2)
    //   reflector  |b|^2 = lambda^2 GammaR / ((4 pi)^2 (d1+d2)^2)
    //   scatterer  |b|^2 = lambda^2 sigma_rcs / ((4 pi)^3 (d1 d2)^2)
    // Phase is 2 pi (path length) / lambda.
    inline cplx path_gain(PathKind kind, double lambda, double d1, double d2,
                          double gamma_r = 0.7, double sigma_rcs = 50.0)
    {
        if (d1 <= 0.0 || (kind != PathKind::los && d2 <= 0.0))
            throw std::invalid_argument("path_gain: distances must be > 0");
        const double fourpi = 4.0 * kPi;
        double p2 = lambda * lambda / (fourpi * fourpi);
        double length = d1;
        switch (kind)
        {
        case PathKind::los:
            p2 /= d1 * d1;
            break;
        case PathKind::reflector:
            length = d1 + d2;
            p2 *= gamma_r / (length * length);
            break;
        case PathKind::scatterer:
            length = d1 + d2;
            p2 *= sigma_rcs / (fourpi * (d1 * d2) * (d1 * d2));
            break;
        }
        return std::polar(std::sqrt(p2), wrap_angle(2.0 * kPi * length / lambda));
    }

    // Finite vertical reflector panel. The plane contains `point`; `normal` is
    // horizontal and unit length; the panel extends half_width along the
    // horizontal in-plane axis and spans [z_min, z_max].
    struct ReflectorPanel
    {
        Vec3 point{0, 0, 0};
        Vec3 normal{1, 0, 0};
        double half_width = 5.0;
        double z_min = -10.0;
        double z_max = 0.0;
    };

    struct SpecularBounce
    {
        Vec3 q;          // reflection point
        double d1 = 0.0; // BS -> q
        double d2 = 0.0; // q -> UE
    };

    // Virtual-transmitter construction: mirror the BS (origin) across the
    // plane and intersect the mirror-to-UE segment with it. Fails when BS and
    // UE are not strictly on the same side or the point misses the panel.
    inline std::optional<SpecularBounce> reflect(const Vec3 &p, const ReflectorPanel &panel)
    {
        const Vec3 n = panel.normal.normalized();
        const double side_bs = (-panel.point).dot(n);
        const double side_ue = (p - panel.point).dot(n);
        if (side_bs * side_ue <= 0.0)
            return std::nullopt;
        const Vec3 mirror_bs = 2.0 * panel.point.dot(n) * n; // reflection of the origin
        const Vec3 seg = p - mirror_bs;
        const double denom = seg.dot(n);
        if (std::abs(denom) < 1e-14)
            return std::nullopt;
        const double t = (panel.point - mirror_bs).dot(n) / denom;
        if (t <= 0.0 || t >= 1.0)
            return std::nullopt;
        SpecularBounce b;
        b.q = mirror_bs + t * seg;
        // reject points outside the finite panel
        const Vec3 tangent = n.cross(Vec3::UnitZ()).normalized();
        if (std::abs((b.q - panel.point).dot(tangent)) > panel.half_width)
            return std::nullopt;
        if (b.q.z() < panel.z_min || b.q.z() > panel.z_max)
            return std::nullopt;
        b.d1 = b.q.norm();
        b.d2 = (p - b.q).norm();
        return b;
    }

    enum class ScenarioKind
    {
        los,
        los_r,
        los_s,
        los_c,
        nlos
    };

    inline const char *to_string(ScenarioKind k)
    {
        switch (k)
        {
        case ScenarioKind::los: return "los";
        case ScenarioKind::los_r: return "los+r";
        case ScenarioKind::los_s: return "los+s";
        case ScenarioKind::los_c: return "los+c";
        default: return "nlos";
        }
    }

    // Reflector panels + scatterer points with the power-selection rule.
    struct EnvironmentConfig
    {
        std::vector<ReflectorPanel> reflectors;
        std::vector<Vec3> scatterers;
        double sigma_rcs = 50.0;      // m^2
        double gamma_r = 0.7;
        double power_threshold = 0.1; // fraction of the LOS power
    };

    // Panels stand at the sector edge facing the BS; scatterers are drawn
    // uniformly from the prism with the sector footprint as base and the BS
    // height as height, area-uniform in the footprint.
    inline EnvironmentConfig sample_environment(const SectorSpec &sec, int n_reflectors,
                                                int n_scatterers, std::uint64_t seed,
                                                double reflector_half_width = 5.0,
                                                double sigma_rcs = 50.0, double gamma_r = 0.7,
                                                double power_threshold = 0.1)
    {
        EnvironmentConfig env;
        env.sigma_rcs = sigma_rcs;
        env.gamma_r = gamma_r;
        env.power_threshold = power_threshold;
        for (int i = 0; i < n_reflectors; ++i)
        {
            const double az = sec.az_center - 0.5 * sec.span + (i + 0.5) * sec.span / n_reflectors;
            ReflectorPanel panel;
            panel.point = Vec3(sec.radius * std::cos(az), sec.radius * std::sin(az), -0.5 * sec.height);
            panel.normal = Vec3(-std::cos(az), -std::sin(az), 0.0);
            panel.half_width = reflector_half_width;
            panel.z_min = -sec.height;
            panel.z_max = 0.0;
            env.reflectors.push_back(panel);
        }
        detail::Rng rng(seed);
        for (int i = 0; i < n_scatterers; ++i)
        {
            const double r = sec.r_min + (sec.radius - sec.r_min) * std::sqrt(rng.uniform());
            const double az = rng.uniform(sec.az_center - 0.5 * sec.span, sec.az_center + 0.5 * sec.span);
            const double z = rng.uniform(-sec.height, 0.0);
            env.scatterers.emplace_back(r * std::cos(az), r * std::sin(az), z);
        }
        return env;
    }

    struct PowerBudget
    {
        double es = 0.0;           // J per symbol
        double n0 = 0.0;           // W/Hz
        int n_s = 16;              // pilot symbols
        double lambda = 0.0;       // m
        double noise_factor = 2.0; // Fisher constant for complex AWGN, 2/N0
    };

    struct Scenario
    {
        ArrayGeometry bs;
        ArrayGeometry ue;
        Vec3 p{0, 0, 0};
        Orientation o;
        std::vector<Path> paths; // LOS first when present
        LinkDirection direction = LinkDirection::downlink;
        Beamformer precoder;     // at the TX side of `direction`
        PulseSpec pulse;
        PowerBudget budget;

        Eigen::Index n_rx() const
        {
            return direction == LinkDirection::uplink ? bs.size() : ue.size();
        }
        Eigen::Index n_tx() const
        {
            return direction == LinkDirection::uplink ? ue.size() : bs.size();
        }
        // gamma = N_R N_T N_s E_s / N0
        double gamma() const
        {
            return static_cast<double>(n_rx()) * static_cast<double>(n_tx()) *
                   budget.n_s * budget.es / budget.n0;
        }
        bool has_los() const
        {
            return !paths.empty() && paths.front().kind == PathKind::los;
        }
    };

    namespace detail
    {
        inline bool duplicate_path(const Path &a, const Path &b)
        {
            const double ang_tol = 1e-9, tau_tol = 1e-12;
            return std::abs(a.geometry.bs.theta - b.geometry.bs.theta) < ang_tol &&
                   std::abs(wrap_angle(a.geometry.bs.phi - b.geometry.bs.phi)) < ang_tol &&
                   std::abs(a.geometry.ue.theta - b.geometry.ue.theta) < ang_tol &&
                   std::abs(wrap_angle(a.geometry.ue.phi - b.geometry.ue.phi)) < ang_tol &&
                   std::abs(a.geometry.toa - b.geometry.toa) < tau_tol;
        }
    }

    // Assemble the path list for one UE pose. NLOS candidates keep their path
    // only when |beta|^2 >= threshold * |beta_LOS|^2; the LOS gain is used as
    // the reference even when the LOS itself is blocked.
    inline std::vector<Path> build_paths(const EnvironmentConfig &env, const Vec3 &p,
                                         const Orientation &o, double lambda,
                                         ScenarioKind kind)
    {
        std::vector<Path> paths;
        const double los_p2 = std::norm(path_gain(PathKind::los, lambda, p.norm(), 0.0));
        if (kind != ScenarioKind::nlos)
        {
            Path los;
            los.kind = PathKind::los;
            los.beta = path_gain(PathKind::los, lambda, p.norm(), 0.0);
            los.geometry = los_path_geometry(p, o);
            paths.push_back(los);
        }
        const bool want_r = kind == ScenarioKind::los_r || kind == ScenarioKind::los_c ||
                            kind == ScenarioKind::nlos;
        const bool want_s = kind == ScenarioKind::los_s || kind == ScenarioKind::los_c ||
                            kind == ScenarioKind::nlos;
        if (want_r)
            for (const auto &panel : env.reflectors)
            {
                const auto bounce = reflect(p, panel);
                if (!bounce)
                    continue;
                Path path;
                path.kind = PathKind::reflector;
                path.cluster = bounce->q;
                path.beta = path_gain(PathKind::reflector, lambda, bounce->d1, bounce->d2,
                                      env.gamma_r, env.sigma_rcs);
                if (std::norm(path.beta) < env.power_threshold * los_p2)
                    continue;
                path.geometry = nlos_path_geometry(p, o, bounce->q);
                paths.push_back(path);
            }
        if (want_s)
            for (const auto &q : env.scatterers)
            {
                const double d1 = q.norm();
                const double d2 = (p - q).norm();
                if (d1 < 1e-9 || d2 < 1e-9)
                    continue;
                Path path;
                path.kind = PathKind::scatterer;
                path.cluster = q;
                path.beta = path_gain(PathKind::scatterer, lambda, d1, d2, env.gamma_r,
                                      env.sigma_rcs);
                if (std::norm(path.beta) < env.power_threshold * los_p2)
                    continue;
                path.geometry = nlos_path_geometry(p, o, q);
                paths.push_back(path);
            }
        // distinct-parameter assumption: drop later duplicates
        std::vector<Path> unique;
        for (const auto &path : paths)
        {
            bool dup = false;
            for (const auto &kept : unique)
                if (detail::duplicate_path(path, kept))
                {
                    dup = true;
                    break;
                }
            if (!dup)
                unique.push_back(path);
        }
        return unique;
    }

    struct ScenarioConfig
    {
        ArrayGeometry bs;
        ArrayGeometry ue;
        SectorSpec sector;
        EnvironmentConfig env;
        PulseSpec pulse;
        PowerBudget budget;
        int n_b = 25;
        BeamLayout layout = BeamLayout::uniform_polar;
        LinkDirection direction = LinkDirection::downlink;
        ScenarioKind kind = ScenarioKind::los;
    };

    // Scenario for one UE pose. The precoder lives at the TX side: the fixed
    // ground grid for downlink, the fixed UE-frame virtual grid for uplink.
    inline Scenario build_scenario(const ScenarioConfig &cfg, const Vec3 &p, const Orientation &o)
    {
        Scenario s;
        s.bs = cfg.bs;
        s.ue = cfg.ue;
        s.p = p;
        s.o = o;
        s.direction = cfg.direction;
        s.pulse = cfg.pulse;
        s.budget = cfg.budget;
        s.paths = build_paths(cfg.env, p, o, cfg.budget.lambda, cfg.kind);
        if (s.paths.empty())
            throw std::runtime_error("build_scenario: no path survives the power threshold");
        if (cfg.direction == LinkDirection::downlink)
            s.precoder = beamformer(cfg.bs, downlink_beam_grid(cfg.sector, cfg.n_b, cfg.layout),
                                    cfg.budget.lambda);
        else
            s.precoder = beamformer(cfg.ue, uplink_beam_grid_local(cfg.n_b, cfg.sector, cfg.layout),
                                    cfg.budget.lambda);
        return s;
    }

    // TX-side array response of path m in the frame the precoder is defined in.
    inline VectorXcd tx_steering(const Scenario &s, std::size_t m)
    {
        const auto &g = s.paths[m].geometry;
        if (s.direction == LinkDirection::uplink)
            return steering_vector(s.ue, g.ue, s.budget.lambda);
        return steering_vector(s.bs, g.bs, s.budget.lambda);
    }

    // 10 log10(gamma |beta_1|^2 G) with G the precoder gain toward the LOS DOD.
    inline double los_snr_db(const Scenario &s)
    {
        if (!s.has_los())
            throw std::invalid_argument("los_snr_db: scenario has no LOS path");
        const VectorXcd at = tx_steering(s, 0);
        const double g = (s.precoder.f.adjoint() * at).squaredNorm();
        return 10.0 * std::log10(s.gamma() * std::norm(s.paths[0].beta) * g);
    }
}

#endif
