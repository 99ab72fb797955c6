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
//
// Test-only oracles, independent of the implementation paths they check:
//  - the channel FIM by central finite differences of the frequency response
//    plus Gauss-Legendre quadrature of the defining integral,
//  - the location Jacobian by central finite differences of the forward
//    angle/delay maps.

#ifndef MMPEB_TESTS_ORACLES_HPP
#define MMPEB_TESTS_ORACLES_HPP

#include "mmpeb/mmpeb.hpp"

#include <vector>

namespace oracles
{
    using namespace mmpeb;

    // Scenario parameters as a flat, perturbable structure.
    struct FlatParams
    {
        std::vector<double> theta_r, theta_t, phi_r, phi_t, tau, beta_re, beta_im;

        static FlatParams from(const Scenario &s)
        {
            FlatParams f;
            const bool ul = s.direction == LinkDirection::uplink;
            for (const auto &p : s.paths)
            {
                const AnglePair rx = ul ? p.geometry.bs : p.geometry.ue;
                const AnglePair tx = ul ? p.geometry.ue : p.geometry.bs;
                f.theta_r.push_back(rx.theta);
                f.phi_r.push_back(rx.phi);
                f.theta_t.push_back(tx.theta);
                f.phi_t.push_back(tx.phi);
                f.tau.push_back(p.geometry.toa);
                f.beta_re.push_back(p.beta.real());
                f.beta_im.push_back(p.beta.imag());
            }
            return f;
        }

        double *field(ParamBlock b)
        {
            switch (b)
            {
            case ParamBlock::theta_rx: return theta_r.data();
            case ParamBlock::theta_tx: return theta_t.data();
            case ParamBlock::phi_rx: return phi_r.data();
            case ParamBlock::phi_tx: return phi_t.data();
            case ParamBlock::tau: return tau.data();
            case ParamBlock::beta_re: return beta_re.data();
            default: return beta_im.data();
            }
        }
    };

    // One finite-difference branch of d/d(param): the frequency response is
    // sum_m X_m exp(-j 2 pi f tau_m) with X_m = beta_m a_R a_T^H F, so the
    // derivative is fully described by the perturbed (X_m, tau_m) pairs.
    struct Branch
    {
        MatrixXcd x;      // N_R x N_B
        double tau = 0.0;
        double sign = 1.0;
    };

    inline std::vector<MatrixXcd> response_terms(const Scenario &s, const FlatParams &f)
    {
        const auto &rx_geom = s.direction == LinkDirection::uplink ? s.bs : s.ue;
        const auto &tx_geom = s.direction == LinkDirection::uplink ? s.ue : s.bs;
        std::vector<MatrixXcd> terms;
        for (std::size_t m = 0; m < s.paths.size(); ++m)
        {
            const VectorXcd ar =
                steering_vector(rx_geom, {f.theta_r[m], f.phi_r[m]}, s.budget.lambda);
            const VectorXcd at =
                steering_vector(tx_geom, {f.theta_t[m], f.phi_t[m]}, s.budget.lambda);
            const cplx beta(f.beta_re[m], f.beta_im[m]);
            terms.push_back(beta * (ar * (at.adjoint() * s.precoder.f)));
        }
        return terms;
    }

    // Channel-parameter FIM by quadrature of the defining integral with
    // finite-difference derivatives. Matches exact_channel_fim's scaling
    // (noise_factor * gamma inside the matrix).
    inline MatrixXd fd_channel_fim(const Scenario &s, std::size_t n_freq = 2000)
    {
        const std::size_t m = s.paths.size();
        const std::size_t n_par = 7 * m;
        const FlatParams base = FlatParams::from(s);

        const double h_angle = 1e-6;
        const double h_tau = 1e-13;
        const double h_beta = 1e-6 * std::max(1e-9, std::abs(s.paths[0].beta));

        // two branches (+, -) per parameter
        std::vector<std::array<Branch, 2>> branches(n_par);
        for (int b = 0; b < 7; ++b)
            for (std::size_t pm = 0; pm < m; ++pm)
            {
                const auto block = static_cast<ParamBlock>(b);
                double h = h_angle;
                if (block == ParamBlock::tau)
                    h = h_tau;
                else if (block == ParamBlock::beta_re || block == ParamBlock::beta_im)
                    h = h_beta;
                // Unperturbed paths cancel in the central difference, so each
                // branch reduces to the perturbed path's own (matrix, delay).
                for (int sign = 0; sign < 2; ++sign)
                {
                    FlatParams f = base;
                    f.field(block)[pm] += (sign == 0 ? h : -h);
                    const auto terms = response_terms(s, f);
                    Branch br;
                    br.x = terms[pm];
                    br.tau = f.tau[pm];
                    br.sign = (sign == 0 ? 1.0 : -1.0) / (2.0 * h);
                    branches[static_cast<std::size_t>(b) * m + pm][static_cast<std::size_t>(sign)] = br;
                }
            }

        // Gauss-Legendre nodes over the PSD support
        std::vector<double> gx, gw;
        detail::gauss_legendre(n_freq, gx, gw);
        const double half = 0.5 * s.pulse.support();

        // scalar integrals I(dt) = integral |P(f)|^2 exp(-j 2 pi f dt) df,
        // evaluated pairwise between branches
        auto pair_integral = [&](double dt) {
            cplx acc(0, 0);
            for (std::size_t k = 0; k < n_freq; ++k)
            {
                const double f = gx[k] * half;
                const double w = gw[k] * half * s.pulse.psd_at(f);
                acc += w * std::polar(1.0, -2.0 * kPi * f * dt);
            }
            return acc;
        };

        // response_terms lack the sqrt(N_R N_T E_s N_s) prefactor; the product
        // of two derivatives and 1/N0 folds into noise_factor * gamma.
        const double scale = s.budget.noise_factor * s.gamma();
        MatrixXd j(static_cast<Eigen::Index>(n_par), static_cast<Eigen::Index>(n_par));
        for (std::size_t u = 0; u < n_par; ++u)
            for (std::size_t v = u; v < n_par; ++v)
            {
                cplx acc(0, 0);
                for (const auto &bu : branches[u])
                    for (const auto &bv : branches[v])
                    {
                        const cplx gram = (bu.x.adjoint() * bv.x).trace();
                        acc += bu.sign * bv.sign * gram * pair_integral(bv.tau - bu.tau);
                    }
                const double val = scale * acc.real();
                j(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = val;
                j(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = val;
            }
        return j;
    }

    // Forward maps stacked as [theta(2M), phi(2M), tau(M)] in link order.
    inline VectorXd forward_channel_params(const Vec3 &p, const Orientation &o,
                                           const std::vector<Vec3> &clusters,
                                           LinkDirection dir)
    {
        const std::size_t m = 1 + clusters.size();
        std::vector<PathGeometry> geo;
        geo.push_back(los_path_geometry(p, o));
        for (const auto &q : clusters)
            geo.push_back(nlos_path_geometry(p, o, q));
        VectorXd out(static_cast<Eigen::Index>(5 * m));
        const bool ul = dir == LinkDirection::uplink;
        for (std::size_t i = 0; i < m; ++i)
        {
            const AnglePair rx = ul ? geo[i].bs : geo[i].ue;
            const AnglePair tx = ul ? geo[i].ue : geo[i].bs;
            out(static_cast<Eigen::Index>(i)) = rx.theta;
            out(static_cast<Eigen::Index>(m + i)) = tx.theta;
            out(static_cast<Eigen::Index>(2 * m + i)) = rx.phi;
            out(static_cast<Eigen::Index>(3 * m + i)) = tx.phi;
            out(static_cast<Eigen::Index>(4 * m + i)) = geo[i].toa;
        }
        return out;
    }

    // Central finite differences of the forward maps; same layout as
    // transformation_matrix (rows = location parameters).
    inline MatrixXd fd_upsilon(const Vec3 &p, const Orientation &o,
                               const std::vector<Vec3> &clusters, LinkDirection dir,
                               double h = 1e-6)
    {
        const std::size_t m = 1 + clusters.size();
        const auto rows = static_cast<Eigen::Index>(5 + 3 * clusters.size());
        MatrixXd u(rows, static_cast<Eigen::Index>(5 * m));
        VectorXd x(rows);
        x(0) = o.theta0;
        x(1) = o.phi0;
        x.segment(2, 3) = p;
        for (std::size_t i = 0; i < clusters.size(); ++i)
            x.segment(5 + 3 * static_cast<Eigen::Index>(i), 3) = clusters[i];

        auto eval = [&](const VectorXd &y) {
            const Orientation oo{y(0), y(1)};
            const Vec3 pp = y.segment(2, 3);
            std::vector<Vec3> qq;
            for (std::size_t i = 0; i < clusters.size(); ++i)
                qq.push_back(y.segment(5 + 3 * static_cast<Eigen::Index>(i), 3));
            return forward_channel_params(pp, oo, qq, dir);
        };

        for (Eigen::Index r = 0; r < rows; ++r)
        {
            VectorXd xp = x, xm = x;
            xp(r) += h;
            xm(r) -= h;
            u.row(r) = ((eval(xp) - eval(xm)) / (2.0 * h)).transpose();
        }
        return u;
    }

    // Uncorrelated unit-like test scenarios with arbitrary (random) geometry.
    inline Scenario random_scenario(detail::Rng &rng, std::size_t n_paths, int n_rx_side,
                                    int n_tx_side, LinkDirection dir = LinkDirection::uplink,
                                    bool random_cloud = false)
    {
        Scenario s;
        const double lambda = kSpeedOfLight / 38e9;
        auto make_array = [&](int side) {
            if (!random_cloud)
                return make_ura(side, side, lambda / 2);
            ArrayGeometry g;
            const int n = side * side;
            g.elements.resize(3, n);
            for (int i = 0; i < n; ++i)
                for (int r = 0; r < 3; ++r)
                    g.elements(r, i) = rng.uniform(-1.5, 1.5) * lambda;
            g.elements.colwise() -= Vec3(g.elements.rowwise().mean());
            return g;
        };
        const ArrayGeometry rx = make_array(n_rx_side);
        const ArrayGeometry tx = make_array(n_tx_side);
        s.direction = dir;
        s.bs = dir == LinkDirection::uplink ? rx : tx;
        s.ue = dir == LinkDirection::uplink ? tx : rx;
        s.pulse = PulseSpec::ideal_sinc(125e6);
        s.budget.es = 1e-3 / 125e6;
        s.budget.n0 = 1e-20;
        s.budget.n_s = 16;
        s.budget.lambda = lambda;
        s.budget.noise_factor = 2.0;
        for (std::size_t m = 0; m < n_paths; ++m)
        {
            Path path;
            path.kind = m == 0 ? PathKind::los : PathKind::scatterer;
            PathGeometry g;
            g.bs = {rng.uniform(0.35, kPi - 0.35), rng.uniform(-kPi, kPi)};
            g.ue = {rng.uniform(0.35, kPi - 0.35), rng.uniform(-kPi, kPi)};
            g.toa = rng.uniform(3e-8, 1.5e-7);
            g.d1 = g.toa * kSpeedOfLight;
            path.geometry = g;
            path.beta = std::polar(rng.uniform(0.5e-4, 2e-4), rng.uniform(-kPi, kPi));
            if (m > 0)
                path.cluster = Vec3(rng.uniform(-30, 30), rng.uniform(5, 40), rng.uniform(-9, -1));
            s.paths.push_back(path);
        }
        // precoder on the TX side, beams scattered around the first path's DOD
        std::vector<AnglePair> dirs;
        const AnglePair dod = dir == LinkDirection::uplink ? s.paths[0].geometry.ue
                                                           : s.paths[0].geometry.bs;
        const int n_b = 5;
        for (int l = 0; l < n_b; ++l)
            dirs.push_back({dod.theta + rng.uniform(-0.4, 0.4), dod.phi + rng.uniform(-0.4, 0.4)});
        const ArrayGeometry &tx_geom = dir == LinkDirection::uplink ? s.ue : s.bs;
        s.precoder = beamformer(tx_geom, dirs, lambda);
        return s;
    }
}

#endif
