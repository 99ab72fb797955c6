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
// Fisher information of the multipath channel parameters
// [theta_R, theta_T, phi_R, phi_T, tau, beta_re, beta_im] (path-major inside
// each block). Every submatrix has the shape
//     Re{ (RX factor) o (TX factor)^T o (signal factor) }
// with o the Hadamard product; the RX factor couples the receive array
// derivative stacks, the TX factor couples the precoder, and the signal
// factor is one of the delay-correlation matrices R0/R1/R2.

#ifndef MMPEB_FIM_HPP
#define MMPEB_FIM_HPP

#include "channel.hpp"
#include "geometry.hpp"
#include "signal.hpp"
#include "types.hpp"

#include <array>
#include <optional>
#include <vector>

namespace mmpeb
{
    enum class ParamBlock : int
    {
        theta_rx = 0,
        theta_tx = 1,
        phi_rx = 2,
        phi_tx = 3,
        tau = 4,
        beta_re = 5,
        beta_im = 6
    };

    struct ParamIndex
    {
        ParamBlock block;
        std::size_t path; // 0-based
    };

    inline const char *to_string(ParamBlock b)
    {
        switch (b)
        {
        case ParamBlock::theta_rx: return "theta_R";
        case ParamBlock::theta_tx: return "theta_T";
        case ParamBlock::phi_rx: return "phi_R";
        case ParamBlock::phi_tx: return "phi_T";
        case ParamBlock::tau: return "tau";
        case ParamBlock::beta_re: return "beta_re";
        default: return "beta_im";
        }
    }

    class SingularMatrixError : public std::runtime_error
    {
    public:
        explicit SingularMatrixError(double cond)
            : std::runtime_error("singular matrix, condition number " + std::to_string(cond)),
              condition(cond)
        {
        }
        double condition;
    };

    // Steering stacks and their angle derivatives for one side of the link.
    // a:   steering vectors, one column per path
    // k,p: columns Ktilde_m a_m and Ptilde_m a_m with Ktilde/Ptilde the
    //      diagonal matrices diag(Delta^T dk/dtheta), diag(Delta^T dk/dphi)
    struct DerivativeStacks
    {
        MatrixXcd a, k, p;
        MatrixXd ktilde, ptilde; // diagonal entries, one column per path
    };

    inline DerivativeStacks derivative_stacks(const ArrayGeometry &geom,
                                              const std::vector<AnglePair> &angles, double lambda)
    {
        DerivativeStacks d;
        const auto n = geom.size();
        const auto m = static_cast<Eigen::Index>(angles.size());
        d.a.resize(n, m);
        d.k.resize(n, m);
        d.p.resize(n, m);
        d.ktilde.resize(n, m);
        d.ptilde.resize(n, m);
        for (Eigen::Index j = 0; j < m; ++j)
        {
            const auto &ang = angles[static_cast<std::size_t>(j)];
            d.a.col(j) = steering_vector(geom, ang, lambda);
            d.ktilde.col(j) = geom.elements.transpose() * wavenumber_dtheta(ang, lambda);
            d.ptilde.col(j) = geom.elements.transpose() * wavenumber_dphi(ang, lambda);
            d.k.col(j) = d.ktilde.col(j).cwiseProduct(d.a.col(j).real()).cast<cplx>() +
                         cplx(0, 1) * d.ktilde.col(j).cwiseProduct(d.a.col(j).imag()).cast<cplx>();
            d.p.col(j) = d.ptilde.col(j).cwiseProduct(d.a.col(j).real()).cast<cplx>() +
                         cplx(0, 1) * d.ptilde.col(j).cwiseProduct(d.a.col(j).imag()).cast<cplx>();
        }
        return d;
    }

    struct DerivativeMatrices
    {
        DerivativeStacks rx, tx;
        VectorXcd betas;
    };

    inline std::vector<AnglePair> rx_angles(const Scenario &s)
    {
        std::vector<AnglePair> out;
        for (const auto &path : s.paths)
            out.push_back(s.direction == LinkDirection::uplink ? path.geometry.bs
                                                               : path.geometry.ue);
        return out;
    }

    inline std::vector<AnglePair> tx_angles(const Scenario &s)
    {
        std::vector<AnglePair> out;
        for (const auto &path : s.paths)
            out.push_back(s.direction == LinkDirection::uplink ? path.geometry.ue
                                                               : path.geometry.bs);
        return out;
    }

    inline DerivativeMatrices derivative_matrices(const Scenario &s)
    {
        DerivativeMatrices d;
        const auto &rx_geom = s.direction == LinkDirection::uplink ? s.bs : s.ue;
        const auto &tx_geom = s.direction == LinkDirection::uplink ? s.ue : s.bs;
        d.rx = derivative_stacks(rx_geom, rx_angles(s), s.budget.lambda);
        d.tx = derivative_stacks(tx_geom, tx_angles(s), s.budget.lambda);
        d.betas.resize(static_cast<Eigen::Index>(s.paths.size()));
        for (std::size_t m = 0; m < s.paths.size(); ++m)
            d.betas(static_cast<Eigen::Index>(m)) = s.paths[m].beta;
        return d;
    }

    struct ChannelFim
    {
        MatrixXd matrix; // 7M x 7M
        std::vector<ParamIndex> labels;
        std::size_t n_paths = 0;
        double gamma_eff = 0.0; // noise_factor * gamma, the scale inside `matrix`

        Eigen::Index index(ParamBlock b, std::size_t path) const
        {
            return static_cast<Eigen::Index>(static_cast<int>(b) * n_paths + path);
        }
    };

    namespace detail
    {
        struct BlockTraits
        {
            cplx unit;     // derivative phase factor, path gain excluded
            bool has_beta; // derivative carries beta_m
            int rx;        // 0=A 1=K 2=P
            int tx;
            bool is_tau;
        };

        inline const std::array<BlockTraits, 7> &block_traits()
        {
            static const std::array<BlockTraits, 7> t = {{
                {cplx(0, -1), true, 1, 0, false}, // theta_R
                {cplx(0, 1), true, 0, 1, false},  // theta_T
                {cplx(0, -1), true, 2, 0, false}, // phi_R
                {cplx(0, 1), true, 0, 2, false},  // phi_T
                {cplx(1, 0), true, 0, 0, true},   // tau
                {cplx(1, 0), false, 0, 0, false}, // beta_re
                {cplx(0, 1), false, 0, 0, false}, // beta_im
            }};
            return t;
        }
    }

    // Assemble the full 7M x 7M FIM. The signal factor uses the frequency-domain
    // R_i definition; the tau derivative contributes -j2pi f, so mixed blocks
    // carry an extra -+j on R1.
    inline ChannelFim exact_channel_fim(const Scenario &s)
    {
        const auto m = static_cast<Eigen::Index>(s.paths.size());
        const DerivativeMatrices d = derivative_matrices(s);

        std::vector<double> taus;
        for (const auto &path : s.paths)
            taus.push_back(path.geometry.toa);
        const SignalCorrelations rs = correlation_matrices(s.pulse, taus);

        ChannelFim out;
        out.n_paths = s.paths.size();
        out.gamma_eff = s.budget.noise_factor * s.gamma();
        out.matrix.setZero(7 * m, 7 * m);
        out.labels.reserve(static_cast<std::size_t>(7 * m));
        for (int b = 0; b < 7; ++b)
            for (Eigen::Index j = 0; j < m; ++j)
                out.labels.push_back({static_cast<ParamBlock>(b), static_cast<std::size_t>(j)});

        const std::array<const MatrixXcd *, 3> rx_stack = {&d.rx.a, &d.rx.k, &d.rx.p};
        const std::array<const MatrixXcd *, 3> tx_stack = {&d.tx.a, &d.tx.k, &d.tx.p};

        // rx grams [i][j] = (stack_i)^H stack_j ; tx projections through F
        std::array<std::array<MatrixXcd, 3>, 3> rx_gram;
        std::array<MatrixXcd, 3> ftx; // N_B x M
        for (int i = 0; i < 3; ++i)
            ftx[static_cast<std::size_t>(i)] = s.precoder.f.adjoint() * (*tx_stack[static_cast<std::size_t>(i)]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                rx_gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    rx_stack[static_cast<std::size_t>(i)]->adjoint() * (*rx_stack[static_cast<std::size_t>(j)]);

        const auto &traits = detail::block_traits();
        for (int bu = 0; bu < 7; ++bu)
            for (int bv = bu; bv < 7; ++bv)
            {
                const auto &tu = traits[static_cast<std::size_t>(bu)];
                const auto &tv = traits[static_cast<std::size_t>(bv)];
                const MatrixXcd &rho = rx_gram[static_cast<std::size_t>(tu.rx)][static_cast<std::size_t>(tv.rx)];
                // t_uv = (E_v a_v)^H F F^H (E_u a_u)
                const MatrixXcd tmat = ftx[static_cast<std::size_t>(tv.tx)].adjoint() *
                                       ftx[static_cast<std::size_t>(tu.tx)]; // (v,u) indexed
                const cplx pre = std::conj(tu.unit) * tv.unit;
                for (Eigen::Index u = 0; u < m; ++u)
                    for (Eigen::Index v = 0; v < m; ++v)
                    {
                        cplx sig;
                        if (tu.is_tau && tv.is_tau)
                            sig = rs.r2(u, v);
                        else if (tv.is_tau)
                            sig = cplx(0, -1) * rs.r1(u, v);
                        else if (tu.is_tau)
                            sig = cplx(0, 1) * rs.r1(u, v);
                        else
                            sig = rs.r0(u, v);
                        cplx val = pre * rho(u, v) * tmat(v, u) * sig;
                        if (tu.has_beta)
                            val *= std::conj(d.betas(u));
                        if (tv.has_beta)
                            val *= d.betas(v);
                        const double entry = out.gamma_eff * val.real();
                        out.matrix(bu * m + u, bv * m + v) = entry;
                        if (bu != bv)
                            out.matrix(bv * m + v, bu * m + u) = entry;
                    }
            }
        return out;
    }

    // Schur complement onto `keep`:  J_kk - J_kd J_dd^{-1} J_kd^T.
    // Throws SingularMatrixError when the discarded block is ill conditioned.
    inline MatrixXd efim(const MatrixXd &fim, const std::vector<Eigen::Index> &keep,
                         double cond_threshold = 1e12)
    {
        std::vector<bool> is_kept(static_cast<std::size_t>(fim.rows()), false);
        for (auto i : keep)
            is_kept[static_cast<std::size_t>(i)] = true;
        std::vector<Eigen::Index> drop;
        for (Eigen::Index i = 0; i < fim.rows(); ++i)
            if (!is_kept[static_cast<std::size_t>(i)])
                drop.push_back(i);
        const auto nk = static_cast<Eigen::Index>(keep.size());
        const auto nd = static_cast<Eigen::Index>(drop.size());
        if (nd == 0)
            return fim;
        MatrixXd a(nk, nk), b(nk, nd), c(nd, nd);
        for (Eigen::Index i = 0; i < nk; ++i)
        {
            for (Eigen::Index j = 0; j < nk; ++j)
                a(i, j) = fim(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
            for (Eigen::Index j = 0; j < nd; ++j)
                b(i, j) = fim(keep[static_cast<std::size_t>(i)], drop[static_cast<std::size_t>(j)]);
        }
        for (Eigen::Index i = 0; i < nd; ++i)
            for (Eigen::Index j = 0; j < nd; ++j)
                c(i, j) = fim(drop[static_cast<std::size_t>(i)], drop[static_cast<std::size_t>(j)]);
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(c);
        const double lmax = eig.eigenvalues().cwiseAbs().maxCoeff();
        const double lmin = eig.eigenvalues().cwiseAbs().minCoeff();
        if (lmin <= 0.0 || lmax / lmin > cond_threshold)
            throw SingularMatrixError(lmin > 0.0 ? lmax / lmin
                                                 : std::numeric_limits<double>::infinity());
        const MatrixXd cinv = eig.eigenvectors() *
                              eig.eigenvalues().cwiseInverse().asDiagonal() *
                              eig.eigenvectors().transpose();
        return a - b * cinv * b.transpose();
    }

    // Keep set for the parameters of interest (theta, phi, tau), dropping beta.
    inline std::vector<Eigen::Index> channel_keep_indices(std::size_t n_paths)
    {
        std::vector<Eigen::Index> keep;
        for (std::size_t i = 0; i < 5 * n_paths; ++i)
            keep.push_back(static_cast<Eigen::Index>(i));
        return keep;
    }

    // Scalars of the single-path EFIM (arbitrary arrays):
    //   G    = a_T^H F F^H a_T             R_th = a_R^H Kt^2 a_R
    //   T_th = a_T^H Kt F F^H Kt a_T       R_ph = a_R^H Pt^2 a_R
    //   V_th = a_T^H Kt F F^H a_T          X    = a_R^H Kt Pt a_R
    //   L_th = G T_th - |V_th|^2           Y    = G Y' - Re{V_ph conj(V_th)}
    //   Y'   = Re{a_T^H Pt F F^H Kt a_T}   zeta1 = R_th R_ph - X^2
    //                                      zeta2 = L_th L_ph - Y^2
    struct SinglePathScalars
    {
        double g = 0, r_theta = 0, r_phi = 0, x_thph = 0;
        double t_theta = 0, t_phi = 0, yprime = 0;
        cplx v_theta{0, 0}, v_phi{0, 0};
        double l_theta = 0, l_phi = 0, y_thph = 0;
        double zeta1 = 0, zeta2 = 0;
    };

    inline SinglePathScalars single_path_scalars(const Scenario &s, std::size_t path)
    {
        if (path >= s.paths.size())
            throw std::invalid_argument("single_path_scalars: path index out of range");
        const auto &geom_rx = s.direction == LinkDirection::uplink ? s.bs : s.ue;
        const auto &geom_tx = s.direction == LinkDirection::uplink ? s.ue : s.bs;
        const auto &g = s.paths[path].geometry;
        const AnglePair ar = s.direction == LinkDirection::uplink ? g.bs : g.ue;
        const AnglePair at = s.direction == LinkDirection::uplink ? g.ue : g.bs;
        const double lambda = s.budget.lambda;

        const VectorXcd a_r = steering_vector(geom_rx, ar, lambda);
        const VectorXcd a_t = steering_vector(geom_tx, at, lambda);
        const VectorXd kt_r = geom_rx.elements.transpose() * wavenumber_dtheta(ar, lambda);
        const VectorXd pt_r = geom_rx.elements.transpose() * wavenumber_dphi(ar, lambda);
        const VectorXd kt_t = geom_tx.elements.transpose() * wavenumber_dtheta(at, lambda);
        const VectorXd pt_t = geom_tx.elements.transpose() * wavenumber_dphi(at, lambda);

        const VectorXcd fa = s.precoder.f.adjoint() * a_t;
        const VectorXcd fka = s.precoder.f.adjoint() * (kt_t.asDiagonal() * a_t);
        const VectorXcd fpa = s.precoder.f.adjoint() * (pt_t.asDiagonal() * a_t);

        SinglePathScalars out;
        out.g = fa.squaredNorm();
        out.r_theta = (a_r.conjugate().cwiseProduct(kt_r.cwiseAbs2().asDiagonal() * a_r)).sum().real();
        out.r_phi = (a_r.conjugate().cwiseProduct(pt_r.cwiseAbs2().asDiagonal() * a_r)).sum().real();
        out.x_thph = (a_r.conjugate().cwiseProduct(
                          kt_r.cwiseProduct(pt_r).asDiagonal() * a_r)).sum().real();
        out.t_theta = fka.squaredNorm();
        out.t_phi = fpa.squaredNorm();
        out.v_theta = (fka.adjoint() * fa)(0, 0);
        out.v_phi = (fpa.adjoint() * fa)(0, 0);
        out.yprime = ((fka.adjoint() * fpa)(0, 0)).real();
        out.l_theta = out.g * out.t_theta - std::norm(out.v_theta);
        out.l_phi = out.g * out.t_phi - std::norm(out.v_phi);
        out.y_thph = out.g * out.yprime - (out.v_phi * std::conj(out.v_theta)).real();
        out.zeta1 = out.r_theta * out.r_phi - out.x_thph * out.x_thph;
        out.zeta2 = out.l_theta * out.l_phi - out.y_thph * out.y_thph;
        return out;
    }

    // Closed-form single-path CRLBs plus the angle covariances, all scaled by
    // gb2 = gamma_eff |beta|^2. weff2 is the squared RMS bandwidth.
    struct SinglePathCrlbs
    {
        double theta_rx = 0, phi_rx = 0, cov_rx = 0;
        double theta_tx = 0, phi_tx = 0, cov_tx = 0;
        double tau = 0;
    };

    inline SinglePathCrlbs single_path_crlbs(const SinglePathScalars &s, double gb2, double weff2)
    {
        if (s.zeta1 <= 0.0 || s.zeta2 <= 0.0)
            throw SingularMatrixError(std::numeric_limits<double>::infinity());
        SinglePathCrlbs c;
        c.theta_rx = s.r_phi / (gb2 * s.zeta1 * s.g);
        c.phi_rx = s.r_theta / (gb2 * s.zeta1 * s.g);
        c.cov_rx = -s.x_thph / (gb2 * s.zeta1 * s.g);
        c.theta_tx = s.g * s.l_phi / (gb2 * s.zeta2);
        c.phi_tx = s.g * s.l_theta / (gb2 * s.zeta2);
        c.cov_tx = -s.g * s.y_thph / (gb2 * s.zeta2);
        c.tau = 1.0 / (4.0 * kPi * kPi * weff2 * gb2 * s.g);
        return c;
    }

    // Planar (theta = pi/2) reduction, coupling terms discarded.
    struct SinglePathCrlbs2d
    {
        double phi_rx = 0, phi_tx = 0;
    };

    inline SinglePathCrlbs2d single_path_crlbs_2d(const SinglePathScalars &s, double gb2)
    {
        SinglePathCrlbs2d c;
        c.phi_rx = 1.0 / (gb2 * s.r_phi * s.g);
        c.phi_tx = s.g / (gb2 * s.l_phi);
        return c;
    }

    // Per-path 7x7 FIMs: the exact FIM entries with cross-path terms dropped.
    inline std::vector<MatrixXd> approx_channel_fim(const Scenario &s)
    {
        const ChannelFim full = exact_channel_fim(s);
        const auto m = static_cast<Eigen::Index>(s.paths.size());
        std::vector<MatrixXd> out;
        for (Eigen::Index path = 0; path < m; ++path)
        {
            MatrixXd j(7, 7);
            for (int bu = 0; bu < 7; ++bu)
                for (int bv = 0; bv < 7; ++bv)
                    j(bu, bv) = full.matrix(bu * m + path, bv * m + path);
            out.push_back(j);
        }
        return out;
    }

    // Frobenius ratio of the hollow part to the diagonal part (Definition of
    // an almost-diagonal matrix).
    struct AdDiagnostic
    {
        double delta = 0.0;
        double diag_norm = 0.0;
        double offdiag_norm = 0.0;
    };

    inline AdDiagnostic ad_ratio(const MatrixXcd &a)
    {
        if (a.rows() != a.cols())
            throw std::invalid_argument("ad_ratio: matrix must be square");
        AdDiagnostic d;
        d.diag_norm = a.diagonal().norm();
        if (d.diag_norm == 0.0)
            throw std::invalid_argument("ad_ratio: zero diagonal");
        MatrixXcd hollow = a;
        hollow.diagonal().setZero();
        d.offdiag_norm = hollow.norm();
        d.delta = d.offdiag_norm / d.diag_norm;
        return d;
    }

    inline AdDiagnostic ad_ratio(const MatrixXd &a)
    {
        return ad_ratio(MatrixXcd(a.cast<cplx>()));
    }

    // Path-separability factors versus array size (amplitude dB):
    //   rx_db       20 log10 |a_u^H a_v|
    //   tx_raw_db   20 log10 |a_u^H F F^H a_v|
    //   tx_norm_db  rx-style normalisation by the larger diagonal gain
    struct FactorScanRow
    {
        int n = 0;
        double rx_db = 0, tx_raw_db = 0, tx_norm_db = 0;
    };

    inline std::vector<FactorScanRow> factor_scan(const AnglePair &base, double separation,
                                                  const std::vector<int> &n_side,
                                                  const SectorSpec &sec, int n_b, double lambda,
                                                  BeamLayout layout = BeamLayout::uniform_polar)
    {
        std::vector<FactorScanRow> rows;
        const AnglePair other{base.theta + separation, base.phi + separation};
        for (int n : n_side)
        {
            const ArrayGeometry g = make_ura(n, n, lambda / 2.0);
            const VectorXcd au = steering_vector(g, base, lambda);
            const VectorXcd av = steering_vector(g, other, lambda);
            const Beamformer f = beamformer(g, downlink_beam_grid(sec, n_b, layout), lambda);
            const VectorXcd fu = f.f.adjoint() * au;
            const VectorXcd fv = f.f.adjoint() * av;
            FactorScanRow row;
            row.n = n * n;
            row.rx_db = 20.0 * std::log10(std::abs((au.adjoint() * av)(0, 0)));
            const double cross = std::abs((fu.adjoint() * fv)(0, 0));
            row.tx_raw_db = 20.0 * std::log10(cross);
            row.tx_norm_db = 20.0 * std::log10(cross / std::max(fu.squaredNorm(), fv.squaredNorm()));
            rows.push_back(row);
        }
        return rows;
    }
}

#endif
