#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crowdcert/core.hpp"
#include "crowdcert/error.hpp"
#include "crowdcert/estimate.hpp"
#include "crowdcert/exact.hpp"
#include "crowdcert/linalg.hpp"

namespace crowdcert {

enum class Verdict { MV_OPTIMAL, MV_SUBOPTIMAL, CERTIFIED_OPTIMAL_WHP, INCONCLUSIVE };

inline const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::MV_OPTIMAL:            return "MV_OPTIMAL";
    case Verdict::MV_SUBOPTIMAL:         return "MV_SUBOPTIMAL";
    case Verdict::CERTIFIED_OPTIMAL_WHP: return "CERTIFIED_OPTIMAL_WHP";
    case Verdict::INCONCLUSIVE:          return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

// Outcome of an optimality check. f/g/h are the Theorem 3.2 quantities for
// class 0: f = (d0/d1)^(H/2)/sqrt(rho), h = (d0/d1)^(H/2)*sqrt(rho),
// g = nu1/nu0. psi/chi/confidence are present only for estimated-parameter
// certificates.
struct Certificate {
    Verdict verdict = Verdict::INCONCLUSIVE;
    double f_bound = 0.0;
    double g_value = 0.0;
    double h_bound = 0.0;
    std::optional<double> psi;
    std::optional<double> chi;
    std::optional<double> confidence;
    std::vector<std::string> notes;
};

namespace detail {

// log f, log g, log h for class c = 0
struct LogBounds {
    double lf, lg, lh;
};

inline LogBounds two_coin_log_bounds(const BinaryNoiseParams& p) {
    const double ld0 = std::log(p.t00) - std::log1p(-p.t11);
    const double ld1 = std::log(p.t11) - std::log1p(-p.t00);
    const double lr = p.log_rho();
    const double mid = 0.5 * p.h * (ld0 - ld1);
    return {mid - 0.5 * lr, std::log1p(-p.nu0) - std::log(p.nu0), mid + 0.5 * lr};
}

inline void note_boundary_band(Certificate& cert, const LogBounds& b) {
    if (std::abs(b.lg - b.lf) <= 1e-12 || std::abs(b.lh - b.lg) <= 1e-12)
        cert.notes.push_back("g sits within 1e-12 of a bound in the log domain");
}

} // namespace detail

// Theorem 3.1: under a symmetric flip probability, MV is optimal exactly when
// rho_flip < nu0 < 1 - rho_flip. Independent of H.
inline Certificate check_one_coin(double rho_flip, double nu0) {
    if (rho_flip >= 0.5) throw Error(Errc::AdversarialNoise, "flip probability must be below 0.5");
    if (!(rho_flip > 0.0)) throw Error(Errc::InvalidRange, "flip probability must be positive");
    if (!(nu0 > 0.0 && nu0 < 1.0)) throw Error(Errc::InvalidRange, "nu0 must lie in (0, 1)");

    Certificate cert;
    cert.f_bound = rho_flip / (1.0 - rho_flip);
    cert.g_value = (1.0 - nu0) / nu0;
    cert.h_bound = (1.0 - rho_flip) / rho_flip;
    const detail::LogBounds b{std::log(cert.f_bound), std::log(cert.g_value),
                              std::log(cert.h_bound)};
    cert.verdict =
        b.lf < b.lg && b.lg < b.lh ? Verdict::MV_OPTIMAL : Verdict::MV_SUBOPTIMAL;
    detail::note_boundary_band(cert, b);
    return cert;
}

// Theorem 3.2: MV is optimal exactly when f < g < h. The class-1 form of the
// condition is algebraically the mirror image; both are evaluated and must
// agree.
inline Certificate check_two_coin(const BinaryNoiseParams& p) {
    Certificate cert;
    const detail::LogBounds b = detail::two_coin_log_bounds(p);
    cert.f_bound = std::exp(b.lf);
    cert.g_value = std::exp(b.lg);
    cert.h_bound = std::exp(b.lh);
    const bool optimal_c0 = b.lf < b.lg && b.lg < b.lh;
    // class 1 sees (-lh, -lg, -lf)
    const bool optimal_c1 = -b.lh < -b.lg && -b.lg < -b.lf;
    if (optimal_c0 != optimal_c1)
        throw std::logic_error("two-coin condition disagrees between classes");
    cert.verdict = optimal_c0 ? Verdict::MV_OPTIMAL : Verdict::MV_SUBOPTIMAL;
    detail::note_boundary_band(cert, b);
    return cert;
}

// Theorem 3.3: certify MV optimality from estimated parameters. One-sided:
// failed margins mean INCONCLUSIVE, never a suboptimality claim.
inline Certificate check_estimated(const EstimatedParams& est, int h, double eta, double xi,
                                   long long n) {
    if (est.t_hat.num_classes() != 2)
        throw Error(Errc::UnsupportedClassCount, "Theorem 3.3 is stated for binary labels");
    if (h <= 0 || h % 2 == 0) throw Error(Errc::EvenH, "H must be odd and positive");
    if (!(eta > 0.0 && eta < 1.0)) throw Error(Errc::InvalidRange, "eta outside (0, 1)");
    if (!(xi > 0.0 && xi < 1.0)) throw Error(Errc::InvalidRange, "xi outside (0, 1)");
    if (n < 1) throw Error(Errc::InvalidRange, "N must be positive");
    if (est.epsilon < 0.0) throw Error(Errc::InvalidRange, "epsilon must be nonnegative");
    if (est.nu_tilde.size() != 2)
        throw Error(Errc::UnsupportedClassCount, "recovered prior must be binary");

    if (est.condition.clipped)
        throw Error(Errc::PreconditionViolated, "recovered prior was clipped");
    const double t00 = est.t_hat(0, 0), t11 = est.t_hat(1, 1);
    if (!(t00 > 0.5 && t00 <= 1.0 - xi) || !(t11 > 0.5 && t11 <= 1.0 - xi))
        throw Error(Errc::PreconditionViolated,
                    "estimated diagonal must lie in (0.5, 1 - xi]");
    for (double v : est.nu_tilde)
        if (!(v >= eta && v <= 1.0 - eta))
            throw Error(Errc::PreconditionViolated, "recovered prior leaves [eta, 1 - eta]");

    double lambda_min = est.condition.lambda_min;
    if (lambda_min <= 0.0) lambda_min = smallest_singular_value(est.t_hat);
    if (lambda_min <= 1e-8) throw Error(Errc::SingularMatrix, "T~ is numerically singular");
    if (est.epsilon >= lambda_min)
        throw Error(Errc::PreconditionViolated, "epsilon reaches lambda_min(T~)");

    const double eps = est.epsilon;
    const double band = std::min(eta, 1.0 - eta);
    const double psi =
        eps == 0.0
            ? 0.0
            : (eps / lambda_min) * (1.0 / (lambda_min - eps) + std::sqrt(2.0)) / (band * band);
    const double chi = std::sqrt(std::pow(std::max(0.5, (h - 1) / 2.0 - h * xi), 2) +
                                 std::pow(std::max(0.5, (h + 1) / 2.0 - xi * h), 2));

    const BinaryNoiseParams est_params(h, t00, t11, est.nu_tilde[0]);
    const detail::LogBounds b = detail::two_coin_log_bounds(est_params);

    Certificate cert;
    cert.f_bound = std::exp(b.lf);
    cert.g_value = std::exp(b.lg);
    cert.h_bound = std::exp(b.lh);
    cert.psi = psi;
    cert.chi = chi;
    cert.notes.push_back("confidence follows the appendix bound 1 - 2*gamma - 2*exp(-2*eps^2*N)");

    const bool lower_ok = cert.g_value - cert.f_bound > psi + eps * chi;
    const bool upper_ok = cert.h_bound - cert.g_value > psi + 4.0 * eps * chi;
    if (lower_ok && upper_ok) {
        cert.verdict = Verdict::CERTIFIED_OPTIMAL_WHP;
        double conf = 1.0 - 2.0 * est.gamma - 2.0 * std::exp(-2.0 * eps * eps * (double)n);
        if (conf < 0.0) {
            conf = 0.0;
            cert.notes.push_back("confidence clamped at 0");
        }
        cert.confidence = conf;
    } else {
        cert.verdict = Verdict::INCONCLUSIVE;
    }
    return cert;
}

// Appendix B.4: |P(eMAP) - P(MV)| <= 2 eps H (1+eps)^(H-1) / nu0 + oracle gap.
inline double emap_gap_bound(double epsilon, int h, double nu0, double oracle_gap) {
    if (epsilon < 0.0) throw Error(Errc::InvalidRange, "epsilon must be nonnegative");
    if (h < 1) throw Error(Errc::InvalidRange, "H must be positive");
    if (!(nu0 > 0.0)) throw Error(Errc::InvalidRange, "nu0 must be positive");
    if (oracle_gap < 0.0) throw Error(Errc::InvalidRange, "oracle gap must be nonnegative");
    return 2.0 * epsilon * h * std::pow(1.0 + epsilon, h - 1) / nu0 + oracle_gap;
}

// Maximal uniform perturbation half-width under which the perturbed MAP rule
// still equals MV whenever Theorem 3.2 holds. Zero (flagged) at integer A_c.
struct SigmaBound {
    double value;
    bool degenerate;
};

inline SigmaBound sigma_bound(const BinaryNoiseParams& p, int c) {
    const MapThreshold th = map_threshold(p, c);
    if (th.degenerate) return {0.0, true};
    const double frac = th.a_c - std::floor(th.a_c);
    const double t_cc = p.t_diag(c);
    const double t_bb = p.t_diag(1 - c);
    const double r_c = 1.0 / (2.0 / t_bb + 2.0 / (1.0 - t_cc) + 1.0 / t_cc + 1.0 / (1.0 - t_bb));
    return {(p.log_rho() / p.h) * r_c * std::min(frac, 1.0 - frac), false};
}

// Appendix D.2: two annotator groups sharing rho. MV is optimal exactly when
// (dB_c/dB_c')^(H/2) * zeta / sqrt(rho_B) < nu_c'/nu_c <= same * sqrt(rho_B),
// zeta = (dB_c'/dA_c')^|A|. Upper bound non-strict.
inline Certificate check_two_groups(int h, int size_a, const TransitionMatrix& t_a,
                                    const TransitionMatrix& t_b, const ClassPrior& prior) {
    if (t_a.num_classes() != 2 || t_b.num_classes() != 2 || prior.num_classes() != 2)
        throw Error(Errc::UnsupportedClassCount, "two-group condition is stated for binary labels");
    if (h <= 0 || h % 2 == 0) throw Error(Errc::EvenH, "H must be odd and positive");
    if (size_a < 0) throw Error(Errc::InvalidSplit, "group A size must be nonnegative");
    if (size_a >= (h + 1) / 2)
        throw Error(Errc::GroupTooLarge, "group A must be smaller than ceil(H/2)");
    const double a00 = t_a(0, 0), a11 = t_a(1, 1), b00 = t_b(0, 0), b11 = t_b(1, 1);
    for (double d : {a00, a11, b00, b11})
        if (!(d > 0.5 && d < 1.0))
            throw Error(Errc::AdversarialNoise, "diagonal entries must lie in (0.5, 1)");
    if (!(prior[0] > 0.0 && prior[0] < 1.0))
        throw Error(Errc::InvalidRange, "prior must be interior");

    const double lrho_a = std::log(a00) + std::log(a11) - std::log1p(-a00) - std::log1p(-a11);
    const double lrho_b = std::log(b00) + std::log(b11) - std::log1p(-b00) - std::log1p(-b11);
    if (std::abs(std::expm1(lrho_a - lrho_b)) >= 1e-6)
        throw Error(Errc::RhoMismatch, "the condition assumes rho_A = rho_B");

    // class 0 quantities, in logs
    const double ldb0 = std::log(b00) - std::log1p(-b11);
    const double ldb1 = std::log(b11) - std::log1p(-b00);
    const double lda1 = std::log(a11) - std::log1p(-a00);
    const double lzeta = size_a * (ldb1 - lda1);
    const double mid = 0.5 * h * (ldb0 - ldb1) + lzeta;
    const detail::LogBounds b{mid - 0.5 * lrho_b, std::log(prior[1] / prior[0]),
                              mid + 0.5 * lrho_b};

    Certificate cert;
    cert.f_bound = std::exp(b.lf);
    cert.g_value = std::exp(b.lg);
    cert.h_bound = std::exp(b.lh);
    cert.verdict =
        b.lf < b.lg && b.lg <= b.lh ? Verdict::MV_OPTIMAL : Verdict::MV_SUBOPTIMAL;
    detail::note_boundary_band(cert, b);
    return cert;
}

// Appendix C: ||nu - nu~||_2 <= (eps/lambda_min) [1/(lambda_min - eps) + sqrt(C)].
inline double nu_error_bound(const TransitionMatrix& t_tilde, double epsilon, int c) {
    if (epsilon < 0.0) throw Error(Errc::InvalidRange, "epsilon must be nonnegative");
    if (c != t_tilde.num_classes())
        throw Error(Errc::InvalidRange, "class count does not match the matrix");
    const double lambda_min = smallest_singular_value(t_tilde);
    if (lambda_min <= epsilon)
        throw Error(Errc::BoundUndefined, "lambda_min(T~) must exceed epsilon");
    if (epsilon == 0.0) return 0.0;
    return (epsilon / lambda_min) * (1.0 / (lambda_min - epsilon) + std::sqrt((double)c));
}

} // namespace crowdcert
