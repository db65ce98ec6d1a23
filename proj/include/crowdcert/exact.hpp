#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "crowdcert/error.hpp"

namespace crowdcert {

// Shared binary noise model: H annotators, one transition matrix
// [[t00, 1-t00], [1-t11, t11]] and class prior (nu0, 1-nu0).
struct BinaryNoiseParams {
    int h;
    double t00, t11, nu0;

    BinaryNoiseParams(int h_, double t00_, double t11_, double nu0_)
        : h(h_), t00(t00_), t11(t11_), nu0(nu0_) {
        if (h <= 0 || h % 2 == 0) throw Error(Errc::EvenH, "H must be odd and positive");
        if (!(t00 > 0.5 && t00 < 1.0) || !(t11 > 0.5 && t11 < 1.0))
            throw Error(Errc::AdversarialNoise, "diagonal entries must lie in (0.5, 1)");
        if (!(nu0 > 0.0 && nu0 < 1.0)) throw Error(Errc::InvalidRange, "nu0 must lie in (0, 1)");
    }

    double rho() const { return t00 * t11 / ((1.0 - t00) * (1.0 - t11)); }
    double log_rho() const {
        return std::log(t00) + std::log(t11) - std::log1p(-t00) - std::log1p(-t11);
    }
    // delta_c = T_cc / (1 - T_c'c')
    double delta(int c) const { return c == 0 ? t00 / (1.0 - t11) : t11 / (1.0 - t00); }
    double t_diag(int c) const { return c == 0 ? t00 : t11; }
    double nu(int c) const { return c == 0 ? nu0 : 1.0 - nu0; }
};

// P(Binomial(H, p) >= k0). Terms are evaluated in log space through lgamma and
// summed after shifting by the largest exponent, so H in the hundreds is safe.
inline double binom_tail(int h, double p, int k0) {
    if (h < 0 || k0 < 0 || k0 > h + 1)
        throw Error(Errc::InvalidRange, "need 0 <= k0 <= H+1");
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::InvalidRange, "p outside [0,1]");
    if (k0 == h + 1) return 0.0;
    if (k0 == 0) return 1.0;
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;

    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    const double lg_h = std::lgamma(h + 1.0);
    std::vector<double> terms(h - k0 + 1);
    double top = -INFINITY;
    for (int i = k0; i <= h; ++i) {
        double lt = lg_h - std::lgamma(i + 1.0) - std::lgamma(h - i + 1.0) + i * lp + (h - i) * lq;
        terms[i - k0] = lt;
        top = std::max(top, lt);
    }
    double sum = 0.0;
    for (double lt : terms) sum += std::exp(lt - top);
    return std::min(1.0, std::exp(top + std::log(sum)));
}

// T_cc of majority vote: probability that more than half of H annotators
// report c when the true class is c.
inline double mv_diag(int h, double t_cc) {
    if (h <= 0 || h % 2 == 0) throw Error(Errc::EvenH, "H must be odd and positive");
    if (!(t_cc > 0.0 && t_cc < 1.0)) throw Error(Errc::InvalidRange, "t_cc outside (0,1)");
    return binom_tail(h, t_cc, (h + 1) / 2);
}

// Real-valued MAP vote-count threshold A_c. MAP declares class c exactly when
// the number of c-votes exceeds A_c; the integer case is excluded upstream and
// only reported here.
struct MapThreshold {
    double a_c;
    bool degenerate; // A_c within 1e-9 of an integer
};

inline MapThreshold map_threshold(const BinaryNoiseParams& p, int c) {
    if (c != 0 && c != 1) throw Error(Errc::InvalidRange, "class must be 0 or 1");
    const double t_cc = p.t_diag(c);
    const double t_bb = p.t_diag(1 - c);
    const double a = (std::log(p.nu(1 - c) / p.nu(c)) + p.h * (std::log(t_bb) - std::log1p(-t_cc)))
                     / p.log_rho();
    return MapThreshold{a, std::abs(a - std::round(a)) <= 1e-9};
}

// T_cc of oracle MAP: binom_tail(H, T_cc, floor(A_c) + 1) for non-integer A_c.
inline double omap_diag(const BinaryNoiseParams& p, int c) {
    const MapThreshold th = map_threshold(p, c);
    if (th.degenerate)
        throw Error(Errc::DegenerateThreshold, "A_c is an integer; the rule is undefined there");
    const int k0 = std::clamp((int)std::floor(th.a_c) + 1, 0, p.h + 1);
    return binom_tail(p.h, p.t_diag(c), k0);
}

// Overall recovery probability of an aggregator with diagonal (t00_agg, t11_agg).
inline double success_probability(double t00_agg, double t11_agg, double nu0) {
    if (!(t00_agg >= 0.0 && t00_agg <= 1.0) || !(t11_agg >= 0.0 && t11_agg <= 1.0) ||
        !(nu0 >= 0.0 && nu0 <= 1.0))
        throw Error(Errc::InvalidRange, "arguments outside [0,1]");
    return nu0 * t00_agg + (1.0 - nu0) * t11_agg;
}

// P(y_oMAP = y) - P(y_MV = y), nonnegative for non-degenerate parameters.
inline double gap(const BinaryNoiseParams& p) {
    const double mv = success_probability(mv_diag(p.h, p.t00), mv_diag(p.h, p.t11), p.nu0);
    const double om = success_probability(omap_diag(p, 0), omap_diag(p, 1), p.nu0);
    double g = om - mv;
    if (g < -1e-9)
        throw std::logic_error("oMAP-MV gap is negative; closed forms are inconsistent");
    if (g < 1e-14) g = 0.0;
    return g;
}

// Exhaustive enumeration over all 2^H annotation vectors, independent of the
// closed forms above. map_is_best_rule is only evaluated for H <= 4, where all
// 2^(2^H) deterministic rules fit in a loop.
struct OracleResult {
    double p_mv, p_map;
    double mv_diag[2];  // per-class MV recovery probability
    double map_diag[2]; // per-class MAP recovery probability
    std::optional<bool> map_is_best_rule;
};

inline OracleResult brute_force_oracle(const BinaryNoiseParams& p) {
    if (p.h > 15) throw Error(Errc::TooManyAnnotators, "oracle enumerates 2^H patterns, H <= 15");
    const int n_patterns = 1 << p.h;

    OracleResult r{0.0, 0.0, {0.0, 0.0}, {0.0, 0.0}, std::nullopt};
    std::vector<double> w0(n_patterns), w1(n_patterns);
    for (int v = 0; v < n_patterns; ++v) {
        double p_v0 = 1.0, p_v1 = 1.0;
        int ones = 0;
        for (int bit = 0; bit < p.h; ++bit) {
            if (v >> bit & 1) {
                ++ones;
                p_v0 *= 1.0 - p.t00;
                p_v1 *= p.t11;
            } else {
                p_v0 *= p.t00;
                p_v1 *= 1.0 - p.t11;
            }
        }
        w0[v] = p.nu0 * p_v0;
        w1[v] = (1.0 - p.nu0) * p_v1;

        const int mv_label = ones > p.h / 2 ? 1 : 0;
        // posterior argmax, ties to the lowest class index
        const int map_label = w1[v] > w0[v] ? 1 : 0;
        if (mv_label == 0) r.mv_diag[0] += p_v0;
        if (mv_label == 1) r.mv_diag[1] += p_v1;
        if (map_label == 0) r.map_diag[0] += p_v0;
        if (map_label == 1) r.map_diag[1] += p_v1;
    }
    r.p_mv = p.nu0 * r.mv_diag[0] + (1.0 - p.nu0) * r.mv_diag[1];
    r.p_map = p.nu0 * r.map_diag[0] + (1.0 - p.nu0) * r.map_diag[1];

    if (p.h <= 4) {
        double best = 0.0;
        const std::uint64_t n_rules = 1ULL << n_patterns;
        for (std::uint64_t rule = 0; rule < n_rules; ++rule) {
            double s = 0.0;
            for (int v = 0; v < n_patterns; ++v)
                s += (rule >> v & 1) ? w1[v] : w0[v];
            best = std::max(best, s);
        }
        r.map_is_best_rule = r.p_map >= best - 1e-12;
    }
    return r;
}

} // namespace crowdcert
