#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace evoq {

struct OdeStats {
    double t = 0.0;
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    std::uint64_t evaluations = 0;
    bool stopped = false;       // observer requested stop
    bool step_underflow = false;
};

// Explicit Dormand-Prince 5(4) pair with FSAL and standard step-size control.
// Integrates forward or backward depending on the sign of t_end - t0.
template <std::size_t Dim>
class DormandPrince {
public:
    using State = std::array<double, Dim>;

    double rtol = 1e-8;
    double atol = 1e-10;
    double max_step = std::numeric_limits<double>::infinity();
    std::uint64_t max_steps = 10'000'000;

    // rhs(t, y) -> State. observer(t, y, dydt) -> bool, true stops integration.
    // The observer sees the initial point and every accepted step.
    template <typename Rhs, typename Observer>
    OdeStats integrate(Rhs&& rhs, double t0, State& y, double t_end, Observer&& observer) const {
        OdeStats stats;
        stats.t = t0;
        const double dir = t_end >= t0 ? 1.0 : -1.0;
        State k1 = rhs(t0, y);
        ++stats.evaluations;
        if (observer(t0, static_cast<const State&>(y), static_cast<const State&>(k1))) {
            stats.stopped = true;
            return stats;
        }
        double t = t0;
        double h = initial_step(rhs, t0, y, k1, dir, std::abs(t_end - t0), stats);
        double err_prev = 1e-4;

        while (dir * (t_end - t) > 0.0) {
            if (stats.accepted + stats.rejected >= max_steps) break;
            const double remaining = std::abs(t_end - t);
            bool last = false;
            double habs = std::min({std::abs(h), max_step});
            if (habs >= remaining) {
                habs = remaining;
                last = true;
            }
            if (habs <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
                stats.step_underflow = true;
                break;
            }
            h = dir * habs;

            State y_new, k7, err;
            step(rhs, t, y, k1, h, y_new, k7, err, stats);

            double norm = 0.0;
            for (std::size_t i = 0; i < Dim; ++i) {
                const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
                const double e = err[i] / scale;
                norm += e * e;
            }
            norm = std::sqrt(norm / static_cast<double>(Dim));

            if (norm <= 1.0) {
                // PI controller (Hairer & Wanner, Solving ODEs I, sec. II.4)
                const double err = std::max(norm, 1e-10);
                double fac = 0.9 * std::pow(err, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
                fac = std::clamp(fac, 0.2, 10.0);
                err_prev = err;
                t = last ? t_end : t + h;
                y = y_new;
                k1 = k7;
                ++stats.accepted;
                stats.t = t;
                if (observer(t, static_cast<const State&>(y), static_cast<const State&>(k1))) {
                    stats.stopped = true;
                    return stats;
                }
                h = h * fac;
            } else {
                ++stats.rejected;
                const double fac = std::isfinite(norm) ? std::max(0.2, 0.9 * std::pow(norm, -0.2)) : 0.2;
                h = h * fac;
            }
        }
        return stats;
    }

private:
    template <typename Rhs>
    double initial_step(Rhs& rhs, double t0, const State& y, const State& f0, double dir, double span,
                        OdeStats& stats) const {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < Dim; ++i) {
            const double sc = atol + rtol * std::abs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1 += (f0[i] / sc) * (f0[i] / sc);
        }
        d0 = std::sqrt(d0 / Dim);
        d1 = std::sqrt(d1 / Dim);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, span);
        State y1;
        for (std::size_t i = 0; i < Dim; ++i) y1[i] = y[i] + dir * h0 * f0[i];
        const State f1 = rhs(t0 + dir * h0, y1);
        ++stats.evaluations;
        double d2 = 0.0;
        for (std::size_t i = 0; i < Dim; ++i) {
            const double sc = atol + rtol * std::abs(y[i]);
            const double v = (f1[i] - f0[i]) / sc;
            d2 += v * v;
        }
        d2 = std::sqrt(d2 / Dim) / h0;
        const double dmax = std::max(d1, d2);
        const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
        return std::min({100.0 * h0, h1, span > 0.0 ? span : h1});
    }

    template <typename Rhs>
    static void step(Rhs& rhs, double t, const State& y, const State& k1, double h, State& y_new, State& k7,
                     State& err, OdeStats& stats) {
        constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        constexpr double a21 = 1.0 / 5;
        constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                         a54 = -212.0 / 729;
        constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                         a65 = -5103.0 / 18656;
        constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                         b6 = 11.0 / 84;
        constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                         e6 = 22.0 / 525, e7 = -1.0 / 40;

        State tmp;
        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        const State k2 = rhs(t + c2 * h, tmp);
        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        const State k3 = rhs(t + c3 * h, tmp);
        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        const State k4 = rhs(t + c4 * h, tmp);
        for (std::size_t i = 0; i < Dim; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        const State k5 = rhs(t + c5 * h, tmp);
        for (std::size_t i = 0; i < Dim; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const State k6 = rhs(t + h, tmp);
        for (std::size_t i = 0; i < Dim; ++i)
            y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = rhs(t + h, y_new);
        for (std::size_t i = 0; i < Dim; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        stats.evaluations += 6;
    }
};

} // namespace evoq
