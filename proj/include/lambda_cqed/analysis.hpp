#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lambda_cqed/scan.hpp"

namespace lcqed {

class InsufficientPeaks : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Peak {
    double position = 0.0;    // quadratic-interpolated
    double height = 0.0;
    double width = 0.0;       // FWHM estimate relative to the local base
    double prominence = 0.0;
};

struct PeakAssignment {
    Peak peak;
    int n = -1;               // index into the prediction list; -1 = unmatched
    double predicted = 0.0;
    double residual = 0.0;
};

enum class SpectrumColumn { mean_n, s22, s33 };

inline std::vector<double> column_values(const Spectrum& s, SpectrumColumn col) {
    std::vector<double> ys;
    ys.reserve(s.records.size());
    for (const auto& r : s.records) {
        switch (col) {
            case SpectrumColumn::mean_n: ys.push_back(r.mean_n); break;
            case SpectrumColumn::s22: ys.push_back(r.s22); break;
            case SpectrumColumn::s33: ys.push_back(r.s33); break;
        }
    }
    return ys;
}

/// Local maxima with topographic prominence above the threshold. Positions
/// are refined by a parabola through the three points around each maximum.
/// Multiphoton peaks sit on the shoulders of saturated lines, so prominence
/// rather than raw height is the discriminator.
inline std::vector<Peak> find_peaks(const std::vector<double>& xs,
                                    const std::vector<double>& ys,
                                    double min_prominence) {
    if (xs.size() != ys.size()) throw std::invalid_argument("find_peaks: size mismatch");
    if (!(min_prominence > 0.0))
        throw std::invalid_argument("find_peaks: min_prominence must be > 0");
    const int n = int(xs.size());
    std::vector<Peak> out;
    for (int i = 1; i + 1 < n; ++i) {
        if (!(std::isfinite(ys[i]))) continue;
        if (!(ys[i] > ys[i - 1] && ys[i] >= ys[i + 1])) continue;
        // plateau: take the left edge, require a strict drop after it
        int j = i;
        while (j + 1 < n && ys[j + 1] == ys[i]) ++j;
        if (j + 1 >= n || !(ys[j + 1] < ys[i])) continue;

        // topographic prominence: lowest saddle towards higher ground
        double left_min = ys[i], right_min = ys[i];
        for (int k = i - 1; k >= 0; --k) {
            if (ys[k] > ys[i]) break;
            left_min = std::min(left_min, ys[k]);
            if (k == 0) break;
        }
        for (int k = j + 1; k < n; ++k) {
            if (ys[k] > ys[i]) break;
            right_min = std::min(right_min, ys[k]);
        }
        const double base = std::max(left_min, right_min);
        const double prom = ys[i] - base;
        if (!(prom >= min_prominence)) {
            i = j;
            continue;
        }

        Peak p;
        p.height = ys[i];
        p.prominence = prom;

        // parabola through (i-1, i, i+1); offset clamped to one grid cell
        const double y0 = ys[i - 1], y1 = ys[i], y2 = ys[i + 1];
        const double denom = y0 - 2.0 * y1 + y2;
        double frac = 0.0;
        if (denom != 0.0) frac = 0.5 * (y0 - y2) / denom;
        frac = std::clamp(frac, -1.0, 1.0);
        const double h_left = xs[i] - xs[i - 1];
        const double h_right = xs[i + 1] - xs[i];
        p.position = xs[i] + frac * (frac < 0 ? h_left : h_right);

        // FWHM estimate: crossings of height - prominence/2
        const double half = ys[i] - 0.5 * prom;
        double xl = xs[0], xr = xs[n - 1];
        for (int k = i; k > 0; --k) {
            if (ys[k - 1] <= half) {
                const double t = (ys[k] - half) / (ys[k] - ys[k - 1]);
                xl = xs[k] + t * (xs[k - 1] - xs[k]);
                break;
            }
        }
        for (int k = j; k + 1 < n; ++k) {
            if (ys[k + 1] <= half) {
                const double t = (ys[k] - half) / (ys[k] - ys[k + 1]);
                xr = xs[k] + t * (xs[k + 1] - xs[k]);
                break;
            }
        }
        p.width = std::max(xr - xl, 0.0);
        out.push_back(p);
        i = j;
    }
    return out;
}

inline std::vector<Peak> find_peaks(const Spectrum& s, SpectrumColumn col,
                                    double min_prominence) {
    std::vector<double> xs;
    xs.reserve(s.records.size());
    for (const auto& r : s.records) xs.push_back(r.probe);
    return find_peaks(xs, column_values(s, col), min_prominence);
}

/// Greedy nearest matching of detected peaks to predicted positions. Each
/// prediction is used at most once; pairs farther than tol stay unmatched
/// (n = -1), so residuals of matched pairs never exceed tol.
inline std::vector<PeakAssignment> assign_orders(const std::vector<Peak>& peaks,
                                                 const std::vector<double>& predictions,
                                                 double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("assign_orders: tol must be > 0");
    struct Cand {
        double dist;
        int pk, pr;
    };
    std::vector<Cand> cands;
    for (int a = 0; a < int(peaks.size()); ++a)
        for (int b = 0; b < int(predictions.size()); ++b) {
            const double dist = std::abs(peaks[a].position - predictions[b]);
            if (dist <= tol) cands.push_back({dist, a, b});
        }
    std::sort(cands.begin(), cands.end(),
              [](const Cand& l, const Cand& r) { return l.dist < r.dist; });

    std::vector<PeakAssignment> out(peaks.size());
    std::vector<bool> peak_used(peaks.size(), false), pred_used(predictions.size(), false);
    for (int a = 0; a < int(peaks.size()); ++a) out[a].peak = peaks[a];
    for (const auto& c : cands) {
        if (peak_used[c.pk] || pred_used[c.pr]) continue;
        peak_used[c.pk] = true;
        pred_used[c.pr] = true;
        out[c.pk].n = c.pr;
        out[c.pk].predicted = predictions[c.pr];
        out[c.pk].residual = peaks[c.pk].position - predictions[c.pr];
    }
    return out;
}

struct FringeSpacing {
    double mean = 0.0;
    double stddev = 0.0;
    int peak_count = 0;
};

/// Mean spacing between consecutive detected peaks inside the window.
inline FringeSpacing fringe_spacing(const Spectrum& s, std::pair<double, double> window,
                                    SpectrumColumn col = SpectrumColumn::mean_n,
                                    double min_prominence = 1e-9) {
    auto peaks = find_peaks(s, col, min_prominence);
    std::vector<double> pos;
    for (const auto& p : peaks)
        if (p.position >= window.first && p.position <= window.second)
            pos.push_back(p.position);
    std::sort(pos.begin(), pos.end());
    if (pos.size() < 3)
        throw InsufficientPeaks("fringe_spacing: need >= 3 peaks in window, found " +
                                std::to_string(pos.size()));
    std::vector<double> gaps;
    for (std::size_t k = 1; k < pos.size(); ++k) gaps.push_back(pos[k] - pos[k - 1]);
    FringeSpacing f;
    f.peak_count = int(pos.size());
    for (double g : gaps) f.mean += g;
    f.mean /= double(gaps.size());
    for (double g : gaps) f.stddev += (g - f.mean) * (g - f.mean);
    f.stddev = std::sqrt(f.stddev / double(gaps.size()));
    return f;
}

}  // namespace lcqed
