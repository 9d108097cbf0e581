#include "fixlab/multimatch.hpp"

#include <algorithm>
#include <cmath>

#include "fixlab/errors.hpp"

namespace fixlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double SaccadeVector::amplitude() const { return std::hypot(dx, dy); }

MultiMatchConfig MultiMatchConfig::defaults(double screen_diagonal_px) {
    MultiMatchConfig cfg;
    cfg.amplitude_threshold_px = 0.1 * screen_diagonal_px;
    cfg.direction_threshold_deg = 45.0;
    cfg.screen_diagonal_px = screen_diagonal_px;
    cfg.simplification_enabled = true;
    return cfg;
}

double angular_difference(const SaccadeVector& a, const SaccadeVector& b) {
    if ((a.dx == 0.0 && a.dy == 0.0) || (b.dx == 0.0 && b.dy == 0.0)) return 0.0;
    double diff = std::abs(std::atan2(a.dy, a.dx) - std::atan2(b.dy, b.dx));
    if (diff > kPi) diff = 2.0 * kPi - diff;
    return diff;
}

std::vector<SaccadeVector> to_vectors(const ScanPath& sp) {
    if (sp.fixations.size() < 2)
        throw ValidationError("scanpath (" + sp.image_id + ", " + sp.subject_id +
                              ") is too short for saccade vectors (needs >= 2 fixations)");
    std::vector<SaccadeVector> out;
    out.reserve(sp.fixations.size() - 1);
    for (size_t i = 0; i + 1 < sp.fixations.size(); ++i) {
        const Fixation& a = sp.fixations[i];
        const Fixation& b = sp.fixations[i + 1];
        out.push_back({b.x - a.x, b.y - a.y, a.x, a.y, a.duration});
    }
    return out;
}

std::vector<SaccadeVector> simplify(const std::vector<SaccadeVector>& vs,
                                    const MultiMatchConfig& cfg) {
    const double dir_threshold_rad = cfg.direction_threshold_deg * kPi / 180.0;
    std::vector<SaccadeVector> cur = vs;
    bool merged = true;
    while (merged && cur.size() > 1) {
        merged = false;
        std::vector<SaccadeVector> next;
        next.reserve(cur.size());
        size_t i = 0;
        while (i < cur.size()) {
            if (i + 1 < cur.size()) {
                const SaccadeVector& u = cur[i];
                const SaccadeVector& v = cur[i + 1];
                const double combined = std::hypot(u.dx + v.dx, u.dy + v.dy);
                if (combined < cfg.amplitude_threshold_px ||
                    angular_difference(u, v) < dir_threshold_rad) {
                    next.push_back({u.dx + v.dx, u.dy + v.dy, u.start_x, u.start_y,
                                    u.duration + v.duration});
                    i += 2;
                    merged = true;
                    continue;
                }
            }
            next.push_back(cur[i]);
            ++i;
        }
        cur = std::move(next);
    }
    return cur;
}

namespace {

inline double vector_difference(const SaccadeVector& u, const SaccadeVector& v) {
    return std::hypot(u.dx - v.dx, u.dy - v.dy);
}

}  // namespace

std::vector<std::pair<size_t, size_t>> align(const std::vector<SaccadeVector>& a,
                                             const std::vector<SaccadeVector>& b) {
    if (a.empty() || b.empty()) throw ValidationError("align requires non-empty vector lists");
    const size_t na = a.size(), nb = b.size();
    std::vector<double> cost(na * nb, 0.0);
    auto C = [&](size_t i, size_t j) -> double& { return cost[i * nb + j]; };
    for (size_t i = 0; i < na; ++i) {
        for (size_t j = 0; j < nb; ++j) {
            const double local = vector_difference(a[i], b[j]);
            if (i == 0 && j == 0) {
                C(i, j) = local;
            } else if (i == 0) {
                C(i, j) = local + C(0, j - 1);
            } else if (j == 0) {
                C(i, j) = local + C(i - 1, 0);
            } else {
                C(i, j) = local + std::min({C(i - 1, j - 1), C(i - 1, j), C(i, j - 1)});
            }
        }
    }
    // Backtrack, preferring the diagonal on ties.
    std::vector<std::pair<size_t, size_t>> rev;
    size_t i = na - 1, j = nb - 1;
    rev.emplace_back(i, j);
    while (i > 0 || j > 0) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            const double diag = C(i - 1, j - 1), up = C(i - 1, j), left = C(i, j - 1);
            if (diag <= up && diag <= left) {
                --i;
                --j;
            } else if (up <= left) {
                --i;
            } else {
                --j;
            }
        }
        rev.emplace_back(i, j);
    }
    return {rev.rbegin(), rev.rend()};
}

MultiMatchScore compare(const ScanPath& a, const ScanPath& b, const MultiMatchConfig& cfg) {
    std::vector<SaccadeVector> va = to_vectors(a);
    std::vector<SaccadeVector> vb = to_vectors(b);
    if (cfg.simplification_enabled) {
        va = simplify(va, cfg);
        vb = simplify(vb, cfg);
    }
    const auto pairs = align(va, vb);
    const double diag = cfg.screen_diagonal_px;

    double shape = 0.0, length = 0.0, direction = 0.0, position = 0.0, duration = 0.0;
    for (const auto& [i, j] : pairs) {
        const SaccadeVector& u = va[i];
        const SaccadeVector& v = vb[j];
        shape += vector_difference(u, v) / (2.0 * diag);
        length += std::abs(u.amplitude() - v.amplitude()) / diag;
        direction += angular_difference(u, v) / kPi;
        position += std::hypot(u.start_x - v.start_x, u.start_y - v.start_y) / diag;
        const double dmax = std::max(u.duration, v.duration);
        duration += dmax > 0.0 ? std::abs(u.duration - v.duration) / dmax : 0.0;
    }
    const double n = static_cast<double>(pairs.size());
    auto score = [&](double acc) { return std::clamp(1.0 - acc / n, 0.0, 1.0); };
    return {score(shape), score(length), score(direction), score(position), score(duration)};
}

}  // namespace fixlab
