#include "fixlab/rqa.hpp"

#include <cmath>
#include <string>

#include "fixlab/errors.hpp"

namespace fixlab {

RecurrenceMatrix recurrence_matrix(const ScanPath& sp, const RqaConfig& cfg) {
    if (cfg.radius_px <= 0.0) throw ValidationError("recurrence radius must be positive");
    if (cfg.min_line_length < 2) throw ValidationError("minimum line length must be >= 2");
    const int n = static_cast<int>(sp.fixations.size());
    if (n < 2)
        throw ValidationError("scanpath (" + sp.image_id + ", " + sp.subject_id + ") has " +
                              std::to_string(n) +
                              " fixation(s); recurrence analysis needs at least 2");
    RecurrenceMatrix m;
    m.n = n;
    m.cells.assign(static_cast<size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dx = sp.fixations[i].x - sp.fixations[j].x;
            const double dy = sp.fixations[i].y - sp.fixations[j].y;
            if (std::hypot(dx, dy) <= cfg.radius_px) {
                m.cells[static_cast<size_t>(i) * n + j] = 1;
                m.cells[static_cast<size_t>(j) * n + i] = 1;
            }
        }
    }
    return m;
}

namespace {

// Length of the maximal run of recurrent cells through (i, j) along
// direction (di, dj). The main diagonal counts as recurrent here: it is
// recurrent by construction (distance zero) and only bridges runs; it is
// never counted in the measure numerators.
int run_length(const RecurrenceMatrix& m, int i, int j, int di, int dj) {
    auto rec = [&](int a, int b) {
        if (a < 0 || b < 0 || a >= m.n || b >= m.n) return false;
        return a == b || m.at(a, b);
    };
    int len = 1;
    for (int a = i - di, b = j - dj; rec(a, b); a -= di, b -= dj) ++len;
    for (int a = i + di, b = j + dj; rec(a, b); a += di, b += dj) ++len;
    return len;
}

}  // namespace

RqaMeasures rqa_measures(const RecurrenceMatrix& m, const RqaConfig& cfg) {
    const int n = m.n;
    const int L = cfg.min_line_length;

    long long r = 0, weighted = 0, on_diag = 0, on_horiz = 0, on_vert = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (!m.at(i, j)) continue;
            ++r;
            weighted += j - i;
            if (run_length(m, i, j, 1, 1) >= L || run_length(m, i, j, 1, -1) >= L) ++on_diag;
            if (run_length(m, i, j, 0, 1) >= L) ++on_horiz;
            if (run_length(m, i, j, 1, 0) >= L) ++on_vert;
        }
    }

    RqaMeasures out;
    if (r == 0) return out;
    const double rd = static_cast<double>(r);
    out.recurrence = 100.0 * 2.0 * rd / (static_cast<double>(n) * (n - 1));
    out.determinism = 100.0 * static_cast<double>(on_diag) / rd;
    out.laminarity = 100.0 * static_cast<double>(on_horiz + on_vert) / (2.0 * rd);
    out.crom = 100.0 * static_cast<double>(weighted) / ((n - 1) * rd);
    return out;
}

}  // namespace fixlab
