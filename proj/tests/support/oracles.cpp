#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

namespace testsupport {

namespace {

// Gaussian elimination with partial pivoting on a k x k system; false
// when a pivot vanishes.
bool solve_dense(std::vector<double> A, std::vector<double> rhs, int k, std::vector<double>& out) {
    for (int col = 0; col < k; ++col) {
        int pivot = col;
        for (int r = col + 1; r < k; ++r)
            if (std::abs(A[r * k + col]) > std::abs(A[pivot * k + col])) pivot = r;
        if (std::abs(A[pivot * k + col]) < 1e-12) return false;
        if (pivot != col) {
            for (int c = 0; c < k; ++c) std::swap(A[pivot * k + c], A[col * k + c]);
            std::swap(rhs[pivot], rhs[col]);
        }
        for (int r = col + 1; r < k; ++r) {
            const double f = A[r * k + col] / A[col * k + col];
            if (f == 0.0) continue;
            for (int c = col; c < k; ++c) A[r * k + c] -= f * A[col * k + c];
            rhs[r] -= f * rhs[col];
        }
    }
    out.assign(k, 0.0);
    for (int r = k - 1; r >= 0; --r) {
        double s = rhs[r];
        for (int c = r + 1; c < k; ++c) s -= A[r * k + c] * out[c];
        out[r] = s / A[r * k + r];
    }
    return true;
}

double true_objective(const std::vector<double>& x, const fixlab::Dictionary& D,
                      const std::vector<double>& c, double lambda1) {
    std::vector<double> r(x);
    double l1 = 0.0;
    for (int j = 0; j < D.l; ++j) {
        if (c[j] == 0.0) continue;
        l1 += std::abs(c[j]);
        const double* rj = D.row(j);
        for (int t = 0; t < D.d; ++t) r[t] -= c[j] * rj[t];
    }
    double sq = 0.0;
    for (double v : r) sq += v * v;
    return sq + lambda1 * l1;
}

}  // namespace

double lasso_oracle_objective(const std::vector<double>& x, const fixlab::Dictionary& D,
                              double lambda1) {
    const int l = D.l, d = D.d;
    std::vector<double> G(static_cast<size_t>(l) * l, 0.0), b(l, 0.0);
    for (int j = 0; j < l; ++j) {
        const double* rj = D.row(j);
        for (int t = 0; t < d; ++t) b[j] += rj[t] * x[t];
        for (int k = 0; k < l; ++k) {
            const double* rk = D.row(k);
            double s = 0.0;
            for (int t = 0; t < d; ++t) s += rj[t] * rk[t];
            G[static_cast<size_t>(j) * l + k] = s;
        }
    }

    std::vector<double> zero(l, 0.0);
    double best = true_objective(x, D, zero, lambda1);

    int patterns = 1;
    for (int j = 0; j < l; ++j) patterns *= 3;
    for (int p = 1; p < patterns; ++p) {
        int code = p;
        std::vector<int> sign(l, 0);
        std::vector<int> active;
        for (int j = 0; j < l; ++j) {
            const int s = code % 3; // 0 -> inactive, 1 -> +, 2 -> -
            code /= 3;
            if (s == 1) sign[j] = 1;
            if (s == 2) sign[j] = -1;
            if (s != 0) active.push_back(j);
        }
        const int k = static_cast<int>(active.size());
        std::vector<double> A(static_cast<size_t>(k) * k), rhs(k);
        for (int r = 0; r < k; ++r) {
            for (int c = 0; c < k; ++c)
                A[r * k + c] = G[static_cast<size_t>(active[r]) * l + active[c]];
            rhs[r] = b[active[r]] - 0.5 * lambda1 * sign[active[r]];
        }
        std::vector<double> ca;
        if (!solve_dense(std::move(A), std::move(rhs), k, ca)) continue;
        std::vector<double> c(l, 0.0);
        for (int r = 0; r < k; ++r) c[active[r]] = ca[r];
        best = std::min(best, true_objective(x, D, c, lambda1));
    }
    return best;
}

fixlab::RqaMeasures rqa_oracle(const fixlab::RecurrenceMatrix& m, int min_line) {
    const int n = m.n;
    size_t recurrent = 0;
    long long spread = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (m.at(i, j)) {
                ++recurrent;
                spread += j - i;
            }
        }
    }
    fixlab::RqaMeasures out;
    if (recurrent == 0) return out;

    const auto line_rec = [&](int i, int j) { return i == j || m.at(i, j); };
    const size_t cells = static_cast<size_t>(n) * n;
    std::vector<uint8_t> diag(cells, 0), horiz(cells, 0), vert(cells, 0);

    // Walks one full line of the plot, marking every maximal run of
    // line-recurrent cells whose length reaches min_line.
    const auto walk = [&](int i, int j, int di, int dj, std::vector<uint8_t>& mark) {
        std::vector<std::pair<int, int>> run;
        const auto flush = [&] {
            if (static_cast<int>(run.size()) >= min_line)
                for (const auto& [a, b] : run) mark[static_cast<size_t>(a) * n + b] = 1;
            run.clear();
        };
        while (i >= 0 && i < n && j >= 0 && j < n) {
            if (line_rec(i, j))
                run.emplace_back(i, j);
            else
                flush();
            i += di;
            j += dj;
        }
        flush();
    };

    for (int i = 0; i < n; ++i) walk(i, 0, 0, 1, horiz);
    for (int j = 0; j < n; ++j) walk(0, j, 1, 0, vert);
    for (int i = 0; i < n; ++i) walk(i, 0, 1, 1, diag);       // main-diagonal direction
    for (int j = 1; j < n; ++j) walk(0, j, 1, 1, diag);
    for (int j = 0; j < n; ++j) walk(0, j, 1, -1, diag);      // anti-diagonal direction
    for (int i = 1; i < n; ++i) walk(i, n - 1, 1, -1, diag);

    size_t on_diag = 0, on_horiz = 0, on_vert = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (!m.at(i, j)) continue;
            const size_t idx = static_cast<size_t>(i) * n + j;
            if (diag[idx]) ++on_diag;
            if (horiz[idx]) ++on_horiz;
            if (vert[idx]) ++on_vert;
        }
    }
    const double r = static_cast<double>(recurrent);
    out.recurrence = 100.0 * 2.0 * r / (static_cast<double>(n) * (n - 1));
    out.determinism = 100.0 * static_cast<double>(on_diag) / r;
    out.laminarity = 100.0 * static_cast<double>(on_horiz + on_vert) / (2.0 * r);
    out.crom = 100.0 * static_cast<double>(spread) / (static_cast<double>(n - 1) * r);
    return out;
}

}  // namespace testsupport
