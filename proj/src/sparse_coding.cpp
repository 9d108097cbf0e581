#include "fixlab/sparse_coding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "binio.hpp"
#include "fixlab/errors.hpp"
#include "fixlab/io.hpp"

namespace fixlab {

void Dictionary::validate() const {
    if (l <= 0 || d <= 0) throw ValidationError("dictionary dimensions must be positive");
    if (rows.size() != static_cast<size_t>(l) * d)
        throw ValidationError("dictionary storage does not match l*d");
    for (int j = 0; j < l; ++j) {
        double n2 = 0.0;
        const double* r = row(j);
        for (int t = 0; t < d; ++t) {
            if (!std::isfinite(r[t]))
                throw ValidationError("dictionary row " + std::to_string(j) +
                                      " has a non-finite entry");
            n2 += r[t] * r[t];
        }
        if (n2 > 1.0 + 1e-9)
            throw ValidationError("dictionary row " + std::to_string(j) +
                                  " violates the unit norm bound (|row|^2 = " +
                                  std::to_string(n2) + ")");
    }
}

namespace {

inline double soft_threshold(double a, double t) {
    if (a > t) return a - t;
    if (a < -t) return a + t;
    return 0.0;
}

std::vector<double> gram(const Dictionary& D) {
    const int l = D.l, d = D.d;
    std::vector<double> G(static_cast<size_t>(l) * l);
    for (int j = 0; j < l; ++j) {
        for (int k = j; k < l; ++k) {
            double s = 0.0;
            const double *rj = D.row(j), *rk = D.row(k);
            for (int t = 0; t < d; ++t) s += rj[t] * rk[t];
            G[static_cast<size_t>(j) * l + k] = s;
            G[static_cast<size_t>(k) * l + j] = s;
        }
    }
    return G;
}

// Cyclic coordinate descent on 0.5-free form: each visit minimizes the
// full objective over one coordinate exactly. g = G*c is maintained
// incrementally so converged sweeps cost O(l).
std::vector<double> encode_with_gram(const std::vector<double>& x, const Dictionary& D,
                                     const std::vector<double>& G, const SparseCodingConfig& cfg,
                                     const std::vector<double>* warm) {
    const int l = D.l, d = D.d;
    const double thr = cfg.lambda1 / 2.0;

    std::vector<double> c(static_cast<size_t>(l), 0.0);
    if (warm) {
        if (static_cast<int>(warm->size()) != l)
            throw ValidationError("warm-start code has dimension " +
                                  std::to_string(warm->size()) + ", dictionary has " +
                                  std::to_string(l) + " codewords");
        c = *warm;
    }

    std::vector<double> h(static_cast<size_t>(l));
    for (int j = 0; j < l; ++j) {
        double s = 0.0;
        const double* rj = D.row(j);
        for (int t = 0; t < d; ++t) s += rj[t] * x[t];
        h[j] = s;
    }

    std::vector<double> g(static_cast<size_t>(l), 0.0);
    for (int k = 0; k < l; ++k) {
        if (c[k] == 0.0) continue;
        const double ck = c[k];
        const double* Gk = G.data() + static_cast<size_t>(k) * l;
        for (int j = 0; j < l; ++j) g[j] += Gk[j] * ck;
    }

    for (int sweep = 0; sweep < cfg.max_encode_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (int j = 0; j < l; ++j) {
            const double gjj = G[static_cast<size_t>(j) * l + j];
            double next = 0.0;
            if (gjj > 1e-12) {
                const double rho = h[j] - g[j] + gjj * c[j];
                next = soft_threshold(rho, thr) / gjj;
            }
            const double delta = next - c[j];
            if (delta != 0.0) {
                const double* Gj = G.data() + static_cast<size_t>(j) * l;
                for (int k = 0; k < l; ++k) g[k] += Gj[k] * delta;
                c[j] = next;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        if (max_delta < cfg.encode_tolerance) break;
    }
    return c;
}

void check_sample_dim(const std::vector<double>& x, const Dictionary& D) {
    if (static_cast<int>(x.size()) != D.d)
        throw ValidationError("descriptor dimension " + std::to_string(x.size()) +
                              " does not match dictionary dimension " + std::to_string(D.d));
}

}  // namespace

std::vector<double> encode(const std::vector<double>& x, const Dictionary& D,
                           const SparseCodingConfig& cfg, const std::vector<double>* warm) {
    check_sample_dim(x, D);
    return encode_with_gram(x, D, gram(D), cfg, warm);
}

std::vector<std::vector<double>> encode_all(const std::vector<std::vector<double>>& xs,
                                            const Dictionary& D, const SparseCodingConfig& cfg,
                                            const std::vector<std::vector<double>>* warm) {
    for (const auto& x : xs) check_sample_dim(x, D);
    if (warm && warm->size() != xs.size())
        throw ValidationError("warm-start batch size does not match sample count");
    const std::vector<double> G = gram(D);
    std::vector<std::vector<double>> out(xs.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(xs.size()); ++i)
        out[i] = encode_with_gram(xs[i], D, G, cfg, warm ? &(*warm)[i] : nullptr);
    return out;
}

double coding_objective(const std::vector<std::vector<double>>& xs,
                        const std::vector<std::vector<double>>& codes, const Dictionary& D,
                        double lambda1) {
    if (xs.size() != codes.size())
        throw ValidationError("objective needs matching sample and code counts");
    std::vector<double> terms(xs.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(xs.size()); ++i) {
        const auto& x = xs[i];
        const auto& c = codes[i];
        check_sample_dim(x, D);
        if (static_cast<int>(c.size()) != D.l)
            throw ValidationError("code dimension does not match dictionary size");
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
        terms[i] = sq + lambda1 * l1;
    }
    double total = 0.0;
    for (double t : terms) total += t;  // fixed summation order
    return total;
}

LearnResult learn_dictionary(const std::vector<std::vector<double>>& xs, int l,
                             const SparseCodingConfig& cfg) {
    if (l <= 0) throw ValidationError("dictionary size must be positive");
    if (static_cast<int>(xs.size()) < l)
        throw ValidationError("learning " + std::to_string(l) + " codewords needs at least " +
                              std::to_string(l) + " samples, got " + std::to_string(xs.size()));
    const int d = static_cast<int>(xs[0].size());
    if (d == 0) throw ValidationError("descriptors must be non-empty");
    bool any_nonzero = false;
    for (const auto& x : xs) {
        if (static_cast<int>(x.size()) != d)
            throw ValidationError("descriptors must all share one dimension");
        for (double v : x) {
            if (v != 0.0) {
                any_nonzero = true;
                break;
            }
        }
    }
    if (!any_nonzero) throw DegenerateError("cannot learn a dictionary from all-zero samples");

    // Seeded k-means++-style draw of l distinct samples: the first uniform,
    // every further one weighted by its squared distance to the atoms chosen
    // so far.  Uniform sampling tends to miss rare-but-strong structure, and
    // the coding threshold then keeps those samples at zero forever.
    std::mt19937_64 rng(cfg.seed);
    const size_t n = xs.size();
    std::vector<size_t> idx;
    idx.reserve(static_cast<size_t>(l));
    std::vector<char> used(n, 0);
    std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
    for (int j = 0; j < l; ++j) {
        size_t pick = n;
        if (j > 0) {
            double total = 0.0;
            for (double v : dist2) total += v;
            if (total > 0.0) {
                const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
                double acc = 0.0;
                for (size_t i = 0; i < n; ++i) {
                    if (dist2[i] <= 0.0) continue;
                    acc += dist2[i];
                    pick = i;
                    if (acc > u) break;
                }
            }
        } else {
            pick = static_cast<size_t>(rng() % n);
        }
        if (pick == n) { // every remaining sample duplicates a chosen one
            for (size_t i = 0; i < n; ++i) {
                if (!used[i]) {
                    pick = i;
                    break;
                }
            }
        }
        idx.push_back(pick);
        used[pick] = 1;
        const auto& p = xs[pick];
#pragma omp parallel for schedule(static)
        for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
            const size_t i = static_cast<size_t>(ii);
            double sq = 0.0;
            const auto& x = xs[i];
            for (int t = 0; t < d; ++t) {
                const double diff = x[t] - p[t];
                sq += diff * diff;
            }
            dist2[i] = std::min(dist2[i], sq);
        }
    }
    Dictionary D;
    D.l = l;
    D.d = d;
    D.rows.resize(static_cast<size_t>(l) * d);
    for (int j = 0; j < l; ++j) {
        const auto& x = xs[idx[j]];
        double n2 = 0.0;
        for (double v : x) n2 += v * v;
        const double scale = n2 > 1.0 ? 1.0 / std::sqrt(n2) : 1.0;
        for (int t = 0; t < d; ++t) D.row(j)[t] = x[t] * scale;
    }

    LearnResult res;
    std::vector<std::vector<double>> codes(xs.size(), std::vector<double>(l, 0.0));
    double prev_obj = std::numeric_limits<double>::infinity();
    for (int outer = 0; outer < cfg.max_outer_iters; ++outer) {
        codes = encode_all(xs, D, cfg, &codes);  // warm start keeps this a descent step

        // Row-block least squares: A = C^T C, B = C^T X.
        std::vector<double> A(static_cast<size_t>(l) * l, 0.0);
        std::vector<double> B(static_cast<size_t>(l) * d, 0.0);
#pragma omp parallel for schedule(static)
        for (int j = 0; j < l; ++j) {
            double* Aj = A.data() + static_cast<size_t>(j) * l;
            double* Bj = B.data() + static_cast<size_t>(j) * d;
            for (size_t i = 0; i < xs.size(); ++i) {
                const double cij = codes[i][j];
                if (cij == 0.0) continue;
                const auto& ci = codes[i];
                for (int k = 0; k < l; ++k) Aj[k] += cij * ci[k];
                const auto& x = xs[i];
                for (int t = 0; t < d; ++t) Bj[t] += cij * x[t];
            }
        }
        std::vector<double> u(static_cast<size_t>(d));
        for (int j = 0; j < l; ++j) {
            const double ajj = A[static_cast<size_t>(j) * l + j];
            if (ajj <= 1e-12) continue;  // unused atom keeps its previous value
            const double* Aj = A.data() + static_cast<size_t>(j) * l;
            const double* Bj = B.data() + static_cast<size_t>(j) * d;
            for (int t = 0; t < d; ++t) u[t] = Bj[t];
            for (int k = 0; k < l; ++k) {
                const double ajk = Aj[k];
                if (ajk == 0.0) continue;
                const double* rk = D.row(k);
                for (int t = 0; t < d; ++t) u[t] -= ajk * rk[t];
            }
            double n2 = 0.0;
            double* rj = D.row(j);
            for (int t = 0; t < d; ++t) {
                u[t] = rj[t] + u[t] / ajj;
                n2 += u[t] * u[t];
            }
            const double scale = n2 > 1.0 ? 1.0 / std::sqrt(n2) : 1.0;
            for (int t = 0; t < d; ++t) rj[t] = u[t] * scale;
        }

        const double obj = coding_objective(xs, codes, D, cfg.lambda1);
        res.objective_per_iteration.push_back(obj);
        res.iterations = outer + 1;
        if (outer > 0 && prev_obj - obj < cfg.encode_tolerance * std::max(prev_obj, 1e-300)) break;
        prev_obj = obj;
    }
    res.dictionary = std::move(D);
    res.codes = std::move(codes);
    return res;
}

void save_dictionary(const std::string& path, const Dictionary& D, const SparseCodingConfig& cfg,
                     int iterations) {
    D.validate();
    std::string s;
    s += "GDIC";
    binio::put_u32le(s, static_cast<uint32_t>(D.l));
    binio::put_u32le(s, static_cast<uint32_t>(D.d));
    std::vector<float> row(static_cast<size_t>(D.d));
    for (int j = 0; j < D.l; ++j) {
        for (int t = 0; t < D.d; ++t) row[t] = static_cast<float>(D.row(j)[t]);
        // f32 rounding can nudge a unit-norm row past the bound; shrink until safe
        for (;;) {
            double n2 = 0.0;
            for (float v : row) n2 += static_cast<double>(v) * v;
            if (n2 <= 1.0 + 1e-9) break;
            for (float& v : row) v = static_cast<float>(v * (1.0 - 1e-7));
        }
        for (float v : row) binio::put_f32le(s, v);
    }
    write_file_atomic(path, s);

    nlohmann::json side;
    side["lambda1"] = cfg.lambda1;
    side["seed"] = cfg.seed;
    side["iterations"] = iterations;
    write_file_atomic(path + ".json", side.dump(2) + "\n");
}

Dictionary load_dictionary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    binio::expect_magic(in, "GDIC", path);
    Dictionary D;
    D.l = static_cast<int>(binio::get_u32le(in, "GDIC codeword count"));
    D.d = static_cast<int>(binio::get_u32le(in, "GDIC dimension"));
    if (D.l <= 0 || D.d <= 0) throw FormatError("'" + path + "' has invalid dimensions");
    D.rows.resize(static_cast<size_t>(D.l) * D.d);
    for (double& v : D.rows) v = binio::get_f32le(in, "GDIC entry");
    D.validate();
    return D;
}

namespace reference {

std::vector<double> encode(const std::vector<double>& x, const Dictionary& D,
                           const SparseCodingConfig& cfg) {
    check_sample_dim(x, D);
    const int l = D.l, d = D.d;
    const double thr = cfg.lambda1 / 2.0;

    std::vector<double> norm2(static_cast<size_t>(l));
    for (int j = 0; j < l; ++j) {
        double s = 0.0;
        const double* rj = D.row(j);
        for (int t = 0; t < d; ++t) s += rj[t] * rj[t];
        norm2[j] = s;
    }

    // Same coordinate updates as encode(), derived through the explicit
    // residual r = x - cD instead of the Gram matrix.
    std::vector<double> c(static_cast<size_t>(l), 0.0), r(x);
    for (int sweep = 0; sweep < cfg.max_encode_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (int j = 0; j < l; ++j) {
            if (norm2[j] <= 1e-12) continue;
            const double* rj = D.row(j);
            double dot = 0.0;
            for (int t = 0; t < d; ++t) dot += r[t] * rj[t];
            const double rho = dot + c[j] * norm2[j];
            const double next = soft_threshold(rho, thr) / norm2[j];
            const double delta = next - c[j];
            if (delta != 0.0) {
                for (int t = 0; t < d; ++t) r[t] -= delta * rj[t];
                c[j] = next;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        if (max_delta < cfg.encode_tolerance) break;
    }
    return c;
}

}  // namespace reference

}  // namespace fixlab
