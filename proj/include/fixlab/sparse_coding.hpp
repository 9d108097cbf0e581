#ifndef FIXLAB_SPARSE_CODING_HPP
#define FIXLAB_SPARSE_CODING_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace fixlab {

// Codeword matrix, one codeword per row; every row satisfies
// |row|^2 <= 1 (+1e-9).
struct Dictionary {
    int l = 0; // codewords
    int d = 0; // descriptor dimension
    std::vector<double> rows; // l*d row-major

    const double* row(int j) const { return rows.data() + static_cast<size_t>(j) * d; }
    double* row(int j) { return rows.data() + static_cast<size_t>(j) * d; }
    void validate() const; // throws ValidationError on a norm violation
};

struct SparseCodingConfig {
    double lambda1 = 0.15;
    int max_outer_iters = 15;
    double encode_tolerance = 1e-7;
    int max_encode_sweeps = 1000;
    uint64_t seed = 1;
};

// min_c |x - cD|^2 + lambda1*|c|_1 by cyclic coordinate descent with
// soft thresholding (fixed order 0..l-1), warm-started from `warm` when
// given, iterated until the largest coordinate change drops below
// encode_tolerance. Throws ValidationError on a dimension mismatch.
std::vector<double> encode(const std::vector<double>& x, const Dictionary& D,
                           const SparseCodingConfig& cfg,
                           const std::vector<double>* warm = nullptr);

// encode() for a batch; OpenMP-parallel across samples (outputs are
// independent, so results do not depend on the thread count).
std::vector<std::vector<double>> encode_all(const std::vector<std::vector<double>>& xs,
                                            const Dictionary& D, const SparseCodingConfig& cfg,
                                            const std::vector<std::vector<double>>* warm = nullptr);

// |X - CD|_F^2 + lambda1 * |C|_1
double coding_objective(const std::vector<std::vector<double>>& xs,
                        const std::vector<std::vector<double>>& codes, const Dictionary& D,
                        double lambda1);

struct LearnResult {
    Dictionary dictionary;
    std::vector<std::vector<double>> codes;
    std::vector<double> objective_per_iteration; // after each alternation
    int iterations = 0;
};

// Alternating minimization: (a) encode all samples (warm-started),
// (b) block coordinate descent over dictionary rows, each row solved by
// least squares with the others fixed and projected onto the unit ball.
// Both half-steps never increase the objective. Initialization draws l
// distinct samples (seeded) projected onto the unit ball. Rows whose
// atom is unused keep their previous value.
// Throws ValidationError when |X| < l, DegenerateError when X is all
// zeros.
LearnResult learn_dictionary(const std::vector<std::vector<double>>& xs, int l,
                             const SparseCodingConfig& cfg);

// Dictionary file "GDIC": u32 l, u32 d, l*d f32 LE, plus a JSON sidecar
// (<path>.json) with lambda1, seed, iterations.
void save_dictionary(const std::string& path, const Dictionary& D,
                     const SparseCodingConfig& cfg, int iterations);
Dictionary load_dictionary(const std::string& path);

namespace reference {
// Residual-recomputing coordinate descent (no Gram precomputation);
// serial. Converges to the same objective as encode().
std::vector<double> encode(const std::vector<double>& x, const Dictionary& D,
                           const SparseCodingConfig& cfg);
}  // namespace reference

}  // namespace fixlab

#endif
