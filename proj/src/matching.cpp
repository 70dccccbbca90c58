#include "refbench/matching.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "refbench/textnorm.hpp"

namespace refbench {

namespace {

constexpr double kTieEps = 1e-9;

std::vector<std::vector<char32_t>> normalize_all(const std::vector<std::string>& xs) {
    std::vector<std::vector<char32_t>> out(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) out[i] = normalize_to_codepoints(xs[i]);
    return out;
}

// Shortest-augmenting-path assignment with potentials, minimizing cost.
// Expects rows <= cols; returns for each row its assigned column.
std::vector<int> solve_min_cost(const std::vector<double>& cost, int rows, int cols) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
    std::vector<int> match(cols + 1, 0);  // 1-based row matched to column, 0 = free
    std::vector<int> way(cols + 1, 0);
    for (int i = 1; i <= rows; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(cols + 1, inf);
        std::vector<char> used(cols + 1, 0);
        do {
            used[j0] = 1;
            int i0 = match[j0], j1 = -1;
            double delta = inf;
            for (int j = 1; j <= cols; ++j) {
                if (used[j]) continue;
                double cur = cost[(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= cols; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(rows, -1);
    for (int j = 1; j <= cols; ++j)
        if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

// Max-total assignment over an arbitrary rectangle; fills row_to_col with
// -1 for rows left out (only possible when rows > cols). Returns the total.
double solve_max(const SimilarityMatrix& m, std::vector<int>& row_to_col) {
    int rows = static_cast<int>(m.rows), cols = static_cast<int>(m.cols);
    row_to_col.assign(rows, -1);
    if (rows == 0 || cols == 0) return 0.0;
    if (rows <= cols) {
        std::vector<double> cost(m.values.size());
        for (size_t k = 0; k < m.values.size(); ++k) cost[k] = -m.values[k];
        row_to_col = solve_min_cost(cost, rows, cols);
    } else {
        std::vector<double> cost(m.values.size());
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i)
                cost[j * rows + i] = -m.at(i, j);
        std::vector<int> col_to_row = solve_min_cost(cost, cols, rows);
        for (int j = 0; j < cols; ++j)
            if (col_to_row[j] >= 0) row_to_col[col_to_row[j]] = j;
    }
    double total = 0.0;
    for (int i = 0; i < rows; ++i)
        if (row_to_col[i] >= 0) total += m.at(i, row_to_col[i]);
    return total;
}

double solve_max_sub(const SimilarityMatrix& m, const std::vector<size_t>& rows,
                     const std::vector<size_t>& cols, std::vector<int>* row_to_col_out) {
    SimilarityMatrix sub(rows.size(), cols.size());
    for (size_t a = 0; a < rows.size(); ++a)
        for (size_t b = 0; b < cols.size(); ++b)
            sub.at(a, b) = m.at(rows[a], cols[b]);
    std::vector<int> assign;
    double total = solve_max(sub, assign);
    if (row_to_col_out) *row_to_col_out = assign;
    return total;
}

Pairing finish_pairing(const SimilarityMatrix& m, const std::vector<int>& row_to_col) {
    Pairing out;
    std::vector<char> pred_used(m.cols, 0);
    for (size_t i = 0; i < m.rows; ++i) {
        int j = row_to_col[i];
        if (j >= 0 && m.at(i, j) > 0.0) {
            out.pairs.push_back({i, static_cast<size_t>(j), m.at(i, j)});
            pred_used[j] = 1;
        } else {
            out.unmatched_gold.push_back(i);
        }
    }
    for (size_t j = 0; j < m.cols; ++j)
        if (!pred_used[j]) out.unmatched_pred.push_back(j);
    return out;
}

}  // namespace

SimilarityMatrix similarity_matrix_serial(const std::vector<std::string>& gold,
                                          const std::vector<std::string>& pred) {
    auto g = normalize_all(gold);
    auto p = normalize_all(pred);
    SimilarityMatrix m(gold.size(), pred.size());
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(m.values.size()); ++idx) {
        size_t i = static_cast<size_t>(idx) / m.cols;
        size_t j = static_cast<size_t>(idx) % m.cols;
        m.values[idx] = codepoint_similarity(g[i], p[j]);
    }
    return m;
}

SimilarityMatrix similarity_matrix(const std::vector<std::string>& gold,
                                   const std::vector<std::string>& pred) {
    auto g = normalize_all(gold);
    auto p = normalize_all(pred);
    SimilarityMatrix m(gold.size(), pred.size());
    const std::int64_t n = static_cast<std::int64_t>(m.values.size());
    // Each cell is independent, so the parallel fill is bit-identical to
    // the serial reference.
#pragma omp parallel for schedule(dynamic, 16) if (n >= 256)
    for (std::int64_t idx = 0; idx < n; ++idx) {
        size_t i = static_cast<size_t>(idx) / m.cols;
        size_t j = static_cast<size_t>(idx) % m.cols;
        m.values[idx] = codepoint_similarity(g[i], p[j]);
    }
    return m;
}

Pairing optimal_assignment(const SimilarityMatrix& m) {
    if (m.rows == 0 || m.cols == 0) {
        Pairing out;
        for (size_t i = 0; i < m.rows; ++i) out.unmatched_gold.push_back(i);
        for (size_t j = 0; j < m.cols; ++j) out.unmatched_pred.push_back(j);
        return out;
    }

    std::vector<int> base_assign;
    const double best_total = solve_max(m, base_assign);

    // Lexicographic refinement: walk gold indices in order and fix, for
    // each, the smallest pred index whose choice still completes to the
    // optimal total. Candidates are filtered by an upper bound (sum of
    // remaining row maxima) before paying for an exact sub-solve.
    std::vector<int> final_assign(m.rows, -1);
    std::vector<size_t> avail;
    for (size_t j = 0; j < m.cols; ++j) avail.push_back(j);
    double fixed_sum = 0.0;

    // base_assign stays a witness of an optimal completion for the suffix.
    for (size_t i = 0; i < m.rows; ++i) {
        int witness = base_assign[i];
        if (witness >= 0 && m.at(i, witness) <= 0.0) witness = -1;

        // Row maxima over available preds for the remaining golds.
        double max_sum = 0.0;
        std::vector<double> adjust(m.cols, 0.0);  // per-pred exclusion delta
        for (size_t k = i + 1; k < m.rows; ++k) {
            double best = 0.0, second = 0.0;
            size_t best_j = m.cols;
            for (size_t j : avail) {
                double s = m.at(k, j);
                if (s > best) {
                    second = best;
                    best = s;
                    best_j = j;
                } else if (s > second) {
                    second = s;
                }
            }
            max_sum += best;
            if (best_j < m.cols) adjust[best_j] += second - best;
        }

        int chosen = -1;
        for (size_t j : avail) {
            if (witness >= 0 && static_cast<int>(j) >= witness) {
                chosen = witness;
                break;
            }
            double sim = m.at(i, j);
            if (sim <= 0.0) continue;
            double bound = fixed_sum + sim + max_sum + adjust[j];
            if (bound < best_total - kTieEps) continue;
            std::vector<size_t> rest_rows, rest_cols;
            for (size_t k = i + 1; k < m.rows; ++k) rest_rows.push_back(k);
            for (size_t c : avail)
                if (c != j) rest_cols.push_back(c);
            std::vector<int> sub_assign;
            double sub_total = solve_max_sub(m, rest_rows, rest_cols, &sub_assign);
            if (fixed_sum + sim + sub_total < best_total - kTieEps) continue;
            chosen = static_cast<int>(j);
            // Adopt the sub-solution as the new witness for the suffix.
            for (size_t k = i + 1; k < m.rows; ++k) {
                int sj = sub_assign[k - i - 1];
                base_assign[k] = sj >= 0 ? static_cast<int>(rest_cols[sj]) : -1;
            }
            break;
        }
        final_assign[i] = chosen;
        if (chosen >= 0) {
            fixed_sum += m.at(i, chosen);
            avail.erase(std::find(avail.begin(), avail.end(), static_cast<size_t>(chosen)));
        }
    }
    return finish_pairing(m, final_assign);
}

Pairing brute_force_assignment(const SimilarityMatrix& m) {
    if (std::max(m.rows, m.cols) > 8)
        throw std::invalid_argument("brute_force_assignment: size exceeds 8");
    if (m.rows == 0 || m.cols == 0) return optimal_assignment(m);

    const bool by_rows = m.rows <= m.cols;
    const size_t small = by_rows ? m.rows : m.cols;
    const size_t large = by_rows ? m.cols : m.rows;

    std::vector<int> current(small, -1), best;
    std::vector<char> used(large, 0);
    double best_total = -1.0;
    std::vector<std::pair<size_t, size_t>> best_pairs;

    auto pair_list = [&](const std::vector<int>& assign) {
        std::vector<std::pair<size_t, size_t>> pairs;
        for (size_t i = 0; i < m.rows; ++i) {
            int j = by_rows ? assign[i] : -1;
            if (!by_rows)
                for (size_t c = 0; c < small; ++c)
                    if (assign[c] == static_cast<int>(i)) j = static_cast<int>(c);
            if (j >= 0 && m.at(i, j) > 0.0) pairs.emplace_back(i, j);
        }
        return pairs;
    };

    auto consider = [&]() {
        double total = 0.0;
        for (size_t a = 0; a < small; ++a) {
            size_t i = by_rows ? a : current[a];
            size_t j = by_rows ? current[a] : a;
            total += m.at(i, j);
        }
        auto pairs = pair_list(current);
        if (total > best_total + 1e-12) {
            best_total = total;
            best = current;
            best_pairs = pairs;
        } else if (total > best_total - 1e-12 && pairs < best_pairs) {
            best = current;
            best_pairs = pairs;
        }
    };

    auto recurse = [&](auto&& self, size_t a) -> void {
        if (a == small) {
            consider();
            return;
        }
        for (size_t b = 0; b < large; ++b) {
            if (used[b]) continue;
            used[b] = 1;
            current[a] = static_cast<int>(b);
            self(self, a + 1);
            used[b] = 0;
        }
    };
    recurse(recurse, 0);

    std::vector<int> row_to_col(m.rows, -1);
    for (size_t a = 0; a < small; ++a) {
        size_t i = by_rows ? a : best[a];
        size_t j = by_rows ? best[a] : a;
        row_to_col[i] = static_cast<int>(j);
    }
    return finish_pairing(m, row_to_col);
}

double f1_of(double precision, double recall) {
    double s = precision + recall;
    return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

ExtractionScore score_extraction(const SimilarityMatrix& m, const ExtractionConfig& cfg) {
    Pairing pairing = optimal_assignment(m);
    ExtractionScore s;
    s.n_gold = m.rows;
    s.n_pred = m.cols;
    s.n_matched = pairing.pairs.size();
    double sim_sum = pairing.total();
    if (cfg.binary_tp_threshold) {
        s.tp = 0.0;
        for (const auto& p : pairing.pairs)
            if (p.similarity >= *cfg.binary_tp_threshold) s.tp += 1.0;
    } else {
        s.tp = sim_sum;
    }
    if (s.n_gold == 0 && s.n_pred == 0) {
        s.precision = s.recall = 1.0;
    } else {
        s.precision = s.n_pred > 0 ? s.tp / static_cast<double>(s.n_pred) : 0.0;
        s.recall = s.n_gold > 0 ? s.tp / static_cast<double>(s.n_gold) : 0.0;
    }
    s.f1 = f1_of(s.precision, s.recall);
    if (s.n_matched > 0) s.avg_sim = sim_sum / static_cast<double>(s.n_matched);
    return s;
}

ExtractionScore score_extraction(const std::vector<std::string>& gold,
                                 const std::vector<std::string>& pred,
                                 const ExtractionConfig& cfg) {
    return score_extraction(similarity_matrix(gold, pred), cfg);
}

}  // namespace refbench
