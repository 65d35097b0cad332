#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "revlab/errors.hpp"
#include "revlab/rng.hpp"

namespace revlab {

// ---------------------------------------------------------------------------
// Special functions. No statistics runtime is assumed, so the F/t/normal tail
// probabilities are built on the regularized incomplete beta function,
// evaluated with a modified Lentz continued fraction (relative error well
// below 1e-10 across the df ranges used here).
// ---------------------------------------------------------------------------

namespace detail {

// Continued-fraction kernel for the regularized incomplete beta function.
inline double ibeta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  throw DataError("ibeta: continued fraction did not converge (a=" + std::to_string(a) +
                  ", b=" + std::to_string(b) + ", x=" + std::to_string(x) + ")");
}

}  // namespace detail

// Regularized incomplete beta function I_x(a, b).
inline double ibeta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DataError("ibeta: shape parameters must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                     a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(log_front);
  // The continued fraction converges fastest below the distribution mode;
  // above it, evaluate the mirrored tail and subtract from one.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * detail::ibeta_cf(a, b, x) / a;
  }
  return 1.0 - front * detail::ibeta_cf(b, a, 1.0 - x) / b;
}

// Upper tail P(F > f) of the F distribution with (df1, df2) degrees of freedom.
inline double f_sf(double f, double df1, double df2) {
  if (!(df1 > 0.0) || !(df2 > 0.0)) {
    throw DataError("f_sf: degrees of freedom must be positive");
  }
  if (std::isinf(f)) return 0.0;
  if (f <= 0.0) return 1.0;
  return ibeta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

// Upper tail P(T > t) of Student's t distribution (one-sided).
inline double t_sf(double t, double df) {
  if (!(df > 0.0)) throw DataError("t_sf: degrees of freedom must be positive");
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  double tail = 0.5 * ibeta(df / 2.0, 0.5, df / (df + t * t));
  return t >= 0.0 ? tail : 1.0 - tail;
}

// Upper tail P(Z > z) of the standard normal distribution.
inline double norm_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// ---------------------------------------------------------------------------
// Effect sizes.
// ---------------------------------------------------------------------------

// Partial eta squared from an F statistic: F*df1 / (F*df1 + df2).
inline double partial_eta_sq_from_f(double f, double df1, double df2) {
  if (std::isinf(f)) return 1.0;
  if (f <= 0.0) return 0.0;
  return f * df1 / (f * df1 + df2);
}

// Cohen's f from partial eta squared: sqrt(eta / (1 - eta)).
inline double cohens_f_from_eta(double eta) {
  if (eta >= 1.0) return std::numeric_limits<double>::infinity();
  if (eta <= 0.0) return 0.0;
  return std::sqrt(eta / (1.0 - eta));
}

// ---------------------------------------------------------------------------
// Two-way repeated-measures ANOVA over a complete subjects x models x
// encodings score matrix. Subjects (seeds) are the blocking factor; each
// within-subject effect is tested against its own subject-interaction error
// term.
// ---------------------------------------------------------------------------

struct ScoreMatrix {
  size_t subjects = 0;
  size_t models = 0;
  size_t encodings = 0;
  // Flattened subject-major storage: index = (s * models + m) * encodings + e.
  std::vector<double> values;
  // Optional axis labels (filled by the report builders; empty is valid).
  std::vector<std::string> model_names;
  std::vector<std::string> encoding_names;
  std::vector<int64_t> seed_ids;

  double& at(size_t s, size_t m, size_t e) {
    return values[(s * models + m) * encodings + e];
  }
  double at(size_t s, size_t m, size_t e) const {
    return values[(s * models + m) * encodings + e];
  }

  static ScoreMatrix zeros(size_t subjects, size_t models, size_t encodings) {
    ScoreMatrix mat;
    mat.subjects = subjects;
    mat.models = models;
    mat.encodings = encodings;
    mat.values.assign(subjects * models * encodings, 0.0);
    return mat;
  }

  void validate() const {
    if (subjects < 2) {
      throw DataError("score matrix: need at least 2 subjects, got " + std::to_string(subjects));
    }
    if (models == 0 || encodings == 0) {
      throw DataError("score matrix: factor sizes must be positive");
    }
    if (values.size() != subjects * models * encodings) {
      throw DataError("score matrix: incomplete, " + std::to_string(values.size()) + " cells for " +
                      std::to_string(subjects) + "x" + std::to_string(models) + "x" +
                      std::to_string(encodings));
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw DataError("score matrix: non-finite cell value");
    }
  }
};

struct AnovaEffect {
  std::string name;
  double ss_effect = 0.0;
  double ss_error = 0.0;
  double f_stat = 0.0;
  int df_num = 0;
  int df_den = 0;
  double p = 1.0;
  double partial_eta_sq = 0.0;
  double cohens_f = 0.0;
  // Sphericity-adjusted values, present only when the Greenhouse-Geisser
  // option is requested.
  std::optional<double> gg_epsilon;
  std::optional<double> gg_p;
};

namespace detail {

// Orthonormal Helmert-style contrast matrix, (k-1) rows by k columns: row i
// compares the mean of the first i levels against level i+1.
inline std::vector<std::vector<double>> orthonormal_contrasts(size_t k) {
  std::vector<std::vector<double>> rows(k - 1, std::vector<double>(k, 0.0));
  for (size_t i = 1; i < k; ++i) {
    double norm = std::sqrt(static_cast<double>(i) * (static_cast<double>(i) + 1.0));
    for (size_t j = 0; j < i; ++j) rows[i - 1][j] = 1.0 / norm;
    rows[i - 1][i] = -static_cast<double>(i) / norm;
  }
  return rows;
}

// Greenhouse-Geisser epsilon for one effect: with A = C * Sigma * C' (Sigma
// the between-subject covariance of the flattened cells, C the effect's
// orthonormal contrast matrix), epsilon = tr(A)^2 / (d * tr(A*A)), clamped to
// its feasible range [1/d, 1].
inline double gg_epsilon(const std::vector<std::vector<double>>& contrast,
                         const std::vector<std::vector<double>>& sigma) {
  size_t d = contrast.size();
  size_t cells = sigma.size();
  // A = C * Sigma * C^T, built via the intermediate product C * Sigma.
  std::vector<std::vector<double>> cs(d, std::vector<double>(cells, 0.0));
  for (size_t r = 0; r < d; ++r)
    for (size_t j = 0; j < cells; ++j) {
      double acc = 0.0;
      for (size_t k = 0; k < cells; ++k) acc += contrast[r][k] * sigma[k][j];
      cs[r][j] = acc;
    }
  std::vector<std::vector<double>> a(d, std::vector<double>(d, 0.0));
  for (size_t r = 0; r < d; ++r)
    for (size_t c = 0; c < d; ++c) {
      double acc = 0.0;
      for (size_t j = 0; j < cells; ++j) acc += cs[r][j] * contrast[c][j];
      a[r][c] = acc;
    }
  double trace = 0.0;
  double trace_sq = 0.0;
  for (size_t r = 0; r < d; ++r) {
    trace += a[r][r];
    for (size_t c = 0; c < d; ++c) trace_sq += a[r][c] * a[c][r];
  }
  if (trace_sq <= 0.0) return 1.0;
  double eps = trace * trace / (static_cast<double>(d) * trace_sq);
  return std::clamp(eps, 1.0 / static_cast<double>(d), 1.0);
}

}  // namespace detail

// Runs the two-way repeated-measures ANOVA and returns the three effects in
// order: model, encoding, model:encoding. When `greenhouse_geisser` is set,
// each effect additionally carries a sphericity epsilon and the p-value
// recomputed at epsilon-scaled degrees of freedom (off by default; the
// primary report uses unadjusted df).
inline std::vector<AnovaEffect> rm_anova(const ScoreMatrix& mat, bool greenhouse_geisser = false) {
  mat.validate();
  const size_t S = mat.subjects, M = mat.models, E = mat.encodings;
  if (greenhouse_geisser && (M < 2 || E < 2)) {
    throw DataError("rm_anova: sphericity adjustment needs at least 2 levels per factor");
  }
  const double n = static_cast<double>(S * M * E);

  double grand = 0.0;
  for (double v : mat.values) grand += v;
  grand /= n;

  std::vector<double> mean_s(S, 0.0), mean_m(M, 0.0), mean_e(E, 0.0);
  std::vector<std::vector<double>> mean_sm(S, std::vector<double>(M, 0.0));
  std::vector<std::vector<double>> mean_se(S, std::vector<double>(E, 0.0));
  std::vector<std::vector<double>> mean_me(M, std::vector<double>(E, 0.0));
  for (size_t s = 0; s < S; ++s)
    for (size_t m = 0; m < M; ++m)
      for (size_t e = 0; e < E; ++e) {
        double v = mat.at(s, m, e);
        mean_s[s] += v;
        mean_m[m] += v;
        mean_e[e] += v;
        mean_sm[s][m] += v;
        mean_se[s][e] += v;
        mean_me[m][e] += v;
      }
  for (double& v : mean_s) v /= static_cast<double>(M * E);
  for (double& v : mean_m) v /= static_cast<double>(S * E);
  for (double& v : mean_e) v /= static_cast<double>(S * M);
  for (auto& row : mean_sm)
    for (double& v : row) v /= static_cast<double>(E);
  for (auto& row : mean_se)
    for (double& v : row) v /= static_cast<double>(M);
  for (auto& row : mean_me)
    for (double& v : row) v /= static_cast<double>(S);

  double ss_a = 0.0, ss_b = 0.0, ss_ab = 0.0;
  for (size_t m = 0; m < M; ++m) ss_a += (mean_m[m] - grand) * (mean_m[m] - grand);
  ss_a *= static_cast<double>(S * E);
  for (size_t e = 0; e < E; ++e) ss_b += (mean_e[e] - grand) * (mean_e[e] - grand);
  ss_b *= static_cast<double>(S * M);
  for (size_t m = 0; m < M; ++m)
    for (size_t e = 0; e < E; ++e) {
      double d = mean_me[m][e] - mean_m[m] - mean_e[e] + grand;
      ss_ab += d * d;
    }
  ss_ab *= static_cast<double>(S);

  double ss_as = 0.0, ss_bs = 0.0, ss_abs = 0.0;
  for (size_t s = 0; s < S; ++s)
    for (size_t m = 0; m < M; ++m) {
      double d = mean_sm[s][m] - mean_s[s] - mean_m[m] + grand;
      ss_as += d * d;
    }
  ss_as *= static_cast<double>(E);
  for (size_t s = 0; s < S; ++s)
    for (size_t e = 0; e < E; ++e) {
      double d = mean_se[s][e] - mean_s[s] - mean_e[e] + grand;
      ss_bs += d * d;
    }
  ss_bs *= static_cast<double>(M);
  for (size_t s = 0; s < S; ++s)
    for (size_t m = 0; m < M; ++m)
      for (size_t e = 0; e < E; ++e) {
        double d = mat.at(s, m, e) - mean_sm[s][m] - mean_se[s][e] - mean_me[m][e] + mean_s[s] +
                   mean_m[m] + mean_e[e] - grand;
        ss_abs += d * d;
      }

  // Sums of squares at floating-point cancellation scale are snapped to zero;
  // otherwise an exactly additive (zero-noise) design would produce a
  // meaningless ratio of two rounding residues instead of the F = 0 it
  // mathematically has. The floor scales with the squared data magnitude
  // (not the total variation, which is itself noise for a constant matrix):
  // residues sit near n * (eps * |v|)^2 ~ 1e-30 * v^2 * n, ten orders below
  // this threshold, while any distinguishable real effect sits far above it.
  double vmax_sq = 0.0;
  for (double v : mat.values) vmax_sq = std::max(vmax_sq, v * v);
  const double ss_floor = 1e-20 * n * vmax_sq;

  auto make_effect = [ss_floor](std::string name, double ss_eff, double ss_err, int df1,
                                int df2) {
    if (ss_eff <= ss_floor) ss_eff = 0.0;
    if (ss_err <= ss_floor) ss_err = 0.0;
    AnovaEffect eff;
    eff.name = std::move(name);
    eff.ss_effect = ss_eff;
    eff.ss_error = ss_err;
    eff.df_num = df1;
    eff.df_den = df2;
    double ms_err = ss_err / df2;
    if (ms_err == 0.0) {
      if (ss_eff == 0.0) {
        eff.f_stat = 0.0;
        eff.p = 1.0;
      } else {
        eff.f_stat = std::numeric_limits<double>::infinity();
        eff.p = 0.0;
      }
    } else {
      eff.f_stat = (ss_eff / df1) / ms_err;
      eff.p = f_sf(eff.f_stat, df1, df2);
    }
    eff.partial_eta_sq = partial_eta_sq_from_f(eff.f_stat, df1, df2);
    eff.cohens_f = cohens_f_from_eta(eff.partial_eta_sq);
    return eff;
  };

  const int sm1 = static_cast<int>(S) - 1;
  std::vector<AnovaEffect> effects;
  effects.push_back(make_effect("model", ss_a, ss_as, static_cast<int>(M) - 1,
                                (static_cast<int>(M) - 1) * sm1));
  effects.push_back(make_effect("encoding", ss_b, ss_bs, static_cast<int>(E) - 1,
                                (static_cast<int>(E) - 1) * sm1));
  effects.push_back(make_effect("model:encoding", ss_ab, ss_abs,
                                (static_cast<int>(M) - 1) * (static_cast<int>(E) - 1),
                                (static_cast<int>(M) - 1) * (static_cast<int>(E) - 1) * sm1));

  if (greenhouse_geisser) {
    // Between-subject covariance of the M*E flattened cells (denominator S-1).
    size_t cells = M * E;
    std::vector<double> cell_mean(cells, 0.0);
    for (size_t s = 0; s < S; ++s)
      for (size_t j = 0; j < cells; ++j) cell_mean[j] += mat.values[s * cells + j];
    for (double& v : cell_mean) v /= static_cast<double>(S);
    std::vector<std::vector<double>> sigma(cells, std::vector<double>(cells, 0.0));
    for (size_t s = 0; s < S; ++s)
      for (size_t j = 0; j < cells; ++j) {
        double dj = mat.values[s * cells + j] - cell_mean[j];
        for (size_t k = 0; k < cells; ++k) {
          sigma[j][k] += dj * (mat.values[s * cells + k] - cell_mean[k]);
        }
      }
    for (auto& row : sigma)
      for (double& v : row) v /= static_cast<double>(S - 1);

    auto qm = detail::orthonormal_contrasts(M);
    auto qe = detail::orthonormal_contrasts(E);
    double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(M));
    double inv_sqrt_e = 1.0 / std::sqrt(static_cast<double>(E));
    // Effect contrasts over the flattened (model-major) cell axis.
    std::vector<std::vector<double>> ca(M - 1, std::vector<double>(cells, 0.0));
    for (size_t r = 0; r + 1 < M; ++r)
      for (size_t m = 0; m < M; ++m)
        for (size_t e = 0; e < E; ++e) ca[r][m * E + e] = qm[r][m] * inv_sqrt_e;
    std::vector<std::vector<double>> cb(E - 1, std::vector<double>(cells, 0.0));
    for (size_t r = 0; r + 1 < E; ++r)
      for (size_t m = 0; m < M; ++m)
        for (size_t e = 0; e < E; ++e) cb[r][m * E + e] = inv_sqrt_m * qe[r][e];
    std::vector<std::vector<double>> cab((M - 1) * (E - 1), std::vector<double>(cells, 0.0));
    for (size_t rm = 0; rm + 1 < M; ++rm)
      for (size_t re = 0; re + 1 < E; ++re)
        for (size_t m = 0; m < M; ++m)
          for (size_t e = 0; e < E; ++e) {
            cab[rm * (E - 1) + re][m * E + e] = qm[rm][m] * qe[re][e];
          }

    const std::vector<std::vector<double>>* contrasts[3] = {&ca, &cb, &cab};
    for (size_t i = 0; i < 3; ++i) {
      double eps = detail::gg_epsilon(*contrasts[i], sigma);
      effects[i].gg_epsilon = eps;
      if (std::isinf(effects[i].f_stat)) {
        effects[i].gg_p = 0.0;
      } else if (effects[i].f_stat == 0.0) {
        effects[i].gg_p = 1.0;
      } else {
        effects[i].gg_p = f_sf(effects[i].f_stat, eps * effects[i].df_num,
                               eps * effects[i].df_den);
      }
    }
  }

  return effects;
}

// ---------------------------------------------------------------------------
// Holm step-down multiple-comparison adjustment.
// ---------------------------------------------------------------------------

inline std::vector<double> holm(const std::vector<double>& p_values) {
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DataError("holm: p-value outside [0, 1]: " + std::to_string(p));
    }
  }
  size_t m = p_values.size();
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m, 0.0);
  double running = 0.0;
  for (size_t rank = 0; rank < m; ++rank) {
    double scaled = static_cast<double>(m - rank) * p_values[order[rank]];
    running = std::max(running, scaled);
    adjusted[order[rank]] = std::min(1.0, running);
  }
  return adjusted;
}

// ---------------------------------------------------------------------------
// Paired tests: one-sided paired t, Wilcoxon signed rank, Cohen's d_z, and a
// percentile bootstrap confidence interval on the mean difference.
// ---------------------------------------------------------------------------

struct PairedTestResult {
  size_t n = 0;
  double mean_delta = 0.0;
  double sd_delta = 0.0;
  double t = 0.0;
  double p_one_sided = 1.0;
  double wilcoxon_stat = 0.0;
  double wilcoxon_p = 1.0;
  bool wilcoxon_exact = true;
  double cohens_dz = 0.0;
  bool dz_undefined = false;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  // Family-adjusted p-values; equal to the raw values until a report applies
  // the Holm correction across its family of tests.
  double p_holm = 1.0;
  double wilcoxon_p_holm = 1.0;
};

namespace detail {

// Midranks of |deltas| (zeros already removed): tied magnitudes share the
// average of the ranks they occupy.
inline std::vector<double> midranks(const std::vector<double>& magnitudes) {
  size_t n = magnitudes.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return magnitudes[a] < magnitudes[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && magnitudes[order[j]] == magnitudes[order[i]]) ++j;
    double shared = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k) ranks[order[k]] = shared;
    i = j;
  }
  return ranks;
}

struct WilcoxonResult {
  double stat = 0.0;
  double p = 1.0;
  bool exact = true;
};

// One-sided (greater) signed-rank test on paired differences. Zero deltas are
// dropped; tied magnitudes get midranks. For 12 or fewer effective points the
// p-value enumerates all sign assignments of the observed ranks exactly;
// larger samples use the normal approximation with continuity and tie
// corrections.
inline WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& deltas) {
  std::vector<double> nonzero;
  nonzero.reserve(deltas.size());
  for (double d : deltas) {
    if (d != 0.0) nonzero.push_back(d);
  }
  WilcoxonResult out;
  if (nonzero.empty()) {
    // Every pair tied: no evidence in either direction.
    out.stat = 0.0;
    out.p = 1.0;
    out.exact = true;
    return out;
  }
  size_t n = nonzero.size();
  std::vector<double> magnitudes(n);
  for (size_t i = 0; i < n; ++i) magnitudes[i] = std::fabs(nonzero[i]);
  std::vector<double> ranks = midranks(magnitudes);
  double w_plus = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (nonzero[i] > 0.0) w_plus += ranks[i];
  }
  out.stat = w_plus;

  if (n <= 12) {
    // Exact tail over all 2^n assignments of signs to the observed ranks.
    // Midranks are multiples of one half, so the partial sums are exact in
    // floating point and the >= comparison is safe.
    uint64_t assignments = uint64_t{1} << n;
    uint64_t at_least = 0;
    for (uint64_t mask = 0; mask < assignments; ++mask) {
      double w = 0.0;
      for (size_t i = 0; i < n; ++i) {
        if (mask & (uint64_t{1} << i)) w += ranks[i];
      }
      if (w >= w_plus) ++at_least;
    }
    out.p = static_cast<double>(at_least) / static_cast<double>(assignments);
    out.exact = true;
    return out;
  }

  double nn = static_cast<double>(n);
  double mean = nn * (nn + 1.0) / 4.0;
  double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
  // Tie correction: subtract (t^3 - t)/48 per group of tied magnitudes.
  size_t i = 0;
  std::vector<double> sorted_mag = magnitudes;
  std::sort(sorted_mag.begin(), sorted_mag.end());
  while (i < n) {
    size_t j = i;
    while (j < n && sorted_mag[j] == sorted_mag[i]) ++j;
    double t = static_cast<double>(j - i);
    var -= (t * t * t - t) / 48.0;
    i = j;
  }
  double z = (w_plus - mean - 0.5) / std::sqrt(var);
  out.p = norm_sf(z);
  out.exact = false;
  return out;
}

}  // namespace detail

// Paired comparison of two equal-length per-seed score series, testing the
// one-sided hypothesis mean(orig - pert) > 0. The bootstrap interval draws
// `resamples` resampled means; each resample derives its own generator from
// (seed, resample index) so the interval is independent of evaluation order.
inline PairedTestResult paired_tests(const std::vector<double>& orig,
                                     const std::vector<double>& pert, int resamples = 10000,
                                     uint64_t seed = 0) {
  if (orig.size() != pert.size()) {
    throw DataError("paired_tests: " + std::to_string(orig.size()) + " vs " +
                    std::to_string(pert.size()) + " values");
  }
  if (orig.size() < 2) throw DataError("paired_tests: need at least 2 pairs");
  if (resamples < 1) throw ConfigError("paired_tests: resamples must be positive");

  size_t n = orig.size();
  std::vector<double> delta(n);
  for (size_t i = 0; i < n; ++i) delta[i] = orig[i] - pert[i];

  PairedTestResult out;
  out.n = n;
  double mean = std::accumulate(delta.begin(), delta.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double d : delta) ss += (d - mean) * (d - mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));
  out.mean_delta = mean;
  out.sd_delta = sd;

  if (sd == 0.0) {
    // Constant differences: the t statistic degenerates and d_z is undefined.
    out.dz_undefined = true;
    out.cohens_dz = 0.0;
    if (mean > 0.0) {
      out.t = std::numeric_limits<double>::infinity();
      out.p_one_sided = 0.0;
    } else if (mean < 0.0) {
      out.t = -std::numeric_limits<double>::infinity();
      out.p_one_sided = 1.0;
    } else {
      out.t = 0.0;
      out.p_one_sided = 0.5;
    }
  } else {
    out.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    out.p_one_sided = t_sf(out.t, static_cast<double>(n - 1));
    out.cohens_dz = mean / sd;
    out.dz_undefined = false;
  }

  detail::WilcoxonResult w = detail::wilcoxon_signed_rank(delta);
  out.wilcoxon_stat = w.stat;
  out.wilcoxon_p = w.p;
  out.wilcoxon_exact = w.exact;

  std::vector<double> boot_means(static_cast<size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    SplitMix64 rng = derive_rng(seed, "resample:" + std::to_string(r));
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) acc += delta[rng.bounded(n)];
    boot_means[static_cast<size_t>(r)] = acc / static_cast<double>(n);
  }
  std::sort(boot_means.begin(), boot_means.end());
  size_t last = boot_means.size() - 1;
  size_t lo_idx = static_cast<size_t>(std::floor(0.025 * static_cast<double>(last)));
  size_t hi_idx = static_cast<size_t>(std::ceil(0.975 * static_cast<double>(last)));
  out.ci_lo = boot_means[lo_idx];
  out.ci_hi = boot_means[hi_idx];

  out.p_holm = out.p_one_sided;
  out.wilcoxon_p_holm = out.wilcoxon_p;
  return out;
}

// ---------------------------------------------------------------------------
// Perturbation-robustness report: one paired comparison per perturbation with
// percent change and family-wise Holm adjustment (t and Wilcoxon p-value
// families corrected separately).
// ---------------------------------------------------------------------------

struct PairedSeries {
  std::string name;
  std::vector<double> orig;
  std::vector<double> pert;
};

struct Stage2Row {
  std::string name;
  double mean_orig = 0.0;
  double mean_pert = 0.0;
  double percent_change = 0.0;
  PairedTestResult test;
};

inline std::vector<Stage2Row> stage2_report(const std::vector<PairedSeries>& series,
                                            int resamples = 10000, uint64_t seed = 0) {
  if (series.empty()) throw DataError("stage2: no perturbation series");
  size_t n = series.front().orig.size();
  for (const PairedSeries& s : series) {
    if (s.orig.size() != n || s.pert.size() != n) {
      throw DataError("stage2: series '" + s.name + "' has inconsistent seed count");
    }
  }

  std::vector<Stage2Row> rows;
  rows.reserve(series.size());
  for (const PairedSeries& s : series) {
    Stage2Row row;
    row.name = s.name;
    // Give each perturbation its own bootstrap stream, keyed by name so row
    // order does not change the intervals.
    uint64_t row_seed = derive_rng(seed, "stage2:" + s.name).next();
    row.test = paired_tests(s.orig, s.pert, resamples, row_seed);
    row.mean_orig = std::accumulate(s.orig.begin(), s.orig.end(), 0.0) / static_cast<double>(n);
    row.mean_pert = std::accumulate(s.pert.begin(), s.pert.end(), 0.0) / static_cast<double>(n);
    if (row.mean_pert == row.mean_orig) {
      row.percent_change = 0.0;
    } else if (row.mean_orig == 0.0) {
      throw DataError("stage2: percent change undefined, mean original score is zero for '" +
                      s.name + "'");
    } else {
      row.percent_change = 100.0 * (row.mean_pert - row.mean_orig) / row.mean_orig;
    }
    rows.push_back(std::move(row));
  }

  std::vector<double> t_family, w_family;
  for (const Stage2Row& row : rows) {
    t_family.push_back(row.test.p_one_sided);
    w_family.push_back(row.test.wilcoxon_p);
  }
  std::vector<double> t_adj = holm(t_family);
  std::vector<double> w_adj = holm(w_family);
  for (size_t i = 0; i < rows.size(); ++i) {
    rows[i].test.p_holm = t_adj[i];
    rows[i].test.wilcoxon_p_holm = w_adj[i];
  }
  return rows;
}

}  // namespace revlab
