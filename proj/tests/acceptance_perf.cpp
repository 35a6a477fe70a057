// Performance-direction suite (timing-based, excluded from determinism
// checks): TLR5 vs exact likelihood evaluation speed, thread scaling of the
// tiled Cholesky, and the factorization/computation scaling exponents of
// the assessment algorithm.

#include <cstdarg>

#include "acceptance_support.hpp"
#include "geostat/geostat.hpp"

using namespace geostat;

namespace {

ParameterSet fig5_theta(double a = 0.09) {
    Eigen::MatrixXd beta(2, 2);
    beta << 1.0, 0.5, 0.5, 1.0;
    return ParameterSet({1.0, 1.0}, a, {0.5, 1.0}, beta);
}

double wall_s() { return detail::now_s(); }

// ---- criterion 9a: TLR5 evaluation beats exact at N = 8192 ----------------
bool criterion_tlr_speed(std::string& detail_out) {
    const auto theta = fig5_theta();
    auto locs = generate_locations(LocationKind::Grid, 4096, 0);  // N = 8192
    locs = apply_permutation(locs, morton_permutation(locs), Ordering::Morton);
    Eigen::VectorXd z(2 * 4096);
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng::normal(3, 77, static_cast<std::uint64_t>(i));
    SpatialDataset data(locs, std::move(z), 2);

    const Executor exec = Executor::with_threads(2);
    LikelihoodSession exact_session(data, LikelihoodBackend::exact(128), Representation::InterleavedI, exec);
    LikelihoodSession tlr_session(data, LikelihoodBackend::tlr(1e-5, 128), Representation::InterleavedI, exec);

    // warm one small evaluation each to fault in code paths, then time
    const auto r_exact = exact_session.evaluate(theta);
    const auto r_tlr = tlr_session.evaluate(theta);
    const double t_exact = r_exact.timings.total();
    const double t_tlr = r_tlr.timings.total();
    detail_out = acceptance::fmt(
        "exact %.2fs (gen %.2f fact %.2f) vs tlr5 %.2fs (gen %.2f fact %.2f); loglik rel diff %.1e",
        t_exact, r_exact.timings.generation_s, r_exact.timings.factorization_s, t_tlr,
        r_tlr.timings.generation_s, r_tlr.timings.factorization_s,
        std::fabs(r_tlr.value - r_exact.value) / std::fabs(r_exact.value));
    return t_tlr < t_exact;
}

// ---- criterion 9b: thread scaling of the exact tiled Cholesky -------------
bool criterion_thread_scaling(std::string& detail_out) {
    const auto theta = fig5_theta();
    auto locs = generate_locations(LocationKind::Grid, 2048, 0);  // N = 4050 ~ 4096
    locs = apply_permutation(locs, morton_permutation(locs), Ordering::Morton);
    auto sigma = assemble_sigma(theta, locs, Representation::InterleavedI, 128,
                                Executor::with_threads(2));
    auto time_chol = [&](int threads) {
        double best = 1e300;
        for (int rep = 0; rep < 3; ++rep) {
            const double t0 = wall_s();
            auto f = cholesky(sigma, Executor::with_threads(threads));
            best = std::min(best, wall_s() - t0);
            if (f.logdet == 0.0) return -1.0;  // keep the factorization alive
        }
        return best;
    };
    const double t1 = time_chol(1);
    const double t4 = time_chol(4);
    const double speedup = t1 / t4;
    detail_out = acceptance::fmt("1 thread %.3fs, 4 threads %.3fs, speedup %.2fx (criterion: >= 2x)",
                                 t1, t4, speedup);
    return speedup >= 2.0;
}

// ---- assess module scaling property ---------------------------------------
// FACT_TIME should grow ~cubically in n and per-target COMP_TIME
// ~quadratically (fitted exponents within +-0.4).
bool assess_scaling_property(std::string& detail_out) {
    const auto theta = fig5_theta();
    auto perturbed = theta;
    perturbed.range *= 1.1;
    const std::vector<int> sizes{512, 1024, 2048};
    std::vector<double> log_n, log_fact, log_comp;
    for (int n : sizes) {
        auto locs = generate_locations(LocationKind::Grid, n, 0);
        locs = apply_permutation(locs, morton_permutation(locs), Ordering::Morton);
        auto targets = generate_locations(LocationKind::UniformRandom, 20, 5);
        double fact = 1e300, comp = 1e300;
        for (int rep = 0; rep < 3; ++rep) {
            const auto report = mloe_mmom(theta, perturbed, locs, targets,
                                          Representation::InterleavedI, Executor::with_threads(2),
                                          true);
            fact = std::min(fact, report.timings.factorization_s);
            comp = std::min(comp, report.timings.computation_s);
        }
        log_n.push_back(std::log(static_cast<double>(n)));
        log_fact.push_back(std::log(fact));
        log_comp.push_back(std::log(comp));
    }
    auto slope = [&](const std::vector<double>& y) {
        const int m = static_cast<int>(log_n.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < m; ++i) {
            sx += log_n[static_cast<std::size_t>(i)];
            sy += y[static_cast<std::size_t>(i)];
            sxx += log_n[static_cast<std::size_t>(i)] * log_n[static_cast<std::size_t>(i)];
            sxy += log_n[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
        }
        return (m * sxy - sx * sy) / (m * sxx - sx * sx);
    };
    const double e_fact = slope(log_fact);
    const double e_comp = slope(log_comp);
    detail_out = acceptance::fmt("fitted exponents: factorization %.2f (want 3 +- 0.4), "
                                 "per-target computation %.2f (want 2 +- 0.4)",
                                 e_fact, e_comp);
    return std::fabs(e_fact - 3.0) <= 0.4 && std::fabs(e_comp - 2.0) <= 0.4;
}

}  // namespace

int main() {
    acceptance::Suite suite;
    suite.run("criterion 9a: TLR5 likelihood evaluation faster than exact at N = 8192",
              criterion_tlr_speed);
    suite.run("criterion 9b: exact Cholesky >= 2x speedup from 1 to 4 threads at N = 4096",
              criterion_thread_scaling);
    suite.run("assess property: factorization ~cubic, computation ~quadratic",
              assess_scaling_property);
    return suite.exit_code();
}
