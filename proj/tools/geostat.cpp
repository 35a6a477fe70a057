// geostat command-line tool: simulate synthetic multivariate fields,
// estimate parsimonious Matern parameters with exact / TLR / DST backends,
// predict with cokriging, assess approximations with the multivariate
// MLOE/MMOM criteria, export TLR rank maps, and benchmark one likelihood
// evaluation per backend.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <json.hpp>

#include "geostat/geostat.hpp"

namespace gs = geostat;

namespace {

int thread_count_default() {
    if (const char* env = std::getenv("GEOSTAT_THREADS")) {
        const int t = std::atoi(env);
        if (t >= 1) return t;
    }
    return 1;
}

gs::ParameterSet parse_theta(const std::vector<double>& values, int p) {
    return gs::ParameterSet::from_flat(values, p);
}

int infer_p_from_theta(std::size_t flat_size) {
    for (int p = 1; p <= 16; ++p)
        if (static_cast<std::size_t>(gs::ParameterSet::flat_size(p)) == flat_size) return p;
    throw gs::validation_error("--theta: length " + std::to_string(flat_size) +
                               " does not match any variable count (expect 2p+1+p(p-1)/2)");
}

gs::Representation parse_rep(const std::string& rep) {
    if (rep == "I") return gs::Representation::InterleavedI;
    if (rep == "II") return gs::Representation::BlockII;
    throw gs::validation_error("--rep must be I or II");
}

std::string json_of_fit(const gs::FitResult& fit) {
    gs::Json j = gs::Json::object();
    j.set("backend", gs::Json::string(fit.backend.name()));
    j.set("representation", gs::Json::string(gs::to_string(fit.rep)));
    gs::Json theta = gs::Json::array();
    for (double v : fit.theta_hat.to_flat()) theta.push(gs::Json::number(v));
    j.set("theta_hat", std::move(theta));
    j.set("p", gs::Json::integer(fit.theta_hat.p));
    j.set("loglik", gs::Json::number(fit.loglik));
    j.set("evaluations", gs::Json::integer(fit.evaluations));
    j.set("converged", gs::Json::boolean(fit.converged));
    j.set("warning", gs::Json::boolean(fit.warning));
    gs::Json trace = gs::Json::array();
    for (const auto& pt : fit.trace) {
        gs::Json row = gs::Json::object();
        gs::Json th = gs::Json::array();
        for (double v : pt.theta) th.push(gs::Json::number(v));
        row.set("theta", std::move(th));
        row.set("loglik", gs::Json::number(pt.loglik));
        row.set("elapsed_s", gs::Json::number(pt.elapsed_s));
        trace.push(std::move(row));
    }
    j.set("trace", std::move(trace));
    return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multivariate Matern geostatistics: simulation, MLE, cokriging, assessment"};
    app.require_subcommand(1);
    int threads = thread_count_default();
    app.add_option("-t,--threads", threads, "worker threads for the task graph / replicate pool");

    // ---- simulate ----------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "draw a multivariate Gaussian field");
    int sim_p = 2, sim_n = 1600;
    std::uint64_t sim_seed = 0;
    std::string sim_kind = "grid", sim_out = "field.csv";
    std::vector<double> sim_theta;
    sim->add_option("--p", sim_p, "number of variables");
    sim->add_option("--n", sim_n, "target location count")->required();
    sim->add_option("--kind", sim_kind, "grid | jittered_grid | uniform_random");
    sim->add_option("--theta", sim_theta, "variances, range, smoothnesses, betas")
        ->required()
        ->delimiter(',');
    sim->add_option("--seed", sim_seed, "random seed");
    sim->add_option("--out", sim_out, "output CSV path");

    // ---- estimate -----------------------------------------------------
    auto* est = app.add_subcommand("estimate", "maximum likelihood fit");
    std::string est_input, est_backend = "exact", est_rep = "I", est_out = "fit.json";
    int est_nb = 0, est_max_evals = 500, est_warm = 0;
    std::uint64_t est_seed = 0;
    bool est_geodesic = false, est_detrend = false, est_no_morton = false;
    std::vector<double> est_start;
    est->add_option("--input", est_input, "training CSV (x,y,z1..zp)")->required();
    est->add_option("--backend", est_backend,
                    "exact | tlr5 | tlr7 | tlr9 | tlr:<eps> | dst:<frac>");
    est->add_option("--rep", est_rep, "covariance representation: I | II");
    est->add_option("--nb", est_nb, "tile size (0 = default)");
    est->add_option("--max-evals", est_max_evals, "objective evaluation budget");
    est->add_option("--warm-start", est_warm, "subsample size for the warm-start stage (0 = off)");
    est->add_option("--start", est_start, "starting parameters (canonical order)")->delimiter(',');
    est->add_option("--seed", est_seed, "seed for the warm-start subsample");
    est->add_flag("--geodesic", est_geodesic, "great-circle distances (lon/lat input)");
    est->add_flag("--detrend", est_detrend, "remove an OLS mean in (1, x, y) per variable");
    est->add_flag("--no-morton", est_no_morton, "keep the input location order");
    est->add_option("--out", est_out, "output JSON path");

    // ---- predict ------------------------------------------------------
    auto* prd = app.add_subcommand("predict", "cokriging at held-out locations");
    std::string prd_input, prd_targets, prd_fit, prd_truth, prd_out = "predictions.csv",
                                                            prd_backend = "exact", prd_rep = "I";
    std::vector<double> prd_theta;
    bool prd_geodesic = false, prd_no_morton = false;
    prd->add_option("--input", prd_input, "training CSV")->required();
    prd->add_option("--targets", prd_targets, "target locations CSV (x,y)")->required();
    prd->add_option("--theta", prd_theta, "parameters (canonical order)")->delimiter(',');
    prd->add_option("--fit", prd_fit, "fit JSON from `estimate` (alternative to --theta)");
    prd->add_option("--backend", prd_backend, "factorization backend");
    prd->add_option("--rep", prd_rep, "representation: I | II");
    prd->add_option("--truth", prd_truth, "optional truth CSV at the targets; reports MSPE");
    prd->add_flag("--geodesic", prd_geodesic, "great-circle distances");
    prd->add_flag("--no-morton", prd_no_morton, "keep the input location order");
    prd->add_option("--out", prd_out, "predictions CSV path");

    // ---- assess -------------------------------------------------------
    auto* ass = app.add_subcommand("assess", "multivariate MLOE/MMOM of approximate parameters");
    std::string ass_input, ass_targets, ass_out = "assessment.json";
    std::vector<double> ass_true, ass_approx;
    bool ass_skip = false, ass_naive = false;
    ass->add_option("--input", ass_input, "data CSV (locations are used)")->required();
    ass->add_option("--targets", ass_targets, "prediction locations CSV")->required();
    ass->add_option("--theta-true", ass_true, "true parameters")->required()->delimiter(',');
    ass->add_option("--theta-approx", ass_approx, "approximate parameters")
        ->required()
        ->delimiter(',');
    ass->add_flag("--skip-degenerate", ass_skip,
                  "drop targets that coincide with data locations instead of failing");
    ass->add_flag("--naive", ass_naive, "also report the per-variable (naive) aggregate");
    ass->add_option("--out", ass_out, "report JSON path");

    // ---- rankmap ------------------------------------------------------
    auto* rnk = app.add_subcommand("rankmap", "per-tile ranks of the compressed covariance");
    std::string rnk_input, rnk_out = "ranks.csv";
    std::vector<double> rnk_theta;
    double rnk_eps = 1e-9;
    int rnk_nb = 0, rnk_grid_n = 0;
    bool rnk_no_morton = false;
    rnk->add_option("--input", rnk_input, "data CSV for the locations");
    rnk->add_option("--grid-n", rnk_grid_n, "synthesize a grid of this size instead of --input");
    rnk->add_option("--theta", rnk_theta, "parameters")->required()->delimiter(',');
    rnk->add_option("--eps", rnk_eps, "compression accuracy");
    rnk->add_option("--nb", rnk_nb, "tile size (0 = default)");
    rnk->add_flag("--no-morton", rnk_no_morton, "keep the input location order");
    rnk->add_option("--out", rnk_out, "rank CSV path (i,j,rank)");

    // ---- bench --------------------------------------------------------
    auto* bch = app.add_subcommand("bench", "time one log-likelihood evaluation per backend");
    std::vector<int> bch_ns{1024, 2048};
    std::vector<std::string> bch_backends{"exact", "tlr5"};
    std::vector<double> bch_theta;
    int bch_nb = 0;
    std::uint64_t bch_seed = 0;
    std::string bch_out = "bench.csv";
    bch->add_option("--n-list", bch_ns, "location counts")->delimiter(',');
    bch->add_option("--backends", bch_backends, "backends to time")->delimiter(',');
    bch->add_option("--theta", bch_theta, "parameters")->required()->delimiter(',');
    bch->add_option("--nb", bch_nb, "tile size (0 = default)");
    bch->add_option("--seed", bch_seed, "seed for the synthetic measurements");
    bch->add_option("--out", bch_out, "timing CSV path");

    // ---- experiment ---------------------------------------------------
    auto* exp = app.add_subcommand("experiment", "scripted synthetic studies 1-3");
    gs::ExperimentConfig cfg;
    std::vector<double> exp_theta;
    std::vector<std::string> exp_backends{"exact"};
    std::string exp_outdir = ".";
    exp->add_option("--id", cfg.id, "1 = MSPE vs beta, 2 = estimates, 3 = MLOE/MMOM")->required();
    exp->add_option("--replicates", cfg.replicates, "independent replicates");
    exp->add_option("--n", cfg.n, "observed locations");
    exp->add_option("--n-pred", cfg.n_pred, "held-out locations");
    exp->add_option("--theta", exp_theta, "base truth parameters")->required()->delimiter(',');
    exp->add_option("--beta-grid", cfg.beta_grid, "experiment 1 beta values")->delimiter(',');
    exp->add_option("--a-grid", cfg.a_grid, "experiment 2/3 range values")->delimiter(',');
    exp->add_option("--backends", exp_backends, "experiment 2/3 backends")->delimiter(',');
    exp->add_option("--seed", cfg.seed, "master seed");
    exp->add_option("--max-evals", cfg.fit_max_evals, "fit evaluation budget");
    exp->add_option("--warm-start", cfg.fit_warm_start_n, "fit warm-start subsample (0 = off)");
    exp->add_option("--out-dir", exp_outdir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        const gs::Executor exec = gs::Executor::with_threads(threads);

        if (sim->parsed()) {
            auto theta = parse_theta(sim_theta, sim_p);
            gs::LocationKind kind;
            if (sim_kind == "grid")
                kind = gs::LocationKind::Grid;
            else if (sim_kind == "jittered_grid")
                kind = gs::LocationKind::JitteredGrid;
            else if (sim_kind == "uniform_random")
                kind = gs::LocationKind::UniformRandom;
            else
                throw gs::validation_error("--kind must be grid, jittered_grid or uniform_random");
            const double t0 = gs::detail::now_s();
            auto locs = gs::generate_locations(kind, sim_n, sim_seed);
            auto field = gs::simulate_field(theta, locs, sim_seed, exec);
            gs::write_file(sim_out, gs::dataset_to_csv(field));
            gs::RunManifest manifest;
            manifest.command = "simulate";
            std::string theta_str;
            for (double v : sim_theta) theta_str += (theta_str.empty() ? "" : ",") + gs::format_g17(v);
            manifest.config = {{"p", std::to_string(sim_p)},
                               {"n", std::to_string(sim_n)},
                               {"kind", sim_kind},
                               {"theta", theta_str},
                               {"out", sim_out}};
            manifest.seed = sim_seed;
            manifest.timings.generation_s = gs::detail::now_s() - t0;
            manifest.write(sim_out);
            std::printf("wrote %s (%d locations, %d variables)\n", sim_out.c_str(), field.n(),
                        field.p);
        }

        if (est->parsed()) {
            auto csv = gs::read_dataset_csv(est_input);
            gs::SpatialDataset data = csv.data;
            gs::RunManifest manifest;
            manifest.command = "estimate";
            if (est_detrend) {
                auto dt = gs::detrend_linear(data);
                data = dt.residuals;
                for (int i = 0; i < data.p; ++i) {
                    const auto& c = dt.coefficients[static_cast<std::size_t>(i)];
                    manifest.config.emplace_back("detrend_z" + std::to_string(i + 1),
                                                 gs::format_g17(c[0]) + " " + gs::format_g17(c[1]) +
                                                     " " + gs::format_g17(c[2]));
                }
            }
            if (!est_no_morton && !est_geodesic) data = data.morton_ordered();
            auto backend = gs::LikelihoodBackend::parse(est_backend);
            backend.nb = est_nb;
            gs::FitOptions opts;
            opts.max_evals = est_max_evals;
            opts.warm_start_n = est_warm;
            opts.seed = est_seed;
            opts.metric = est_geodesic ? gs::Metric::GreatCircle : gs::Metric::Euclidean;
            if (!est_start.empty()) opts.start = parse_theta(est_start, data.p);
            const double t0 = gs::detail::now_s();
            const auto fitres = gs::fit(data, backend, opts, parse_rep(est_rep), exec);
            gs::write_file(est_out, json_of_fit(fitres));
            manifest.config.insert(manifest.config.end(), {{"input", est_input},
                                                           {"backend", est_backend},
                                                           {"rep", est_rep},
                                                           {"nb", std::to_string(est_nb)},
                                                           {"max_evals", std::to_string(est_max_evals)},
                                                           {"warm_start", std::to_string(est_warm)},
                                                           {"geodesic", est_geodesic ? "1" : "0"},
                                                           {"detrend", est_detrend ? "1" : "0"},
                                                           {"morton", est_no_morton ? "0" : "1"},
                                                           {"out", est_out}});
            manifest.seed = est_seed;
            manifest.timings.computation_s = gs::detail::now_s() - t0;
            manifest.write(est_out);
            std::printf("theta_hat =");
            for (double v : fitres.theta_hat.to_flat()) std::printf(" %.6g", v);
            std::printf("\nloglik = %.10g  evaluations = %d%s\n", fitres.loglik, fitres.evaluations,
                        fitres.warning ? "  [warning]" : "");
        }

        if (prd->parsed()) {
            auto train = gs::read_dataset_csv(prd_input);
            gs::SpatialDataset data = train.data;
            if (!prd_no_morton && !prd_geodesic) data = data.morton_ordered();
            auto targets_csv = gs::read_dataset_csv(prd_targets, true);
            const gs::LocationSet targets = targets_csv.data.locs;
            gs::ParameterSet theta;
            if (!prd_theta.empty()) {
                theta = parse_theta(prd_theta, data.p);
            } else if (!prd_fit.empty()) {
                // the fit JSON is read back with the vendored parser
                auto fit_json = nlohmann::json::parse(gs::read_file(prd_fit));
                std::vector<double> flat = fit_json.at("theta_hat").get<std::vector<double>>();
                theta = parse_theta(flat, fit_json.at("p").get<int>());
            } else {
                throw gs::validation_error("predict: provide --theta or --fit");
            }
            auto backend = gs::LikelihoodBackend::parse(prd_backend);
            const auto metric = prd_geodesic ? gs::Metric::GreatCircle : gs::Metric::Euclidean;
            const double t0 = gs::detail::now_s();
            const auto pred =
                gs::cokrige(theta, data, targets, backend, parse_rep(prd_rep), exec, metric);
            std::string out_csv = "x,y";
            for (int i = 1; i <= data.p; ++i) out_csv += ",zhat_" + std::to_string(i);
            out_csv += "\n";
            for (int t = 0; t < targets.size(); ++t) {
                out_csv += gs::format_g17(targets[t][0]) + "," + gs::format_g17(targets[t][1]);
                for (int i = 0; i < data.p; ++i) out_csv += "," + gs::format_g17(pred(t, i));
                out_csv += "\n";
            }
            gs::write_file(prd_out, out_csv);
            gs::RunManifest manifest;
            manifest.command = "predict";
            manifest.config = {{"input", prd_input},   {"targets", prd_targets},
                               {"backend", prd_backend}, {"rep", prd_rep},
                               {"geodesic", prd_geodesic ? "1" : "0"}, {"out", prd_out}};
            if (!prd_truth.empty()) {
                auto truth_csv = gs::read_dataset_csv(prd_truth);
                if (truth_csv.data.n() != targets.size() || truth_csv.p != data.p)
                    throw gs::validation_error("predict: --truth shape mismatch");
                Eigen::MatrixXd truth(targets.size(), data.p);
                for (int t = 0; t < targets.size(); ++t)
                    for (int i = 0; i < data.p; ++i) truth(t, i) = truth_csv.data.value(t, i);
                auto [per, avg] = gs::mspe(pred, truth);
                for (std::size_t i = 0; i < per.size(); ++i)
                    manifest.config.emplace_back("mspe_" + std::to_string(i + 1),
                                                 gs::format_g17(per[i]));
                manifest.config.emplace_back("mspe_avg", gs::format_g17(avg));
                std::printf("mspe_avg = %.8g\n", avg);
            }
            manifest.timings.computation_s = gs::detail::now_s() - t0;
            manifest.write(prd_out);
            std::printf("wrote %s (%d targets)\n", prd_out.c_str(), targets.size());
        }

        if (ass->parsed()) {
            auto csv = gs::read_dataset_csv(ass_input, true);
            auto targets_csv = gs::read_dataset_csv(ass_targets, true);
            const int p = infer_p_from_theta(ass_true.size());
            if (ass_approx.size() != ass_true.size())
                throw gs::validation_error("assess: parameter vectors differ in length");
            const auto theta_true = parse_theta(ass_true, p);
            const auto theta_approx = parse_theta(ass_approx, p);
            const auto report =
                gs::mloe_mmom(theta_true, theta_approx, csv.data.locs, targets_csv.data.locs,
                              gs::Representation::InterleavedI, exec, ass_skip);
            gs::Json j = gs::Json::object();
            j.set("mloe", gs::Json::number(report.mloe));
            j.set("mmom", gs::Json::number(report.mmom));
            if (ass_naive) {
                const auto naive = gs::mloe_mmom_naive(theta_true, theta_approx, csv.data.locs,
                                                       targets_csv.data.locs, exec, ass_skip);
                j.set("mloe_naive", gs::Json::number(naive.mloe));
                j.set("mmom_naive", gs::Json::number(naive.mmom));
            }
            gs::Json per = gs::Json::array();
            for (std::size_t l = 0; l < report.loe.size(); ++l) {
                gs::Json row = gs::Json::object();
                row.set("loe", gs::Json::number(report.loe[l]));
                row.set("mom", gs::Json::number(report.mom[l]));
                per.push(std::move(row));
            }
            j.set("per_location", std::move(per));
            gs::Json t = gs::Json::object();
            t.set("gen_s", gs::Json::number(report.timings.generation_s));
            t.set("fact_s", gs::Json::number(report.timings.factorization_s));
            t.set("comp_s", gs::Json::number(report.timings.computation_s));
            j.set("timing", std::move(t));
            gs::write_file(ass_out, j.dump(2) + "\n");
            gs::RunManifest manifest;
            manifest.command = "assess";
            manifest.config = {{"input", ass_input},
                               {"targets", ass_targets},
                               {"skip_degenerate", ass_skip ? "1" : "0"},
                               {"out", ass_out}};
            manifest.timings = report.timings;
            manifest.write(ass_out);
            std::printf("mloe = %.8g  mmom = %.8g\n", report.mloe, report.mmom);
        }

        if (rnk->parsed()) {
            gs::LocationSet locs;
            if (rnk_grid_n > 0) {
                locs = gs::generate_locations(gs::LocationKind::Grid, rnk_grid_n, 0);
            } else if (!rnk_input.empty()) {
                locs = gs::read_dataset_csv(rnk_input, true).data.locs;
            } else {
                throw gs::validation_error("rankmap: provide --input or --grid-n");
            }
            if (!rnk_no_morton)
                locs = gs::apply_permutation(locs, gs::morton_permutation(locs), gs::Ordering::Morton);
            const auto theta = parse_theta(rnk_theta, infer_p_from_theta(rnk_theta.size()));
            const std::int64_t order = static_cast<std::int64_t>(theta.p) * locs.size();
            const int nb = rnk_nb > 0 ? rnk_nb : gs::default_tlr_tile(order);
            auto sigma = gs::assemble_sigma(theta, locs, gs::Representation::InterleavedI, nb, exec);
            auto tlr = gs::compress(sigma, rnk_eps, exec);
            gs::write_file(rnk_out, gs::rank_map(tlr).to_csv());
            const auto fp = gs::footprint(tlr);
            gs::RunManifest manifest;
            manifest.command = "rankmap";
            manifest.config = {{"eps", gs::format_g17(rnk_eps)},
                               {"nb", std::to_string(nb)},
                               {"order", std::to_string(order)},
                               {"dense_bytes", std::to_string(fp.dense_bytes)},
                               {"tlr_bytes", std::to_string(fp.tlr_bytes)},
                               {"savings_ratio", gs::format_g17(fp.savings_ratio)},
                               {"out", rnk_out}};
            manifest.write(rnk_out);
            std::printf("wrote %s (nt = %d, mean rank %.2f, savings %.2fx)\n", rnk_out.c_str(),
                        tlr.nt, gs::rank_map(tlr).mean_rank, fp.savings_ratio);
        }

        if (bch->parsed()) {
            const auto theta = parse_theta(bch_theta, infer_p_from_theta(bch_theta.size()));
            std::string out_csv = "backend,n,order,gen_s,fact_s,comp_s,total_s,loglik\n";
            for (int n : bch_ns) {
                auto locs = gs::generate_locations(gs::LocationKind::Grid, n, 0);
                locs = gs::apply_permutation(locs, gs::morton_permutation(locs), gs::Ordering::Morton);
                // synthetic measurements: evaluation time does not depend on
                // the measured values
                Eigen::VectorXd z(static_cast<Eigen::Index>(theta.p) * locs.size());
                for (Eigen::Index i = 0; i < z.size(); ++i)
                    z[i] = gs::rng::normal(bch_seed, 77, static_cast<std::uint64_t>(i));
                gs::SpatialDataset data(locs, std::move(z), theta.p);
                for (const auto& bname : bch_backends) {
                    auto backend = gs::LikelihoodBackend::parse(bname);
                    backend.nb = bch_nb;
                    gs::LikelihoodSession session(data, backend, gs::Representation::InterleavedI,
                                                  exec);
                    const auto res = session.evaluate(theta);
                    out_csv += bname + "," + std::to_string(data.n()) + "," +
                               std::to_string(data.total()) + "," +
                               gs::format_g17(res.timings.generation_s) + "," +
                               gs::format_g17(res.timings.factorization_s) + "," +
                               gs::format_g17(res.timings.computation_s) + "," +
                               gs::format_g17(res.timings.total()) + "," +
                               gs::format_g17(res.value) + "\n";
                    std::printf("%-8s n=%-6d total %.3fs (gen %.3f fact %.3f comp %.3f)\n",
                                bname.c_str(), data.n(), res.timings.total(),
                                res.timings.generation_s, res.timings.factorization_s,
                                res.timings.computation_s);
                }
            }
            gs::write_file(bch_out, out_csv);
            gs::RunManifest manifest;
            manifest.command = "bench";
            manifest.config = {{"nb", std::to_string(bch_nb)}, {"out", bch_out}};
            manifest.seed = bch_seed;
            manifest.write(bch_out);
        }

        if (exp->parsed()) {
            cfg.theta = parse_theta(exp_theta, infer_p_from_theta(exp_theta.size()));
            cfg.backends.clear();
            for (const auto& b : exp_backends) cfg.backends.push_back(gs::LikelihoodBackend::parse(b));
            cfg.threads = threads;
            const double t0 = gs::detail::now_s();
            const auto table = gs::run_experiment(cfg);
            const std::string path = exp_outdir + "/" + table.name + ".csv";
            gs::write_file(path, table.to_csv());
            gs::RunManifest manifest;
            manifest.command = "experiment";
            manifest.config = {{"id", std::to_string(cfg.id)},
                               {"replicates", std::to_string(cfg.replicates)},
                               {"n", std::to_string(cfg.n)},
                               {"n_pred", std::to_string(cfg.n_pred)},
                               {"out", path}};
            manifest.seed = cfg.seed;
            manifest.timings.computation_s = gs::detail::now_s() - t0;
            manifest.write(path);
            std::printf("wrote %s (%zu rows)\n", path.c_str(), table.rows.size());
        }
        return 0;
    } catch (const gs::validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const gs::numeric_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const gs::io_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
