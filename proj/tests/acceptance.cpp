// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance [--cli PATH] [--only 1,5,...]
//
// --cli points at the sparsetask executable for the determinism check; when
// absent the check runs the sweep through the library instead.

#include "checks.hpp"
#include "oracles.hpp"
#include "sparsetask/diagnostics.hpp"
#include "sparsetask/harness.hpp"
#include "sparsetask/projections.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include <unistd.h>

using namespace sparsetask;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::size_t sweep_workers() {
    return std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 4);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// Mean aggregate row for (axis value, method).
struct Means {
    std::map<std::pair<double, Method>, SweepRow> rows;
    const SweepRow& at(double v, Method m) const { return rows.at({v, m}); }
};

Means run_trend_sweep(const std::string& axis, const std::string& grid, const std::string& extra) {
    const std::string text = "axis = " + axis + "\ngrid = " + grid +
                             "\nreps = 10\nmethods = sc-mtl,ridge\n"
                             "d = 20\nk_star = 10\ns = 2\nalpha_star = 10\nm = 10\nsigma = 0.1\n"
                             "seed = 2024\n" + extra;
    const SweepConfig cfg = sweep_config_from(KeyValueConfig::parse(text, "acceptance"));
    const SweepResult result = run_sweep(cfg, sweep_workers());
    Means out;
    for (const auto& row : result.aggregates) out.rows[{row.axis_value, row.method}] = row;
    return out;
}

Outcome noiseless_recovery() {
    EnvironmentSpec spec;
    spec.m = 50;
    spec.sigma = 0.0;
    spec.seed = 1;
    const GeneratedTasks g = generate_environment(spec, 100);
    SolverConfig cfg;
    cfg.restarts = 3;
    const auto start = std::chrono::steady_clock::now();
    const FitResult r = fit(g.dataset, 10, 10.0, LossSpec{}, cfg);
    const double secs = seconds_since(start);
    return {r.final_objective <= 1e-3 && secs <= 120.0,
            "final objective " + fmt(r.final_objective) + " (<= 1e-3), " + fmt(secs) +
                " s single-threaded (<= 120 s)"};
}

Outcome task_count_trend() {
    const auto start = std::chrono::steady_clock::now();
    const Means m = run_trend_sweep("T", "10,50,200", "");
    const double secs = seconds_since(start);
    const double e10 = m.at(10, Method::sc_mtl).mtl_error;
    const double e50 = m.at(50, Method::sc_mtl).mtl_error;
    const double e200 = m.at(200, Method::sc_mtl).mtl_error;
    bool beats = true;
    std::ostringstream detail;
    detail << "sc-mtl mtl error " << fmt(e10) << " > " << fmt(e50) << " > " << fmt(e200);
    for (double T : {50.0, 200.0}) {
        const auto& sc = m.at(T, Method::sc_mtl);
        const auto& rr = m.at(T, Method::ridge);
        beats = beats && sc.mtl_error < rr.mtl_error && sc.transfer_error < rr.transfer_error;
        detail << "; T=" << T << " mtl " << fmt(sc.mtl_error) << " vs ridge " << fmt(rr.mtl_error)
               << ", transfer " << fmt(sc.transfer_error) << " vs ridge " << fmt(rr.transfer_error);
    }
    detail << "; " << fmt(secs) << " s with " << sweep_workers() << " workers (<= 900 s)";
    return {e10 > e50 && e50 > e200 && beats && secs <= 900.0, detail.str()};
}

Outcome atom_count_trend() {
    const Means m = run_trend_sweep("K'", "5,10,40", "T = 100\n");
    const auto& k5 = m.at(5, Method::sc_mtl);
    const auto& k10 = m.at(10, Method::sc_mtl);
    const auto& k40 = m.at(40, Method::sc_mtl);
    const auto& ridge = m.at(40, Method::ridge);
    const bool pass = k5.mtl_error > k10.mtl_error && k5.transfer_error > k10.transfer_error &&
                      k40.mtl_error < ridge.mtl_error && k40.transfer_error < ridge.transfer_error;
    return {pass, "mtl/transfer error K'=5 " + fmt(k5.mtl_error) + "/" + fmt(k5.transfer_error) +
                      ", K'=10 " + fmt(k10.mtl_error) + "/" + fmt(k10.transfer_error) +
                      ", K'=40 " + fmt(k40.mtl_error) + "/" + fmt(k40.transfer_error) +
                      ", ridge " + fmt(ridge.mtl_error) + "/" + fmt(ridge.transfer_error)};
}

Outcome sparsity_trend() {
    const Means m = run_trend_sweep("sparsity", "0.2,0.8", "T = 100\n");
    auto gap = [&](double r, bool transfer) {
        const auto& sc = m.at(r, Method::sc_mtl);
        const auto& rr = m.at(r, Method::ridge);
        return transfer ? rr.transfer_error - sc.transfer_error : rr.mtl_error - sc.mtl_error;
    };
    const bool pass = gap(0.2, false) > gap(0.8, false) && gap(0.2, true) > gap(0.8, true);
    return {pass, "ridge minus sc-mtl (mtl/transfer): s/K=0.2 " + fmt(gap(0.2, false)) + "/" +
                      fmt(gap(0.2, true)) + ", s/K=0.8 " + fmt(gap(0.8, false)) + "/" +
                      fmt(gap(0.8, true))};
}

Outcome projection_oracle() {
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_real_distribution<double> radius(0.2, 3.0);
    double worst_oracle = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Vector v = oracle::random_vector(gen, dim(gen), 2.0);
        const double a = radius(gen);
        worst_oracle = std::max(worst_oracle, (project_l1_ball(v, a) - oracle::grid_project_l1(v, a)).norm());
    }
    double worst_idem = 0.0;
    double worst_expand = -1.0;
    for (int i = 0; i < 1000; ++i) {
        const double a = radius(gen);
        const Vector u = oracle::random_vector(gen, 8, 2.0);
        const Vector v = oracle::random_vector(gen, 8, 2.0);
        const Vector pu = project_l1_ball(u, a);
        worst_idem = std::max(worst_idem, (project_l1_ball(pu, a) - pu).cwiseAbs().maxCoeff());
        worst_expand = std::max(worst_expand, (pu - project_l1_ball(v, a)).norm() - (u - v).norm());
    }
    return {worst_oracle <= 1e-3 && worst_idem <= 1e-12 && worst_expand <= 1e-12,
            "max distance to grid minimizer " + fmt(worst_oracle) + " (<= 1e-3), idempotence gap " +
                fmt(worst_idem) + ", expansion " + fmt(worst_expand) + " (<= 1e-12)"};
}

Outcome gradient_audit() {
    const double worst = checks::gradient_audit(2024, 20);
    return {worst <= 1e-4, "max relative error " + fmt(worst) + " (<= 1e-4) on 20 instances"};
}

Outcome code_step_oracle() {
    const double worst = checks::code_step_gap(2024, 20);
    return {worst <= 1e-3, "max gap to grid minimum " + fmt(worst) + " (<= 1e-3) on 20 instances"};
}

Outcome complexity() {
    EnvironmentSpec spec;
    const ComplexityStats sphere = complexity_stats(generate_environment(spec, 50).dataset);
    std::mt19937_64 gen(8);
    std::vector<TaskData> line;
    for (int t = 0; t < 10; ++t) {
        Matrix x = Matrix::Zero(10, 20);
        x.col(3) = oracle::random_vector(gen, 10);
        line.emplace_back(std::move(x), Vector::Zero(10));
    }
    const ComplexityStats one_d = complexity_stats(MultitaskDataset(std::move(line)));
    int violations = 0;
    for (int n = 0; n < 100; ++n) {
        std::vector<TaskData> tasks;
        for (int t = 0; t < 4; ++t) tasks.emplace_back(oracle::random_matrix(gen, 6, 5), Vector::Zero(6));
        const ComplexityStats st = complexity_stats(MultitaskDataset(std::move(tasks)));
        violations += st.s_inf > st.s1;
    }
    const double e1 = std::abs(sphere.s1 - 1.0);
    const double e2 = std::abs(one_d.s_inf - one_d.s1);
    return {e1 <= 1e-10 && e2 <= 1e-10 && violations == 0,
            "|S1 - 1| = " + fmt(e1) + ", |Sinf - S1| on 1-d data = " + fmt(e2) + ", " +
                std::to_string(violations) + "/100 datasets with Sinf > S1"};
}

Outcome bound_formulas() {
    using big = boost::multiprecision::cpp_bin_float_50;
    const big pi = boost::math::constants::pi<big>();
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    double worst = 0.0;
    for (int n = 0; n < 10; ++n) {
        const double L = 4 * u(gen), a = 10 * u(gen), K = 1 + std::floor(40 * u(gen));
        const double m = 1 + std::floor(100 * u(gen)), T = 1 + std::floor(500 * u(gen));
        const double s1 = 2 * u(gen), si = s1 * u(gen), d = u(gen);
        const big bL(L), ba(a), bK(K), bm(m), bT(T), bs1(s1), bsi(si), bd(d);
        const big t1 = bL * ba * sqrt(2 * bs1 * (bK + 12) / (bm * bT)) +
                       bL * ba * sqrt(8 * bsi * log(2 * bK) / bm) + sqrt(8 * log(4 / bd) / (bm * bT));
        const big t2 = bL * ba * bK * sqrt(2 * pi * bs1 / bT) +
                       4 * bL * ba * sqrt(bsi * (2 + log(bK)) / bm) + sqrt(8 * log(4 / bd) / bT);
        const big t3 = 2 * ba * (1 + ba) * bK * sqrt(2 * pi / bT) + 8 * sqrt(log(4 / bd) / bT);
        auto rel = [](double got, const big& want) {
            return std::abs(got - want.convert_to<double>()) / want.convert_to<double>();
        };
        worst = std::max({worst, rel(thm1_rhs(L, a, K, m, T, s1, si, d), t1),
                          rel(thm2_rhs(L, a, K, m, T, s1, si, d), t2),
                          rel(sc_limit_rhs(a, K, T, d), t3)});
    }
    bool monotone = true;
    double prev1 = INFINITY, prev2 = INFINITY, prev3 = INFINITY;
    for (double T = 1; T <= 4096; T *= 2) {
        const double v1 = thm1_rhs(1, 2, 10, 10, T, 1, 0.3, 0.05);
        const double v2 = thm2_rhs(1, 2, 10, 10, T, 1, 0.3, 0.05);
        const double v3 = sc_limit_rhs(2, 10, T, 0.05);
        monotone = monotone && v1 < prev1 && v2 < prev2 && v3 < prev3;
        prev1 = v1, prev2 = v2, prev3 = v3;
    }
    return {worst <= 1e-12 && monotone, "max relative deviation from 50-digit evaluation " +
                                            fmt(worst) + " (<= 1e-12) at 10 points; decreasing in T: " +
                                            (monotone ? "yes" : "no")};
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism(const std::string& cli) {
    const std::string text =
        "axis = T\ngrid = 10,30\nreps = 3\nmethods = sc-mtl,ridge,mtfl\nm = 8\nnew_tasks = 10\n"
        "seed = 77\nmax_outer_iters = 30\nrestarts = 2\n";
    std::vector<std::string> outputs;
    if (!cli.empty()) {
        const fs::path dir = fs::temp_directory_path() / ("sparsetask_accept_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        {
            std::ofstream(dir / "sweep.cfg") << text;
        }
        for (const auto& [tag, workers] : {std::pair{"a", 1}, {"b", 1}, {"c", 4}, {"d", 4}}) {
            const fs::path out = dir / (std::string(tag) + ".csv");
            const std::string cmd = "\"" + cli + "\" sweep --config \"" + (dir / "sweep.cfg").string() +
                                    "\" --workers " + std::to_string(workers) + " --out \"" +
                                    out.string() + "\"";
            if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
            outputs.push_back(read_file(out));
        }
        fs::remove_all(dir);
    } else {
        const SweepConfig cfg = sweep_config_from(KeyValueConfig::parse(text));
        for (std::size_t workers : {1u, 1u, 4u, 4u}) outputs.push_back(sweep_csv(cfg, run_sweep(cfg, workers)));
    }
    const bool same = std::all_of(outputs.begin(), outputs.end(),
                                  [&](const std::string& s) { return s == outputs.front(); });
    return {same && !outputs.front().empty(),
            std::string(same ? "identical" : "different") + " CSV over 2 runs x workers {1, 4} (" +
                std::to_string(outputs.front().size()) + " bytes, " + (cli.empty() ? "library" : "CLI") + ")"};
}

/// 20 x 16 atoms: a horizontal ramp, a disc and a vertical bar.
std::vector<Image> pixel_atoms() {
    Image ramp(20, 16), disc(20, 16), bar(20, 16);
    for (int r = 0; r < 20; ++r) {
        for (int c = 0; c < 16; ++c) {
            ramp(r, c) = c / 15.0;
            disc(r, c) = (r - 9.5) * (r - 9.5) + (c - 7.5) * (c - 7.5) <= 36.0 ? 1.0 : 0.0;
            bar(r, c) = (c >= 2 && c <= 4) || r >= 16 ? 1.0 : 0.0;
        }
    }
    return {ramp, disc, bar};
}

Outcome missing_pixels() {
    const auto atoms = pixel_atoms();
    Rng rng(31);
    std::vector<Image> images;
    double alpha = 0.0;
    for (int n = 0; n < 10; ++n) {
        Vector c(3);
        for (int k = 0; k < 3; ++k) c[k] = 0.1 + rng.uniform();
        c *= 0.95 / c.sum();  // keeps every pixel in [0, 1]
        Image img = Image::Zero(20, 16);
        double l1 = 0.0;
        for (int k = 0; k < 3; ++k) {
            img += c[k] * atoms[static_cast<std::size_t>(k)];
            l1 += c[k] * atoms[static_cast<std::size_t>(k)].norm();
        }
        alpha = std::max(alpha, l1);
        images.push_back(img);
    }
    PixelRequest req;
    req.m = 160;
    req.num_atoms = 3;
    req.alpha = alpha;
    req.seed = 5;
    const PixelResult r = run_pixels(images, req);
    return {r.heldout_mse <= 0.01 && r.heldout_mse <= 0.5 * r.ridge_heldout_mse,
            "held-out pixel MSE " + fmt(r.heldout_mse) + " (<= 0.01), ridge " +
                fmt(r.ridge_heldout_mse) + ", alpha " + fmt(alpha)};
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) {
            cli = argv[++i];
        } else if (arg == "--only" && i + 1 < argc) {
            for (double v : parse_number_list(argv[++i])) only.insert(static_cast<int>(v));
        } else {
            std::cerr << "usage: acceptance [--cli PATH] [--only 1,2,...]\n";
            return 2;
        }
    }
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"noiseless recovery", noiseless_recovery},
        {"error decreases with T, beats ridge", task_count_trend},
        {"too few atoms degrade, many atoms beat ridge", atom_count_trend},
        {"advantage grows with sparsity", sparsity_trend},
        {"l1 projection oracle", projection_oracle},
        {"gradient audit", gradient_audit},
        {"code step oracle", code_step_oracle},
        {"complexity statistics", complexity},
        {"bound formulas", bound_formulas},
        {"sweep determinism", [&] { return determinism(cli); }},
        {"missing-pixel sanity", missing_pixels},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << criteria[i].first << ": "
                  << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
