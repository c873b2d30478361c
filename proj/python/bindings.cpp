#include "sparsetask/baselines.hpp"
#include "sparsetask/diagnostics.hpp"
#include "sparsetask/harness.hpp"
#include "sparsetask/projections.hpp"
#include "sparsetask/solver.hpp"
#include "sparsetask/synth_env.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace sparsetask;

namespace {

MultitaskDataset to_dataset(const std::vector<Matrix>& xs, const std::vector<Vector>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("need one label vector per input matrix");
    std::vector<TaskData> tasks;
    for (std::size_t t = 0; t < xs.size(); ++t) tasks.emplace_back(xs[t], ys[t]);
    return MultitaskDataset(std::move(tasks));
}

SolverConfig solver(int max_outer, int max_inner, double rel_tol, int restarts, std::uint64_t seed,
                    std::size_t workers) {
    SolverConfig cfg;
    cfg.max_outer_iters = max_outer;
    cfg.max_inner_iters = max_inner;
    cfg.rel_tol = rel_tol;
    cfg.restarts = restarts;
    cfg.seed = seed;
    cfg.workers = workers;
    cfg.validate();
    return cfg;
}

Matrix stack(const std::vector<TaskVector>& ws) { return stack_columns(ws); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "sparse coding for multitask and transfer learning";

    py::register_exception<std::domain_error>(m, "DomainError", PyExc_ValueError);

    m.def("project_l1_ball", &project_l1_ball, py::arg("v"), py::arg("alpha"));
    m.def("project_l2_ball", &project_l2_ball, py::arg("v"), py::arg("radius"));

    m.def(
        "generate_environment",
        [](int d, int k_star, int s, double alpha_star, double sigma, int m_, int T,
           std::uint64_t seed) {
            EnvironmentSpec spec{d, k_star, s, alpha_star, sigma, m_, seed};
            GeneratedTasks g = generate_environment(spec, T);
            std::vector<Matrix> xs;
            std::vector<Vector> ys;
            for (const auto& task : g.dataset.tasks()) {
                xs.push_back(task.inputs);
                ys.push_back(task.labels);
            }
            py::dict out;
            out["dictionary"] = g.true_dictionary.atoms();
            out["codes"] = g.true_codes.codes();
            out["W"] = stack(g.true_vectors);
            out["X"] = xs;
            out["y"] = ys;
            return out;
        },
        py::arg("d") = 20, py::arg("k_star") = 10, py::arg("s") = 2, py::arg("alpha_star") = 10.0,
        py::arg("sigma") = 0.1, py::arg("m") = 10, py::arg("T") = 100, py::arg("seed") = 0);

    m.def(
        "fit",
        [](const std::vector<Matrix>& xs, const std::vector<Vector>& ys, int K, double alpha,
           const std::string& loss, const std::string& scheme, int max_outer, int max_inner,
           double rel_tol, int restarts, std::uint64_t seed, std::size_t workers) {
            const MultitaskDataset data = to_dataset(xs, ys);
            std::optional<FitResult> fitted;
            {
                py::gil_scoped_release release;
                fitted = fit_variant(data, K, alpha, LossSpec(loss_kind_from_string(loss), 1.0),
                                solver(max_outer, max_inner, rel_tol, restarts, seed, workers),
                                scheme_from_string(scheme));
            }
            const FitResult& r = *fitted;
            py::dict out;
            out["dictionary"] = r.dictionary.atoms();
            out["codes"] = r.codes.codes();
            out["objective_trace"] = r.objective_trace;
            out["final_objective"] = r.final_objective;
            out["restart_index"] = r.restart_index;
            return out;
        },
        py::arg("X"), py::arg("y"), py::arg("K"), py::arg("alpha"), py::arg("loss") = "square",
        py::arg("scheme") = "per-column-l2+per-task-l1", py::arg("max_outer_iters") = 200,
        py::arg("max_inner_iters") = 100, py::arg("rel_tol") = 1e-6, py::arg("restarts") = 3,
        py::arg("seed") = 0, py::arg("workers") = 1);

    m.def(
        "objective",
        [](const std::vector<Matrix>& xs, const std::vector<Vector>& ys, const Matrix& D,
           const Matrix& codes, const std::string& loss) {
            return objective(to_dataset(xs, ys), D, codes, LossSpec(loss_kind_from_string(loss), 1.0));
        },
        py::arg("X"), py::arg("y"), py::arg("dictionary"), py::arg("codes"), py::arg("loss") = "square");

    m.def(
        "lasso_predict",
        [](const Matrix& D, const Matrix& x, const Vector& y, double alpha) {
            return lasso_predict(Dictionary(D), TaskData(x, y), alpha, LossSpec{}, SolverConfig{}).w;
        },
        py::arg("dictionary"), py::arg("X"), py::arg("y"), py::arg("alpha"));

    m.def(
        "ridge_fit",
        [](const Matrix& x, const Vector& y, double lambda) { return ridge_fit(TaskData(x, y), lambda).w; },
        py::arg("X"), py::arg("y"), py::arg("lam"));

    m.def(
        "trace_norm_fit",
        [](const std::vector<Matrix>& xs, const std::vector<Vector>& ys, double lambda) {
            return stack(trace_norm_fit(to_dataset(xs, ys), lambda, SolverConfig{}));
        },
        py::arg("X"), py::arg("y"), py::arg("lam"));

    m.def(
        "complexity_stats",
        [](const std::vector<Matrix>& xs) {
            std::vector<Vector> ys;
            for (const auto& x : xs) ys.push_back(Vector::Zero(x.rows()));
            const ComplexityStats st = complexity_stats(to_dataset(xs, ys));
            return py::make_tuple(st.s1, st.s_inf);
        },
        py::arg("X"));

    m.def("thm1_rhs", &thm1_rhs, py::arg("L"), py::arg("alpha"), py::arg("K"), py::arg("m"),
          py::arg("T"), py::arg("s1"), py::arg("s_inf"), py::arg("delta"));
    m.def("thm2_rhs", &thm2_rhs, py::arg("L"), py::arg("alpha"), py::arg("K"), py::arg("m"),
          py::arg("T"), py::arg("s1"), py::arg("s_inf"), py::arg("delta"));
    m.def("sc_limit_rhs", &sc_limit_rhs, py::arg("alpha"), py::arg("K"), py::arg("T"),
          py::arg("delta"));

    m.def(
        "sweep",
        [](const std::string& config_text, std::size_t workers) {
            const SweepConfig cfg = sweep_config_from(KeyValueConfig::parse(config_text, "<python>"));
            SweepResult r;
            {
                py::gil_scoped_release release;
                r = run_sweep(cfg, workers);
            }
            return sweep_csv(cfg, r);
        },
        py::arg("config"), py::arg("workers") = 1);
}
