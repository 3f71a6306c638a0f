#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "shiftwalk/builtins.hpp"
#include "shiftwalk/conjugacy.hpp"
#include "shiftwalk/limits.hpp"
#include "shiftwalk/rng.hpp"
#include "shiftwalk/stats.hpp"
#include "shiftwalk/transfer.hpp"
#include "shiftwalk/walk.hpp"

namespace py = pybind11;
using namespace shiftwalk;

namespace {

// Python callers pass plain seeds; path-level RNG stays on the C++ side.
std::function<double(std::mt19937_64&)> uniform_init() {
  return [](std::mt19937_64& r) { return uniform01(r); };
}

CtrwInit parse_init(const std::string& kind) {
  if (kind == "invariant") return CtrwInit::invariant;
  if (kind == "cond_invariant") return CtrwInit::cond_invariant;
  if (kind == "uniform") return CtrwInit::uniform;
  throw std::invalid_argument("init must be invariant|cond_invariant|uniform");
}

}  // namespace

PYBIND11_MODULE(_shiftwalk, m) {
  m.doc() = "Shift-periodic interval maps: walks, spectral densities, and "
            "stochastic scaling limits";

  py::class_<ShiftPeriodicMap>(m, "Map")
      .def_property_readonly("name",
                             [](const ShiftPeriodicMap& s) { return s.name; })
      .def_property_readonly(
          "params", [](const ShiftPeriodicMap& s) { return s.params; })
      .def("eval",
           [](const ShiftPeriodicMap& s, double x) { return s.eval(x).v; })
      .def("eval_restricted", &ShiftPeriodicMap::eval_restricted)
      .def("breakpoints", &ShiftPeriodicMap::breakpoints);

  m.def("builtin", &builtin, py::arg("name"),
        py::arg("params") = std::map<std::string, double>{});
  m.def("builtin_names", &builtin_names);

  m.def(
      "validate",
      [](const ShiftPeriodicMap& map, int grid_n, double tol) {
        auto r = validate(map, grid_n, tol);
        py::list v;
        for (const auto& viol : r.violations)
          v.append(py::make_tuple(viol.condition, viol.witness, viol.detail));
        return py::dict(py::arg("is_shift_periodic") = r.is_shift_periodic,
                        py::arg("has_integer_spikes") = r.has_integer_spikes,
                        py::arg("violations") = v);
      },
      py::arg("map"), py::arg("grid_n") = 2000, py::arg("tol") = 1e-9);

  py::class_<WalkRecord>(m, "WalkRecord")
      .def_readonly("fractional", &WalkRecord::fractional)
      .def_readonly("cocycle", &WalkRecord::cocycle)
      .def_readonly("singular_hit", &WalkRecord::singular_hit)
      .def("position", &WalkRecord::position);
  m.def("iterate", &iterate, py::arg("map"), py::arg("x0"), py::arg("n"));

  py::class_<TransitionTable>(m, "TransitionTable")
      .def_readonly("p", &TransitionTable::p)
      .def_readonly("tail_mass", &TransitionTable::tail_mass)
      .def("mean", &TransitionTable::mean)
      .def("second_moment", &TransitionTable::second_moment);
  m.def("transition_table", &transition_table, py::arg("map"),
        py::arg("bound") = 1000000LL);
  m.def(
      "empirical_transitions",
      [](const ShiftPeriodicMap& map, size_t n, uint64_t seed) {
        return empirical_transitions(map, uniform_init(), n, seed);
      },
      py::arg("map"), py::arg("n"), py::arg("seed"));

  py::class_<IndependenceResult>(m, "IndependenceResult")
      .def_readonly("statistic", &IndependenceResult::statistic)
      .def_readonly("dof", &IndependenceResult::dof)
      .def_readonly("quantile", &IndependenceResult::quantile)
      .def_readonly("independent", &IndependenceResult::independent)
      .def_readonly("insufficient_counts",
                    &IndependenceResult::insufficient_counts);
  m.def(
      "increment_independence_test",
      [](const ShiftPeriodicMap& map, size_t n_steps, size_t n_paths,
         uint64_t seed, double level, int threads) {
        return increment_independence_test(map, uniform_init(), n_steps,
                                           n_paths, seed, level, threads);
      },
      py::arg("map"), py::arg("n_steps"), py::arg("n_paths"), py::arg("seed"),
      py::arg("level") = 0.999, py::arg("threads") = 1);

  py::class_<UlamApproximation>(m, "UlamApproximation")
      .def_readonly("grid", &UlamApproximation::grid)
      .def_readonly("stationary", &UlamApproximation::stationary)
      .def_readonly("tail_mass", &UlamApproximation::tail_mass)
      .def("density_at", &UlamApproximation::density_at);
  m.def(
      "ulam_invariant_density",
      [](const ShiftPeriodicMap& map, size_t grid_n, long long bound,
         int threads) {
        return ulam_invariant_density(map, grid_n, bound, threads);
      },
      py::arg("map"), py::arg("grid_n"), py::arg("bound") = 1024LL,
      py::arg("threads") = 1);
  m.def(
      "ulam_invariant_density_on",
      [](const ShiftPeriodicMap& map, std::vector<double> grid,
         long long bound, int threads) {
        return ulam_invariant_density(map, std::move(grid), bound, threads);
      },
      py::arg("map"), py::arg("grid"), py::arg("bound") = 1024LL,
      py::arg("threads") = 1);
  m.def("example1_adaptive_grid", &example1_adaptive_grid, py::arg("eps"),
        py::arg("n_levels"), py::arg("per_plateau"));

  m.def("hole_measure", &hole_measure, py::arg("eps"), py::arg("delta"));
  m.def(
      "cond_invariant_density",
      [](double eps, double delta) {
        auto c = cond_invariant_density(eps, delta);
        auto d = c.density();
        return py::dict(py::arg("nu") = c.nu, py::arg("breaks") = d.breaks,
                        py::arg("values") = d.values);
      },
      py::arg("eps"), py::arg("delta"));

  py::class_<StableParams>(m, "StableParams")
      .def(py::init<double, double>(), py::arg("alpha"), py::arg("beta"))
      .def_readonly("alpha", &StableParams::alpha)
      .def_readonly("beta", &StableParams::beta);
  m.def("stable_cdf", &stable_cdf, py::arg("params"), py::arg("x"));
  m.def(
      "stable_samples",
      [](const StableParams& p, size_t n, uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::vector<double> out(n);
        for (double& v : out) v = stable_sample(p, rng);
        return out;
      },
      py::arg("params"), py::arg("n"), py::arg("seed"));

  py::class_<TailFit>(m, "TailFit")
      .def_readonly("kappa", &TailFit::kappa)
      .def_readonly("c_plus", &TailFit::c_plus)
      .def_readonly("c_minus", &TailFit::c_minus)
      .def_readonly("light_tailed", &TailFit::light_tailed);
  m.def("tail_constants", &tail_constants, py::arg("map"),
        py::arg("m_max") = 1e4);

  py::class_<ScalingPlan>(m, "ScalingPlan")
      .def_readonly("kappa", &ScalingPlan::kappa)
      .def("alpha", &ScalingPlan::alpha)
      .def("beta", &ScalingPlan::beta)
      .def("a_n", &ScalingPlan::a_n)
      .def("b_n", &ScalingPlan::b_n);
  m.def("scaling_plan", &scaling_plan, py::arg("kappa"), py::arg("c_plus"),
        py::arg("c_minus"), py::arg("mean") = std::optional<double>{},
        py::arg("variance") = std::optional<double>{});

  m.def(
      "simulate_vn_ensemble",
      [](const ShiftPeriodicMap& map, size_t n, double t,
         const ScalingPlan& plan, size_t n_paths, uint64_t seed,
         int threads) {
        return simulate_vn_ensemble(map, uniform_init(), n, t, plan, n_paths,
                                    seed, threads);
      },
      py::arg("map"), py::arg("n"), py::arg("t"), py::arg("plan"),
      py::arg("n_paths"), py::arg("seed"), py::arg("threads") = 1);

  m.def("ctrw_gamma", &ctrw_gamma, py::arg("eps"), py::arg("delta"));
  py::class_<JumpRecord>(m, "JumpRecord")
      .def_readonly("m", &JumpRecord::m)
      .def_readonly("jump_times", &JumpRecord::jump_times)
      .def_readonly("jump_signs", &JumpRecord::jump_signs)
      .def_readonly("horizon", &JumpRecord::horizon);
  m.def(
      "simulate_ctrw_ensemble",
      [](double eps, double delta, size_t m_scale, double horizon,
         const std::string& init, size_t n_paths, uint64_t seed,
         int threads) {
        return simulate_ctrw_ensemble(eps, delta, m_scale, horizon,
                                      parse_init(init), n_paths, seed,
                                      threads);
      },
      py::arg("eps"), py::arg("delta"), py::arg("m"), py::arg("horizon"),
      py::arg("init"), py::arg("n_paths"), py::arg("seed"),
      py::arg("threads") = 1);
  py::class_<WaitingTimeReport>(m, "WaitingTimeReport")
      .def_readonly("statistic", &WaitingTimeReport::statistic)
      .def_readonly("n", &WaitingTimeReport::n)
      .def_readonly("critical_5", &WaitingTimeReport::critical_5)
      .def_readonly("critical_1", &WaitingTimeReport::critical_1)
      .def_readonly("reject_5", &WaitingTimeReport::reject_5)
      .def_readonly("reject_1", &WaitingTimeReport::reject_1);
  m.def("waiting_time_test", &waiting_time_test, py::arg("records"),
        py::arg("gamma"));

  py::class_<HomeomorphismApprox>(m, "HomeomorphismApprox")
      .def_readonly("depth", &HomeomorphismApprox::depth)
      .def_property_readonly(
          "knots", [](const HomeomorphismApprox& h) { return h.knots; })
      .def("__call__", &HomeomorphismApprox::operator())
      .def("inverse", &HomeomorphismApprox::inverse);
  m.def(
      "build_h",
      [](const ShiftPeriodicMap& map, int depth, long long bound,
         double prune_width) {
        BuildHOptions opts;
        opts.bound = bound;
        opts.prune_width = prune_width;
        return build_h(map, depth, opts);
      },
      py::arg("map"), py::arg("depth"), py::arg("bound") = 1024LL,
      py::arg("prune_width") = 1e-12);
  m.def("conjugacy_residual", &conjugacy_residual, py::arg("h"),
        py::arg("map"), py::arg("probes") = 10000);

  py::class_<KsResult>(m, "KsResult")
      .def_readonly("statistic", &KsResult::statistic)
      .def_readonly("critical", &KsResult::critical)
      .def_readonly("n", &KsResult::n)
      .def_readonly("reject", &KsResult::reject);
  m.def(
      "ks_test",
      [](std::vector<double> samples, const std::function<double(double)>& cdf,
         double level) { return ks_test(std::move(samples), cdf, level); },
      py::arg("samples"), py::arg("cdf"), py::arg("level") = 0.05);
  m.def("ks_two_sample", &ks_two_sample, py::arg("a"), py::arg("b"),
        py::arg("level") = 0.05);
}
