#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "envcva/credit_curves.hpp"
#include "envcva/cva_core.hpp"
#include "envcva/dependence_calibration.hpp"
#include "envcva/error.hpp"
#include "envcva/pipeline.hpp"
#include "envcva/robust_wwr.hpp"
#include "envcva/scenario_translation.hpp"

namespace py = pybind11;
using namespace envcva;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Climate and nature CVA engine";
    m.attr("__version__") = ENVCVA_VERSION;

    const auto& base = py::register_exception<Error>(m, "EnvcvaError");
    py::register_exception<ValidationError>(m, "ValidationError", base);
    py::register_exception<DataError>(m, "DataError", base);
    py::register_exception<NumericError>(m, "NumericError", base);

    m.def(
        "kl_upper_bound",
        [](const std::vector<double>& losses, double epsilon) {
            const auto b = solve_kl_bound(losses, epsilon);
            py::dict d;
            d["bound"] = b.bound;
            d["eta_star"] = b.eta_star;
            d["achieved_kl"] = b.achieved_kl;
            d["sample_mean"] = b.sample_mean;
            d["weights"] = b.weights;
            return d;
        },
        py::arg("losses"), py::arg("epsilon"));

    m.def(
        "flat_hazard_from_spread",
        [](double spread, double recovery, double maturity, int frequency, double rate) {
            return calibrate_flat_hazard({spread, recovery, maturity, frequency}, DiscountCurve::flat(rate));
        },
        py::arg("spread"), py::arg("recovery") = 0.4, py::arg("maturity") = 5.0, py::arg("frequency") = 4,
        py::arg("rate") = 0.04);

    m.def(
        "corner_decomposition",
        [](double c00, double c10, double c01, double c11) {
            const auto d = corner_decomposition(c00, c10, c01, c11);
            py::dict out;
            out["credit"] = d.credit;
            out["market"] = d.market;
            out["interaction"] = d.interaction;
            out["total"] = d.total;
            out["interaction_share"] = d.interaction_share;
            return out;
        },
        py::arg("cva_00"), py::arg("cva_10"), py::arg("cva_01"), py::arg("cva_11"));

    m.def(
        "distribution_summary",
        [](const std::vector<double>& values, double policy_only) {
            const auto s = distribution_summary(values, policy_only);
            py::dict out;
            out["n"] = s.n;
            out["policy_only"] = s.policy_only;
            out["median"] = s.median;
            out["mean"] = s.mean;
            out["var95"] = s.var95;
            out["es95"] = s.es95;
            out["var99"] = s.var99;
            out["es99"] = s.es99;
            out["prob_negative"] = s.prob_negative;
            return out;
        },
        py::arg("values"), py::arg("policy_only") = 0.0);

    m.def(
        "two_stage",
        [](const std::vector<double>& ratio) {
            std::vector<double> grid(ratio.size());
            for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i);
            const auto r = two_stage_transmission(ratio, {}, TwoStageParams{}, grid, "py");
            return py::make_tuple(r.multiplier.values, r.recovery.recovery);
        },
        py::arg("ratio"), "Hazard multiplier and recovery paths under the default two-stage parameters.");

    m.def("kendall_tau", [](const std::vector<double>& x, const std::vector<double>& y) { return kendall_tau(x, y); });

    m.def(
        "run",
        [](const std::string& command, const std::filesystem::path& config, const std::filesystem::path& out_dir,
           std::optional<std::uint64_t> seed) {
            const auto cfg = pipeline::load_config(config);
            py::gil_scoped_release release;
            return pipeline::run(pipeline::parse_command(command), cfg, {out_dir, seed, false}).run_json;
        },
        py::arg("command"), py::arg("config"), py::arg("out_dir"), py::arg("seed") = py::none(),
        "Run one pipeline command; returns the run.json text.");
}
