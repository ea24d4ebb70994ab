#include "fieldsense/anneal.hpp"
#include "fieldsense/basis.hpp"
#include "fieldsense/error.hpp"
#include "fieldsense/fielddata.hpp"
#include "fieldsense/modeleval.hpp"
#include "fieldsense/placement.hpp"
#include "fieldsense/reconstruct.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace fieldsense;

namespace {

std::vector<Index> as_list(const Placement& p) { return p.indices(); }

} // namespace

PYBIND11_MODULE(_fieldsense, m) {
    m.doc() = "Sparse sensor placement and low-rank field reconstruction";

    static py::exception<fieldsense::Error> error(m, "FieldsenseError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr ptr) {
        try {
            if (ptr)
                std::rethrow_exception(ptr);
        } catch (const fieldsense::Error& e) {
            if (e.kind() == ErrorKind::InvalidArgument)
                PyErr_SetString(PyExc_ValueError, e.what());
            else
                py::set_error(error, e.what());
        }
    });

    py::class_<GridGeometry>(m, "GridGeometry")
        .def(py::init<Index, Index, std::vector<std::uint8_t>>(), py::arg("height"), py::arg("width"), py::arg("mask"))
        .def_static("full", &GridGeometry::full, py::arg("height"), py::arg("width"))
        .def_property_readonly("height", &GridGeometry::height)
        .def_property_readonly("width", &GridGeometry::width)
        .def_property_readonly("valid_count", &GridGeometry::valid_count)
        .def_property_readonly("mask", &GridGeometry::mask);

    py::class_<TrainingSet>(m, "TrainingSet")
        .def(py::init<Matrix, GridGeometry, std::vector<std::int64_t>>(), py::arg("data"), py::arg("geometry"),
             py::arg("timestamps") = std::vector<std::int64_t>{})
        .def_property_readonly("data", &TrainingSet::data)
        .def_property_readonly("geometry", &TrainingSet::geometry)
        .def_property_readonly("locations", &TrainingSet::locations)
        .def_property_readonly("snapshots", &TrainingSet::snapshots);

    py::class_<SvdFactorization>(m, "SvdFactorization")
        .def_readonly("left_modes", &SvdFactorization::left_modes)
        .def_readonly("singular_values", &SvdFactorization::singular_values)
        .def_readonly("right_modes", &SvdFactorization::right_modes)
        .def_property_readonly("mean", [](const SvdFactorization& f) { return f.mean.values; });

    py::class_<Basis>(m, "Basis")
        .def_readonly("modes", &Basis::modes)
        .def_readonly("singular_values", &Basis::singular_values)
        .def_property_readonly("mean", [](const Basis& b) { return b.mean.values; })
        .def_property_readonly("rank", &Basis::rank);

    m.def("synth_field", &synth_field, py::arg("geometry"), py::arg("n_modes"), py::arg("snapshots"),
          py::arg("noise_std"), py::arg("seed"));
    m.def("noise_std_for_snr", &noise_std_for_snr, py::arg("clean"), py::arg("snr_db"));
    m.def("compute_svd", &compute_svd, py::arg("training"));
    m.def("truncate", &fieldsense::truncate, py::arg("factorization"), py::arg("rank"));
    m.def("svht_rank", &svht_rank, py::arg("factorization"), py::arg("noise_std") = std::nullopt);
    m.def("projection_error", &projection_error, py::arg("basis"), py::arg("training"));

    m.def("qdeim_placement", [](const Basis& b) { return as_list(qdeim_placement(b)); }, py::arg("basis"));
    m.def("random_placement",
          [](Index m_rows, Index r, std::uint64_t seed) { return as_list(random_placement(CandidateSet::all(m_rows), r, seed)); },
          py::arg("locations"), py::arg("count"), py::arg("seed"));
    m.def("placement_mse",
          [](const std::vector<Index>& p, const TrainingSet& ts, const Basis& b) { return placement_mse(Placement(p), ts, b); },
          py::arg("placement"), py::arg("training"), py::arg("basis"));
    m.def("condition_number",
          [](const std::vector<Index>& p, const Basis& b) { return InterpolationSystem(Placement(p), b).condition_number(); },
          py::arg("placement"), py::arg("basis"));
    m.def(
        "reconstruct",
        [](const Matrix& readings, const std::vector<Index>& p, const Basis& b) {
            return reconstruct_series(ObservationSet{readings, Placement(p)}, b).fields;
        },
        py::arg("readings"), py::arg("placement"), py::arg("basis"));

    m.def(
        "optimize_placement",
        [](const TrainingSet& ts, const Basis& b, Index iterations, double rho, std::uint64_t seed, const std::string& init,
           std::optional<std::vector<Index>> candidates) {
            const CandidateSet cs = candidates ? CandidateSet(*candidates, ts.locations()) : CandidateSet::all(ts.locations());
            if (init != "random" && init != "qdeim")
                throw py::value_error("init must be 'random' or 'qdeim'");
            const AnnealConfig cfg{iterations, rho, seed, init == "qdeim" ? InitRule::Qdeim : InitRule::Random};
            const OptimizationResult res = optimize_placement(ts, cs, b, cfg);
            py::dict out;
            out["placement"] = as_list(res.placement);
            out["mse"] = res.mse;
            out["trace"] = res.trace.best_mse;
            out["accepted"] = res.accepted;
            return out;
        },
        py::arg("training"), py::arg("basis"), py::arg("iterations") = 1000, py::arg("accept_probability") = 0.9,
        py::arg("seed") = 0, py::arg("init") = "random", py::arg("candidates") = std::nullopt);
    m.def(
        "brute_force_placement",
        [](const TrainingSet& ts, const Basis& b) {
            const BruteForceResult res = brute_force_placement(ts, CandidateSet::all(ts.locations()), b);
            return py::make_tuple(as_list(res.placement), res.mse);
        },
        py::arg("training"), py::arg("basis"));

    m.def(
        "gamma_criterion",
        [](const Basis& b, const std::vector<std::vector<Index>>& placements, std::optional<double> rv, Index iterations) {
            std::vector<Placement> ps;
            for (const auto& p : placements)
                ps.emplace_back(p);
            return gamma_criterion(fit_state_space(b, rv), ps, iterations);
        },
        py::arg("basis"), py::arg("placements"), py::arg("observation_variance") = std::nullopt,
        py::arg("iterations") = 200);
}
