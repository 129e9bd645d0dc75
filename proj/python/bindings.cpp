#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ignorance/anticipation.hpp"
#include "ignorance/credence.hpp"
#include "ignorance/scenario.hpp"
#include "ignorance/tree.hpp"
#include "ignorance/update.hpp"

namespace py = pybind11;
using namespace ignorance;

namespace {

// JSON crosses the boundary as text and is decoded by the stdlib.
py::object decode(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json encode(const py::object& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

const char* code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::MissingSlot: return "missing_slot";
    case ErrorCode::NegativeProbability: return "negative_probability";
    case ErrorCode::LogSingularity: return "log_singularity";
    case ErrorCode::Unregistered: return "unregistered";
    case ErrorCode::Duplicate: return "duplicate";
    case ErrorCode::Sequence: return "sequence";
    case ErrorCode::Schema: return "schema";
  }
  return "unknown";
}

RunConfig config_of(const std::string& mode, double tolerance, bool oracle) {
  return {assignment_mode_from_string(mode), tolerance, oracle};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Maximum-ignorance belief updating.";

  static py::exception<Error> error(m, "IgnoranceError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error)(e.what());
      exc.attr("code") = code_name(e.code());
      exc.attr("exit_status") = exit_code(e);
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("count_joint_paths", &count_joint_paths, py::arg("depth"));
  m.def("credence_gap", &credence_gap, py::arg("k"), py::arg("beta"), py::arg("x"));
  m.def("credence_gap_argmin", &credence_gap_argmin, py::arg("beta"));
  m.def("credence_remainder", &credence_remainder, py::arg("k"), py::arg("beta"), py::arg("x"), py::arg("mu"));
  m.def(
      "expectation",
      [](double k, double beta, int x, double mu, bool enforce) {
        return decode(to_json(expectation_report(k, beta, x, mu, enforce)));
      },
      py::arg("k"), py::arg("beta"), py::arg("x") = 5, py::arg("mu") = 1.0, py::arg("enforce_normalization") = false);

  m.def("fixtures", &list_fixtures);
  m.def("fixture_source", &fixture_source, py::arg("name"));
  m.def("schema", [] { return decode(json::parse(scenario_schema())); });

  m.def(
      "parse_scenario", [](const std::string& text) { return decode(to_json(parse_scenario(text))); },
      py::arg("text"));
  m.def(
      "run_scenario",
      [](const std::string& text, const std::string& mode, double tolerance, bool oracle) {
        const auto report = run(parse_scenario(text), config_of(mode, tolerance, oracle));
        py::dict out = decode(to_json(report));
        out["exit_status"] = exit_code(report);
        return out;
      },
      py::arg("text"), py::arg("mode") = "anticipation", py::arg("tolerance") = 1e-6, py::arg("oracle") = false);
  m.def(
      "render_text",
      [](const std::string& text, const std::string& mode, double tolerance, bool oracle) {
        return render_text(run(parse_scenario(text), config_of(mode, tolerance, oracle)));
      },
      py::arg("text"), py::arg("mode") = "anticipation", py::arg("tolerance") = 1e-6, py::arg("oracle") = false);

  py::class_<Session>(m, "Session")
      .def(py::init<>())
      .def(
          "apply", [](Session& s, const py::object& event) { s = apply(std::move(s), event_from_json(encode(event))); },
          py::arg("event"))
      .def_property_readonly("label", &Session::label)
      .def_property_readonly("ordinal", &Session::ordinal)
      .def_property_readonly("frontier",
                             [](const Session& s) {
                               std::vector<std::string> ids;
                               for (const auto& p : s.frontier()) ids.push_back(p.id);
                               return ids;
                             })
      .def("digest", [](const Session& s) { return digest(s); })
      .def("to_dict", [](const Session& s) { return decode(to_json(s)); });
}
