#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "plap/report.hpp"

namespace py = pybind11;
using plap::io::Json;

namespace {

Json to_native(const py::object& obj) {
    const std::string text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
    return Json::parse(text);
}

py::object to_python(const Json& j) {
    return py::module_::import("json").attr("loads")(plap::io::dump(j));
}

plap::io::LoadedProblem load(const py::dict& problem) {
    return plap::io::load_problem(to_native(problem));
}

py::dict solve(const py::dict& problem) {
    const auto loaded = load(problem);
    const auto grid = loaded.grid.make();
    const auto result = [&] {
        py::gil_scoped_release release;
        return plap::solver::solve_radial_system(loaded.spec, grid, loaded.iteration);
    }();
    const auto residuals = plap::verify::fixed_point_residual(loaded.spec, grid, result.profiles);
    py::dict out;
    const auto r = grid.nodes();
    out["r"] = std::vector<double>(r.begin(), r.end());
    out["u"] = result.profiles.profiles;
    out["report"] = to_python(plap::io::to_json(result.report));
    out["residuals"] = to_python(plap::io::to_json(residuals));
    out["warnings"] = loaded.warnings;
    return out;
}

py::object predict(const py::dict& problem, std::optional<double> epsilon) {
    const auto loaded = load(problem);
    plap::criteria::CriteriaReport report;
    {
        py::gil_scoped_release release;
        report = plap::criteria::predict(loaded.spec, epsilon.value_or(loaded.epsilon));
    }
    return to_python(plap::io::to_json(report));
}

py::object sweep(const py::dict& problem, std::optional<double> base_r, int doublings) {
    const auto loaded = load(problem);
    plap::verify::GrowthReport report;
    {
        py::gil_scoped_release release;
        report = plap::verify::classify_growth(loaded.spec, base_r.value_or(loaded.grid.r_max),
                                               doublings, loaded.iteration, loaded.grid.points);
    }
    return to_python(plap::io::to_json(report));
}

py::object residuals(const py::dict& problem, std::vector<double> r,
                     std::vector<std::vector<double>> u) {
    const auto loaded = load(problem);
    plap::solver::ProfileSet profiles{plap::grid::RadialGrid::from_nodes(std::move(r)), std::move(u)};
    return to_python(plap::io::to_json(
        plap::verify::fixed_point_residual(loaded.spec, profiles.grid, profiles)));
}

double evaluate(const std::string& source, const std::map<std::string, double>& bindings) {
    std::vector<std::string> names;
    for (const auto& [name, value] : bindings) names.push_back(name);
    return plap::expr::parse(source, names).evaluate(bindings);
}

}  // namespace

PYBIND11_MODULE(_plap, m) {
    m.doc() = "Radial solutions and existence criteria for p-Laplacian systems";
    m.attr("__version__") = PLAP_VERSION;

    static py::exception<plap::Error> error(m, "Error", PyExc_ValueError);
    static py::exception<plap::io::SchemaError> schema(m, "SchemaError", error.ptr());
    static py::exception<plap::io::ExpressionError> expression(m, "ExpressionError", error.ptr());
    static py::exception<plap::DomainError> domain(m, "DomainError", error.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const plap::io::SchemaError& e) {
            py::set_error(schema, e.what());
        } catch (const plap::io::ExpressionError& e) {
            py::set_error(expression, e.what());
        } catch (const plap::SyntaxError& e) {
            py::set_error(expression, e.what());
        } catch (const plap::UnknownIdentifier& e) {
            py::set_error(expression, e.what());
        } catch (const plap::ArityError& e) {
            py::set_error(expression, e.what());
        } catch (const plap::DomainError& e) {
            py::set_error(domain, e.what());
        } catch (const plap::Error& e) {
            py::set_error(error, e.what());
        }
    });

    m.def("solve", &solve, py::arg("problem"),
          "Solve a problem dict (problem-file schema). Returns r, u, report, residuals, warnings.");
    m.def("predict", &predict, py::arg("problem"), py::arg("epsilon") = py::none(),
          "Criteria report for a problem dict.");
    m.def("sweep", &sweep, py::arg("problem"), py::arg("base_r") = py::none(),
          py::arg("doublings") = 4, "Growth classification over doubling domains.");
    m.def("residuals", &residuals, py::arg("problem"), py::arg("r"), py::arg("u"),
          "Fixed-point and ODE residuals of given profiles.");
    m.def("evaluate", &evaluate, py::arg("expression"), py::arg("bindings"),
          "Evaluate an expression with the given variable bindings.");
}
