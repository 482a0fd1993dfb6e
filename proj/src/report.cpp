#include "plap/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace plap::io {

namespace {

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json array_of(const std::vector<double>& xs) {
    Json a = Json::array();
    for (double x : xs) a.push_back(number_or_null(x));
    return a;
}

void emit(std::string& out, const Json& v, int depth) {
    const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
    switch (v.type()) {
        case Json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, value] : v.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(key).dump() + ": ";
                emit(out, value, depth + 1);
            }
            out += "\n" + close + "}";
            return;
        }
        case Json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            const bool scalars = std::all_of(v.begin(), v.end(), [](const Json& x) {
                return x.is_primitive();
            });
            if (scalars) {
                out += "[";
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (i) out += ", ";
                    emit(out, v[i], depth + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                emit(out, v[i], depth + 1);
            }
            out += "\n" + close + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double x = v.get<double>();
            out += std::isfinite(x) ? format_double(x) : "null";
            return;
        }
        default:
            out += v.dump();
    }
}

}  // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string dump(const Json& value) {
    std::string out;
    emit(out, value, 0);
    out += "\n";
    return out;
}

Json to_json(const solver::SolveReport& r) {
    Json j;
    j["iterations_used"] = r.iterations_used;
    j["converged"] = r.converged;
    j["capped"] = r.capped;
    j["sup_deltas"] = array_of(r.sup_deltas);
    j["final_residual"] = number_or_null(r.final_residual);
    if (r.monotone_in_k_violation) {
        const auto& v = *r.monotone_in_k_violation;
        j["monotone_in_k_violation"] = {{"iteration", v.iteration},
                                        {"component", v.component + 1},
                                        {"node", v.node},
                                        {"magnitude", v.magnitude}};
    } else {
        j["monotone_in_k_violation"] = nullptr;
    }
    return j;
}

Json to_json(const criteria::Verdict& v) {
    Json j;
    j["kind"] = std::string(criteria::to_string(v.kind));
    j["tail_exponent_estimate"] = number_or_null(v.tail_exponent_estimate);
    j["window_slopes"] = array_of(v.window_slopes);
    j["window_increments"] = array_of(v.window_increments);
    j["evidence_range"] = array_of({v.evidence_range.first, v.evidence_range.second});
    j["decided_by"] = std::string(criteria::to_string(v.decided_by));
    j["degenerate"] = v.degenerate;
    j["note"] = v.note;
    return j;
}

Json to_json(const criteria::CriteriaReport& r) {
    Json j;
    j["prediction"] = std::string(criteria::to_string(r.prediction));
    j["details"] = r.details;
    j["c3"] = to_json(r.c3);
    j["cond5"] = to_json(r.cond5);
    j["cond5"]["epsilon"] = r.cond5_epsilon;
    j["cond5b"] = to_json(r.cond5b);
    j["cond12"] = Json::array();
    for (const auto& v : r.cond12) j["cond12"].push_back(to_json(v));
    j["cond13"] = to_json(r.cond13);
    j["cond13"]["epsilon"] = r.cond13_epsilon;
    if (r.weight.eventually_monotone)
        j["weight_monotone"] = {{"kind", "FromRadius"},
                                {"radius", r.weight.from_radius},
                                {"index", r.weight.from_index}};
    else
        j["weight_monotone"] = {{"kind", "NotEventuallyMonotone"}};
    j["branches"] = {{"bounded_exists", r.bounded_exists_fires},
                     {"no_bounded_radial", r.no_bounded_radial_fires},
                     {"all_solutions_large", r.all_solutions_large_fires}};
    j["degenerate_coefficients"] = r.degenerate_coefficients;
    j["hypotheses_violated"] = r.hypotheses_violated;
    j["notes"] = r.notes;
    return j;
}

Json to_json(const verify::ResidualReport& r) {
    return {{"sup_fixed_point_residual", number_or_null(r.sup_fixed_point_residual)},
            {"sup_ode_residual_interior", number_or_null(r.sup_ode_residual_interior)},
            {"node_of_max", r.node_of_max},
            {"component_of_max", r.component_of_max + 1}};
}

Json to_json(const verify::GrowthReport& r) {
    Json j;
    j["classification"] = std::string(verify::to_string(r.classification));
    j["exponent_estimate"] = number_or_null(r.exponent_estimate);
    j["unbounded_surrogate"] = std::isinf(r.exponent_estimate);
    j["domain_radii"] = array_of(r.domain_radii);
    j["sup_values"] = array_of(r.sup_values);
    j["slopes"] = array_of(r.slopes);
    j["iterations"] = r.iterations;
    j["converged"] = Json(std::vector<bool>(r.converged));
    j["capped"] = Json(std::vector<bool>(r.capped));
    j["note"] = r.note;
    return j;
}

void write_profiles_csv(std::ostream& out, const solver::ProfileSet& profiles) {
    out << "r";
    for (std::size_t i = 1; i <= profiles.components(); ++i) out << ",u" << i;
    out << "\n";
    const auto r = profiles.grid.nodes();
    for (std::size_t k = 0; k < r.size(); ++k) {
        out << format_double(r[k]);
        for (const auto& u : profiles.profiles) out << ',' << format_double(u[k]);
        out << '\n';
    }
}

void write_profiles_csv(const std::filesystem::path& path, const solver::ProfileSet& profiles) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    write_profiles_csv(out, profiles);
}

solver::ProfileSet read_profiles_csv(const std::filesystem::path& path, std::size_t m) {
    std::ifstream in(path);
    if (!in) throw SchemaError("--profile", "cannot open '" + path.string() + "'");
    std::string line;
    std::getline(in, line);
    std::string expected = "r";
    for (std::size_t i = 1; i <= m; ++i) expected += ",u" + std::to_string(i);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected) throw SchemaError("--profile", "header must be '" + expected + "'");

    std::vector<double> r;
    std::vector<std::vector<double>> u(m);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw SchemaError("--profile", "row " + std::to_string(row) + ": bad number");
            }
        }
        if (values.size() != m + 1)
            throw SchemaError("--profile", "row " + std::to_string(row) + ": expected " +
                                               std::to_string(m + 1) + " columns");
        r.push_back(values[0]);
        for (std::size_t i = 0; i < m; ++i) u[i].push_back(values[i + 1]);
    }
    try {
        return {grid::RadialGrid::from_nodes(std::move(r)), std::move(u)};
    } catch (const InvalidArgument& e) {
        throw SchemaError("--profile", e.what());
    }
}

}  // namespace plap::io
