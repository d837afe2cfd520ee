#include "qcollect/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qcollect::io {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return j;
}

TensorShape shape_from_json(const json& j) {
    if (!j.contains("k") || !j.contains("n") || !j["k"].is_number_integer() ||
        !j["n"].is_number_integer())
        throw ParseError("state file needs integer fields \"k\" and \"n\"");
    try {
        return TensorShape(j["k"].get<int>(), j["n"].get<int>());
    } catch (const Error& e) {
        throw ParseError(std::string("bad shape: ") + e.what());
    }
}

cdouble complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("complex entries must be [re, im] pairs");
    return cdouble(j[0].get<double>(), j[1].get<double>());
}

json complex_to_json(const cdouble& z) {
    return json::array({z.real(), z.imag()});
}

}  // namespace

DensityMatrix load_density(const std::string& path, double tol) {
    const json j = parse_file(path);
    const TensorShape shape = shape_from_json(j);
    if (!j.contains("matrix") || !j["matrix"].is_array())
        throw ParseError("density state file needs a \"matrix\" array");
    const auto& rows = j["matrix"];
    const std::size_t d = shape.total_dim();
    if (rows.size() != d) throw ParseError("matrix row count does not match N^K");
    ComplexMatrix m(d, d);
    for (std::size_t r = 0; r < d; ++r) {
        if (!rows[r].is_array() || rows[r].size() != d)
            throw ParseError("matrix must be square with N^K columns");
        for (std::size_t c = 0; c < d; ++c) m(r, c) = complex_from_json(rows[r][c]);
    }
    return validate_density(m, shape, tol);
}

PureState load_pure(const std::string& path, double tol) {
    const json j = parse_file(path);
    const TensorShape shape = shape_from_json(j);
    if (!j.contains("amplitudes") || !j["amplitudes"].is_array())
        throw ParseError("pure state file needs an \"amplitudes\" array");
    const auto& amps = j["amplitudes"];
    if (amps.size() != shape.total_dim())
        throw ParseError("amplitude count does not match N^K");
    std::vector<cdouble> v(amps.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = complex_from_json(amps[i]);
    return PureState(shape, std::move(v), tol);
}

LoadedState load_state(const std::string& path, double tol) {
    const json j = parse_file(path);
    if (j.contains("amplitudes")) return load_pure(path, tol);
    if (j.contains("matrix")) return load_density(path, tol);
    throw ParseError("state file needs either \"amplitudes\" or \"matrix\"");
}

std::string density_to_json(const DensityMatrix& rho) {
    json j;
    j["k"] = rho.shape().subsystems;
    j["n"] = rho.shape().local_dim;
    json rows = json::array();
    const std::size_t d = rho.shape().total_dim();
    for (std::size_t r = 0; r < d; ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < d; ++c) row.push_back(complex_to_json(rho.mat()(r, c)));
        rows.push_back(row);
    }
    j["matrix"] = rows;
    return j.dump(2);
}

std::string pure_to_json(const PureState& psi) {
    json j;
    j["k"] = psi.shape().subsystems;
    j["n"] = psi.shape().local_dim;
    json amps = json::array();
    for (const auto& z : psi.amplitudes()) amps.push_back(complex_to_json(z));
    j["amplitudes"] = amps;
    return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << contents;
}

}  // namespace qcollect::io
