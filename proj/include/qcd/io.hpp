#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcd/chandiv.hpp"
#include "qcd/channel.hpp"
#include "qcd/protosim.hpp"
#include "qcd/states.hpp"

namespace qcd {

using nlohmann::json;

// Matrices travel as row-major lists of [re, im] pairs; shapes come from the
// surrounding object. nlohmann emits shortest round-trip decimals, so a
// save/load cycle is bit-exact.

inline json matrix_to_json(const ComplexMatrix& m) {
    json entries = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            entries.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    return entries;
}

inline ComplexMatrix matrix_from_json(const json& entries, std::size_t rows, std::size_t cols) {
    if (!entries.is_array() || entries.size() != rows * cols)
        throw DimError("matrix_from_json: entry count does not match the declared shape");
    ComplexMatrix m(rows, cols);
    std::size_t k = 0;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j, ++k)
            m(i, j) = Complex(entries[k].at(0).get<double>(), entries[k].at(1).get<double>());
    return m;
}

inline json state_to_json(const DensityMatrix& rho) {
    return json{{"dim", rho.dim()}, {"matrix", matrix_to_json(rho.matrix())}};
}

inline DensityMatrix state_from_json(const json& j) {
    const std::size_t d = j.at("dim").get<std::size_t>();
    ComplexMatrix m = matrix_from_json(j.at("matrix"), d, d);
    DensityMatrix validated(m);  // rejects genuinely invalid input
    (void)validated;
    // Keep the stored bits; the eigenvalue-repair path would perturb them.
    return DensityMatrix::trusted(std::move(m));
}

inline json channel_to_json(const QuantumChannel& ch) {
    json kraus = json::array();
    for (const auto& k : ch.kraus()) kraus.push_back(matrix_to_json(k));
    return json{{"dim_in", ch.dim_in()}, {"dim_out", ch.dim_out()}, {"kraus", kraus}};
}

inline QuantumChannel channel_from_json(const json& j) {
    const std::size_t din = j.at("dim_in").get<std::size_t>();
    const std::size_t dout = j.at("dim_out").get<std::size_t>();
    std::vector<ComplexMatrix> ks;
    for (const auto& k : j.at("kraus")) ks.push_back(matrix_from_json(k, dout, din));
    return QuantumChannel(din, dout, std::move(ks));
}

inline json cq_to_json(const CqChannel& cq) {
    json outs = json::array();
    for (const auto& s : cq.outputs()) outs.push_back(state_to_json(s));
    return json{{"type", "cq"}, {"outputs", outs}};
}

inline CqChannel cq_from_json(const json& j) {
    std::vector<DensityMatrix> outs;
    for (const auto& s : j.at("outputs")) outs.push_back(state_from_json(s));
    return CqChannel(std::move(outs));
}

/// Channel files carry either the plain Kraus schema or one of the typed
/// family forms; the type unlocks the matching collapse rules downstream.
inline TypedChannel typed_channel_from_json(const json& j) {
    const std::string type = j.contains("type") ? j.at("type").get<std::string>() : "kraus";
    if (type == "kraus") return TypedChannel::plain(channel_from_json(j));
    if (type == "cq") return TypedChannel::from_cq(cq_from_json(j));
    if (type == "replacer")
        return TypedChannel::from_replacer(state_from_json(j.at("tau")),
                                           j.at("dim_in").get<std::size_t>());
    if (type == "erasure")
        return TypedChannel::erasure(j.at("p").get<double>(), j.at("dim").get<std::size_t>());
    if (type == "dephasing") {
        std::vector<double> p = j.at("probs").get<std::vector<double>>();
        return TypedChannel::dephasing(p, p.size());
    }
    if (type == "gad") {
        TypedChannel t = TypedChannel::from_env(
            env_form_gad(j.at("eta").get<double>(), j.at("p").get<double>()));
        return t;
    }
    throw Unsupported("typed_channel_from_json: unknown channel type '" + type + "'");
}

inline json strategy_to_json(const AdaptiveStrategy& s) {
    json j{{"rounds", s.rounds}, {"memory_dims", s.memory_dims},
           {"initial_state", state_to_json(s.initial_state)}};
    json adaptors = json::array();
    for (const auto& a : s.adaptors) adaptors.push_back(channel_to_json(a));
    j["adaptors"] = adaptors;
    if (s.measurement) {
        j["measurement"] = json{{"dim", s.measurement->dim()},
                                {"matrix", matrix_to_json(s.measurement->matrix())}};
    }
    return j;
}

inline AdaptiveStrategy strategy_from_json(const json& j) {
    AdaptiveStrategy s;
    s.rounds = j.at("rounds").get<std::size_t>();
    s.memory_dims = j.at("memory_dims").get<std::vector<std::size_t>>();
    s.initial_state = state_from_json(j.at("initial_state"));
    for (const auto& a : j.at("adaptors")) s.adaptors.push_back(channel_from_json(a));
    if (j.contains("measurement")) {
        const std::size_t d = j.at("measurement").at("dim").get<std::size_t>();
        s.measurement = HermitianOperator(matrix_from_json(j.at("measurement").at("matrix"), d, d));
    }
    return s;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace qcd
