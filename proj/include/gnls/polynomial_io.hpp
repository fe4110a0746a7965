#pragma once

// JSON form of a GaugePolynomial:
//   {"n": N, "terms": [{"alpha": [...], "beta": [...], "coeff": c}, ...]}
// or a preset reference {"preset": "manakov", "n": N} / {"preset": "spinor", "a": a, "b": b}.

#include "gnls/error.hpp"
#include "gnls/polynomial.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <string>

namespace gnls {

using json = nlohmann::json;

namespace jsonutil {

inline void reject_unknown(const json& obj, const std::string& ptr, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ParseError(ptr.empty() ? "/" : ptr, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ParseError(ptr + "/" + key, "unknown key");
    }
}

inline const json& require(const json& obj, const std::string& ptr, const char* key) {
    if (!obj.is_object()) throw ParseError(ptr.empty() ? "/" : ptr, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(ptr + "/" + key, "missing required key");
    return *it;
}

inline double number(const json& v, const std::string& ptr) {
    if (!v.is_number()) throw ParseError(ptr, "expected a number");
    return v.get<double>();
}

inline long long integer(const json& v, const std::string& ptr) {
    if (!v.is_number_integer()) throw ParseError(ptr, "expected an integer");
    return v.get<long long>();
}

inline std::string string(const json& v, const std::string& ptr) {
    if (!v.is_string()) throw ParseError(ptr, "expected a string");
    return v.get<std::string>();
}

inline bool boolean(const json& v, const std::string& ptr) {
    if (!v.is_boolean()) throw ParseError(ptr, "expected a boolean");
    return v.get<bool>();
}

inline std::vector<int> int_vector(const json& v, const std::string& ptr) {
    if (!v.is_array()) throw ParseError(ptr, "expected an array");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(static_cast<int>(integer(v[i], ptr + "/" + std::to_string(i))));
    return out;
}

} // namespace jsonutil

inline json polynomial_to_json(const GaugePolynomial& g) {
    json terms = json::array();
    for (const auto& [pair, c] : g.terms()) terms.push_back({{"alpha", pair.alpha}, {"beta", pair.beta}, {"coeff", c}});
    return {{"n", g.n_components()}, {"terms", terms}};
}

/// Parse an inline table. Mirror pairs may be listed once (the mirror is implied) or twice with
/// identical coefficients; differing coefficients violate realness.
inline GaugePolynomial polynomial_from_table(const json& j, const std::string& ptr = "") {
    jsonutil::reject_unknown(j, ptr, {"n", "terms"});
    const long long n = jsonutil::integer(jsonutil::require(j, ptr, "n"), ptr + "/n");
    if (n < 1 || n > kMaxComponents) throw ParseError(ptr + "/n", "component count out of range");
    const json& terms = jsonutil::require(j, ptr, "terms");
    if (!terms.is_array()) throw ParseError(ptr + "/terms", "expected an array");

    std::map<MultiIndexPair, std::map<MultiIndexPair, double>> classes;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string tp = ptr + "/terms/" + std::to_string(i);
        jsonutil::reject_unknown(terms[i], tp, {"alpha", "beta", "coeff"});
        MultiIndexPair p{jsonutil::int_vector(jsonutil::require(terms[i], tp, "alpha"), tp + "/alpha"),
                         jsonutil::int_vector(jsonutil::require(terms[i], tp, "beta"), tp + "/beta")};
        const double c = jsonutil::number(jsonutil::require(terms[i], tp, "coeff"), tp + "/coeff");
        try {
            p.validate(static_cast<int>(n));
        } catch (const ArgumentError& e) {
            throw ParseError(tp, e.what());
        }
        auto& cls = classes[GaugePolynomial::canonical(p)];
        if (cls.count(p)) throw ParseError(tp, "duplicate monomial");
        cls[p] = c;
    }
    GaugePolynomial g(static_cast<int>(n));
    for (const auto& [key, members] : classes) {
        const double c = members.begin()->second;
        for (const auto& [_, other] : members)
            if (other != c) throw ParseError(ptr + "/terms", "mirror monomials carry different coefficients (g must be real)");
        g.add_term(key, c);
    }
    return g;
}

/// Accepts either a preset reference or an inline table.
inline GaugePolynomial polynomial_from_json(const json& j, const std::string& ptr = "") {
    if (!j.is_object()) throw ParseError(ptr.empty() ? "/" : ptr, "expected an object");
    if (!j.contains("preset")) return polynomial_from_table(j, ptr);
    const std::string name = jsonutil::string(j["preset"], ptr + "/preset");
    if (name == "manakov") {
        jsonutil::reject_unknown(j, ptr, {"preset", "n"});
        const long long n = jsonutil::integer(jsonutil::require(j, ptr, "n"), ptr + "/n");
        if (n < 1 || n > kMaxComponents) throw ValidationError(ptr + "/n: component count out of range");
        return presets::manakov(static_cast<int>(n));
    }
    if (name == "spinor") {
        jsonutil::reject_unknown(j, ptr, {"preset", "n", "a", "b"});
        if (j.contains("n") && jsonutil::integer(j["n"], ptr + "/n") != 3)
            throw ValidationError(ptr + "/n: the spinor preset is defined for N = 3 only");
        return presets::spinor(jsonutil::number(jsonutil::require(j, ptr, "a"), ptr + "/a"),
                               jsonutil::number(jsonutil::require(j, ptr, "b"), ptr + "/b"));
    }
    throw ParseError(ptr + "/preset", "unknown preset '" + name + "'");
}

inline GaugePolynomial load_polynomial_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open polynomial file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("", std::string("malformed JSON in ") + path + ": " + e.what());
    }
    return polynomial_from_json(j);
}

} // namespace gnls
