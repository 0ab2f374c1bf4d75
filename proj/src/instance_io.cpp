#include "stochmatch/instance_io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "stochmatch/errors.hpp"

namespace stochmatch {

namespace {

using nlohmann::ordered_json;

void require_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                  const std::string& where) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ParseError(where + ": unknown field '" + item.key() + "'");
        }
    }
    for (const char* key : allowed) {
        if (!obj.contains(key)) {
            throw ParseError(where + ": missing field '" + key + "'");
        }
    }
}

Patience parse_patience(const ordered_json& value, const std::string& where) {
    if (value.is_string()) {
        if (value.get<std::string>() == "inf") return Patience::infinite();
        throw ParseError(where + ": patience must be a positive integer or \"inf\"");
    }
    if (value.is_number_integer()) {
        const auto t = value.get<long long>();
        if (t < 1 || t > std::numeric_limits<int>::max()) {
            throw ParseError(where + ": patience must be a positive integer or \"inf\"");
        }
        return Patience::finite(static_cast<int>(t));
    }
    throw ParseError(where + ": patience must be a positive integer or \"inf\"");
}

double parse_number(const ordered_json& value, const std::string& where) {
    if (!value.is_number()) {
        throw ParseError(where + ": expected a number");
    }
    return value.get<double>();
}

}  // namespace

StochasticGraph load_instance(std::istream& in, const std::string& source) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const ordered_json::parse_error& err) {
        throw ParseError(source + ": " + err.what());
    }
    if (!doc.is_object()) {
        throw ParseError(source + ": top level must be an object");
    }
    require_keys(doc, {"vertices", "edges"}, source);
    if (!doc["vertices"].is_array() || !doc["edges"].is_array()) {
        throw ParseError(source + ": 'vertices' and 'edges' must be arrays");
    }

    std::vector<Vertex> vertices;
    std::unordered_map<std::string, int> index_of;
    int i = 0;
    for (const ordered_json& jv : doc["vertices"]) {
        const std::string where = source + ": vertices[" + std::to_string(i) + "]";
        if (!jv.is_object()) throw ParseError(where + ": expected an object");
        require_keys(jv, {"id", "patience"}, where);
        if (!jv["id"].is_string()) throw ParseError(where + ": 'id' must be a string");
        Vertex v;
        v.name = jv["id"].get<std::string>();
        v.patience = parse_patience(jv["patience"], where);
        index_of.emplace(v.name, i);
        vertices.push_back(std::move(v));
        ++i;
    }

    std::vector<Edge> edges;
    i = 0;
    for (const ordered_json& je : doc["edges"]) {
        const std::string where = source + ": edges[" + std::to_string(i) + "]";
        if (!je.is_object()) throw ParseError(where + ": expected an object");
        require_keys(je, {"u", "v", "w", "p"}, where);
        if (!je["u"].is_string() || !je["v"].is_string()) {
            throw ParseError(where + ": 'u' and 'v' must be vertex id strings");
        }
        Edge e;
        const std::string u = je["u"].get<std::string>();
        const std::string v = je["v"].get<std::string>();
        const auto iu = index_of.find(u);
        const auto iv = index_of.find(v);
        if (iu == index_of.end()) throw ParseError(where + ": unknown vertex id '" + u + "'");
        if (iv == index_of.end()) throw ParseError(where + ": unknown vertex id '" + v + "'");
        e.u = iu->second;
        e.v = iv->second;
        e.weight = parse_number(je["w"], where + ".w");
        e.prob = parse_number(je["p"], where + ".p");
        edges.push_back(e);
        ++i;
    }

    try {
        return StochasticGraph(std::move(vertices), std::move(edges));
    } catch (const ValidationError& err) {
        throw ValidationError(source + ": " + err.what());
    }
}

StochasticGraph load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path + ": cannot open file");
    }
    return load_instance(in, path);
}

std::string format_instance(const StochasticGraph& g) {
    ordered_json doc;
    doc["vertices"] = ordered_json::array();
    for (const Vertex& v : g.vertices()) {
        ordered_json jv;
        jv["id"] = v.name;
        if (v.patience.is_infinite()) {
            jv["patience"] = "inf";
        } else {
            jv["patience"] = v.patience.value();
        }
        doc["vertices"].push_back(std::move(jv));
    }
    doc["edges"] = ordered_json::array();
    for (const Edge& e : g.edges()) {
        ordered_json je;
        je["u"] = g.vertex(e.u).name;
        je["v"] = g.vertex(e.v).name;
        je["w"] = e.weight;
        je["p"] = e.prob;
        doc["edges"].push_back(std::move(je));
    }
    return doc.dump(2) + "\n";
}

void save_instance_file(const StochasticGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError(path + ": cannot open file for writing");
    }
    out << format_instance(g);
}

}  // namespace stochmatch
