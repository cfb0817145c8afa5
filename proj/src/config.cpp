#include "srgcert/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "srgcert/errors.hpp"

namespace srgcert {

using nlohmann::json;

namespace {

/// Reads the members of one JSON object and rejects anything it did not read.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw SchemaError(path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    double number(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number()) throw SchemaError(where(key) + ": expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw SchemaError(where(key) + ": must be finite");
        return d;
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    long long integer(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number_integer()) throw SchemaError(where(key) + ": expected an integer");
        return v.get<long long>();
    }
    long long integer(const std::string& key, long long fallback) { return has(key) ? integer(key) : fallback; }

    std::string string(const std::string& key) {
        const json& v = at(key);
        if (!v.is_string()) throw SchemaError(where(key) + ": expected a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& key, const std::string& fallback) { return has(key) ? string(key) : fallback; }

    const json& array(const std::string& key) {
        const json& v = at(key);
        if (!v.is_array()) throw SchemaError(where(key) + ": expected an array");
        return v;
    }

    const json& object(const std::string& key) {
        const json& v = at(key);
        if (!v.is_object()) throw SchemaError(where(key) + ": expected an object");
        return v;
    }

    std::string where(const std::string& key) const { return path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw SchemaError(where(it.key()) + ": unknown key");
    }

private:
    const json& at(const std::string& key) {
        if (!j_.contains(key)) throw SchemaError(where(key) + ": missing");
        seen_.insert(key);
        return j_.at(key);
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

int node_id(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw SchemaError(path + ": expected an integer node id");
    return v.get<int>();
}

std::size_t positive_count(long long v, const std::string& path, long long min) {
    if (v < min) throw SchemaError(path + ": must be >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
}

ConverterConfig parse_converter(const json& j, const std::string& path, double omega0) {
    ObjectReader r(j, path);
    ConverterConfig c;
    c.name = r.string("name", "");
    c.placement.node = static_cast<int>(r.integer("node"));
    try {
        c.placement.kind = converter_kind_from_string(r.string("kind"));
    } catch (const std::invalid_argument& e) {
        throw SchemaError(r.where("kind") + ": " + e.what());
    }
    c.placement.theta = r.number("theta", 0.0);
    c.placement.bound_radius = r.number("bound", 1.0);
    if (!(c.placement.bound_radius > 0.0)) throw SchemaError(r.where("bound") + ": must be > 0");

    if (r.has("controller")) {
        ObjectReader k(r.object("controller"), r.where("controller"));
        auto& p = c.controller;
        p.k_ccp = k.number("k_ccp", 0.0);
        p.k_cci = k.number("k_cci", 0.0);
        p.k_pcp = k.number("k_pcp", 0.0);
        p.k_pci = k.number("k_pci", 0.0);
        p.k_vcp = k.number("k_vcp", 0.0);
        p.k_vci = k.number("k_vci", 0.0);
        p.k_pllp = k.number("k_pllp", 0.0);
        p.k_plli = k.number("k_plli", 0.0);
        p.j = k.number("j", 0.0);
        p.d = k.number("d", 0.0);
        k.finish();
    }
    c.filter.omega0 = omega0;
    if (r.has("filter")) {
        ObjectReader f(r.object("filter"), r.where("filter"));
        c.filter.r_f = f.number("r_f", 0.0);
        c.filter.l_f = f.number("l_f");
        c.filter.c_f = f.number("c_f", 0.0);
        f.finish();
    } else if (c.placement.kind != ConverterKind::identity) {
        throw SchemaError(r.where("filter") + ": missing");
    }
    if (r.has("series")) {
        ObjectReader s(r.object("series"), r.where("series"));
        c.series.alpha = s.number("alpha");
        c.series.order = static_cast<int>(s.integer("order"));
        if (c.series.order < 0) throw SchemaError(s.where("order") + ": must be >= 0");
        s.finish();
    }
    if (r.has("setpoint")) {
        ObjectReader s(r.object("setpoint"), r.where("setpoint"));
        const bool power = s.has("p") || s.has("q");
        const bool current = s.has("i_d0") || s.has("i_q0");
        if (power == current) throw SchemaError(r.where("setpoint") + ": give either (p, q) or (i_d0, i_q0)");
        if (power) {
            const double p = s.number("p");
            const double q = s.number("q");
            c.setpoint = setpoint_to_currents(p, q);
            c.setpoint_as_power = true;
        } else {
            c.setpoint.i_d0 = s.number("i_d0");
            c.setpoint.i_q0 = s.number("i_q0");
        }
        c.setpoint.v_d0 = s.number("v_d0", 1.0);
        s.finish();
    }
    r.finish();

    try {
        if (c.placement.kind != ConverterKind::identity) {
            validate(c.controller, c.placement.kind);
            validate(c.filter);
        }
    } catch (const std::invalid_argument& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return c;
}

} // namespace

StudyConfig parse_config(const json& j) {
    ObjectReader root(j, "$");
    const long long schema = root.integer("schema");
    if (schema != kSchemaVersion) throw SchemaError("$.schema: unsupported version " + std::to_string(schema));
    StudyConfig cfg;
    cfg.description = root.string("description", "");

    {
        ObjectReader n(root.object("network"), "$.network");
        cfg.network.omega0 = n.number("omega0", kNominalOmega);
        const json& nodes = n.array("nodes");
        for (std::size_t i = 0; i < nodes.size(); ++i)
            cfg.network.nodes.push_back(node_id(nodes[i], n.where("nodes") + "[" + std::to_string(i) + "]"));
        if (n.has("grounded")) {
            const json& g = n.array("grounded");
            for (std::size_t i = 0; i < g.size(); ++i)
                cfg.network.grounded.push_back(node_id(g[i], n.where("grounded") + "[" + std::to_string(i) + "]"));
        }
        if (n.has("lines")) {
            const json& lines = n.array("lines");
            for (std::size_t i = 0; i < lines.size(); ++i) {
                ObjectReader l(lines[i], n.where("lines") + "[" + std::to_string(i) + "]");
                LineSpec ls;
                ls.from = static_cast<int>(l.integer("from"));
                ls.to = static_cast<int>(l.integer("to"));
                ls.r = l.number("r");
                ls.x = l.number("x");
                l.finish();
                cfg.network.lines.push_back(ls);
            }
        }
        if (n.has("shunts")) {
            const json& shunts = n.array("shunts");
            for (std::size_t i = 0; i < shunts.size(); ++i) {
                ObjectReader s(shunts[i], n.where("shunts") + "[" + std::to_string(i) + "]");
                ShuntSpec ss;
                ss.node = static_cast<int>(s.integer("node"));
                ss.r = s.number("r");
                ss.x = s.number("x");
                s.string("label", "");
                s.finish();
                cfg.network.shunts.push_back(ss);
            }
        }
        n.finish();
    }

    const json& convs = root.array("converters");
    if (convs.empty()) throw SchemaError("$.converters: at least one converter is required");
    for (std::size_t i = 0; i < convs.size(); ++i) {
        cfg.converters.push_back(
            parse_converter(convs[i], "$.converters[" + std::to_string(i) + "]", cfg.network.omega0));
        cfg.network.converter_nodes.push_back(cfg.converters.back().placement.node);
    }

    if (root.has("frequency")) {
        ObjectReader f(root.object("frequency"), "$.frequency");
        auto& fr = cfg.frequency;
        fr.start = f.number("start", fr.start);
        fr.stop = f.number("stop", fr.stop);
        fr.count = positive_count(f.integer("count", static_cast<long long>(fr.count)), f.where("count"), 2);
        const std::string unit = f.string("unit", "rad/s");
        if (unit == "hz" || unit == "Hz")
            fr.hz = true;
        else if (unit != "rad/s")
            throw SchemaError(f.where("unit") + ": expected 'rad/s' or 'hz'");
        const std::string spacing = f.string("spacing", "log");
        if (spacing == "linear")
            fr.linear = true;
        else if (spacing != "log")
            throw SchemaError(f.where("spacing") + ": expected 'log' or 'linear'");
        if (!(fr.start > 0.0) || !(fr.stop > fr.start)) throw SchemaError("$.frequency: need 0 < start < stop");
        f.finish();
    }

    if (root.has("analysis")) {
        ObjectReader a(root.object("analysis"), "$.analysis");
        auto& an = cfg.analysis;
        an.q = static_cast<int>(positive_count(a.integer("q", an.q), a.where("q"), 8));
        an.sweep_resolution =
            static_cast<int>(positive_count(a.integer("sweep_resolution", an.sweep_resolution), a.where("sweep_resolution"), 1));
        an.region_resolution = static_cast<int>(
            positive_count(a.integer("region_resolution", an.region_resolution), a.where("region_resolution"), 2));
        if (a.has("oracle")) {
            ObjectReader o(a.object("oracle"), a.where("oracle"));
            an.oracle_start = o.number("start", an.oracle_start);
            an.oracle_stop = o.number("stop", an.oracle_stop);
            an.oracle_count = positive_count(o.integer("count", static_cast<long long>(an.oracle_count)), o.where("count"), 2);
            if (!(an.oracle_start > 0.0) || !(an.oracle_stop > an.oracle_start))
                throw SchemaError(a.where("oracle") + ": need 0 < start < stop");
            o.finish();
        }
        a.finish();
    }
    root.finish();

    try {
        validate(cfg.network);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("$.network: ") + e.what());
    }
    return cfg;
}

StudyConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const StudyConfig& cfg) {
    json j;
    j["schema"] = kSchemaVersion;
    if (!cfg.description.empty()) j["description"] = cfg.description;

    json n;
    n["omega0"] = cfg.network.omega0;
    n["nodes"] = cfg.network.nodes;
    n["grounded"] = cfg.network.grounded;
    n["lines"] = json::array();
    for (const auto& l : cfg.network.lines) n["lines"].push_back({{"from", l.from}, {"to", l.to}, {"r", l.r}, {"x", l.x}});
    n["shunts"] = json::array();
    for (const auto& s : cfg.network.shunts) n["shunts"].push_back({{"node", s.node}, {"r", s.r}, {"x", s.x}});
    j["network"] = n;

    j["converters"] = json::array();
    for (const auto& c : cfg.converters) {
        json cj;
        if (!c.name.empty()) cj["name"] = c.name;
        cj["node"] = c.placement.node;
        cj["kind"] = to_string(c.placement.kind);
        cj["theta"] = c.placement.theta;
        cj["bound"] = c.placement.bound_radius;
        const auto& p = c.controller;
        cj["controller"] = {{"k_ccp", p.k_ccp}, {"k_cci", p.k_cci}, {"k_pcp", p.k_pcp},   {"k_pci", p.k_pci},
                            {"k_vcp", p.k_vcp}, {"k_vci", p.k_vci}, {"k_pllp", p.k_pllp}, {"k_plli", p.k_plli},
                            {"j", p.j},         {"d", p.d}};
        if (c.placement.kind != ConverterKind::identity)
            cj["filter"] = {{"r_f", c.filter.r_f}, {"l_f", c.filter.l_f}, {"c_f", c.filter.c_f}};
        if (c.placement.kind == ConverterKind::gfm) cj["series"] = {{"alpha", c.series.alpha}, {"order", c.series.order}};
        if (c.setpoint_as_power) {
            double pp = 0.0, qq = 0.0;
            currents_to_setpoint(c.setpoint, pp, qq);
            cj["setpoint"] = {{"p", pp}, {"q", qq}, {"v_d0", c.setpoint.v_d0}};
        } else {
            cj["setpoint"] = {{"i_d0", c.setpoint.i_d0}, {"i_q0", c.setpoint.i_q0}, {"v_d0", c.setpoint.v_d0}};
        }
        j["converters"].push_back(cj);
    }

    j["frequency"] = {{"start", cfg.frequency.start},
                      {"stop", cfg.frequency.stop},
                      {"count", cfg.frequency.count},
                      {"unit", cfg.frequency.hz ? "hz" : "rad/s"},
                      {"spacing", cfg.frequency.linear ? "linear" : "log"}};
    j["analysis"] = {{"q", cfg.analysis.q},
                     {"sweep_resolution", cfg.analysis.sweep_resolution},
                     {"region_resolution", cfg.analysis.region_resolution},
                     {"oracle",
                      {{"start", cfg.analysis.oracle_start},
                       {"stop", cfg.analysis.oracle_stop},
                       {"count", cfg.analysis.oracle_count}}}};
    return j;
}

} // namespace srgcert
