#include "family_config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <variant>

#include "atomgraph/error.hpp"
#include "atomgraph/models.hpp"
#include "toml_subset.hpp"

namespace atomgraph::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { fail(Errc::invalid_argument, what); }

class ExprParser {
  public:
    ExprParser(const std::string& s, std::size_t arity) : s_(s), arity_(arity) {}

    KernelFunction run() {
        KernelFunction k = sum();
        skip();
        if (i_ != s_.size()) bad("kernel expression: unexpected '" + s_.substr(i_) + "'");
        return k;
    }

  private:
    using Arg = std::variant<double, KernelFunction>;
    const std::string& s_;
    std::size_t arity_;
    std::size_t i_ = 0;

    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool accept(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }

    KernelFunction sum() {
        std::vector<KernelFunction> terms{as_kernel(term())};
        while (accept('+')) terms.push_back(as_kernel(term()));
        return terms.size() == 1 ? terms[0] : KernelFunction::sum(terms);
    }

    KernelFunction as_kernel(const Arg& a) {
        if (const auto* d = std::get_if<double>(&a)) return KernelFunction::constant(arity_, *d);
        return std::get<KernelFunction>(a);
    }

    double number() {
        skip();
        double v = 0;
        const char* b = s_.data() + i_;
        const auto r = std::from_chars(b, s_.data() + s_.size(), v);
        if (r.ec != std::errc()) bad("kernel expression: expected a number at '" + s_.substr(i_) + "'");
        i_ += static_cast<std::size_t>(r.ptr - b);
        return v;
    }

    Arg term() {
        skip();
        if (i_ < s_.size() && !std::isalpha(static_cast<unsigned char>(s_[i_]))) return number();
        std::string name;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) name += s_[i_++];
        if (!accept('(')) bad("kernel expression: expected '(' after " + name);
        std::vector<Arg> args;
        if (!accept(')')) {
            do {
                skip();
                if (i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_])))
                    args.emplace_back(sum());
                else
                    args.emplace_back(number());
            } while (accept(','));
            if (!accept(')')) bad("kernel expression: expected ')' in " + name);
        }
        auto num = [&](std::size_t k) {
            if (k >= args.size() || !std::holds_alternative<double>(args[k]))
                bad("kernel expression: " + name + " argument " + std::to_string(k + 1) + " must be a number");
            return std::get<double>(args[k]);
        };
        auto count = [&](std::size_t want) {
            if (args.size() != want) bad("kernel expression: " + name + " takes " + std::to_string(want) + " arguments");
        };
        if (name == "const") {
            count(1);
            return KernelFunction::constant(arity_, num(0));
        }
        if (name == "rank1") {
            count(2);
            return KernelFunction::rank_one(arity_, num(0), num(1));
        }
        if (name == "pairdist") {
            count(2);
            return KernelFunction::pair_distance(arity_, num(0), num(1));
        }
        if (name == "rank1w") {
            if (args.size() < 2) bad("kernel expression: rank1w needs a coefficient and weights");
            std::vector<double> w;
            for (std::size_t k = 1; k < args.size(); ++k) w.push_back(num(k));
            return KernelFunction::rank_one_per_type(arity_, num(0), std::move(w));
        }
        if (name == "table") {
            if (args.empty()) bad("kernel expression: table needs a type count");
            const double k = num(0);
            if (k < 1 || k != std::floor(k)) bad("kernel expression: table type count must be a positive integer");
            std::vector<double> v;
            for (std::size_t j = 1; j < args.size(); ++j) v.push_back(num(j));
            return KernelFunction::block_table(arity_, static_cast<std::size_t>(k), std::move(v));
        }
        if (name == "cap") {
            count(2);
            return KernelFunction::capped(as_kernel(args[0]), num(1));
        }
        bad("kernel expression: unknown function '" + name + "'");
    }
};

void check_keys(const json& t, const std::set<std::string>& allowed, const std::string& where) {
    if (!t.is_object()) bad(where + " must be a table");
    for (const auto& [k, v] : t.items())
        if (!allowed.count(k)) bad("unknown key '" + k + "' in " + where);
}

double get_number(const json& t, const std::string& key, const std::string& where) {
    const auto& v = t.at(key);
    if (!v.is_number()) bad(where + "." + key + " must be a number");
    return v.get<double>();
}

std::size_t get_count(const json& t, const std::string& key, const std::string& where) {
    const auto& v = t.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) bad(where + "." + key + " must be a nonnegative integer");
    return v.get<std::size_t>();
}

TypeSpace space_from(const json& t) {
    check_keys(t, {"kind", "weights", "nodes", "theta", "stratify"}, "[space]");
    if (!t.contains("kind") || !t["kind"].is_string()) bad("[space].kind must be \"finite\" or \"unit_interval\"");
    const std::string kind = t["kind"];
    if (kind == "finite") {
        if (!t.contains("weights") || !t["weights"].is_array()) bad("[space].weights must be an array");
        for (const char* k : {"nodes", "theta", "stratify"})
            if (t.contains(k)) bad(std::string("[space].") + k + " applies to the unit interval only");
        std::vector<double> w;
        for (const auto& x : t["weights"]) {
            if (!x.is_number()) bad("[space].weights must be numbers");
            w.push_back(x.get<double>());
        }
        return TypeSpace::finite(std::move(w));
    }
    if (kind == "unit_interval") {
        if (t.contains("weights")) bad("[space].weights applies to finite spaces only");
        if (t.contains("theta") && t.contains("stratify")) bad("[space] takes theta or stratify, not both");
        const std::size_t nodes = t.contains("nodes") ? get_count(t, "nodes", "[space]") : 2048;
        double theta = 1.0;
        if (t.contains("theta")) theta = get_number(t, "theta", "[space]");
        if (t.contains("stratify")) theta = TypeSpace::stratification_for(get_number(t, "stratify", "[space]"));
        return TypeSpace::unit_interval(nodes, theta);
    }
    bad("[space].kind must be \"finite\" or \"unit_interval\"");
}

Shape shape_from(const json& a) {
    if (a.contains("shape")) {
        if (a.contains("order") || a.contains("edges")) bad("[[atom]] takes shape or order/edges, not both");
        if (!a["shape"].is_string()) bad("[[atom]].shape must be a string");
        return parse_shape_name(a["shape"]);
    }
    if (!a.contains("order") || !a.contains("edges")) bad("[[atom]] needs shape, or order and edges");
    const std::size_t r = get_count(a, "order", "[[atom]]");
    std::vector<Shape::Edge> edges;
    if (!a["edges"].is_array()) bad("[[atom]].edges must be an array of [u, v] pairs");
    for (const auto& e : a["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            bad("[[atom]].edges must be an array of [u, v] pairs");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return Shape(r, edges);
}

}  // namespace

KernelFunction parse_kernel(const std::string& expr, std::size_t arity) { return ExprParser(expr, arity).run(); }

Shape parse_shape_name(const std::string& name) {
    if (name.size() < 2) bad("unknown shape '" + name + "'");
    std::size_t k = 0;
    const auto r = std::from_chars(name.data() + 1, name.data() + name.size(), k);
    if (r.ec != std::errc() || r.ptr != name.data() + name.size()) bad("unknown shape '" + name + "'");
    switch (name[0]) {
        case 'K': return Shape::complete(k);
        case 'P': return Shape::path(k);
        case 'S': return Shape::star(k);
        case 'C': return Shape::cycle(k);
        case 'E': return Shape::empty(k);
        default: bad("unknown shape '" + name + "'");
    }
}

KernelFamily builtin_family(const std::string& name, const std::map<std::string, double>& params) {
    auto take = [&](std::set<std::string> allowed) {
        for (const auto& [k, v] : params)
            if (!allowed.count(k)) bad("model " + name + " has no parameter '" + k + "'");
    };
    auto get = [&](const std::string& k, double dflt) {
        const auto it = params.find(k);
        return it == params.end() ? dflt : it->second;
    };
    auto required = [&](const std::string& k) {
        const auto it = params.find(k);
        if (it == params.end()) bad("model " + name + " needs parameter '" + k + "'");
        return it->second;
    };
    if (name == "constant") {
        std::vector<std::pair<std::size_t, double>> cliques;
        for (const auto& [k, v] : params) {
            std::size_t r = 0;
            const auto res = std::from_chars(k.data() + 1, k.data() + k.size(), r);
            if (k.size() < 2 || k[0] != 'c' || res.ec != std::errc() || res.ptr != k.data() + k.size())
                bad("model constant has no parameter '" + k + "' (use c2, c3, ...)");
            cliques.emplace_back(r, v);
        }
        if (cliques.empty()) bad("model constant needs at least one clique constant c2, c3, ...");
        return constant_family(cliques).family();
    }
    if (name == "powerlaw") {
        take({"A", "B", "alpha", "nodes"});
        const double nodes = get("nodes", 2048);
        if (nodes < 1 || nodes != std::floor(nodes)) bad("model powerlaw: nodes must be a positive integer");
        return powerlaw_family({get("A", 0.0), get("B", 0.0), required("alpha")}, static_cast<std::size_t>(nodes));
    }
    if (name == "twoblock") {
        take({"A", "p"});
        return two_block({required("A"), required("p")});
    }
    if (name == "badp2") {
        take({"eps"});
        return badP2_family(required("eps"));
    }
    bad("unknown model '" + name + "' (constant, powerlaw, twoblock, badp2)");
}

KernelFamily family_from_config(const json& config) {
    check_keys(config, {"space", "atom", "series", "generalized", "model"}, "config");
    if (config.contains("model")) {
        if (config.size() != 1) bad("a [model] config takes no other tables");
        const auto& m = config["model"];
        if (!m.is_object() || !m.contains("name") || !m["name"].is_string()) bad("[model].name must be a string");
        std::map<std::string, double> params;
        for (const auto& [k, v] : m.items()) {
            if (k == "name") continue;
            if (!v.is_number()) bad("[model]." + k + " must be a number");
            params[k] = v.get<double>();
        }
        return builtin_family(m["name"], params);
    }
    if (!config.contains("space")) bad("config needs a [space] table");
    auto space = std::make_shared<const TypeSpace>(space_from(config["space"]));
    std::vector<AtomEntry> entries;
    if (config.contains("atom")) {
        if (!config["atom"].is_array()) bad("atoms must be given as [[atom]] tables");
        for (const auto& a : config["atom"]) {
            check_keys(a, {"shape", "order", "edges", "kernel"}, "[[atom]]");
            Shape s = shape_from(a);
            if (!a.contains("kernel") || !a["kernel"].is_string()) bad("[[atom]].kernel must be an expression string");
            KernelFunction k = parse_kernel(a["kernel"], s.order());
            entries.push_back({std::move(s), std::move(k)});
        }
    }
    std::optional<CliqueSeries> series;
    if (config.contains("series")) {
        const auto& t = config["series"];
        check_keys(t, {"scale", "exponent", "min_arity", "max_arity", "cap"}, "[series]");
        CliqueSeries cs;
        if (t.contains("scale")) cs.scale = get_number(t, "scale", "[series]");
        if (t.contains("exponent")) cs.exponent = get_number(t, "exponent", "[series]");
        if (t.contains("min_arity")) cs.min_arity = get_count(t, "min_arity", "[series]");
        if (t.contains("max_arity")) cs.max_arity = get_count(t, "max_arity", "[series]");
        if (t.contains("cap")) cs.cap = get_number(t, "cap", "[series]");
        series = cs;
    }
    bool generalized = false;
    if (config.contains("generalized")) {
        if (!config["generalized"].is_boolean()) bad("generalized must be true or false");
        generalized = config["generalized"];
    }
    if (generalized) {
        if (series) bad("a clique series cannot be combined with generalized = true");
        return KernelFamily::make_generalized(space, std::move(entries));
    }
    return KernelFamily(space, std::move(entries), series);
}

KernelFamily family_from_toml(const std::string& text) { return family_from_config(parse_toml(text)); }

}  // namespace atomgraph::cli
