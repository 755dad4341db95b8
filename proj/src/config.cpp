#include "fraclab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fraclab/error.hpp"

namespace fraclab {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"domain", {"dimension", "shape", "lo", "hi", "center", "radius", "boxes", "h", "cells", "refine"}},
        {"load", {"kind", "value", "lo", "hi", "center", "radius"}},
        {"solver", {"s", "grad_tol", "energy_tol", "max_iterations", "method", "tie_floor"}},
        {"sweep", {"p"}},
        {"output", {"dir", "gnuplot", "kernel_cache"}},
    };
    return keys;
}

// Numbers separated by commas and/or whitespace.
std::vector<double> numbers(const std::string& text) {
    std::string spaced(text);
    std::replace(spaced.begin(), spaced.end(), ',', ' ');
    std::vector<double> out;
    std::istringstream in(spaced);
    std::string item;
    while (in >> item) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ConfigError("expected a number in '" + text + "'");
        }
        if (used != item.size()) throw ConfigError("trailing text in '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::array<double, 2> point(const pt::ptree& sec, const std::string& key, int n, std::array<double, 2> fallback = {}) {
    const auto raw = sec.get_optional<std::string>(key);
    if (!raw) return fallback;
    const auto v = numbers(*raw);
    if (static_cast<int>(v.size()) != n) throw ConfigError(key + " needs " + std::to_string(n) + " coordinates");
    std::array<double, 2> out{};
    for (int d = 0; d < n; ++d) out[d] = v[d];
    return out;
}

template <class T>
T get(const pt::ptree& sec, const std::string& key, T fallback) {
    try {
        return sec.get<T>(key, fallback);
    } catch (const pt::ptree_bad_data&) {
        throw ConfigError("bad value for key '" + key + "'");
    }
}

std::string join(std::span<const double> v) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t k = 0; k < v.size(); ++k) out << (k ? ", " : "") << v[k];
    return out.str();
}

}  // namespace

void RunConfig::validate() const {
    domain.validate();
    if (refine < 1) throw ConfigError("refine must be at least 1");
    if (p_schedule.empty()) throw ConfigError("p schedule is empty");
    for (double p : p_schedule) {
        SolveConfig c = solver;
        c.p = p;
        c.validate(domain.dimension);
    }
    if (load.kind == LoadKind::Bump && !(load.radius > 0.0)) throw ConfigError("bump radius must be positive");
    if (!std::isfinite(load.value)) throw ConfigError("load value must be finite");
}

RunConfig parse_run_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    for (const auto& [name, sec] : tree) {
        if (sec.empty()) {
            if (name != "version") throw ConfigError("unknown top-level key '" + name + "'");
            continue;
        }
        const auto it = schema().find(name);
        if (it == schema().end()) throw ConfigError("unknown section [" + name + "]");
        for (const auto& [key, value] : sec)
            if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + name + "]");
    }
    const int version = get(tree, "version", 0);
    if (version != kConfigVersion)
        throw ConfigError("config version " + std::to_string(version) + " unsupported (expected " +
                          std::to_string(kConfigVersion) + ")");

    RunConfig cfg;
    const pt::ptree empty;
    const auto& dom = tree.get_child("domain", empty);
    const int n = get(dom, "dimension", 1);
    if (n != 1 && n != 2) throw ConfigError("dimension must be 1 or 2");
    const std::string shape = get<std::string>(dom, "shape", n == 1 ? "interval" : "box");
    const auto lo = point(dom, "lo", n), hi = point(dom, "hi", n);
    const double radius = get(dom, "radius", 0.0);
    const auto center = point(dom, "center", n);

    double h = get(dom, "h", 0.0);
    const int cells = get(dom, "cells", 0);
    if (cells > 0) {
        if (h > 0.0) throw ConfigError("give either h or cells, not both");
        // cells counts the lattice cells along the first axis of the bounding box.
        const double width = shape == "ball" ? 2.0 * radius : hi[0] - lo[0];
        h = width / cells;
    }
    if (shape == "interval") {
        cfg.domain = DomainSpec::interval(lo[0], hi[0], h);
    } else if (shape == "box") {
        cfg.domain = DomainSpec::box(lo, hi, h);
    } else if (shape == "ball") {
        cfg.domain = DomainSpec::ball(n, center, radius, h);
    } else if (shape == "union") {
        // boxes = x0 x1 [y0 y1]; ...
        std::vector<AxisBox> boxes;
        std::istringstream list(get<std::string>(dom, "boxes", ""));
        std::string item;
        while (std::getline(list, item, ';')) {
            std::istringstream coords(item);
            std::vector<double> v;
            double x = 0.0;
            while (coords >> x) v.push_back(x);
            if (static_cast<int>(v.size()) != 2 * n) throw ConfigError("each union box needs 2n numbers");
            AxisBox b;
            for (int d = 0; d < n; ++d) {
                b.lo[d] = v[2 * d];
                b.hi[d] = v[2 * d + 1];
            }
            boxes.push_back(b);
        }
        cfg.domain = DomainSpec::box_union(n, boxes, h);
    } else {
        throw ConfigError("unknown shape '" + shape + "'");
    }
    cfg.refine = get(dom, "refine", 4);

    const auto& load = tree.get_child("load", empty);
    const std::string kind = get<std::string>(load, "kind", "constant");
    cfg.load.value = get(load, "value", 1.0);
    if (kind == "constant") {
        cfg.load.kind = LoadKind::Constant;
    } else if (kind == "box") {
        cfg.load.kind = LoadKind::SubBox;
        cfg.load.box.lo = point(load, "lo", n);
        cfg.load.box.hi = point(load, "hi", n);
    } else if (kind == "bump") {
        cfg.load.kind = LoadKind::Bump;
        cfg.load.center = point(load, "center", n);
        cfg.load.radius = get(load, "radius", 1.0);
    } else {
        throw ConfigError("unknown load kind '" + kind + "'");
    }

    const auto& sol = tree.get_child("solver", empty);
    cfg.solver.s = get(sol, "s", 0.5);
    cfg.solver.grad_tol = get(sol, "grad_tol", 0.0);
    cfg.solver.energy_tol = get(sol, "energy_tol", 1e-12);
    cfg.solver.max_iterations = get(sol, "max_iterations", 50000);
    cfg.solver.tie_floor = get(sol, "tie_floor", 1e-10);
    const std::string method = get<std::string>(sol, "method", "newton");
    if (method == "newton") cfg.solver.method = SolverMethod::Newton;
    else if (method == "gradient") cfg.solver.method = SolverMethod::ProjectedGradient;
    else throw ConfigError("unknown solver method '" + method + "'");

    const auto& sweep = tree.get_child("sweep", empty);
    if (const auto p = sweep.get_optional<std::string>("p")) cfg.p_schedule = numbers(*p);

    const auto& out = tree.get_child("output", empty);
    cfg.output_dir = get<std::string>(out, "dir", ".");
    cfg.gnuplot = get(out, "gnuplot", false);
    cfg.kernel_cache = get<std::string>(out, "kernel_cache", "");

    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str());
}

std::string to_ini(const RunConfig& cfg) {
    const int n = cfg.domain.dimension;
    auto pt2 = [n](std::array<double, 2> v) { return join(std::span<const double>(v.data(), static_cast<std::size_t>(n))); };
    std::ostringstream out;
    out.precision(17);
    out << "version = " << kConfigVersion << "\n\n[domain]\n";
    out << "dimension = " << n << "\n";
    const auto& d = cfg.domain;
    switch (d.shape) {
        case ShapeKind::Interval:
        case ShapeKind::Box:
            out << "shape = " << (d.shape == ShapeKind::Interval ? "interval" : "box") << "\n";
            out << "lo = " << pt2(d.boxes.front().lo) << "\nhi = " << pt2(d.boxes.front().hi) << "\n";
            break;
        case ShapeKind::Ball:
            out << "shape = ball\ncenter = " << pt2(d.center) << "\nradius = " << d.radius << "\n";
            break;
        case ShapeKind::BoxUnion: {
            out << "shape = union\nboxes = ";
            for (std::size_t k = 0; k < d.boxes.size(); ++k) {
                out << (k ? "; " : "");
                for (int a = 0; a < n; ++a) out << (a ? " " : "") << d.boxes[k].lo[a] << " " << d.boxes[k].hi[a];
            }
            out << "\n";
            break;
        }
    }
    out << "h = " << d.h << "\nrefine = " << cfg.refine << "\n\n[load]\n";
    switch (cfg.load.kind) {
        case LoadKind::Constant: out << "kind = constant\n"; break;
        case LoadKind::SubBox:
            out << "kind = box\nlo = " << pt2(cfg.load.box.lo) << "\nhi = " << pt2(cfg.load.box.hi) << "\n";
            break;
        case LoadKind::Bump:
            out << "kind = bump\ncenter = " << pt2(cfg.load.center) << "\nradius = " << cfg.load.radius << "\n";
            break;
    }
    out << "value = " << cfg.load.value << "\n\n[solver]\n";
    out << "s = " << cfg.solver.s << "\ngrad_tol = " << cfg.solver.grad_tol << "\nenergy_tol = " << cfg.solver.energy_tol
        << "\nmax_iterations = " << cfg.solver.max_iterations << "\nmethod = "
        << (cfg.solver.method == SolverMethod::Newton ? "newton" : "gradient") << "\ntie_floor = " << cfg.solver.tie_floor
        << "\n\n[sweep]\np = " << join(cfg.p_schedule) << "\n\n[output]\ndir = " << cfg.output_dir
        << "\ngnuplot = " << (cfg.gnuplot ? "true" : "false") << "\n";
    if (!cfg.kernel_cache.empty()) out << "kernel_cache = " << cfg.kernel_cache << "\n";
    return out.str();
}

}  // namespace fraclab
